#include "spm/image.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace spm {

std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::min(255.0, std::floor(y + 0.5)));
}

namespace {

// Reads the next PGM header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
      break;
    }
  }
  while ((c = in.get()) != EOF && !std::isspace(c) && c != '#') tok.push_back(static_cast<char>(c));
  if (c == '#') in.unget();
  return tok;
}

int parse_int(std::istream& in, const char* what) {
  std::string tok = next_token(in);
  if (tok.empty()) throw DecodeError(std::string("PGM: truncated header, missing ") + what);
  try {
    return std::stoi(tok);
  } catch (const std::exception&) {
    throw DecodeError(std::string("PGM: bad ") + what + " '" + tok + "'");
  }
}

}  // namespace

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());

  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || (m1 != '2' && m1 != '5'))
    throw FormatError("not a PGM file (expected P2 or P5): " + path.string());
  const bool binary = (m1 == '5');

  GrayImage img;
  img.width = parse_int(in, "width");
  img.height = parse_int(in, "height");
  int maxval = parse_int(in, "maxval");
  if (img.width < 1 || img.height < 1) throw DecodeError("PGM: non-positive dimensions");
  if (maxval < 1 || maxval > 255) throw FormatError("PGM: only 8-bit maxval supported");

  const std::size_t n = std::size_t(img.width) * img.height;
  img.data.resize(n);
  if (binary) {
    // Single whitespace byte separates maxval from raster data.
    in.read(reinterpret_cast<char*>(img.data.data()), std::streamsize(n));
    if (std::size_t(in.gcount()) != n) throw DecodeError("PGM: truncated pixel data");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      int v = parse_int(in, "pixel");
      if (v < 0 || v > maxval) throw DecodeError("PGM: pixel out of range");
      img.data[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

GrayImage load_png_gray(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.string().c_str(), "rb"),
                                                     &std::fclose);
  if (!fp) throw FormatError("cannot open " + path.string());

  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw FormatError("not a PNG file: " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw DecodeError("PNG: allocation failure");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DecodeError("PNG: allocation failure");
  }

  std::vector<std::uint8_t> raster;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("PNG: corrupt or truncated file: " + path.string());
  }

  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  // Normalize everything to 8-bit gray or RGB, drop alpha.
  png_set_strip_16(png);
  png_set_packing(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int width = int(png_get_image_width(png, info));
  const int height = int(png_get_image_height(png, info));
  const int channels = int(png_get_channels(png, info));
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("PNG: unexpected channel count after normalization");
  }

  raster.resize(std::size_t(width) * height * channels);
  rows.resize(height);
  for (int y = 0; y < height; ++y)
    rows[std::size_t(y)] = raster.data() + std::size_t(y) * width * channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  GrayImage img;
  img.width = width;
  img.height = height;
  img.data.resize(std::size_t(width) * height);
  if (channels == 1) {
    img.data.assign(raster.begin(), raster.end());
  } else {
    for (std::size_t i = 0; i < img.data.size(); ++i)
      img.data[i] = luma_bt601(raster[3 * i], raster[3 * i + 1], raster[3 * i + 2]);
  }
  return img;
}

GrayImage load_gray(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".pgm") return load_pgm(path);
  if (ext == ".png") return load_png_gray(path);
  throw FormatError("unsupported image format '" + ext + "': " + path.string());
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()), std::streamsize(img.data.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace spm
