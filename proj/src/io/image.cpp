#include "layoutkit/io/image.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "layoutkit/log.hpp"

namespace layoutkit::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void read_png_gray(const std::string& path, int want_depth, int& width, int& height,
                   std::vector<std::uint8_t>& bytes) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw InputError("cannot open PNG: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw InputError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw InputError("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError("failed to decode PNG: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  int bit_depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (want_depth == 8 && bit_depth == 16) png_set_strip_16(png);
  if (want_depth == 16 && bit_depth == 16) png_set_swap(png);  // file is big-endian
  png_read_update_info(png, info);

  std::size_t rowbytes = png_get_rowbytes(png, info);
  bytes.resize(rowbytes * height);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = bytes.data() + rowbytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (want_depth == 16 && bit_depth != 16)
    throw InputError("expected 16-bit grayscale PNG: " + path);
}

void write_png_gray(const std::string& path, int width, int height, int bit_depth,
                    const std::uint8_t* bytes) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw InputError("cannot open PNG for writing: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw InputError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw InputError("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw InputError("failed to encode PNG: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);

  std::size_t rowbytes = static_cast<std::size_t>(width) * (bit_depth / 8);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y)
    rows[y] = const_cast<png_bytep>(bytes + rowbytes * y);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

DepthImage read_png16(const std::string& path) {
  int w, h;
  std::vector<std::uint8_t> bytes;
  read_png_gray(path, 16, w, h, bytes);
  DepthImage img(w, h);
  const std::uint16_t* src = reinterpret_cast<const std::uint16_t*>(bytes.data());
  img.data.assign(src, src + static_cast<std::size_t>(w) * h);
  return img;
}

void write_png16(const DepthImage& img, const std::string& path) {
  write_png_gray(path, img.width, img.height, 16,
                 reinterpret_cast<const std::uint8_t*>(img.data.data()));
}

LabelImage read_png8(const std::string& path) {
  int w, h;
  std::vector<std::uint8_t> bytes;
  read_png_gray(path, 8, w, h, bytes);
  LabelImage img(w, h);
  img.data.assign(bytes.begin(), bytes.begin() + static_cast<std::size_t>(w) * h);
  return img;
}

void write_png8(const LabelImage& img, const std::string& path) {
  write_png_gray(path, img.width, img.height, 8, img.data.data());
}

}  // namespace layoutkit::io
