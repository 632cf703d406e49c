#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace layoutkit::io {

template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;  // row-major

  Image() = default;
  Image(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}
  T& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  const T& at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

using DepthImage = Image<std::uint16_t>;  // millimeters, 0 = invalid
using LabelImage = Image<std::uint8_t>;   // SemanticClass ids

DepthImage read_png16(const std::string& path);
void write_png16(const DepthImage& img, const std::string& path);
LabelImage read_png8(const std::string& path);
void write_png8(const LabelImage& img, const std::string& path);

}  // namespace layoutkit::io
