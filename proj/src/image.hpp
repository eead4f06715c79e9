#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace silhuetta {

// Row-major 8-bit intensity grid.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0);

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const GrayImage&) const = default;
};

// Row-major interleaved RGB, 3 bytes per pixel.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h);

  std::uint8_t* px(int x, int y) { return &data[(static_cast<std::size_t>(y) * width + x) * 3]; }
  const std::uint8_t* px(int x, int y) const {
    return &data[(static_cast<std::size_t>(y) * width + x) * 3];
  }
  bool operator==(const RgbImage&) const = default;
};

// Row-major foreground flags, one byte (0 or 1) per pixel.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false);

  bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  std::size_t count() const;
  bool operator==(const BinaryMask&) const = default;
};

// Binary PNM (P5/P6, maxval <= 255). A P5 file read as RgbImage is replicated
// into all three channels.
GrayImage read_pgm(const std::filesystem::path& path);
RgbImage read_color_image(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);
void write_ppm(const RgbImage& img, const std::filesystem::path& path);

// Masks are stored as P5 with 0 / 255; reading treats any nonzero as foreground.
void write_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path);
BinaryMask read_mask_pgm(const std::filesystem::path& path);

}  // namespace silhuetta
