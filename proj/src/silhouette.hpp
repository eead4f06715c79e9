#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "image.hpp"

namespace silhuetta {

struct StructuringElement {
  int width = 3;
  int height = 3;
  std::vector<std::uint8_t> cells = std::vector<std::uint8_t>(9, 1);
  int anchor_x = 1;
  int anchor_y = 1;

  static StructuringElement square(int side);
  bool cell(int x, int y) const { return cells[static_cast<std::size_t>(y) * width + x] != 0; }
  void validate() const;
};

struct PreprocessConfig {
  int window = 3;  // normalization window side, odd
  StructuringElement se = StructuringElement::square(3);
  int connectivity = 8;  // blob connectivity, 4 or 8
  bool naive = false;    // plain Otsu only: the unoptimized baseline
  bool invert = false;   // object darker than background
};

using Histogram = std::array<std::uint64_t, 256>;

GrayImage to_grayscale(const RgbImage& img);
GrayImage invert(const GrayImage& img);

/// Divides every pixel by the maximum of the odd-sided window centred on it
/// (window truncated at the borders) and rescales to [0, 255], rounding half
/// up. A zero window maximum maps to 0.
GrayImage normalize_local(const GrayImage& img, int window);

Histogram histogram(const GrayImage& img);

/// Otsu's threshold: the t maximising w0*w1*(mu0-mu1)^2 where class 0 holds
/// intensities <= t. The criterion is compared in exact integer arithmetic;
/// ties go to the smallest t, and a single-valued histogram returns that value.
int otsu_threshold(const Histogram& hist);
int otsu_threshold(const GrayImage& img);

/// Foreground iff pixel > t.
BinaryMask threshold_apply(const GrayImage& img, int t);

// Out-of-image neighbours count as background for erosion and are skipped
// for dilation.
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se);
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);
BinaryMask morph_open(const BinaryMask& mask, const StructuringElement& se);

/// Keeps the foreground component with the most pixels. Equal sizes resolve
/// to the component whose first pixel comes earliest in row-major order.
BinaryMask largest_component(const BinaryMask& mask, int connectivity);

/// Background not 4-connected to the image border becomes foreground.
BinaryMask fill_holes(const BinaryMask& mask);

/// Full chain: grayscale, local normalization, Otsu, opening, largest blob,
/// hole filling. With cfg.naive only grayscale + Otsu run. Throws
/// Error(EmptySilhouette) when nothing survives.
BinaryMask extract_silhouette(const RgbImage& img, const PreprocessConfig& cfg);

}  // namespace silhuetta
