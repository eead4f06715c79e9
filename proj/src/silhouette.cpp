#include "silhouette.hpp"

#include <algorithm>
#include <compare>

#include "error.hpp"

namespace silhuetta {

StructuringElement StructuringElement::square(int side) {
  if (side < 1) throw Error(ErrorCode::InvalidArgument, "structuring element side must be >= 1");
  StructuringElement se;
  se.width = se.height = side;
  se.cells.assign(static_cast<std::size_t>(side) * side, 1);
  se.anchor_x = se.anchor_y = side / 2;
  return se;
}

void StructuringElement::validate() const {
  if (width < 1 || height < 1 || cells.size() != static_cast<std::size_t>(width) * height)
    throw Error(ErrorCode::InvalidArgument, "structuring element grid is malformed");
  if (anchor_x < 0 || anchor_x >= width || anchor_y < 0 || anchor_y >= height)
    throw Error(ErrorCode::InvalidArgument, "structuring element anchor outside grid");
  if (std::none_of(cells.begin(), cells.end(), [](std::uint8_t c) { return c != 0; }))
    throw Error(ErrorCode::InvalidArgument, "structuring element has no cells");
}

GrayImage to_grayscale(const RgbImage& img) {
  GrayImage out(img.width, img.height);
  const std::size_t n = out.data.size();
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned r = img.data[3 * i], g = img.data[3 * i + 1], b = img.data[3 * i + 2];
    // round(0.299 R + 0.587 G + 0.114 B), half up, in integers
    out.data[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
  return out;
}

GrayImage invert(const GrayImage& img) {
  GrayImage out = img;
  for (auto& p : out.data) p = static_cast<std::uint8_t>(255 - p);
  return out;
}

GrayImage normalize_local(const GrayImage& img, int window) {
  if (window < 1 || window % 2 == 0)
    throw Error(ErrorCode::InvalidArgument, "normalization window must be odd and >= 1");
  const int w = img.width, h = img.height, r = window / 2;

  // separable running maximum: rows, then columns
  GrayImage row_max(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::uint8_t m = 0;
      for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx)
        m = std::max(m, img.at(xx, y));
      row_max.at(x, y) = m;
    }

  GrayImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      unsigned m = 0;
      for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy)
        m = std::max<unsigned>(m, row_max.at(x, yy));
      const unsigned p = img.at(x, y);
      out.at(x, y) = m == 0 ? 0 : static_cast<std::uint8_t>((510 * p + m) / (2 * m));
    }
  return out;
}

Histogram histogram(const GrayImage& img) {
  Histogram hist{};
  for (auto p : img.data) ++hist[p];
  return hist;
}

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// 192-bit unsigned product of a 128-bit and a 64-bit factor, as big-endian limbs.
struct U192 {
  u64 hi, mid, lo;
  auto operator<=>(const U192&) const = default;
};

U192 mul(u128 a, u64 b) {
  const u128 p_lo = static_cast<u128>(static_cast<u64>(a)) * b;
  const u128 p_hi = static_cast<u128>(static_cast<u64>(a >> 64)) * b;
  const u128 mid = (p_lo >> 64) + static_cast<u64>(p_hi);
  return {static_cast<u64>(p_hi >> 64) + static_cast<u64>(mid >> 64), static_cast<u64>(mid),
          static_cast<u64>(p_lo)};
}

}  // namespace

int otsu_threshold(const Histogram& hist) {
  // w0*w1*(mu0-mu1)^2 = (N*S0 - S*n0)^2 / (N^2 * n0 * n1); the N^2 factor is
  // common to every t, so candidates compare as D^2 / (n0*n1).
  u64 total = 0, sum = 0;
  for (int i = 0; i < 256; ++i) {
    total += hist[i];
    sum += static_cast<u64>(i) * hist[i];
  }
  if (total == 0) throw Error(ErrorCode::InvalidArgument, "otsu: empty histogram");
  if (total > (u64{1} << 28))  // keeps |D| < 2^64 and n0*n1 < 2^64
    throw Error(ErrorCode::InvalidArgument, "otsu: histogram too large for exact comparison");

  int best_t = -1;
  u128 best_num = 0;
  u64 best_den = 1;
  u64 n0 = 0, s0 = 0;
  for (int t = 0; t < 256; ++t) {
    n0 += hist[t];
    s0 += static_cast<u64>(t) * hist[t];
    const u64 n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const __int128 d = static_cast<__int128>(total) * s0 - static_cast<__int128>(sum) * n0;
    const u128 num = static_cast<u128>(d < 0 ? -d : d) * static_cast<u128>(d < 0 ? -d : d);
    const u64 den = n0 * n1;
    if (best_t < 0 || mul(num, best_den) > mul(best_num, den)) {
      best_t = t;
      best_num = num;
      best_den = den;
    }
  }
  if (best_t >= 0) return best_t;

  // single populated bin
  for (int i = 0; i < 256; ++i)
    if (hist[i]) return i;
  return 0;
}

int otsu_threshold(const GrayImage& img) { return otsu_threshold(histogram(img)); }

BinaryMask threshold_apply(const GrayImage& img, int t) {
  if (t < 0 || t > 255) throw Error(ErrorCode::InvalidArgument, "threshold outside [0,255]");
  BinaryMask m(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i) m.data[i] = img.data[i] > t ? 1 : 0;
  return m;
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
  se.validate();
  BinaryMask out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      bool keep = true;
      for (int sy = 0; sy < se.height && keep; ++sy)
        for (int sx = 0; sx < se.width && keep; ++sx) {
          if (!se.cell(sx, sy)) continue;
          const int px = x + sx - se.anchor_x, py = y + sy - se.anchor_y;
          keep = px >= 0 && px < mask.width && py >= 0 && py < mask.height && mask.at(px, py);
        }
      out.set(x, y, keep);
    }
  return out;
}

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
  se.validate();
  BinaryMask out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      for (int sy = 0; sy < se.height; ++sy)
        for (int sx = 0; sx < se.width; ++sx) {
          if (!se.cell(sx, sy)) continue;
          const int px = x + sx - se.anchor_x, py = y + sy - se.anchor_y;
          if (px >= 0 && px < mask.width && py >= 0 && py < mask.height) out.set(px, py, true);
        }
    }
  return out;
}

BinaryMask morph_open(const BinaryMask& mask, const StructuringElement& se) {
  return dilate(erode(mask, se), se);
}

BinaryMask largest_component(const BinaryMask& mask, int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw Error(ErrorCode::InvalidArgument, "connectivity must be 4 or 8");
  const int w = mask.width, h = mask.height;
  std::vector<int> label(mask.data.size(), 0);
  std::vector<std::size_t> stack;
  int best_label = 0;
  std::size_t best_size = 0;
  int next_label = 0;

  for (int y0 = 0; y0 < h; ++y0)
    for (int x0 = 0; x0 < w; ++x0) {
      const std::size_t seed = static_cast<std::size_t>(y0) * w + x0;
      if (!mask.data[seed] || label[seed]) continue;
      const int id = ++next_label;
      std::size_t size = 0;
      label[seed] = id;
      stack.push_back(seed);
      while (!stack.empty()) {
        const std::size_t p = stack.back();
        stack.pop_back();
        ++size;
        const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || (connectivity == 4 && dx != 0 && dy != 0)) continue;
            const int nx = px + dx, ny = py + dy;
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
            if (mask.data[q] && !label[q]) {
              label[q] = id;
              stack.push_back(q);
            }
          }
      }
      if (size > best_size) {
        best_size = size;
        best_label = id;
      }
    }

  BinaryMask out(w, h);
  if (best_label == 0) return out;
  for (std::size_t i = 0; i < label.size(); ++i) out.data[i] = label[i] == best_label ? 1 : 0;
  return out;
}

BinaryMask fill_holes(const BinaryMask& mask) {
  const int w = mask.width, h = mask.height;
  std::vector<std::uint8_t> outside(mask.data.size(), 0);
  std::vector<std::size_t> stack;
  auto push = [&](int x, int y) {
    const std::size_t i = static_cast<std::size_t>(y) * w + x;
    if (!mask.data[i] && !outside[i]) {
      outside[i] = 1;
      stack.push_back(i);
    }
  };
  for (int x = 0; x < w; ++x) {
    push(x, 0);
    push(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    push(0, y);
    push(w - 1, y);
  }
  while (!stack.empty()) {
    const std::size_t p = stack.back();
    stack.pop_back();
    const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
    if (px > 0) push(px - 1, py);
    if (px + 1 < w) push(px + 1, py);
    if (py > 0) push(px, py - 1);
    if (py + 1 < h) push(px, py + 1);
  }
  BinaryMask out(w, h);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = outside[i] ? 0 : 1;
  return out;
}

BinaryMask extract_silhouette(const RgbImage& img, const PreprocessConfig& cfg) {
  GrayImage gray = to_grayscale(img);
  if (cfg.invert) gray = invert(gray);

  BinaryMask mask;
  if (cfg.naive) {
    mask = threshold_apply(gray, otsu_threshold(gray));
  } else {
    const GrayImage norm = normalize_local(gray, cfg.window);
    mask = threshold_apply(norm, otsu_threshold(norm));
    mask = morph_open(mask, cfg.se);
    mask = largest_component(mask, cfg.connectivity);
    mask = fill_holes(mask);
  }
  if (mask.count() == 0)
    throw Error(ErrorCode::EmptySilhouette, "segmentation produced no foreground pixels");
  return mask;
}

}  // namespace silhuetta
