#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "camera.hpp"
#include "hull.hpp"
#include "image.hpp"

namespace silhuetta {

struct ColorView {
  RgbImage image;
  CameraParams camera;
};
using ColorImageSet = std::vector<ColorView>;

struct ConsistencyParams {
  double tau = 25.0;  // max per-channel population std-dev, intensity units
  int min_views = 2;  // fewer observing views than this never carves
  int max_iters = 64;

  void validate() const;
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

struct CarveResult {
  VoxelGrid grid;
  int iterations = 0;
  std::size_t removed = 0;
  bool converged = false;
};

void validate(const ColorImageSet& views);

/// True when a solid voxel other than `idx` lies strictly between the voxel
/// center and `eye`. The segment is sampled every half voxel (smallest edge).
bool is_occluded(const VoxelGrid& grid, std::size_t idx, const Vec3& eye);

/// Colors of the voxel center in every view where it projects on-sensor and
/// is not occluded by the current solid set.
std::vector<Rgb> voxel_samples(const VoxelGrid& grid, std::size_t idx, const ColorImageSet& views);

/// Consistent when there are fewer than min_views samples, or when every
/// channel's population standard deviation is <= tau.
bool is_consistent(std::span<const Rgb> samples, const ConsistencyParams& params);

/// The subset of `candidates` failing the consistency test against the grid
/// as given, returned in ascending index order. Read-only on the grid.
std::vector<std::size_t> find_inconsistent(const VoxelGrid& grid, const ColorImageSet& views,
                                           const ConsistencyParams& params,
                                           std::span<const std::size_t> candidates);

/// Iterative photo-consistency carving of a classified grid. Each sweep tests
/// every surface voxel against the grid state at the start of the sweep, then
/// removes all failures at once and relabels. Stops after a sweep with no
/// removals (converged) or after max_iters sweeps.
CarveResult carve(VoxelGrid grid, const ColorImageSet& views, const ConsistencyParams& params);

}  // namespace silhuetta
