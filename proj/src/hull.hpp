#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "camera.hpp"
#include "image.hpp"

namespace silhuetta {

struct BoundingVolume {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  void validate() const;  // min < max on every axis
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool operator==(const BoundingVolume& o) const { return min == o.min && max == o.max; }
};

struct GridDims {
  std::uint32_t n1 = 0, n2 = 0, n3 = 0;

  std::size_t count() const { return std::size_t{n1} * n2 * n3; }
  bool operator==(const GridDims&) const = default;
};

enum class Label : std::uint8_t { Outside = 0, Surface = 1, Inside = 2 };

struct VoxelIndex {
  std::uint32_t i = 0, j = 0, k = 0;
};

// Regular label grid over a bounding volume. Voxel (i, j, k) spans
// min + [i, i+1) * h on x (likewise j on y, k on z); labels are stored
// row-major with k fastest.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(const BoundingVolume& bv, GridDims dims);

  const BoundingVolume& bv() const { return bv_; }
  GridDims dims() const { return dims_; }
  const Vec3& h() const { return h_; }
  std::size_t size() const { return labels_.size(); }

  std::size_t flat(std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
    return (std::size_t{i} * dims_.n2 + j) * dims_.n3 + k;
  }
  VoxelIndex unflat(std::size_t idx) const;

  Label label(std::size_t idx) const { return static_cast<Label>(labels_[idx]); }
  void set_label(std::size_t idx, Label l) { labels_[idx] = static_cast<std::uint8_t>(l); }
  bool solid(std::size_t idx) const { return labels_[idx] != 0; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }

  std::size_t solid_count() const;

  /// World-space center of voxel (i, j, k); throws IndexOutOfRange.
  Vec3 voxel_center(std::uint32_t i, std::uint32_t j, std::uint32_t k) const;
  Vec3 voxel_center(std::size_t idx) const;

  /// Voxel containing p, or nullopt outside the bounding volume. Points on the
  /// max faces belong to the last voxel.
  std::optional<std::size_t> voxel_at(const Vec3& p) const;

  /// Re-derives surface/inside for every solid voxel: surface iff a 6-neighbour
  /// is outside or the voxel lies on the grid boundary.
  void relabel();

  /// True iff all labels are valid and the surface/inside split is consistent.
  bool labels_consistent() const;

  // Raw constructor for deserialization.
  static VoxelGrid from_labels(const BoundingVolume& bv, GridDims dims,
                               std::vector<std::uint8_t> labels);

  bool operator==(const VoxelGrid& o) const {
    return bv_ == o.bv_ && dims_ == o.dims_ && labels_ == o.labels_;
  }

 private:
  Label derived_label(std::uint32_t i, std::uint32_t j, std::uint32_t k) const;

  BoundingVolume bv_;
  GridDims dims_;
  Vec3 h_ = Vec3::Zero();
  std::vector<std::uint8_t> labels_;
};

struct SilhouetteView {
  BinaryMask mask;
  CameraParams camera;
};
using SilhouetteSet = std::vector<SilhouetteView>;

void validate(const SilhouetteSet& views);

/// All voxels start inside (label 2).
VoxelGrid build_grid(const BoundingVolume& bv, GridDims dims);

/// Visual-hull test of every solid voxel center against every view: a view
/// vetoes the voxel only when the center projects on-sensor onto a background
/// pixel (floor lookup). Survivors are relabelled surface/inside.
VoxelGrid classify_voxels(VoxelGrid grid, const SilhouetteSet& views);

/// Volume of all solid voxels in cm^3.
double hull_volume(const VoxelGrid& grid);

// Binary grid file: 16-byte header ("SILHVOX\0", u32 version, u32 reserved),
// bv as 6 LE f64 (min xyz, max xyz), dims as 3 LE u32, then one label byte
// per voxel.
void save_grid(const VoxelGrid& grid, const std::filesystem::path& path);
VoxelGrid load_grid(const std::filesystem::path& path);

}  // namespace silhuetta
