#include "hull.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "error.hpp"
#include "parallel.hpp"

namespace silhuetta {

void BoundingVolume::validate() const {
  if (!min.allFinite() || !max.allFinite() || !(min.array() < max.array()).all())
    throw Error(ErrorCode::InvalidArgument, "bounding volume needs min < max on every axis");
}

VoxelGrid::VoxelGrid(const BoundingVolume& bv, GridDims dims) : bv_(bv), dims_(dims) {
  bv.validate();
  if (dims.n1 < 1 || dims.n2 < 1 || dims.n3 < 1)
    throw Error(ErrorCode::InvalidArgument, "grid dims must be >= 1 on every axis");
  h_ = bv.extent().cwiseQuotient(Vec3(dims.n1, dims.n2, dims.n3));
  labels_.assign(dims.count(), static_cast<std::uint8_t>(Label::Inside));
}

VoxelIndex VoxelGrid::unflat(std::size_t idx) const {
  VoxelIndex v;
  v.k = static_cast<std::uint32_t>(idx % dims_.n3);
  idx /= dims_.n3;
  v.j = static_cast<std::uint32_t>(idx % dims_.n2);
  v.i = static_cast<std::uint32_t>(idx / dims_.n2);
  return v;
}

std::size_t VoxelGrid::solid_count() const {
  return static_cast<std::size_t>(
      std::count_if(labels_.begin(), labels_.end(), [](std::uint8_t l) { return l != 0; }));
}

Vec3 VoxelGrid::voxel_center(std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
  if (i >= dims_.n1 || j >= dims_.n2 || k >= dims_.n3)
    throw Error(ErrorCode::IndexOutOfRange, "voxel index out of range");
  return bv_.min + Vec3(i + 0.5, j + 0.5, k + 0.5).cwiseProduct(h_);
}

Vec3 VoxelGrid::voxel_center(std::size_t idx) const {
  const auto v = unflat(idx);
  return voxel_center(v.i, v.j, v.k);
}

std::optional<std::size_t> VoxelGrid::voxel_at(const Vec3& p) const {
  if (!bv_.contains(p)) return std::nullopt;
  const Vec3 rel = (p - bv_.min).cwiseQuotient(h_);
  const auto clampi = [](double x, std::uint32_t n) {
    return static_cast<std::uint32_t>(std::min<double>(std::floor(x), n - 1));
  };
  return flat(clampi(rel.x(), dims_.n1), clampi(rel.y(), dims_.n2), clampi(rel.z(), dims_.n3));
}

Label VoxelGrid::derived_label(std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
  if (i == 0 || j == 0 || k == 0 || i + 1 == dims_.n1 || j + 1 == dims_.n2 || k + 1 == dims_.n3)
    return Label::Surface;
  const std::size_t c = flat(i, j, k);
  const std::size_t s2 = dims_.n3, s1 = std::size_t{dims_.n2} * dims_.n3;
  if (!labels_[c - 1] || !labels_[c + 1] || !labels_[c - s2] || !labels_[c + s2] ||
      !labels_[c - s1] || !labels_[c + s1])
    return Label::Surface;
  return Label::Inside;
}

void VoxelGrid::relabel() {
  // derive from the solid map alone, then write
  std::vector<std::uint8_t> next(labels_.size(), 0);
  parallel_for(0, dims_.n1, 1, [&](std::size_t lo, std::size_t hi) {
    for (auto i = static_cast<std::uint32_t>(lo); i < hi; ++i)
      for (std::uint32_t j = 0; j < dims_.n2; ++j)
        for (std::uint32_t k = 0; k < dims_.n3; ++k) {
          const std::size_t idx = flat(i, j, k);
          if (labels_[idx]) next[idx] = static_cast<std::uint8_t>(derived_label(i, j, k));
        }
  });
  labels_ = std::move(next);
}

bool VoxelGrid::labels_consistent() const {
  if (labels_.size() != dims_.count()) return false;
  for (std::uint32_t i = 0; i < dims_.n1; ++i)
    for (std::uint32_t j = 0; j < dims_.n2; ++j)
      for (std::uint32_t k = 0; k < dims_.n3; ++k) {
        const auto l = labels_[flat(i, j, k)];
        if (l > 2) return false;
        if (l != 0 && static_cast<Label>(l) != derived_label(i, j, k)) return false;
      }
  return true;
}

VoxelGrid VoxelGrid::from_labels(const BoundingVolume& bv, GridDims dims,
                                 std::vector<std::uint8_t> labels) {
  VoxelGrid g(bv, dims);
  if (labels.size() != dims.count())
    throw Error(ErrorCode::InvalidArgument, "label count does not match grid dims");
  g.labels_ = std::move(labels);
  return g;
}

void validate(const SilhouetteSet& views) {
  if (views.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "silhouette set needs at least 2 views");
  for (const auto& v : views) {
    if (v.mask.width != v.camera.intrinsics.width || v.mask.height != v.camera.intrinsics.height)
      throw Error(ErrorCode::InvalidArgument,
                  "mask size does not match sensor of camera '" + v.camera.id + "'");
  }
}

VoxelGrid build_grid(const BoundingVolume& bv, GridDims dims) { return VoxelGrid(bv, dims); }

VoxelGrid classify_voxels(VoxelGrid grid, const SilhouetteSet& views) {
  validate(views);
  const auto dims = grid.dims();
  std::vector<std::uint8_t> keep(grid.size(), 0);

  parallel_for(0, dims.n1, 1, [&](std::size_t lo, std::size_t hi) {
    for (auto i = static_cast<std::uint32_t>(lo); i < hi; ++i)
      for (std::uint32_t j = 0; j < dims.n2; ++j)
        for (std::uint32_t k = 0; k < dims.n3; ++k) {
          const std::size_t idx = grid.flat(i, j, k);
          if (!grid.solid(idx)) continue;
          const Vec3 c = grid.voxel_center(i, j, k);
          bool in = true;
          for (const auto& v : views) {
            const auto px = project_point(c, v.camera);
            if (!px || !in_sensor(px->u, px->v, v.camera.intrinsics)) continue;
            if (!v.mask.at(static_cast<int>(px->u), static_cast<int>(px->v))) {
              in = false;
              break;
            }
          }
          keep[idx] = in ? 1 : 0;
        }
  });

  for (std::size_t idx = 0; idx < keep.size(); ++idx)
    if (!keep[idx]) grid.set_label(idx, Label::Outside);
  grid.relabel();
  return grid;
}

double hull_volume(const VoxelGrid& grid) {
  const Vec3& h = grid.h();
  return static_cast<double>(grid.solid_count()) * h.x() * h.y() * h.z() / 1000.0;
}

namespace {

constexpr char kMagic[8] = {'S', 'I', 'L', 'H', 'V', 'O', 'X', '\0'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "grid file I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, const std::string& name) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error(ErrorCode::ParseError, name + ": truncated grid header");
  return v;
}

}  // namespace

void save_grid(const VoxelGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, 0);
  for (int a = 0; a < 3; ++a) put<double>(out, grid.bv().min(a));
  for (int a = 0; a < 3; ++a) put<double>(out, grid.bv().max(a));
  put(out, grid.dims().n1);
  put(out, grid.dims().n2);
  put(out, grid.dims().n3);
  out.write(reinterpret_cast<const char*>(grid.labels().data()),
            static_cast<std::streamsize>(grid.labels().size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

VoxelGrid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::string name = path.string();
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw Error(ErrorCode::ParseError, name + ": not a voxel grid file");
  if (get<std::uint32_t>(in, name) != kVersion)
    throw Error(ErrorCode::ParseError, name + ": unsupported grid version");
  get<std::uint32_t>(in, name);

  BoundingVolume bv;
  for (int a = 0; a < 3; ++a) bv.min(a) = get<double>(in, name);
  for (int a = 0; a < 3; ++a) bv.max(a) = get<double>(in, name);
  GridDims dims;
  dims.n1 = get<std::uint32_t>(in, name);
  dims.n2 = get<std::uint32_t>(in, name);
  dims.n3 = get<std::uint32_t>(in, name);

  std::vector<std::uint8_t> labels(dims.count());
  in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
  if (static_cast<std::size_t>(in.gcount()) != labels.size())
    throw Error(ErrorCode::ParseError, name + ": truncated label array");
  if (std::any_of(labels.begin(), labels.end(), [](std::uint8_t l) { return l > 2; }))
    throw Error(ErrorCode::ParseError, name + ": label outside {0,1,2}");
  return VoxelGrid::from_labels(bv, dims, std::move(labels));
}

}  // namespace silhuetta
