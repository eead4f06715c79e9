#include "carving.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"

namespace silhuetta {

void ConsistencyParams::validate() const {
  if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be >= 0");
  if (min_views < 2) throw Error(ErrorCode::InvalidArgument, "min_views must be >= 2");
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
}

void validate(const ColorImageSet& views) {
  for (const auto& v : views)
    if (v.image.width != v.camera.intrinsics.width || v.image.height != v.camera.intrinsics.height)
      throw Error(ErrorCode::InvalidArgument,
                  "image size does not match sensor of camera '" + v.camera.id + "'");
}

bool is_occluded(const VoxelGrid& grid, std::size_t idx, const Vec3& eye) {
  const Vec3 start = grid.voxel_center(idx);
  const Vec3 to_eye = eye - start;
  const double dist = to_eye.norm();
  const Vec3 dir = to_eye / dist;
  const double step = 0.5 * grid.h().minCoeff();
  for (std::size_t n = 1;; ++n) {
    const double s = static_cast<double>(n) * step;
    if (s >= dist) return false;
    const auto v = grid.voxel_at(start + s * dir);
    if (!v) return false;  // left the (convex) bounding volume
    if (*v != idx && grid.solid(*v)) return true;
  }
}

std::vector<Rgb> voxel_samples(const VoxelGrid& grid, std::size_t idx, const ColorImageSet& views) {
  std::vector<Rgb> out;
  const Vec3 c = grid.voxel_center(idx);
  for (const auto& v : views) {
    const auto px = project_point(c, v.camera);
    if (!px || !in_sensor(px->u, px->v, v.camera.intrinsics)) continue;
    if (is_occluded(grid, idx, v.camera.center())) continue;
    const std::uint8_t* p = v.image.px(static_cast<int>(px->u), static_cast<int>(px->v));
    out.push_back({p[0], p[1], p[2]});
  }
  return out;
}

bool is_consistent(std::span<const Rgb> samples, const ConsistencyParams& params) {
  if (samples.size() < static_cast<std::size_t>(params.min_views)) return true;
  if (std::isinf(params.tau)) return true;
  const double n = static_cast<double>(samples.size());
  const double limit = params.tau * params.tau * n;
  for (int ch = 0; ch < 3; ++ch) {
    auto value = [ch](const Rgb& c) { return static_cast<double>(ch == 0 ? c.r : ch == 1 ? c.g : c.b); };
    double mean = 0.0;
    for (const auto& s : samples) mean += value(s);
    mean /= n;
    double ss = 0.0;
    for (const auto& s : samples) ss += (value(s) - mean) * (value(s) - mean);
    if (ss > limit) return false;
  }
  return true;
}

std::vector<std::size_t> find_inconsistent(const VoxelGrid& grid, const ColorImageSet& views,
                                           const ConsistencyParams& params,
                                           std::span<const std::size_t> candidates) {
  std::vector<std::uint8_t> fails(candidates.size(), 0);
  parallel_for(0, candidates.size(), 256, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) {
      const auto samples = voxel_samples(grid, candidates[c], views);
      fails[c] = is_consistent(samples, params) ? 0 : 1;
    }
  });
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < candidates.size(); ++c)
    if (fails[c]) out.push_back(candidates[c]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CarveResult carve(VoxelGrid grid, const ColorImageSet& views, const ConsistencyParams& params) {
  params.validate();
  validate(views);

  CarveResult result;
  std::vector<std::size_t> surface;
  for (int iter = 1; iter <= params.max_iters; ++iter) {
    surface.clear();
    for (std::size_t idx = 0; idx < grid.size(); ++idx)
      if (grid.label(idx) == Label::Surface) surface.push_back(idx);

    const auto failing = find_inconsistent(grid, views, params, surface);
    for (auto idx : failing) grid.set_label(idx, Label::Outside);
    grid.relabel();

    result.iterations = iter;
    result.removed += failing.size();
    if (failing.empty()) {
      result.converged = true;
      break;
    }
  }
  result.grid = std::move(grid);
  return result;
}

}  // namespace silhuetta
