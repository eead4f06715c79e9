#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "camera.hpp"
#include "carving.hpp"
#include "hull.hpp"
#include "image.hpp"
#include "json.hpp"

namespace silhuetta {

enum class PrimitiveKind { Sphere, Box, Cylinder };

// Surface coloring. Split paints the half-space dot(local, split_axis) >= 0
// with albedo and the rest with albedo2; Checker alternates albedo/albedo2 on
// a solid 3D checkerboard of cell-sized cubes in the local frame.
enum class Pattern { Solid, Split, Checker };

struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Sphere;
  Mat3 rotation = Mat3::Identity();  // local -> world
  Vec3 translation = Vec3::Zero();   // mm
  // sphere: (radius, -, -); box: half-extents; cylinder: (radius, height, -),
  // axis along local z, centred on the origin
  Vec3 size = Vec3::Zero();
  Rgb albedo{128, 128, 128};
  int texture_noise = 0;  // uniform per-pixel intensity jitter amplitude

  Pattern pattern = Pattern::Solid;
  Rgb albedo2{128, 128, 128};
  Vec3 split_axis = Vec3::UnitX();
  double cell = 10.0;

  static Primitive sphere(const Vec3& center, double radius);
  static Primitive box(const Vec3& center, const Vec3& half_extents);
  static Primitive cylinder(const Vec3& center, double radius, double height);

  void validate() const;
  /// Nearest ray parameter t > 0 where origin + t*dir meets the surface.
  std::optional<double> intersect(const Vec3& origin, const Vec3& dir) const;
  bool contains(const Vec3& p) const;
  double volume_mm3() const;
  double bounding_radius() const;
  Rgb color_at(const Vec3& world_point) const;
};

struct ShadowPatch {
  std::string view_id;
  std::vector<std::array<double, 2>> polygon;  // pixel coordinates
  double darkening = 0.5;                      // in (0, 1)
};

struct Scene {
  std::string name;
  std::vector<Primitive> primitives;
  CameraRig rig;
  Rgb background{255, 255, 255};
  std::vector<ShadowPatch> shadows;
  BoundingVolume bv;
  std::uint64_t seed = 1;
};

/// Three lateral cameras 120 degrees apart on a horizontal circle of radius
/// 600 mm at the height of `target`, plus one looking straight down from
/// 600 mm above it. 640x480, fx = fy = 800.
CameraRig four_camera_rig(const Vec3& target = Vec3::Zero());

/// Same camera with every intrinsic scaled by `factor` (factor^2 pixels per
/// original pixel).
CameraParams scaled_camera(const CameraParams& cam, int factor);

/// Foreground iff the ray through the pixel center hits any primitive.
BinaryMask render_silhouette_exact(const Scene& scene, const CameraParams& cam);

/// Flat albedo (plus seeded jitter) on hits, background elsewhere, then this
/// view's shadow patches darken covered background pixels. The jitter stream
/// is seeded per (scene seed, view, row).
RgbImage render_color(const Scene& scene, const CameraParams& cam);

/// Sum of analytic primitive volumes in cm^3. Throws OverlappingPrimitives if
/// any two bounding spheres intersect.
double analytic_volume(const Scene& scene);

struct VolumeEstimate {
  double volume_cm3 = 0.0;
  double half_width_cm3 = 0.0;  // 99% binomial confidence half-width
};

/// Monte Carlo visual-hull volume over scene.bv: a sample counts when every
/// view that sees it on-sensor projects it onto foreground of an exact mask
/// rendered at 4x resolution.
VolumeEstimate brute_force_hull_volume(const Scene& scene, const CameraRig& rig,
                                       std::size_t samples, std::uint64_t seed);

/// Renders every view to view_<id>.ppm plus exact mask_<id>.pgm, and writes
/// ground_truth.json (analytic volume, or null when primitives may overlap).
std::vector<std::filesystem::path> write_scene_views(const Scene& scene,
                                                     const std::filesystem::path& dir);

nlohmann::json scene_to_json(const Scene& scene);
/// `base_dir` resolves a rig given as a relative file path.
Scene scene_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
Scene load_scene(const std::filesystem::path& path);

}  // namespace silhuetta
