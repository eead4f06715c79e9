#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace silhuetta {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

struct Intrinsics {
  double fx = 0.0, fy = 0.0;  // focal lengths, pixels
  double cx = 0.0, cy = 0.0;  // principal point, pixels
  int width = 640, height = 480;

  bool operator==(const Intrinsics&) const = default;
};

// World -> camera transform: x_cam = rotation * x_world + translation (mm).
struct Extrinsics {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  bool operator==(const Extrinsics& o) const {
    return rotation == o.rotation && translation == o.translation;
  }
};

struct CameraParams {
  std::string id;
  Intrinsics intrinsics;
  Extrinsics extrinsics;

  bool operator==(const CameraParams&) const = default;

  // Optical center in world coordinates.
  Vec3 center() const;
  // Unit world-space direction of the ray through pixel coordinates (u, v).
  Vec3 ray_direction(double u, double v) const;
};

struct CameraRig {
  std::vector<CameraParams> cameras;

  bool operator==(const CameraRig&) const = default;
  const CameraParams* find(const std::string& id) const;
};

/// Pinhole projection of a world point (mm) to pixel coordinates. Returns
/// nullopt when the point lies at or behind the optical plane. The result may
/// fall outside the sensor; see in_sensor().
std::optional<Pixel> project_point(const Vec3& p, const CameraParams& cam);

/// Half-open sensor test: 0 <= u < width and 0 <= v < height.
bool in_sensor(double u, double v, const Intrinsics& intr);

// Throw Error(InvalidRig) naming the offending camera.
void validate(const CameraParams& cam);
void validate(const CameraRig& rig);

/// Camera at `eye` looking at `target`; image x runs right and image y runs
/// down, with `up` fixing the roll.
CameraParams look_at(std::string id, const Intrinsics& intr, const Vec3& eye,
                     const Vec3& target, const Vec3& up);

nlohmann::json rig_to_json(const CameraRig& rig);
CameraRig rig_from_json(const nlohmann::json& j);

CameraRig load_rig(const std::filesystem::path& path);
void save_rig(const CameraRig& rig, const std::filesystem::path& path);

}  // namespace silhuetta
