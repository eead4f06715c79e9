#include "camera.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"

namespace silhuetta {

namespace {

constexpr double kOrthoTol = 1e-9;

[[noreturn]] void invalid(const std::string& id, const std::string& why) {
  throw Error(ErrorCode::InvalidRig, "camera '" + id + "': " + why);
}

}  // namespace

Vec3 CameraParams::center() const {
  return -extrinsics.rotation.transpose() * extrinsics.translation;
}

Vec3 CameraParams::ray_direction(double u, double v) const {
  const Vec3 d_cam((u - intrinsics.cx) / intrinsics.fx,
                   (v - intrinsics.cy) / intrinsics.fy, 1.0);
  return (extrinsics.rotation.transpose() * d_cam).normalized();
}

const CameraParams* CameraRig::find(const std::string& id) const {
  for (const auto& c : cameras)
    if (c.id == id) return &c;
  return nullptr;
}

std::optional<Pixel> project_point(const Vec3& p, const CameraParams& cam) {
  const Vec3 x = cam.extrinsics.rotation * p + cam.extrinsics.translation;
  if (!(x.z() > 0.0)) return std::nullopt;
  const auto& k = cam.intrinsics;
  return Pixel{k.fx * x.x() / x.z() + k.cx, k.fy * x.y() / x.z() + k.cy};
}

bool in_sensor(double u, double v, const Intrinsics& intr) {
  return u >= 0.0 && u < intr.width && v >= 0.0 && v < intr.height;
}

void validate(const CameraParams& cam) {
  const auto& k = cam.intrinsics;
  if (k.width <= 0 || k.height <= 0) invalid(cam.id, "sensor size must be positive");
  if (!(k.fx > 0.0) || !(k.fy > 0.0)) invalid(cam.id, "focal lengths must be positive");
  if (!(k.cx >= 0.0 && k.cx < k.width) || !(k.cy >= 0.0 && k.cy < k.height))
    invalid(cam.id, "principal point outside the sensor");

  const Mat3& r = cam.extrinsics.rotation;
  if (!r.allFinite() || !cam.extrinsics.translation.allFinite())
    invalid(cam.id, "non-finite extrinsics");
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kOrthoTol) invalid(cam.id, "rotation is not orthonormal");
  if (std::abs(r.determinant() - 1.0) > kOrthoTol)
    invalid(cam.id, "rotation determinant is not +1");
}

void validate(const CameraRig& rig) {
  if (rig.cameras.size() < 2)
    throw Error(ErrorCode::InvalidRig, "rig needs at least 2 cameras, got " +
                                           std::to_string(rig.cameras.size()));
  std::set<std::string> ids;
  for (const auto& c : rig.cameras) {
    validate(c);
    if (!ids.insert(c.id).second) invalid(c.id, "duplicate camera id");
  }
}

CameraParams look_at(std::string id, const Intrinsics& intr, const Vec3& eye,
                     const Vec3& target, const Vec3& up) {
  const Vec3 forward = (target - eye).normalized();
  const Vec3 right = forward.cross(up).normalized();
  const Vec3 down = forward.cross(right);

  CameraParams cam;
  cam.id = std::move(id);
  cam.intrinsics = intr;
  cam.extrinsics.rotation.row(0) = right.transpose();
  cam.extrinsics.rotation.row(1) = down.transpose();
  cam.extrinsics.rotation.row(2) = forward.transpose();
  cam.extrinsics.translation = -cam.extrinsics.rotation * eye;
  return cam;
}

nlohmann::json rig_to_json(const CameraRig& rig) {
  nlohmann::json cams = nlohmann::json::array();
  for (const auto& c : rig.cameras) {
    const auto& k = c.intrinsics;
    nlohmann::json rot = nlohmann::json::array();
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) rot.push_back(c.extrinsics.rotation(r, col));
    const auto& t = c.extrinsics.translation;
    cams.push_back({
        {"id", c.id},
        {"intrinsics",
         {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
          {"width", k.width}, {"height", k.height}}},
        {"rotation", rot},
        {"translation", {t.x(), t.y(), t.z()}},
    });
  }
  return {{"cameras", cams}};
}

CameraRig rig_from_json(const nlohmann::json& j) {
  CameraRig rig;
  try {
    for (const auto& jc : j.at("cameras")) {
      CameraParams c;
      c.id = jc.at("id").get<std::string>();
      const auto& ji = jc.at("intrinsics");
      c.intrinsics.fx = ji.at("fx").get<double>();
      c.intrinsics.fy = ji.at("fy").get<double>();
      c.intrinsics.cx = ji.at("cx").get<double>();
      c.intrinsics.cy = ji.at("cy").get<double>();
      c.intrinsics.width = ji.value("width", 640);
      c.intrinsics.height = ji.value("height", 480);

      const auto& jr = jc.at("rotation");
      const auto& jt = jc.at("translation");
      if (jr.size() != 9 || jt.size() != 3)
        throw Error(ErrorCode::ParseError,
                    "camera '" + c.id + "': rotation needs 9 numbers, translation 3");
      for (int i = 0; i < 9; ++i) c.extrinsics.rotation(i / 3, i % 3) = jr.at(i).get<double>();
      for (int i = 0; i < 3; ++i) c.extrinsics.translation(i) = jt.at(i).get<double>();
      rig.cameras.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("rig: ") + e.what());
  }
  validate(rig);
  return rig;
}

CameraRig load_rig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open rig file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return rig_from_json(j);
}

void save_rig(const CameraRig& rig, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write rig file " + path.string());
  out << rig_to_json(rig).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace silhuetta
