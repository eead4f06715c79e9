#include "synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "error.hpp"
#include "parallel.hpp"

namespace silhuetta {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint8_t clamp_u8(long v) { return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L)); }

// Even-odd rule.
bool inside_polygon(const std::vector<std::array<double, 2>>& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a[1] > y) != (b[1] > y) && x < (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1]) + a[0])
      in = !in;
  }
  return in;
}

struct Hit {
  double t;
  const Primitive* prim;
};

std::optional<Hit> cast(const Scene& scene, const Vec3& origin, const Vec3& dir) {
  std::optional<Hit> best;
  for (const auto& p : scene.primitives) {
    const auto t = p.intersect(origin, dir);
    if (t && (!best || *t < best->t)) best = Hit{*t, &p};
  }
  return best;
}

}  // namespace

Primitive Primitive::sphere(const Vec3& center, double radius) {
  Primitive p;
  p.kind = PrimitiveKind::Sphere;
  p.translation = center;
  p.size = Vec3(radius, 0, 0);
  return p;
}

Primitive Primitive::box(const Vec3& center, const Vec3& half_extents) {
  Primitive p;
  p.kind = PrimitiveKind::Box;
  p.translation = center;
  p.size = half_extents;
  return p;
}

Primitive Primitive::cylinder(const Vec3& center, double radius, double height) {
  Primitive p;
  p.kind = PrimitiveKind::Cylinder;
  p.translation = center;
  p.size = Vec3(radius, height, 0);
  return p;
}

void Primitive::validate() const {
  const int dims = kind == PrimitiveKind::Sphere ? 1 : kind == PrimitiveKind::Cylinder ? 2 : 3;
  for (int a = 0; a < dims; ++a)
    if (!(size(a) > 0.0)) throw Error(ErrorCode::InvalidArgument, "primitive sizes must be > 0");
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-9 || std::abs(rotation.determinant() - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "primitive rotation is not a proper rotation");
  if (texture_noise < 0 || texture_noise > 255)
    throw Error(ErrorCode::InvalidArgument, "texture_noise outside [0,255]");
  if (pattern == Pattern::Checker && !(cell > 0.0))
    throw Error(ErrorCode::InvalidArgument, "checker cell must be > 0");
  if (pattern == Pattern::Split && !(split_axis.norm() > 0.0))
    throw Error(ErrorCode::InvalidArgument, "split axis must be non-zero");
}

std::optional<double> Primitive::intersect(const Vec3& origin, const Vec3& dir) const {
  const Vec3 o = rotation.transpose() * (origin - translation);
  const Vec3 d = rotation.transpose() * dir;

  switch (kind) {
    case PrimitiveKind::Sphere: {
      const double a = d.squaredNorm();
      const double b = o.dot(d);
      const double c = o.squaredNorm() - size.x() * size.x();
      const double disc = b * b - a * c;
      if (disc < 0.0) return std::nullopt;
      const double sq = std::sqrt(disc);
      const double t0 = (-b - sq) / a, t1 = (-b + sq) / a;
      if (t0 > 0.0) return t0;
      if (t1 > 0.0) return t1;
      return std::nullopt;
    }
    case PrimitiveKind::Box: {
      double tmin = -std::numeric_limits<double>::infinity();
      double tmax = std::numeric_limits<double>::infinity();
      for (int a = 0; a < 3; ++a) {
        if (d(a) == 0.0) {
          if (std::abs(o(a)) > size(a)) return std::nullopt;
          continue;
        }
        double t1 = (-size(a) - o(a)) / d(a), t2 = (size(a) - o(a)) / d(a);
        if (t1 > t2) std::swap(t1, t2);
        tmin = std::max(tmin, t1);
        tmax = std::min(tmax, t2);
      }
      if (tmax < tmin || tmax <= 0.0) return std::nullopt;
      return tmin > 0.0 ? tmin : tmax;
    }
    case PrimitiveKind::Cylinder: {
      const double r = size.x(), half = 0.5 * size.y();
      std::optional<double> best;
      auto offer = [&](double t) {
        if (t > 0.0 && (!best || t < *best)) best = t;
      };
      const double a = d.x() * d.x() + d.y() * d.y();
      if (a > 0.0) {
        const double b = o.x() * d.x() + o.y() * d.y();
        const double c = o.x() * o.x() + o.y() * o.y() - r * r;
        const double disc = b * b - a * c;
        if (disc >= 0.0) {
          const double sq = std::sqrt(disc);
          for (double t : {(-b - sq) / a, (-b + sq) / a})
            if (std::abs(o.z() + t * d.z()) <= half) offer(t);
        }
      }
      if (d.z() != 0.0) {
        for (double zc : {-half, half}) {
          const double t = (zc - o.z()) / d.z();
          const double x = o.x() + t * d.x(), y = o.y() + t * d.y();
          if (x * x + y * y <= r * r) offer(t);
        }
      }
      return best;
    }
  }
  return std::nullopt;
}

bool Primitive::contains(const Vec3& p) const {
  const Vec3 l = rotation.transpose() * (p - translation);
  switch (kind) {
    case PrimitiveKind::Sphere: return l.squaredNorm() <= size.x() * size.x();
    case PrimitiveKind::Box: return (l.cwiseAbs().array() <= size.array()).all();
    case PrimitiveKind::Cylinder:
      return l.x() * l.x() + l.y() * l.y() <= size.x() * size.x() &&
             std::abs(l.z()) <= 0.5 * size.y();
  }
  return false;
}

double Primitive::volume_mm3() const {
  switch (kind) {
    case PrimitiveKind::Sphere: return 4.0 * std::numbers::pi * std::pow(size.x(), 3) / 3.0;
    case PrimitiveKind::Box: return 8.0 * size.x() * size.y() * size.z();
    case PrimitiveKind::Cylinder: return std::numbers::pi * size.x() * size.x() * size.y();
  }
  return 0.0;
}

double Primitive::bounding_radius() const {
  switch (kind) {
    case PrimitiveKind::Sphere: return size.x();
    case PrimitiveKind::Box: return size.norm();
    case PrimitiveKind::Cylinder: return std::hypot(size.x(), 0.5 * size.y());
  }
  return 0.0;
}

Rgb Primitive::color_at(const Vec3& world_point) const {
  if (pattern == Pattern::Solid) return albedo;
  const Vec3 l = rotation.transpose() * (world_point - translation);
  if (pattern == Pattern::Split) return l.dot(split_axis) >= 0.0 ? albedo : albedo2;
  const long parity = static_cast<long>(std::floor(l.x() / cell)) +
                      static_cast<long>(std::floor(l.y() / cell)) +
                      static_cast<long>(std::floor(l.z() / cell));
  return (parity & 1) == 0 ? albedo : albedo2;
}

CameraRig four_camera_rig(const Vec3& target) {
  constexpr double kRadius = 600.0;
  Intrinsics intr;
  intr.fx = intr.fy = 800.0;
  intr.cx = 320.0;
  intr.cy = 240.0;
  intr.width = 640;
  intr.height = 480;

  CameraRig rig;
  for (int i = 0; i < 3; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 3.0;
    const Vec3 eye = target + Vec3(kRadius * std::cos(a), kRadius * std::sin(a), 0.0);
    rig.cameras.push_back(look_at("cam" + std::to_string(i), intr, eye, target, Vec3::UnitZ()));
  }
  rig.cameras.push_back(
      look_at("cam3", intr, target + Vec3(0, 0, kRadius), target, Vec3::UnitY()));
  return rig;
}

CameraParams scaled_camera(const CameraParams& cam, int factor) {
  CameraParams s = cam;
  s.intrinsics.fx *= factor;
  s.intrinsics.fy *= factor;
  s.intrinsics.cx *= factor;
  s.intrinsics.cy *= factor;
  s.intrinsics.width *= factor;
  s.intrinsics.height *= factor;
  return s;
}

BinaryMask render_silhouette_exact(const Scene& scene, const CameraParams& cam) {
  const auto& k = cam.intrinsics;
  BinaryMask mask(k.width, k.height);
  const Vec3 eye = cam.center();
  parallel_for(0, static_cast<std::size_t>(k.height), 8, [&](std::size_t lo, std::size_t hi) {
    for (auto y = static_cast<int>(lo); y < static_cast<int>(hi); ++y)
      for (int x = 0; x < k.width; ++x) {
        const Vec3 dir = cam.ray_direction(x + 0.5, y + 0.5);
        mask.set(x, y, cast(scene, eye, dir).has_value());
      }
  });
  return mask;
}

RgbImage render_color(const Scene& scene, const CameraParams& cam) {
  const auto& k = cam.intrinsics;
  RgbImage img(k.width, k.height);
  const Vec3 eye = cam.center();
  const std::uint64_t view_seed = splitmix64(scene.seed ^ fnv1a(cam.id));

  std::vector<const ShadowPatch*> shadows;
  for (const auto& s : scene.shadows)
    if (s.view_id == cam.id) shadows.push_back(&s);

  parallel_for(0, static_cast<std::size_t>(k.height), 8, [&](std::size_t lo, std::size_t hi) {
    for (auto y = static_cast<int>(lo); y < static_cast<int>(hi); ++y) {
      std::mt19937_64 rng(splitmix64(view_seed + static_cast<std::uint64_t>(y)));
      for (int x = 0; x < k.width; ++x) {
        std::uint8_t* px = img.px(x, y);
        const Vec3 dir = cam.ray_direction(x + 0.5, y + 0.5);
        if (const auto hit = cast(scene, eye, dir)) {
          const Rgb c = hit->prim->color_at(eye + hit->t * dir);
          long jitter = 0;
          if (const int a = hit->prim->texture_noise; a > 0)
            jitter = static_cast<long>(rng() % static_cast<std::uint64_t>(2 * a + 1)) - a;
          px[0] = clamp_u8(c.r + jitter);
          px[1] = clamp_u8(c.g + jitter);
          px[2] = clamp_u8(c.b + jitter);
          continue;
        }
        double factor = 1.0;
        for (const auto* s : shadows)
          if (inside_polygon(s->polygon, x + 0.5, y + 0.5)) factor *= s->darkening;
        px[0] = clamp_u8(std::lround(scene.background.r * factor));
        px[1] = clamp_u8(std::lround(scene.background.g * factor));
        px[2] = clamp_u8(std::lround(scene.background.b * factor));
      }
    }
  });
  return img;
}

double analytic_volume(const Scene& scene) {
  const auto& prims = scene.primitives;
  for (std::size_t a = 0; a < prims.size(); ++a)
    for (std::size_t b = a + 1; b < prims.size(); ++b)
      if ((prims[a].translation - prims[b].translation).norm() <
          prims[a].bounding_radius() + prims[b].bounding_radius())
        throw Error(ErrorCode::OverlappingPrimitives,
                    "primitives " + std::to_string(a) + " and " + std::to_string(b) +
                        " may overlap; analytic volume undefined");
  double mm3 = 0.0;
  for (const auto& p : prims) mm3 += p.volume_mm3();
  return mm3 / 1000.0;
}

VolumeEstimate brute_force_hull_volume(const Scene& scene, const CameraRig& rig,
                                       std::size_t samples, std::uint64_t seed) {
  if (samples < 10000) throw Error(ErrorCode::InvalidArgument, "need at least 10000 samples");
  scene.bv.validate();
  constexpr int kScale = 4;
  std::vector<std::pair<CameraParams, BinaryMask>> views;
  for (const auto& cam : rig.cameras) {
    CameraParams fine = scaled_camera(cam, kScale);
    BinaryMask mask = render_silhouette_exact(scene, fine);
    views.emplace_back(std::move(fine), std::move(mask));
  }

  constexpr std::size_t kGrain = 1 << 14;
  const std::size_t blocks = (samples + kGrain - 1) / kGrain;
  std::vector<std::size_t> hits(blocks, 0);
  const Vec3 lo_corner = scene.bv.min, extent = scene.bv.extent();
  parallel_for(0, samples, kGrain, [&](std::size_t lo, std::size_t hi) {
    std::mt19937_64 rng(splitmix64(seed + lo / kGrain));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t count = 0;
    for (std::size_t s = lo; s < hi; ++s) {
      const Vec3 p = lo_corner + Vec3(unit(rng), unit(rng), unit(rng)).cwiseProduct(extent);
      bool in = true;
      for (const auto& [cam, mask] : views) {
        const auto px = project_point(p, cam);
        if (!px || !in_sensor(px->u, px->v, cam.intrinsics)) continue;
        if (!mask.at(static_cast<int>(px->u), static_cast<int>(px->v))) {
          in = false;
          break;
        }
      }
      if (in) ++count;
    }
    hits[lo / kGrain] = count;
  });

  std::size_t total = 0;
  for (auto h : hits) total += h;
  const double bv_cm3 = extent.prod() / 1000.0;
  const double p = static_cast<double>(total) / static_cast<double>(samples);
  constexpr double kZ99 = 2.5758293035489004;
  return {p * bv_cm3, kZ99 * bv_cm3 * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

std::vector<std::filesystem::path> write_scene_views(const Scene& scene,
                                                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  nlohmann::json views = nlohmann::json::array();
  for (const auto& cam : scene.rig.cameras) {
    const auto color_path = dir / ("view_" + cam.id + ".ppm");
    const auto mask_path = dir / ("mask_" + cam.id + ".pgm");
    write_ppm(render_color(scene, cam), color_path);
    write_mask_pgm(render_silhouette_exact(scene, cam), mask_path);
    written.push_back(color_path);
    written.push_back(mask_path);
    views.push_back({{"id", cam.id}, {"image", color_path.filename().string()},
                     {"mask", mask_path.filename().string()}});
  }

  nlohmann::json meta = {{"scene", scene.name}, {"seed", scene.seed}, {"views", views},
                         {"measurement_uncertainty_cm3", 0.5}};
  try {
    meta["ground_truth_volume_cm3"] = analytic_volume(scene);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OverlappingPrimitives) throw;
    meta["ground_truth_volume_cm3"] = nullptr;
  }
  const auto meta_path = dir / "ground_truth.json";
  std::ofstream out(meta_path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + meta_path.string());
  out << meta.dump(2) << '\n';
  written.push_back(meta_path);
  return written;
}

namespace {

nlohmann::json rgb_json(const Rgb& c) { return {c.r, c.g, c.b}; }

Rgb rgb_from(const nlohmann::json& j) {
  if (j.size() != 3) throw Error(ErrorCode::ParseError, "color needs 3 components");
  auto ch = [&](int i) {
    const int v = j.at(i).get<int>();
    if (v < 0 || v > 255) throw Error(ErrorCode::ParseError, "color component outside [0,255]");
    return static_cast<std::uint8_t>(v);
  };
  return {ch(0), ch(1), ch(2)};
}

Vec3 vec3_from(const nlohmann::json& j) {
  if (j.size() != 3) throw Error(ErrorCode::ParseError, "vector needs 3 components");
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

nlohmann::json vec3_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

nlohmann::json scene_to_json(const Scene& scene) {
  nlohmann::json prims = nlohmann::json::array();
  for (const auto& p : scene.primitives) {
    nlohmann::json jp;
    switch (p.kind) {
      case PrimitiveKind::Sphere:
        jp["kind"] = "sphere";
        jp["radius"] = p.size.x();
        break;
      case PrimitiveKind::Box:
        jp["kind"] = "box";
        jp["half_extents"] = vec3_json(p.size);
        break;
      case PrimitiveKind::Cylinder:
        jp["kind"] = "cylinder";
        jp["radius"] = p.size.x();
        jp["height"] = p.size.y();
        break;
    }
    nlohmann::json rot = nlohmann::json::array();
    for (int i = 0; i < 9; ++i) rot.push_back(p.rotation(i / 3, i % 3));
    jp["rotation"] = rot;
    jp["translation"] = vec3_json(p.translation);
    jp["albedo"] = rgb_json(p.albedo);
    jp["texture_noise"] = p.texture_noise;
    if (p.pattern == Pattern::Split)
      jp["pattern"] = {{"kind", "split"}, {"albedo2", rgb_json(p.albedo2)},
                       {"axis", vec3_json(p.split_axis)}};
    else if (p.pattern == Pattern::Checker)
      jp["pattern"] = {{"kind", "checker"}, {"albedo2", rgb_json(p.albedo2)}, {"cell", p.cell}};
    prims.push_back(jp);
  }
  nlohmann::json shadows = nlohmann::json::array();
  for (const auto& s : scene.shadows) {
    nlohmann::json poly = nlohmann::json::array();
    for (const auto& v : s.polygon) poly.push_back({v[0], v[1]});
    shadows.push_back({{"view_id", s.view_id}, {"polygon", poly}, {"darkening", s.darkening}});
  }
  return {
      {"name", scene.name},
      {"seed", scene.seed},
      {"background", rgb_json(scene.background)},
      {"bv", {{"min", vec3_json(scene.bv.min)}, {"max", vec3_json(scene.bv.max)}}},
      {"rig", rig_to_json(scene.rig)},
      {"primitives", prims},
      {"shadows", shadows},
  };
}

Scene scene_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  Scene scene;
  try {
    scene.name = j.value("name", std::string("scene"));
    scene.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("background")) scene.background = rgb_from(j.at("background"));
    scene.bv.min = vec3_from(j.at("bv").at("min"));
    scene.bv.max = vec3_from(j.at("bv").at("max"));

    const auto& jr = j.at("rig");
    if (jr.is_string()) {
      scene.rig = load_rig(base_dir / jr.get<std::string>());
    } else {
      scene.rig = rig_from_json(jr);
    }

    for (const auto& jp : j.at("primitives")) {
      Primitive p;
      const auto kind = jp.at("kind").get<std::string>();
      if (kind == "sphere") {
        p.kind = PrimitiveKind::Sphere;
        p.size = Vec3(jp.at("radius").get<double>(), 0, 0);
      } else if (kind == "box") {
        p.kind = PrimitiveKind::Box;
        p.size = vec3_from(jp.at("half_extents"));
      } else if (kind == "cylinder") {
        p.kind = PrimitiveKind::Cylinder;
        p.size = Vec3(jp.at("radius").get<double>(), jp.at("height").get<double>(), 0);
      } else {
        throw Error(ErrorCode::ParseError, "unknown primitive kind '" + kind + "'");
      }
      if (jp.contains("rotation")) {
        const auto& jrot = jp.at("rotation");
        if (jrot.size() != 9) throw Error(ErrorCode::ParseError, "rotation needs 9 numbers");
        for (int i = 0; i < 9; ++i) p.rotation(i / 3, i % 3) = jrot.at(i).get<double>();
      }
      if (jp.contains("translation")) p.translation = vec3_from(jp.at("translation"));
      if (jp.contains("albedo")) p.albedo = rgb_from(jp.at("albedo"));
      p.texture_noise = jp.value("texture_noise", 0);
      if (jp.contains("pattern")) {
        const auto& pat = jp.at("pattern");
        const auto pk = pat.at("kind").get<std::string>();
        if (pk == "split") {
          p.pattern = Pattern::Split;
          if (pat.contains("axis")) p.split_axis = vec3_from(pat.at("axis"));
        } else if (pk == "checker") {
          p.pattern = Pattern::Checker;
          p.cell = pat.value("cell", 10.0);
        } else if (pk != "solid") {
          throw Error(ErrorCode::ParseError, "unknown pattern '" + pk + "'");
        }
        if (pat.contains("albedo2")) p.albedo2 = rgb_from(pat.at("albedo2"));
      }
      p.validate();
      scene.primitives.push_back(p);
    }

    if (j.contains("shadows")) {
      for (const auto& js : j.at("shadows")) {
        ShadowPatch s;
        s.view_id = js.at("view_id").get<std::string>();
        s.darkening = js.at("darkening").get<double>();
        for (const auto& v : js.at("polygon")) s.polygon.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        if (!(s.darkening > 0.0 && s.darkening < 1.0))
          throw Error(ErrorCode::InvalidArgument, "shadow darkening must lie in (0,1)");
        if (s.polygon.size() < 3) throw Error(ErrorCode::InvalidArgument, "shadow polygon needs 3+ vertices");
        if (!scene.rig.find(s.view_id))
          throw Error(ErrorCode::InvalidArgument, "shadow references unknown view '" + s.view_id + "'");
        scene.shadows.push_back(std::move(s));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("scene: ") + e.what());
  }
  scene.bv.validate();
  if (scene.primitives.empty()) throw Error(ErrorCode::InvalidArgument, "scene has no primitives");
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scene file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return scene_from_json(j, path.parent_path());
}

}  // namespace silhuetta
