#include "doctest.h"

#include <cmath>
#include <fstream>
#include <set>

#include <Eigen/Geometry>

#include "error.hpp"
#include "silhouette.hpp"
#include "support.hpp"
#include "synth.hpp"

using namespace silhuetta;

namespace {

BoundingVolume cube(double half) { return {Vec3::Constant(-half), Vec3::Constant(half)}; }

Scene base_scene() {
  Scene s;
  s.rig = four_camera_rig();
  s.bv = cube(100);
  s.seed = 5;
  return s;
}

struct Outline {
  double area = 0, perimeter = 0;
};

Outline convex_outline(std::vector<Eigen::Vector2d> pts) {
  // convex hull (monotone chain) then shoelace
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
  std::vector<Eigen::Vector2d> h(2 * pts.size());
  auto cross = [](auto& o, auto& a, auto& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  double a = 0, len = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& p = h[i];
    const auto& q = h[(i + 1) % h.size()];
    a += p.x() * q.y() - q.x() * p.y();
    len += (q - p).norm();
  }
  return {std::abs(a) / 2, len};
}

}  // namespace

TEST_CASE("sphere on the optical axis renders a centred disk") {
  auto s = base_scene();
  s.primitives.push_back(Primitive::sphere(Vec3::Zero(), 40));
  for (const auto& cam : s.rig.cameras) {
    const auto m = render_silhouette_exact(s, cam);
    REQUIRE(m.count() > 0);
    // pixel x has centre x + 0.5, so the mirror of x about cx = 320 is 639 - x
    for (int y = 0; y < 480; ++y)
      for (int x = 0; x < 640; ++x) {
        REQUIRE(m.at(x, y) == m.at(639 - x, y));
        REQUIRE(m.at(x, y) == m.at(x, 479 - y));
      }
    // area of the projected disk: tangent cone half-angle asin(r/d)
    const double d = cam.center().norm();
    const double radius_px = cam.intrinsics.fx * std::tan(std::asin(40.0 / d));
    CHECK(m.count() == doctest::Approx(M_PI * radius_px * radius_px).epsilon(0.01));
  }
}

TEST_CASE("empty scene renders nothing") {
  const auto s = base_scene();
  for (const auto& cam : s.rig.cameras) CHECK(render_silhouette_exact(s, cam).count() == 0);
  CHECK(brute_force_hull_volume(s, s.rig, 20000, 1).volume_cm3 == 0.0);
}

TEST_CASE("box mask area converges to the projected polygon area") {
  auto s = base_scene();
  auto b = Primitive::box({8, -6, 4}, {30, 20, 25});
  b.rotation = Eigen::AngleAxisd(0.4, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  s.primitives.push_back(b);
  for (const auto& cam : s.rig.cameras) {
    std::vector<Eigen::Vector2d> corners;
    for (int c = 0; c < 8; ++c) {
      const Vec3 local((c & 1 ? 1 : -1) * 30.0, (c & 2 ? 1 : -1) * 20.0, (c & 4 ? 1 : -1) * 25.0);
      const auto px = project_point(b.rotation * local + b.translation, cam);
      REQUIRE(px);
      corners.push_back({px->u, px->v});
    }
    const auto outline = convex_outline(corners);
    const double area = outline.area;
    // only pixels straddling the outline can be wrong; they sit in a band
    // sqrt(2) pixels wide, i.e. sqrt(2)/f original pixels at scale f
    double err = 0;
    for (int f : {1, 2, 4}) {
      const auto m = render_silhouette_exact(s, scaled_camera(cam, f));
      err = std::abs(static_cast<double>(m.count()) / (f * f) - area);
      CHECK(err <= outline.perimeter * std::sqrt(2.0) / f);
    }
    CHECK(err / area < 0.005);
  }
}

TEST_CASE("colour renders") {
  auto s = base_scene();
  auto p = Primitive::sphere(Vec3::Zero(), 45);
  p.albedo = {30, 60, 90};
  s.primitives.push_back(p);
  s.background = {200, 200, 200};

  const auto& cam = s.rig.cameras[1];
  const auto img = render_color(s, cam);
  std::set<std::array<int, 3>> colours;
  for (int y = 0; y < 480; ++y)
    for (int x = 0; x < 640; ++x) colours.insert({img.px(x, y)[0], img.px(x, y)[1], img.px(x, y)[2]});
  CHECK(colours.size() == 2);

  // exact silhouette = colour render thresholded halfway between albedo and background
  const auto exact = render_silhouette_exact(s, cam);
  const auto gray = to_grayscale(img);
  const int g_obj = gray.at(320, 240), g_bg = gray.at(0, 0);
  const auto thresh = threshold_apply(invert(gray), (255 - g_bg + 255 - g_obj) / 2);
  CHECK(thresh == exact);

  // determinism, and seeds matter once there is noise
  s.primitives[0].texture_noise = 15;
  const auto a = render_color(s, cam), b = render_color(s, cam);
  CHECK(a == b);
  s.seed = 6;
  CHECK_FALSE(render_color(s, cam) == a);

  // shadow darkening 0.5 halves covered background pixels only
  s.primitives[0].texture_noise = 0;
  s.seed = 5;
  s.shadows.push_back({cam.id, {{0, 0}, {200, 0}, {200, 100}, {0, 100}}, 0.5});
  s.shadows.push_back({cam.id, {{250, 200}, {400, 200}, {400, 280}, {250, 280}}, 0.5});
  const auto sh = render_color(s, cam);
  CHECK(sh.px(10, 10)[0] == 100);
  CHECK(sh.px(199, 99)[1] == 100);
  CHECK(sh.px(201, 10)[0] == 200);
  CHECK(sh.px(320, 240)[0] == 30);  // object pixels are never darkened
  // other views untouched
  CHECK(render_color(s, s.rig.cameras[0]).px(10, 10)[0] == 200);
}

TEST_CASE("analytic volumes") {
  auto s = base_scene();
  s.primitives.push_back(Primitive::sphere(Vec3::Zero(), 50));
  CHECK(analytic_volume(s) == doctest::Approx(523.599).epsilon(1e-6));
  s.primitives = {Primitive::box(Vec3::Zero(), {50, 30, 20})};
  CHECK(analytic_volume(s) == doctest::Approx(240.0).epsilon(1e-12));
  s.primitives = {Primitive::cylinder(Vec3::Zero(), 10, 20)};
  CHECK(analytic_volume(s) == doctest::Approx(M_PI * 100 * 20 / 1000).epsilon(1e-12));

  s.primitives = {Primitive::sphere({-60, 0, 0}, 20), Primitive::box({40, 0, 0}, {10, 10, 10})};
  CHECK(analytic_volume(s) == doctest::Approx(4.0 / 3 * M_PI * 8000 / 1000 + 8.0).epsilon(1e-12));

  s.primitives = {Primitive::sphere({0, 0, 0}, 20), Primitive::sphere({30, 0, 0}, 20)};
  try {
    analytic_volume(s);
    FAIL("expected OverlappingPrimitives");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OverlappingPrimitives);
  }
  CHECK_THROWS_AS(Primitive::sphere(Vec3::Zero(), 0).validate(), Error);
  CHECK_THROWS_AS(Primitive::box(Vec3::Zero(), {1, -1, 1}).validate(), Error);
}

TEST_CASE("Monte Carlo hull oracle") {
  auto s = base_scene();
  s.bv = cube(40);
  s.primitives = {Primitive::box(Vec3::Zero(), {150, 150, 150})};
  // the cameras sit outside the box, every ray toward the bv hits it
  for (auto& cam : s.rig.cameras) cam.extrinsics.translation *= 2.0;
  for (auto& cam : s.rig.cameras) REQUIRE(cam.center().norm() > 300);
  const auto full = brute_force_hull_volume(s, s.rig, 20000, 3);
  CHECK(full.volume_cm3 == doctest::Approx(80.0 * 80 * 80 / 1000).epsilon(1e-12));

  auto sp = base_scene();
  sp.primitives = {Primitive::sphere(Vec3::Zero(), 50)};
  const auto est = brute_force_hull_volume(sp, sp.rig, 100000, 4);
  CHECK(est.volume_cm3 >= 523.599 - est.half_width_cm3);
  CHECK(est.half_width_cm3 > 0);
  const auto again = brute_force_hull_volume(sp, sp.rig, 100000, 4);
  CHECK(again.volume_cm3 == est.volume_cm3);
  CHECK_THROWS_AS(brute_force_hull_volume(sp, sp.rig, 100, 4), Error);
}

TEST_CASE("scene files") {
  const auto s = load_scene(test::source_dir() / "scenes" / "exp1_sphere_shadow.json");
  CHECK(s.rig.cameras.size() == 4);
  CHECK(s.primitives.size() == 1);
  CHECK(analytic_volume(s) == doctest::Approx(523.5987755982989).epsilon(1e-12));
  CHECK(s.shadows.size() == 4);

  test::TempDir tmp("scene");
  std::ofstream(tmp / "s.json") << scene_to_json(s).dump(2);
  const auto back = load_scene(tmp / "s.json");
  CHECK(back.rig == s.rig);
  CHECK(back.primitives.size() == 1);
  CHECK(back.primitives[0].cell == s.primitives[0].cell);
  for (const auto& cam : s.rig.cameras) CHECK(render_color(back, cam) == render_color(s, cam));

  const auto files = write_scene_views(s, tmp / "views");
  CHECK(files.size() == 9);
  CHECK(read_mask_pgm(tmp / "views" / "mask_cam2.pgm") ==
        render_silhouette_exact(s, s.rig.cameras[2]));

  for (const char* name : {"exp2_two_objects", "exp3_cluttered", "two_tone_sphere", "noisy_sphere"}) {
    CAPTURE(name);
    const auto sc = load_scene(test::source_dir() / "scenes" / (std::string(name) + ".json"));
    CHECK(analytic_volume(sc) > 0);
  }

  std::ofstream(tmp / "bad.json") << R"({"name":"x","bv":{"min":[0,0,0],"max":[1,1,1]},"rig":"nope.json","primitives":[]})";
  CHECK_THROWS_AS(load_scene(tmp / "bad.json"), Error);
  std::ofstream(tmp / "bad2.json") << R"({"primitives": [{"kind": "cone"}]})";
  CHECK_THROWS_AS(load_scene(tmp / "bad2.json"), Error);
}
