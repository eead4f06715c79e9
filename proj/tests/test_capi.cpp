// Exercises the shared library through the public C header only.
#include "doctest.h"

#include <silhuetta/silhuetta.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path src(const char* rel) { return fs::path(SILHUETTA_SOURCE_DIR) / rel; }

struct Scratch {
  fs::path path;
  Scratch() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("silhuetta_capi_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("status names and argument checks") {
  CHECK(std::string(sil_version()).size() > 0);
  CHECK(std::string(sil_status_name(SIL_OK)) == "OK");
  CHECK(std::string(sil_status_name(SIL_ERR_NOT_CLOSED)) == "NotClosed");
  sil_rig* rig = nullptr;
  CHECK(sil_rig_load(nullptr, &rig) == SIL_ERR_INVALID_ARGUMENT);
  CHECK(std::string(sil_last_error()).find("path") != std::string::npos);
  CHECK(sil_rig_load("/definitely/not/here.json", &rig) == SIL_ERR_IO);
  CHECK(rig == nullptr);
  sil_rig_free(nullptr);
  sil_mesh_free(nullptr);
  sil_scene_free(nullptr);
  sil_image_free(nullptr);
  sil_mask_free(nullptr);
  sil_string_free(nullptr);
}

TEST_CASE("rig handle") {
  sil_rig* rig = nullptr;
  REQUIRE(sil_rig_load(src("rigs/paper4.json").c_str(), &rig) == SIL_OK);
  CHECK(sil_rig_camera_count(rig) == 4);
  const char* id = nullptr;
  REQUIRE(sil_rig_camera_id(rig, 3, &id) == SIL_OK);
  CHECK(std::string(id) == "cam3");
  CHECK(sil_rig_camera_id(rig, 4, &id) == SIL_ERR_INDEX_OUT_OF_RANGE);

  const double origin[3] = {0, 0, 0};
  double px[2];
  int on = 0;
  REQUIRE(sil_rig_project(rig, 0, origin, px, &on) == SIL_OK);
  CHECK(px[0] == doctest::Approx(320));
  CHECK(px[1] == doctest::Approx(240));
  CHECK(on == 1);
  const double behind[3] = {0, 0, 1000};  // above the top camera
  CHECK(sil_rig_project(rig, 3, behind, px, &on) == SIL_ERR_BEHIND_CAMERA);

  Scratch tmp;
  const auto out = (tmp.path / "rig.json").string();
  CHECK(sil_rig_save(rig, out.c_str()) == SIL_OK);
  sil_rig* again = nullptr;
  CHECK(sil_rig_load(out.c_str(), &again) == SIL_OK);
  CHECK(sil_rig_camera_count(again) == 4);
  sil_rig_free(again);
  sil_rig_free(rig);

  sil_rig* made = nullptr;
  REQUIRE(sil_rig_four_camera(nullptr, &made) == SIL_OK);
  CHECK(sil_rig_camera_count(made) == 4);
  sil_rig_free(made);
}

TEST_CASE("mesh and metrics") {
  sil_mesh* mesh = nullptr;
  REQUIRE(sil_mesh_read_obj(src("data/cube10mm.obj").c_str(), &mesh) == SIL_OK);
  double v = 0;
  CHECK(sil_mesh_signed_volume(mesh, &v) == SIL_OK);
  CHECK(v == doctest::Approx(1.0));
  CHECK(sil_mesh_is_closed(mesh) == 1);
  CHECK(sil_mesh_vertex_count(mesh) == 8);
  CHECK(sil_mesh_triangle_count(mesh) == 12);
  sil_mesh_free(mesh);

  double re = 0, p = 0;
  CHECK(sil_relative_error(240, 258.9, &re) == SIL_OK);
  CHECK(re == doctest::Approx(-7.3001).epsilon(1e-4));
  CHECK(sil_precision(240, 258.9, &p) == SIL_OK);
  CHECK(p == doctest::Approx(3.0417).epsilon(1e-4));
  CHECK(sil_relative_error(240, 0, &re) == SIL_ERR_DIVIDE_BY_ZERO);

  char* csv = nullptr;
  REQUIRE(sil_report_from_csv(src("data/table1.csv").c_str(), &csv) == SIL_OK);
  CHECK(std::strstr(csv, "AVERAGE,proposed,,,0.37,1.39") != nullptr);
  sil_string_free(csv);
}

TEST_CASE("scene, silhouette and pipeline") {
  sil_scene* scene = nullptr;
  REQUIRE(sil_scene_load(src("scenes/exp1_sphere_shadow.json").c_str(), &scene) == SIL_OK);
  CHECK(sil_scene_view_count(scene) == 4);
  double gt = 0;
  CHECK(sil_scene_ground_truth(scene, &gt) == SIL_OK);
  CHECK(gt == doctest::Approx(523.5988));

  sil_image* img = nullptr;
  REQUIRE(sil_scene_render_color(scene, 0, &img) == SIL_OK);
  int w = 0, h = 0;
  sil_image_size(img, &w, &h);
  CHECK(w == 640);
  CHECK(h == 480);
  sil_preprocess_options opts;
  sil_preprocess_options_init(&opts);
  opts.invert = 1;
  sil_mask* mask = nullptr;
  REQUIRE(sil_silhouette_extract(img, &opts, &mask) == SIL_OK);
  sil_mask* exact = nullptr;
  REQUIRE(sil_scene_render_mask(scene, 0, &exact) == SIL_OK);
  // opening trims a few rim pixels of the textured sphere
  const double got = static_cast<double>(sil_mask_count(mask));
  const double want = static_cast<double>(sil_mask_count(exact));
  CHECK(std::abs(got - want) / want < 0.01);
  CHECK(sil_scene_render_mask(scene, 9, &exact) == SIL_ERR_INDEX_OUT_OF_RANGE);
  sil_mask_free(mask);
  sil_mask_free(exact);
  sil_image_free(img);

  Scratch tmp;
  CHECK(sil_synth_write(scene, (tmp.path / "views").string().c_str()) == SIL_OK);
  CHECK(fs::exists(tmp.path / "views" / "view_cam3.ppm"));
  sil_scene_free(scene);

  sil_pipeline_options po;
  sil_pipeline_options_init(&po);
  const auto scene_path = src("scenes/exp1_sphere_shadow.json").string();
  const auto out = (tmp.path / "run").string();
  po.scene_path = scene_path.c_str();
  po.grid[0] = po.grid[1] = po.grid[2] = 24;
  po.preprocess.invert = 1;
  po.carve = 0;
  po.output_dir = out.c_str();
  sil_pipeline_summary s;
  REQUIRE(sil_pipeline_run(&po, &s) == SIL_OK);
  CHECK(s.mesh_volume_cm3 == doctest::Approx(s.hull_volume_cm3).epsilon(1e-9));
  CHECK(s.has_ground_truth == 1);

  double gv = 0;
  CHECK(sil_grid_volume((tmp.path / "run" / "grid.vox").string().c_str(), &gv) == SIL_OK);
  CHECK(gv == doctest::Approx(s.hull_volume_cm3).epsilon(1e-12));
  sil_mesh* m = nullptr;
  REQUIRE(sil_mesh_from_grid_file((tmp.path / "run" / "grid.vox").string().c_str(), &m) == SIL_OK);
  double mv = 0;
  CHECK(sil_mesh_signed_volume(m, &mv) == SIL_OK);
  CHECK(mv == doctest::Approx(gv).epsilon(1e-9));
  CHECK(sil_mesh_write_stl(m, (tmp.path / "m.stl").string().c_str()) == SIL_OK);
  sil_mesh_free(m);

  po.grid[0] = 4;
  CHECK(sil_pipeline_run(&po, &s) == SIL_ERR_INVALID_ARGUMENT);
  CHECK(std::string(sil_last_error()).find("grid") != std::string::npos);
}
