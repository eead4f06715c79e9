// silhuetta command-line driver. Talks to the library only through the C API.
#include <silhuetta/silhuetta.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string grid;
  std::string bv;
};

struct Failure {
  sil_status status;
};

void check(sil_status s) {
  if (s != SIL_OK) throw Failure{s};
}

std::vector<double> split_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw CLI::ValidationError("bad number '" + item + "'");
    }
    if (used != item.size()) throw CLI::ValidationError("bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void parse_grid(const std::string& text, std::uint32_t grid[3]) {
  const auto v = split_numbers(text, 'x');
  if (v.size() != 3) throw CLI::ValidationError("--grid expects N1xN2xN3");
  for (int a = 0; a < 3; ++a) {
    if (v[a] < 1 || v[a] != static_cast<double>(static_cast<std::uint32_t>(v[a])))
      throw CLI::ValidationError("--grid expects positive integers");
    grid[a] = static_cast<std::uint32_t>(v[a]);
  }
}

void parse_bv(const std::string& text, double bv[6]) {
  const auto v = split_numbers(text, ',');
  if (v.size() != 6) throw CLI::ValidationError("--bv expects x0,y0,z0,x1,y1,z1");
  for (int i = 0; i < 6; ++i) bv[i] = v[i];
}

void precision_footnote() {
  std::fprintf(stderr,
               "note: precision_pct = |RE| / real volume * 100 (the real volume is the "
               "denominator, which is what reproduces the reference table)\n");
}

int cmd_synth(const Globals& g, const std::string& scene_path) {
  sil_scene* scene = nullptr;
  check(sil_scene_load(scene_path.c_str(), &scene));
  std::unique_ptr<sil_scene, decltype(&sil_scene_free)> hold(scene, sil_scene_free);
  if (g.seed) check(sil_scene_set_seed(scene, *g.seed));
  check(sil_synth_write(scene, g.out.c_str()));
  std::printf("wrote %zu views to %s\n", sil_scene_view_count(scene), g.out.c_str());
  return 0;
}

int cmd_silhouette(const std::string& in, const std::string& out, bool naive, bool inv,
                   int window, int se) {
  sil_image* img = nullptr;
  check(sil_image_read(in.c_str(), &img));
  std::unique_ptr<sil_image, decltype(&sil_image_free)> hold(img, sil_image_free);
  sil_preprocess_options opts;
  sil_preprocess_options_init(&opts);
  opts.naive = naive;
  opts.invert = inv;
  opts.window = window;
  opts.se_size = se;
  sil_mask* mask = nullptr;
  check(sil_silhouette_extract(img, &opts, &mask));
  std::unique_ptr<sil_mask, decltype(&sil_mask_free)> mhold(mask, sil_mask_free);
  check(sil_mask_write_pgm(mask, out.c_str()));
  std::printf("%zu foreground pixels\n", sil_mask_count(mask));
  return 0;
}

struct ReconstructArgs {
  std::string scene, rig;
  std::vector<std::string> images;
  double tau = 25.0;
  int min_views = 2, max_iters = 64;
  bool no_carve = false, naive = false, invert = false, stl = false;
  int window = 3, se = 3;
  std::optional<double> real_volume;
};

int cmd_reconstruct(const Globals& g, const ReconstructArgs& a) {
  sil_pipeline_options opts;
  sil_pipeline_options_init(&opts);
  std::vector<const char*> image_ptrs;
  if (!a.scene.empty()) opts.scene_path = a.scene.c_str();
  if (!a.rig.empty()) opts.rig_path = a.rig.c_str();
  for (const auto& p : a.images) image_ptrs.push_back(p.c_str());
  opts.image_paths = image_ptrs.empty() ? nullptr : image_ptrs.data();
  opts.image_count = image_ptrs.size();
  if (!g.grid.empty()) parse_grid(g.grid, opts.grid);
  if (!g.bv.empty()) {
    opts.has_bv = 1;
    parse_bv(g.bv, opts.bv);
  }
  opts.preprocess.naive = a.naive;
  opts.preprocess.invert = a.invert;
  opts.preprocess.window = a.window;
  opts.preprocess.se_size = a.se;
  opts.tau = a.tau;
  opts.min_views = a.min_views;
  opts.max_iters = a.max_iters;
  opts.carve = !a.no_carve;
  if (g.seed) {
    opts.has_seed = 1;
    opts.seed = *g.seed;
  }
  if (a.real_volume) {
    opts.has_real_volume = 1;
    opts.real_volume_cm3 = *a.real_volume;
  }
  opts.write_stl = a.stl;
  opts.output_dir = g.out.c_str();

  sil_pipeline_summary s{};
  check(sil_pipeline_run(&opts, &s));
  std::printf("hull: %zu voxels, %.6f cm3\n", s.hull_voxels, s.hull_volume_cm3);
  if (!a.no_carve)
    std::printf("carve: %d iterations, %zu removed, %s\n", s.carve_iterations, s.carved_voxels,
                s.carve_converged ? "converged" : "not converged");
  std::printf("final: %zu voxels, mesh volume %.6f cm3\n", s.final_voxels, s.mesh_volume_cm3);
  if (s.has_ground_truth) {
    double re = 0, prec = 0;
    check(sil_relative_error(s.ground_truth_cm3, s.mesh_volume_cm3, &re));
    check(sil_precision(s.ground_truth_cm3, s.mesh_volume_cm3, &prec));
    std::printf("reference: %.6f cm3, RE %.2f%%, precision %.2f%%\n", s.ground_truth_cm3, re,
                prec);
    precision_footnote();
  }
  std::printf("artifacts in %s\n", g.out.c_str());
  return 0;
}

int cmd_volume(const std::string& path) {
  sil_mesh* mesh = nullptr;
  check(sil_mesh_read_obj(path.c_str(), &mesh));
  std::unique_ptr<sil_mesh, decltype(&sil_mesh_free)> hold(mesh, sil_mesh_free);
  double v = 0;
  check(sil_mesh_signed_volume(mesh, &v));
  std::printf("%.6f cm3\n", v);
  return 0;
}

int cmd_report(const std::string& path, const std::string& out) {
  char* csv = nullptr;
  check(sil_report_from_csv(path.c_str(), &csv));
  std::unique_ptr<char, decltype(&sil_string_free)> hold(csv, sil_string_free);
  if (out.empty()) {
    std::fputs(csv, stdout);
  } else {
    std::ofstream f(out, std::ios::binary);
    f << csv;
    if (!f) {
      std::fprintf(stderr, "error: cannot write %s\n", out.c_str());
      return 1;
    }
    std::printf("wrote %s\n", out.c_str());
  }
  precision_footnote();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"silhuetta: shape-from-silhouette volume measurement"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "RNG seed (overrides the scene seed)");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--grid", g.grid, "voxel grid N1xN2xN3 (default 128x128x128)");
  app.add_option("--bv", g.bv, "bounding volume x0,y0,z0,x1,y1,z1 in mm");

  auto* synth = app.add_subcommand("synth", "render a scene's views, exact masks and ground truth");
  std::string scene_path;
  synth->add_option("scene", scene_path, "scene JSON")->required();

  auto* sil = app.add_subcommand("silhouette", "extract a silhouette mask from one image");
  std::string sil_in, sil_out;
  bool sil_naive = false, sil_invert = false;
  int sil_window = 3, sil_se = 3;
  sil->add_option("--in", sil_in, "input PPM/PGM")->required();
  sil->add_option("--out", sil_out, "output mask PGM")->required();
  sil->add_flag("--naive", sil_naive, "plain Otsu on grayscale");
  sil->add_flag("--invert", sil_invert, "object darker than background");
  sil->add_option("--window", sil_window, "normalization window (odd)");
  sil->add_option("--se", sil_se, "square structuring element side");

  auto* rec = app.add_subcommand("reconstruct", "run the full pipeline");
  ReconstructArgs ra;
  rec->add_option("--scene", ra.scene, "synthetic scene JSON");
  rec->add_option("--rig", ra.rig, "camera rig JSON (image mode)");
  rec->add_option("--images", ra.images, "one image per rig camera, in rig order");
  rec->add_option("--tau", ra.tau, "consistency threshold on 0..255 channel std-dev");
  rec->add_option("--min-views", ra.min_views, "views needed before a voxel can be carved");
  rec->add_option("--max-iters", ra.max_iters, "carving sweep limit");
  rec->add_flag("--no-carve", ra.no_carve, "visual hull only");
  rec->add_flag("--naive", ra.naive, "plain Otsu silhouettes");
  rec->add_flag("--invert", ra.invert, "object darker than background");
  rec->add_option("--window", ra.window, "normalization window (odd)");
  rec->add_option("--se", ra.se, "square structuring element side");
  rec->add_flag("--stl", ra.stl, "also write mesh.stl");
  rec->add_option("--real-volume", ra.real_volume, "reference volume in cm3 (image mode)");

  auto* vol = app.add_subcommand("volume", "print the signed volume of a closed OBJ mesh");
  std::string obj_path;
  vol->add_option("mesh", obj_path, "OBJ file")->required();

  auto* rep = app.add_subcommand("report", "metrics table from a volume-record CSV");
  std::string rec_path, rep_out;
  rep->add_option("records", rec_path, "CSV: experiment,method,exp_volume,real_volume[,uncertainty]")
      ->required();
  rep->add_option("--out", rep_out, "write the table here instead of stdout");

  for (auto* sub : {synth, sil, rec, vol, rep}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(g, scene_path);
    if (*sil) return cmd_silhouette(sil_in, sil_out, sil_naive, sil_invert, sil_window, sil_se);
    if (*rec) return cmd_reconstruct(g, ra);
    if (*vol) return cmd_volume(obj_path);
    if (*rep) return cmd_report(rec_path, rep_out);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error (%s): %s\n", sil_status_name(f.status), sil_last_error());
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
