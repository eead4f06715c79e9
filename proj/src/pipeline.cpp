#include "pipeline.hpp"

#include <chrono>
#include <fstream>

#include "error.hpp"
#include "mesh.hpp"
#include "metrics.hpp"
#include "synth.hpp"

namespace silhuetta {

void PipelineConfig::validate() const {
  const bool image_mode = !image_paths.empty() || rig_path.has_value();
  if (scene_path.has_value() == image_mode)
    throw Error(ErrorCode::InvalidArgument, "provide exactly one of a scene or a rig with images");
  if (image_mode && (!rig_path || image_paths.empty()))
    throw Error(ErrorCode::InvalidArgument, "image mode needs both a rig and image paths");
  if (image_mode && !bv)
    throw Error(ErrorCode::InvalidArgument, "image mode needs an explicit bounding volume");
  if (dims.n1 < 8 || dims.n2 < 8 || dims.n3 < 8)
    throw Error(ErrorCode::InvalidArgument, "grid dims must be >= 8 on every axis");
  if (bv) bv->validate();
  if (preprocess.window < 1 || preprocess.window % 2 == 0)
    throw Error(ErrorCode::InvalidArgument, "normalization window must be odd and >= 1");
  preprocess.se.validate();
  consistency.validate();
}

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  explicit StageTimer(std::vector<StageTime>& sink) : sink_(sink) {}

  template <typename F>
  auto run(const std::string& stage, F&& body) {
    const auto t0 = Clock::now();
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        record(stage, t0);
      } else {
        auto out = body();
        record(stage, t0);
        return out;
      }
    } catch (const Error& e) {
      throw Error(e.code(), stage + ": " + e.what());
    }
  }

 private:
  void record(const std::string& stage, Clock::time_point t0) {
    sink_.push_back({stage, std::chrono::duration<double>(Clock::now() - t0).count()});
  }
  std::vector<StageTime>& sink_;
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  PipelineResult res;
  StageTimer timer(res.timings);
  std::filesystem::create_directories(cfg.output_dir / "masks");

  // inputs
  CameraRig rig;
  ColorImageSet colors;
  BoundingVolume bv;
  std::optional<std::uint64_t> seed;
  if (cfg.scene_path) {
    Scene scene = timer.run("load", [&] { return load_scene(*cfg.scene_path); });
    if (cfg.seed) scene.seed = *cfg.seed;
    seed = scene.seed;
    res.experiment = scene.name;
    rig = scene.rig;
    bv = cfg.bv.value_or(scene.bv);
    res.ground_truth_cm3 = timer.run("ground_truth", [&] { return analytic_volume(scene); });
    timer.run("render", [&] {
      for (const auto& cam : rig.cameras) colors.push_back({render_color(scene, cam), cam});
    });
  } else {
    rig = timer.run("load", [&] { return load_rig(*cfg.rig_path); });
    if (cfg.image_paths.size() != rig.cameras.size())
      throw Error(ErrorCode::InvalidArgument,
                  "load: " + std::to_string(cfg.image_paths.size()) + " images for " +
                      std::to_string(rig.cameras.size()) + " cameras");
    timer.run("load_images", [&] {
      for (std::size_t v = 0; v < rig.cameras.size(); ++v)
        colors.push_back({read_color_image(cfg.image_paths[v]), rig.cameras[v]});
    });
    validate(colors);
    res.experiment = cfg.image_paths.front().stem().string();
    bv = *cfg.bv;
    res.ground_truth_cm3 = cfg.real_volume_cm3;
  }
  res.method = !cfg.method.empty() ? cfg.method : cfg.preprocess.naive ? "naive" : "optimized";

  // silhouettes
  SilhouetteSet views;
  timer.run("silhouette", [&] {
    for (const auto& cv : colors) {
      BinaryMask mask;
      try {
        mask = extract_silhouette(cv.image, cfg.preprocess);
      } catch (const Error& e) {
        throw Error(e.code(), "view " + cv.camera.id + ": " + e.what());
      }
      const auto path = cfg.output_dir / "masks" / ("mask_" + cv.camera.id + ".pgm");
      write_mask_pgm(mask, path);
      res.artifacts.push_back(path);
      res.view_ids.push_back(cv.camera.id);
      res.silhouette_pixels.push_back(mask.count());
      views.push_back({std::move(mask), cv.camera});
    }
  });

  // visual hull
  VoxelGrid grid = timer.run("hull", [&] {
    VoxelGrid g = classify_voxels(build_grid(bv, cfg.dims), views);
    if (g.solid_count() == 0) throw Error(ErrorCode::EmptyGrid, "visual hull is empty");
    return g;
  });
  res.hull_voxels = grid.solid_count();
  res.hull_volume_cm3 = hull_volume(grid);

  if (cfg.carve) {
    CarveResult carved = timer.run("carve", [&] { return carve(std::move(grid), colors, cfg.consistency); });
    res.carve_iterations = carved.iterations;
    res.carved_voxels = carved.removed;
    res.carve_converged = carved.converged;
    grid = std::move(carved.grid);
  }
  res.final_voxels = grid.solid_count();

  const auto grid_path = cfg.output_dir / "grid.vox";
  save_grid(grid, grid_path);
  res.artifacts.push_back(grid_path);

  TriangleMesh mesh = timer.run("mesh", [&] { return extract_surface_mesh(grid); });
  res.mesh_vertices = mesh.vertices.size();
  res.mesh_triangles = mesh.triangles.size();
  res.mesh_volume_cm3 = timer.run("volume", [&] { return signed_volume(mesh); });

  const auto obj_path = cfg.output_dir / "mesh.obj";
  write_obj(mesh, obj_path);
  res.artifacts.push_back(obj_path);
  if (cfg.write_stl) {
    const auto stl_path = cfg.output_dir / "mesh.stl";
    write_stl(mesh, stl_path);
    res.artifacts.push_back(stl_path);
  }

  if (res.ground_truth_cm3) {
    timer.run("report", [&] {
      const VolumeRecord rec{res.experiment, res.method, res.mesh_volume_cm3, *res.ground_truth_cm3, 0.5};
      const auto path = cfg.output_dir / "report.csv";
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
      out << report_csv(std::span(&rec, 1));
      res.artifacts.push_back(path);
    });
  }

  // run summary; timings make this the one non-reproducible artifact
  nlohmann::json summary = {
      {"experiment", res.experiment},
      {"method", res.method},
      {"grid", {cfg.dims.n1, cfg.dims.n2, cfg.dims.n3}},
      {"bv", {{"min", {bv.min.x(), bv.min.y(), bv.min.z()}}, {"max", {bv.max.x(), bv.max.y(), bv.max.z()}}}},
      {"views", res.view_ids},
      {"silhouette_pixels", res.silhouette_pixels},
      {"hull_voxels", res.hull_voxels},
      {"hull_volume_cm3", res.hull_volume_cm3},
      {"carve",
       {{"enabled", cfg.carve},
        {"consistency_test", "per-channel population std-dev <= tau (substituted criterion)"},
        {"tau", cfg.consistency.tau},
        {"min_views", cfg.consistency.min_views},
        {"max_iters", cfg.consistency.max_iters},
        {"iterations", res.carve_iterations},
        {"removed_voxels", res.carved_voxels},
        {"converged", res.carve_converged}}},
      {"final_voxels", res.final_voxels},
      {"mesh", {{"vertices", res.mesh_vertices}, {"triangles", res.mesh_triangles}}},
      {"mesh_volume_cm3", res.mesh_volume_cm3},
  };
  if (seed) summary["seed"] = *seed;
  if (res.ground_truth_cm3) {
    summary["ground_truth_cm3"] = *res.ground_truth_cm3;
    summary["relative_error_pct"] = relative_error(*res.ground_truth_cm3, res.mesh_volume_cm3);
    summary["precision_pct"] = precision_metric(*res.ground_truth_cm3, res.mesh_volume_cm3);
    summary["precision_note"] = "precision_pct = |RE_pct| / real_volume_cm3 * 100";
  }
  nlohmann::json times = nlohmann::json::object();
  for (const auto& t : res.timings) times[t.stage] = t.seconds;
  summary["stage_seconds"] = times;

  const auto summary_path = cfg.output_dir / "summary.json";
  std::ofstream out(summary_path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + summary_path.string());
  out << summary.dump(2) << '\n';
  res.artifacts.push_back(summary_path);
  return res;
}

}  // namespace silhuetta
