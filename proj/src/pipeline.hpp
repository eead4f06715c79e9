#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "carving.hpp"
#include "hull.hpp"
#include "silhouette.hpp"

namespace silhuetta {

struct PipelineConfig {
  // Exactly one input: a synthetic scene, or a rig plus one image per camera.
  std::optional<std::filesystem::path> scene_path;
  std::optional<std::filesystem::path> rig_path;
  std::vector<std::filesystem::path> image_paths;

  std::optional<BoundingVolume> bv;  // required in image mode
  GridDims dims{128, 128, 128};
  PreprocessConfig preprocess;
  ConsistencyParams consistency;
  bool carve = true;
  std::optional<std::uint64_t> seed;       // overrides the scene seed
  std::optional<double> real_volume_cm3;   // reference volume in image mode
  std::string method;                      // report label; derived when empty
  bool write_stl = false;
  std::filesystem::path output_dir = "out";

  void validate() const;
};

struct StageTime {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  std::string experiment;
  std::string method;
  std::vector<std::string> view_ids;
  std::vector<std::size_t> silhouette_pixels;
  std::size_t hull_voxels = 0;
  double hull_volume_cm3 = 0.0;
  int carve_iterations = 0;
  std::size_t carved_voxels = 0;
  bool carve_converged = true;
  std::size_t final_voxels = 0;
  double mesh_volume_cm3 = 0.0;
  std::size_t mesh_vertices = 0, mesh_triangles = 0;
  std::optional<double> ground_truth_cm3;
  std::vector<StageTime> timings;
  std::vector<std::filesystem::path> artifacts;
};

/// silhouettes -> visual hull -> carving -> cuberille mesh -> volume -> report.
/// Writes masks/mask_<id>.pgm, grid.vox, mesh.obj (+ mesh.stl), report.csv
/// (when a reference volume is known) and summary.json into output_dir. A
/// stage failure is rethrown with the stage (and view) named in the message.
PipelineResult run_pipeline(const PipelineConfig& cfg);

}  // namespace silhuetta
