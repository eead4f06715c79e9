#include "silhuetta/silhuetta.h"

#include <cstring>
#include <new>
#include <string>

#include "camera.hpp"
#include "error.hpp"
#include "hull.hpp"
#include "mesh.hpp"
#include "metrics.hpp"
#include "pipeline.hpp"
#include "silhouette.hpp"
#include "synth.hpp"

struct sil_rig {
  silhuetta::CameraRig rig;
};
struct sil_scene {
  silhuetta::Scene scene;
};
struct sil_image {
  silhuetta::RgbImage image;
};
struct sil_mask {
  silhuetta::BinaryMask mask;
};
struct sil_mesh {
  silhuetta::TriangleMesh mesh;
};

namespace {

thread_local std::string g_last_error;

sil_status to_status(silhuetta::ErrorCode code) {
  using silhuetta::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return SIL_ERR_INVALID_ARGUMENT;
    case ErrorCode::ParseError: return SIL_ERR_PARSE;
    case ErrorCode::InvalidRig: return SIL_ERR_INVALID_RIG;
    case ErrorCode::IoError: return SIL_ERR_IO;
    case ErrorCode::EmptySilhouette: return SIL_ERR_EMPTY_SILHOUETTE;
    case ErrorCode::EmptyGrid: return SIL_ERR_EMPTY_GRID;
    case ErrorCode::NotClosed: return SIL_ERR_NOT_CLOSED;
    case ErrorCode::OverlappingPrimitives: return SIL_ERR_OVERLAPPING_PRIMITIVES;
    case ErrorCode::IndexOutOfRange: return SIL_ERR_INDEX_OUT_OF_RANGE;
    case ErrorCode::DivideByZero: return SIL_ERR_DIVIDE_BY_ZERO;
  }
  return SIL_ERR_INTERNAL;
}

sil_status fail(sil_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
sil_status guarded(F&& body) {
  try {
    return body();
  } catch (const silhuetta::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SIL_ERR_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(SIL_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(SIL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SIL_ERR_INTERNAL, "unknown error");
  }
}

sil_status null_arg(const char* name) {
  return fail(SIL_ERR_INVALID_ARGUMENT, std::string(name) + " is NULL");
}

silhuetta::PreprocessConfig to_config(const sil_preprocess_options* o) {
  silhuetta::PreprocessConfig cfg;
  if (!o) return cfg;
  cfg.window = o->window;
  cfg.se = silhuetta::StructuringElement::square(o->se_size);
  cfg.connectivity = o->connectivity;
  cfg.naive = o->naive != 0;
  cfg.invert = o->invert != 0;
  return cfg;
}

}  // namespace

extern "C" {

const char* sil_version(void) { return "1.0.0"; }

const char* sil_status_name(sil_status status) {
  switch (status) {
    case SIL_OK: return "OK";
    case SIL_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case SIL_ERR_PARSE: return "ParseError";
    case SIL_ERR_INVALID_RIG: return "InvalidRig";
    case SIL_ERR_IO: return "IoError";
    case SIL_ERR_EMPTY_SILHOUETTE: return "EmptySilhouette";
    case SIL_ERR_EMPTY_GRID: return "EmptyGrid";
    case SIL_ERR_NOT_CLOSED: return "NotClosed";
    case SIL_ERR_OVERLAPPING_PRIMITIVES: return "OverlappingPrimitives";
    case SIL_ERR_INDEX_OUT_OF_RANGE: return "IndexOutOfRange";
    case SIL_ERR_DIVIDE_BY_ZERO: return "DivideByZero";
    case SIL_ERR_BEHIND_CAMERA: return "BehindCamera";
    case SIL_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* sil_last_error(void) { return g_last_error.c_str(); }

void sil_string_free(char* s) { delete[] s; }

/* ---- rig ---- */

sil_status sil_rig_load(const char* path, sil_rig** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new sil_rig{silhuetta::load_rig(path)};
    return SIL_OK;
  });
}

sil_status sil_rig_save(const sil_rig* rig, const char* path) {
  if (!rig) return null_arg("rig");
  if (!path) return null_arg("path");
  return guarded([&] {
    silhuetta::save_rig(rig->rig, path);
    return SIL_OK;
  });
}

sil_status sil_rig_four_camera(const double target[3], sil_rig** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    const silhuetta::Vec3 t = target ? silhuetta::Vec3(target[0], target[1], target[2])
                                     : silhuetta::Vec3::Zero();
    *out = new sil_rig{silhuetta::four_camera_rig(t)};
    return SIL_OK;
  });
}

void sil_rig_free(sil_rig* rig) { delete rig; }

size_t sil_rig_camera_count(const sil_rig* rig) { return rig ? rig->rig.cameras.size() : 0; }

sil_status sil_rig_camera_id(const sil_rig* rig, size_t index, const char** id) {
  if (!rig) return null_arg("rig");
  if (!id) return null_arg("id");
  if (index >= rig->rig.cameras.size()) return fail(SIL_ERR_INDEX_OUT_OF_RANGE, "camera index out of range");
  *id = rig->rig.cameras[index].id.c_str();
  return SIL_OK;
}

sil_status sil_rig_project(const sil_rig* rig, size_t index, const double point_mm[3],
                           double pixel[2], int* on_sensor) {
  if (!rig) return null_arg("rig");
  if (!point_mm) return null_arg("point_mm");
  if (!pixel) return null_arg("pixel");
  if (index >= rig->rig.cameras.size()) return fail(SIL_ERR_INDEX_OUT_OF_RANGE, "camera index out of range");
  const auto& cam = rig->rig.cameras[index];
  const auto px = silhuetta::project_point({point_mm[0], point_mm[1], point_mm[2]}, cam);
  if (!px) return fail(SIL_ERR_BEHIND_CAMERA, "point is at or behind the optical plane of " + cam.id);
  pixel[0] = px->u;
  pixel[1] = px->v;
  if (on_sensor) *on_sensor = silhuetta::in_sensor(px->u, px->v, cam.intrinsics) ? 1 : 0;
  return SIL_OK;
}

/* ---- scene ---- */

sil_status sil_scene_load(const char* path, sil_scene** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new sil_scene{silhuetta::load_scene(path)};
    return SIL_OK;
  });
}

void sil_scene_free(sil_scene* scene) { delete scene; }

sil_status sil_scene_set_seed(sil_scene* scene, uint64_t seed) {
  if (!scene) return null_arg("scene");
  scene->scene.seed = seed;
  return SIL_OK;
}

size_t sil_scene_view_count(const sil_scene* scene) {
  return scene ? scene->scene.rig.cameras.size() : 0;
}

sil_status sil_scene_ground_truth(const sil_scene* scene, double* cm3) {
  if (!scene) return null_arg("scene");
  if (!cm3) return null_arg("cm3");
  return guarded([&] {
    *cm3 = silhuetta::analytic_volume(scene->scene);
    return SIL_OK;
  });
}

sil_status sil_scene_render_color(const sil_scene* scene, size_t view, sil_image** out) {
  if (!scene) return null_arg("scene");
  if (!out) return null_arg("out");
  if (view >= scene->scene.rig.cameras.size()) return fail(SIL_ERR_INDEX_OUT_OF_RANGE, "view index out of range");
  return guarded([&] {
    *out = new sil_image{silhuetta::render_color(scene->scene, scene->scene.rig.cameras[view])};
    return SIL_OK;
  });
}

sil_status sil_scene_render_mask(const sil_scene* scene, size_t view, sil_mask** out) {
  if (!scene) return null_arg("scene");
  if (!out) return null_arg("out");
  if (view >= scene->scene.rig.cameras.size()) return fail(SIL_ERR_INDEX_OUT_OF_RANGE, "view index out of range");
  return guarded([&] {
    *out = new sil_mask{
        silhuetta::render_silhouette_exact(scene->scene, scene->scene.rig.cameras[view])};
    return SIL_OK;
  });
}

sil_status sil_scene_hull_estimate(const sil_scene* scene, size_t samples, uint64_t seed,
                                   double* volume_cm3, double* half_width_cm3) {
  if (!scene) return null_arg("scene");
  if (!volume_cm3) return null_arg("volume_cm3");
  return guarded([&] {
    const auto est =
        silhuetta::brute_force_hull_volume(scene->scene, scene->scene.rig, samples, seed);
    *volume_cm3 = est.volume_cm3;
    if (half_width_cm3) *half_width_cm3 = est.half_width_cm3;
    return SIL_OK;
  });
}

sil_status sil_synth_write(const sil_scene* scene, const char* out_dir) {
  if (!scene) return null_arg("scene");
  if (!out_dir) return null_arg("out_dir");
  return guarded([&] {
    silhuetta::write_scene_views(scene->scene, out_dir);
    return SIL_OK;
  });
}

/* ---- images ---- */

sil_status sil_image_read(const char* path, sil_image** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new sil_image{silhuetta::read_color_image(path)};
    return SIL_OK;
  });
}

sil_status sil_image_write_ppm(const sil_image* image, const char* path) {
  if (!image) return null_arg("image");
  if (!path) return null_arg("path");
  return guarded([&] {
    silhuetta::write_ppm(image->image, path);
    return SIL_OK;
  });
}

void sil_image_size(const sil_image* image, int* width, int* height) {
  if (width) *width = image ? image->image.width : 0;
  if (height) *height = image ? image->image.height : 0;
}

void sil_image_free(sil_image* image) { delete image; }

void sil_preprocess_options_init(sil_preprocess_options* opts) {
  if (!opts) return;
  opts->window = 3;
  opts->se_size = 3;
  opts->connectivity = 8;
  opts->naive = 0;
  opts->invert = 0;
}

sil_status sil_silhouette_extract(const sil_image* image, const sil_preprocess_options* opts,
                                  sil_mask** out) {
  if (!image) return null_arg("image");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new sil_mask{silhuetta::extract_silhouette(image->image, to_config(opts))};
    return SIL_OK;
  });
}

sil_status sil_mask_write_pgm(const sil_mask* mask, const char* path) {
  if (!mask) return null_arg("mask");
  if (!path) return null_arg("path");
  return guarded([&] {
    silhuetta::write_mask_pgm(mask->mask, path);
    return SIL_OK;
  });
}

size_t sil_mask_count(const sil_mask* mask) { return mask ? mask->mask.count() : 0; }

void sil_mask_size(const sil_mask* mask, int* width, int* height) {
  if (width) *width = mask ? mask->mask.width : 0;
  if (height) *height = mask ? mask->mask.height : 0;
}

void sil_mask_free(sil_mask* mask) { delete mask; }

/* ---- pipeline ---- */

void sil_pipeline_options_init(sil_pipeline_options* opts) {
  if (!opts) return;
  std::memset(opts, 0, sizeof *opts);
  opts->grid[0] = opts->grid[1] = opts->grid[2] = 128;
  sil_preprocess_options_init(&opts->preprocess);
  const silhuetta::ConsistencyParams defaults;
  opts->tau = defaults.tau;
  opts->min_views = defaults.min_views;
  opts->max_iters = defaults.max_iters;
  opts->carve = 1;
  opts->output_dir = "out";
}

sil_status sil_pipeline_run(const sil_pipeline_options* opts, sil_pipeline_summary* summary) {
  if (!opts) return null_arg("opts");
  return guarded([&] {
    silhuetta::PipelineConfig cfg;
    if (opts->scene_path) cfg.scene_path = opts->scene_path;
    if (opts->rig_path) cfg.rig_path = opts->rig_path;
    if (opts->image_count > 0 && !opts->image_paths)
      throw silhuetta::Error(silhuetta::ErrorCode::InvalidArgument, "image_paths is NULL");
    for (size_t i = 0; i < opts->image_count; ++i) {
      if (!opts->image_paths[i])
        throw silhuetta::Error(silhuetta::ErrorCode::InvalidArgument, "image path is NULL");
      cfg.image_paths.emplace_back(opts->image_paths[i]);
    }
    if (opts->has_bv) {
      silhuetta::BoundingVolume bv;
      bv.min = {opts->bv[0], opts->bv[1], opts->bv[2]};
      bv.max = {opts->bv[3], opts->bv[4], opts->bv[5]};
      cfg.bv = bv;
    }
    cfg.dims = {opts->grid[0], opts->grid[1], opts->grid[2]};
    cfg.preprocess = to_config(&opts->preprocess);
    cfg.consistency.tau = opts->tau;
    cfg.consistency.min_views = opts->min_views;
    cfg.consistency.max_iters = opts->max_iters;
    cfg.carve = opts->carve != 0;
    if (opts->has_seed) cfg.seed = opts->seed;
    if (opts->has_real_volume) cfg.real_volume_cm3 = opts->real_volume_cm3;
    cfg.write_stl = opts->write_stl != 0;
    if (opts->output_dir) cfg.output_dir = opts->output_dir;

    const auto r = silhuetta::run_pipeline(cfg);
    if (summary) {
      summary->hull_voxels = r.hull_voxels;
      summary->hull_volume_cm3 = r.hull_volume_cm3;
      summary->carve_iterations = r.carve_iterations;
      summary->carved_voxels = r.carved_voxels;
      summary->carve_converged = r.carve_converged ? 1 : 0;
      summary->final_voxels = r.final_voxels;
      summary->mesh_volume_cm3 = r.mesh_volume_cm3;
      summary->has_ground_truth = r.ground_truth_cm3 ? 1 : 0;
      summary->ground_truth_cm3 = r.ground_truth_cm3.value_or(0.0);
    }
    return SIL_OK;
  });
}

/* ---- mesh ---- */

sil_status sil_mesh_read_obj(const char* path, sil_mesh** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new sil_mesh{silhuetta::read_obj(path)};
    return SIL_OK;
  });
}

sil_status sil_mesh_from_grid_file(const char* grid_path, sil_mesh** out) {
  if (!grid_path) return null_arg("grid_path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new sil_mesh{silhuetta::extract_surface_mesh(silhuetta::load_grid(grid_path))};
    return SIL_OK;
  });
}

sil_status sil_mesh_write_obj(const sil_mesh* mesh, const char* path) {
  if (!mesh) return null_arg("mesh");
  if (!path) return null_arg("path");
  return guarded([&] {
    silhuetta::write_obj(mesh->mesh, path);
    return SIL_OK;
  });
}

sil_status sil_mesh_write_stl(const sil_mesh* mesh, const char* path) {
  if (!mesh) return null_arg("mesh");
  if (!path) return null_arg("path");
  return guarded([&] {
    silhuetta::write_stl(mesh->mesh, path);
    return SIL_OK;
  });
}

sil_status sil_mesh_signed_volume(const sil_mesh* mesh, double* cm3) {
  if (!mesh) return null_arg("mesh");
  if (!cm3) return null_arg("cm3");
  return guarded([&] {
    *cm3 = silhuetta::signed_volume(mesh->mesh);
    return SIL_OK;
  });
}

int sil_mesh_is_closed(const sil_mesh* mesh) {
  return mesh && silhuetta::is_closed(mesh->mesh) ? 1 : 0;
}

size_t sil_mesh_vertex_count(const sil_mesh* mesh) { return mesh ? mesh->mesh.vertices.size() : 0; }

size_t sil_mesh_triangle_count(const sil_mesh* mesh) {
  return mesh ? mesh->mesh.triangles.size() : 0;
}

void sil_mesh_free(sil_mesh* mesh) { delete mesh; }

sil_status sil_grid_volume(const char* grid_path, double* cm3) {
  if (!grid_path) return null_arg("grid_path");
  if (!cm3) return null_arg("cm3");
  return guarded([&] {
    *cm3 = silhuetta::hull_volume(silhuetta::load_grid(grid_path));
    return SIL_OK;
  });
}

/* ---- metrics ---- */

sil_status sil_relative_error(double real_cm3, double experimental_cm3, double* pct) {
  if (!pct) return null_arg("pct");
  return guarded([&] {
    *pct = silhuetta::relative_error(real_cm3, experimental_cm3);
    return SIL_OK;
  });
}

sil_status sil_precision(double real_cm3, double experimental_cm3, double* pct) {
  if (!pct) return null_arg("pct");
  return guarded([&] {
    *pct = silhuetta::precision_metric(real_cm3, experimental_cm3);
    return SIL_OK;
  });
}

sil_status sil_report_from_csv(const char* records_path, char** csv) {
  if (!records_path) return null_arg("records_path");
  if (!csv) return null_arg("csv");
  return guarded([&] {
    const auto records = silhuetta::load_records_csv(records_path);
    const std::string text = silhuetta::report_csv(records);
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *csv = buf;
    return SIL_OK;
  });
}

}  // extern "C"
