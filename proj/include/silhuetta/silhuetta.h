/*
 * silhuetta C API
 *
 * Shape-from-silhouette reconstruction: silhouette extraction, voxel visual
 * hull, photo-consistency carving, cuberille meshing and volume metrics.
 *
 * Conventions
 *   - Every fallible call returns sil_status; SIL_OK is zero.
 *   - On failure sil_last_error() returns a message for the calling thread,
 *     valid until the next failing call on that thread.
 *   - Objects are opaque handles created by *_load / *_read / *_extract /
 *     *_render calls and released with the matching *_free (NULL is a no-op).
 *   - Units: millimetres in world space, cm^3 for volumes.
 */
#ifndef SILHUETTA_H
#define SILHUETTA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SILHUETTA_BUILDING)
#    define SIL_API __declspec(dllexport)
#  else
#    define SIL_API __declspec(dllimport)
#  endif
#else
#  define SIL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sil_status {
  SIL_OK = 0,
  SIL_ERR_INVALID_ARGUMENT = 1,
  SIL_ERR_PARSE = 2,
  SIL_ERR_INVALID_RIG = 3,
  SIL_ERR_IO = 4,
  SIL_ERR_EMPTY_SILHOUETTE = 5,
  SIL_ERR_EMPTY_GRID = 6,
  SIL_ERR_NOT_CLOSED = 7,
  SIL_ERR_OVERLAPPING_PRIMITIVES = 8,
  SIL_ERR_INDEX_OUT_OF_RANGE = 9,
  SIL_ERR_DIVIDE_BY_ZERO = 10,
  SIL_ERR_BEHIND_CAMERA = 11,
  SIL_ERR_INTERNAL = 99
} sil_status;

typedef struct sil_rig sil_rig;
typedef struct sil_scene sil_scene;
typedef struct sil_image sil_image;
typedef struct sil_mask sil_mask;
typedef struct sil_mesh sil_mesh;

SIL_API const char* sil_version(void);
SIL_API const char* sil_status_name(sil_status status);
SIL_API const char* sil_last_error(void);
SIL_API void sil_string_free(char* s);

/* ---- camera rig ---------------------------------------------------------- */

SIL_API sil_status sil_rig_load(const char* path, sil_rig** out);
SIL_API sil_status sil_rig_save(const sil_rig* rig, const char* path);
/* The three-lateral-plus-top replica rig aimed at `target` (may be NULL for
 * the origin). */
SIL_API sil_status sil_rig_four_camera(const double target[3], sil_rig** out);
SIL_API void sil_rig_free(sil_rig* rig);
SIL_API size_t sil_rig_camera_count(const sil_rig* rig);
/* The returned string is owned by the rig. */
SIL_API sil_status sil_rig_camera_id(const sil_rig* rig, size_t index, const char** id);
/* SIL_ERR_BEHIND_CAMERA when the point is at or behind the optical plane.
 * `on_sensor` may be NULL. */
SIL_API sil_status sil_rig_project(const sil_rig* rig, size_t index, const double point_mm[3],
                                   double pixel[2], int* on_sensor);

/* ---- synthetic scenes ---------------------------------------------------- */

SIL_API sil_status sil_scene_load(const char* path, sil_scene** out);
SIL_API void sil_scene_free(sil_scene* scene);
SIL_API sil_status sil_scene_set_seed(sil_scene* scene, uint64_t seed);
SIL_API size_t sil_scene_view_count(const sil_scene* scene);
SIL_API sil_status sil_scene_ground_truth(const sil_scene* scene, double* cm3);
SIL_API sil_status sil_scene_render_color(const sil_scene* scene, size_t view, sil_image** out);
SIL_API sil_status sil_scene_render_mask(const sil_scene* scene, size_t view, sil_mask** out);
/* Monte Carlo visual-hull volume with its 99% confidence half-width. */
SIL_API sil_status sil_scene_hull_estimate(const sil_scene* scene, size_t samples, uint64_t seed,
                                           double* volume_cm3, double* half_width_cm3);
/* Writes view_<id>.ppm, mask_<id>.pgm and ground_truth.json into out_dir. */
SIL_API sil_status sil_synth_write(const sil_scene* scene, const char* out_dir);

/* ---- images and silhouettes ---------------------------------------------- */

/* Reads binary PPM (P6) or PGM (P5); gray input is replicated to RGB. */
SIL_API sil_status sil_image_read(const char* path, sil_image** out);
SIL_API sil_status sil_image_write_ppm(const sil_image* image, const char* path);
SIL_API void sil_image_size(const sil_image* image, int* width, int* height);
SIL_API void sil_image_free(sil_image* image);

typedef struct sil_preprocess_options {
  int window;       /* normalization window side, odd (default 3) */
  int se_size;      /* square structuring element side (default 3) */
  int connectivity; /* 4 or 8 (default 8) */
  int naive;        /* plain Otsu only (default 0) */
  int invert;       /* object darker than background (default 0) */
} sil_preprocess_options;

SIL_API void sil_preprocess_options_init(sil_preprocess_options* opts);
SIL_API sil_status sil_silhouette_extract(const sil_image* image, const sil_preprocess_options* opts,
                                          sil_mask** out);
SIL_API sil_status sil_mask_write_pgm(const sil_mask* mask, const char* path);
SIL_API size_t sil_mask_count(const sil_mask* mask);
SIL_API void sil_mask_size(const sil_mask* mask, int* width, int* height);
SIL_API void sil_mask_free(sil_mask* mask);

/* ---- pipeline ------------------------------------------------------------ */

typedef struct sil_pipeline_options {
  /* exactly one of scene_path, or rig_path with image_count image_paths */
  const char* scene_path;
  const char* rig_path;
  const char* const* image_paths;
  size_t image_count;

  int has_bv;
  double bv[6]; /* x0, y0, z0, x1, y1, z1 in mm */
  uint32_t grid[3];

  sil_preprocess_options preprocess;

  double tau;
  int min_views;
  int max_iters;
  int carve;

  int has_seed;
  uint64_t seed;
  int has_real_volume;
  double real_volume_cm3;

  int write_stl;
  const char* output_dir;
} sil_pipeline_options;

typedef struct sil_pipeline_summary {
  size_t hull_voxels;
  double hull_volume_cm3;
  int carve_iterations;
  size_t carved_voxels;
  int carve_converged;
  size_t final_voxels;
  double mesh_volume_cm3;
  int has_ground_truth;
  double ground_truth_cm3;
} sil_pipeline_summary;

SIL_API void sil_pipeline_options_init(sil_pipeline_options* opts);
/* `summary` may be NULL. */
SIL_API sil_status sil_pipeline_run(const sil_pipeline_options* opts, sil_pipeline_summary* summary);

/* ---- meshes and voxel grids ---------------------------------------------- */

SIL_API sil_status sil_mesh_read_obj(const char* path, sil_mesh** out);
/* Cuberille mesh of a grid file written by the pipeline. */
SIL_API sil_status sil_mesh_from_grid_file(const char* grid_path, sil_mesh** out);
SIL_API sil_status sil_mesh_write_obj(const sil_mesh* mesh, const char* path);
SIL_API sil_status sil_mesh_write_stl(const sil_mesh* mesh, const char* path);
/* SIL_ERR_NOT_CLOSED for open meshes. */
SIL_API sil_status sil_mesh_signed_volume(const sil_mesh* mesh, double* cm3);
SIL_API int sil_mesh_is_closed(const sil_mesh* mesh);
SIL_API size_t sil_mesh_vertex_count(const sil_mesh* mesh);
SIL_API size_t sil_mesh_triangle_count(const sil_mesh* mesh);
SIL_API void sil_mesh_free(sil_mesh* mesh);

SIL_API sil_status sil_grid_volume(const char* grid_path, double* cm3);

/* ---- metrics ------------------------------------------------------------- */

SIL_API sil_status sil_relative_error(double real_cm3, double experimental_cm3, double* pct);
SIL_API sil_status sil_precision(double real_cm3, double experimental_cm3, double* pct);
/* Metrics CSV for a volume-record CSV; free *csv with sil_string_free. */
SIL_API sil_status sil_report_from_csv(const char* records_path, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* SILHUETTA_H */
