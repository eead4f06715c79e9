#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "camera.hpp"
#include "hull.hpp"

namespace silhuetta {

using Triangle = std::array<std::uint32_t, 3>;

// Indexed triangle mesh in world millimetres. Triangles wind counter-clockwise
// seen from outside; normals[t] is the unit right-hand-rule normal of t.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<Vec3> normals;

  bool operator==(const TriangleMesh& o) const {
    return vertices == o.vertices && triangles == o.triangles;
  }
};

/// Builds a mesh from raw geometry, computing normals. Throws
/// InvalidArgument on out-of-range indices or zero-area triangles.
TriangleMesh make_mesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

/// Cuberille surface: every face between a solid voxel and an outside voxel
/// (or the grid boundary) becomes two outward-wound triangles. Corners are
/// shared by integer lattice index. Throws EmptyGrid without solid voxels.
TriangleMesh extract_surface_mesh(const VoxelGrid& grid);

/// Sum of det[v0, v1, v2] / 6 over all triangles, in mm^3, with the vertices
/// taken relative to the first vertex (equal to the origin-based sum on closed
/// meshes, with less cancellation). Positive for outward winding.
double signed_volume_sum(const TriangleMesh& mesh);

/// |signed_volume_sum| in cm^3. Throws NotClosed if is_closed() fails.
double signed_volume(const TriangleMesh& mesh);

/// Every edge is traversed equally often in both directions. On a manifold
/// surface this means exactly two triangles with opposite orientation; voxel
/// surfaces may also carry edges shared by four faces (two each way).
bool is_closed(const TriangleMesh& mesh);

std::string to_obj(const TriangleMesh& mesh);
void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);
TriangleMesh read_obj(const std::filesystem::path& path);
TriangleMesh parse_obj(const std::string& text);

/// Binary STL: 80-byte header, u32 count, then per triangle normal and three
/// vertices as LE f32 plus a zero u16.
void write_stl(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace silhuetta
