#include "mesh.hpp"

#include <Eigen/Geometry>

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "error.hpp"
#include "parallel.hpp"

namespace silhuetta {

TriangleMesh make_mesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles) {
  TriangleMesh m;
  m.vertices = std::move(vertices);
  m.triangles = std::move(triangles);
  m.normals.reserve(m.triangles.size());
  for (const auto& t : m.triangles) {
    for (auto v : t)
      if (v >= m.vertices.size())
        throw Error(ErrorCode::InvalidArgument, "triangle index out of range");
    const Vec3 n = (m.vertices[t[1]] - m.vertices[t[0]]).cross(m.vertices[t[2]] - m.vertices[t[0]]);
    const double len = n.norm();
    if (!(len > 0.0)) throw Error(ErrorCode::InvalidArgument, "degenerate triangle");
    m.normals.push_back(n / len);
  }
  return m;
}

TriangleMesh extract_surface_mesh(const VoxelGrid& grid) {
  if (grid.solid_count() == 0) throw Error(ErrorCode::EmptyGrid, "no solid voxels to mesh");

  const auto d = grid.dims();
  const std::array<std::uint32_t, 3> n = {d.n1, d.n2, d.n3};
  const std::size_t c2 = std::size_t{d.n3} + 1;
  const std::size_t c1 = (std::size_t{d.n2} + 1) * c2;
  std::vector<std::int64_t> corner_vertex((std::size_t{d.n1} + 1) * c1, -1);

  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  const Vec3& h = grid.h();
  const Vec3& origin = grid.bv().min;

  auto vertex = [&](const std::array<std::uint32_t, 3>& c) {
    auto& slot = corner_vertex[c[0] * c1 + c[1] * c2 + c[2]];
    if (slot < 0) {
      slot = static_cast<std::int64_t>(vertices.size());
      vertices.push_back(origin + Vec3(c[0], c[1], c[2]).cwiseProduct(h));
    }
    return static_cast<std::uint32_t>(slot);
  };

  // quad corners in the (b, c) plane of a face normal to axis a = (b+2)%3
  static constexpr std::array<std::array<int, 2>, 4> kPositive = {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  static constexpr std::array<std::array<int, 2>, 4> kNegative = {{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};

  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!grid.solid(idx)) continue;
    const VoxelIndex v = grid.unflat(idx);
    const std::array<std::uint32_t, 3> p = {v.i, v.j, v.k};
    for (int axis = 0; axis < 3; ++axis) {
      for (int side = 0; side < 2; ++side) {
        // neighbour across this face
        std::array<std::uint32_t, 3> q = p;
        bool exposed;
        if (side == 0) {
          exposed = p[axis] == 0;
          if (!exposed) q[axis] -= 1;
        } else {
          exposed = p[axis] + 1 == n[axis];
          if (!exposed) q[axis] += 1;
        }
        if (!exposed) exposed = !grid.solid(grid.flat(q[0], q[1], q[2]));
        if (!exposed) continue;

        const int b = (axis + 1) % 3, c = (axis + 2) % 3;
        const auto& pattern = side == 1 ? kPositive : kNegative;
        std::array<std::uint32_t, 4> quad;
        for (int corner = 0; corner < 4; ++corner) {
          std::array<std::uint32_t, 3> lattice = p;
          lattice[axis] += static_cast<std::uint32_t>(side);
          lattice[b] += static_cast<std::uint32_t>(pattern[corner][0]);
          lattice[c] += static_cast<std::uint32_t>(pattern[corner][1]);
          quad[corner] = vertex(lattice);
        }
        triangles.push_back({quad[0], quad[1], quad[2]});
        triangles.push_back({quad[0], quad[2], quad[3]});
      }
    }
  }
  return make_mesh(std::move(vertices), std::move(triangles));
}

double signed_volume_sum(const TriangleMesh& mesh) {
  if (mesh.triangles.empty()) return 0.0;
  const Vec3 ref = mesh.vertices.front();
  constexpr std::size_t kGrain = 4096;
  const std::size_t blocks = (mesh.triangles.size() + kGrain - 1) / kGrain;
  std::vector<double> partial(blocks, 0.0);
  parallel_for(0, mesh.triangles.size(), kGrain, [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t t = lo; t < hi; ++t) {
      const auto& tri = mesh.triangles[t];
      const Vec3 a = mesh.vertices[tri[0]] - ref;
      const Vec3 b = mesh.vertices[tri[1]] - ref;
      const Vec3 c = mesh.vertices[tri[2]] - ref;
      s += a.dot(b.cross(c));
    }
    partial[lo / kGrain] = s;
  });
  double sum = 0.0;
  for (double s : partial) sum += s;
  return sum / 6.0;
}

double signed_volume(const TriangleMesh& mesh) {
  if (!is_closed(mesh)) throw Error(ErrorCode::NotClosed, "mesh is not closed");
  return std::abs(signed_volume_sum(mesh)) / 1000.0;
}

bool is_closed(const TriangleMesh& mesh) {
  // +1 for each traversal low->high, -1 for high->low
  std::unordered_map<std::uint64_t, std::int64_t> balance;
  balance.reserve(mesh.triangles.size() * 2);
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const std::uint32_t a = t[e], b = t[(e + 1) % 3];
      if (a == b) return false;
      const std::uint64_t key = (std::uint64_t{std::min(a, b)} << 32) | std::max(a, b);
      balance[key] += a < b ? 1 : -1;
    }
  }
  for (const auto& [key, b] : balance)
    if (b != 0) return false;
  return true;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string to_obj(const TriangleMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 40 + mesh.triangles.size() * 24);
  for (const auto& v : mesh.vertices) {
    out += "v ";
    append_double(out, v.x());
    out += ' ';
    append_double(out, v.y());
    out += ' ';
    append_double(out, v.z());
    out += '\n';
  }
  for (const auto& t : mesh.triangles) {
    out += "f " + std::to_string(t[0] + 1) + ' ' + std::to_string(t[1] + 1) + ' ' +
           std::to_string(t[2] + 1) + '\n';
  }
  return out;
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const std::string text = to_obj(mesh);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

TriangleMesh parse_obj(const std::string& text) {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::ParseError, "obj line " + std::to_string(line_no) + ": " + why);
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw fail("vertex needs 3 coordinates");
      vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<std::uint32_t> poly;
      std::string tok;
      while (ls >> tok) {
        // "i", "i/t", "i//n" or "i/t/n"; negative indices count from the end
        long idx = 0;
        const auto slash = tok.find('/');
        const std::string head = tok.substr(0, slash);
        const auto res = std::from_chars(head.data(), head.data() + head.size(), idx);
        if (res.ec != std::errc() || idx == 0) throw fail("bad face index '" + tok + "'");
        const long resolved = idx > 0 ? idx - 1 : static_cast<long>(vertices.size()) + idx;
        if (resolved < 0 || resolved >= static_cast<long>(vertices.size()))
          throw fail("face index out of range");
        poly.push_back(static_cast<std::uint32_t>(resolved));
      }
      if (poly.size() < 3) throw fail("face needs at least 3 vertices");
      for (std::size_t k = 1; k + 1 < poly.size(); ++k)
        triangles.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }
  return make_mesh(std::move(vertices), std::move(triangles));
}

TriangleMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_obj(ss.str());
}

void write_stl(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  char header[80] = {};
  std::strncpy(header, "silhuetta binary STL", sizeof header - 1);
  out.write(header, sizeof header);
  const auto count = static_cast<std::uint32_t>(mesh.triangles.size());
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    float rec[12];
    for (int a = 0; a < 3; ++a) rec[a] = static_cast<float>(mesh.normals[t](a));
    for (int v = 0; v < 3; ++v)
      for (int a = 0; a < 3; ++a)
        rec[3 + 3 * v + a] = static_cast<float>(mesh.vertices[mesh.triangles[t][v]](a));
    out.write(reinterpret_cast<const char*>(rec), sizeof rec);
    const std::uint16_t attr = 0;
    out.write(reinterpret_cast<const char*>(&attr), sizeof attr);
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace silhuetta
