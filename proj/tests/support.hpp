#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "hull.hpp"
#include "image.hpp"

namespace test {

inline std::filesystem::path source_dir() { return SILHUETTA_SOURCE_DIR; }

// fresh scratch directory under the system temp dir, removed on destruction
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("silhuetta_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline silhuetta::BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double density) {
  std::bernoulli_distribution on(density);
  silhuetta::BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, on(rng));
  return m;
}

// solid voxels drawn independently, labels derived by relabel()
inline silhuetta::VoxelGrid random_grid(std::mt19937_64& rng, silhuetta::GridDims dims,
                                        double density, const silhuetta::BoundingVolume& bv) {
  std::bernoulli_distribution on(density);
  std::vector<std::uint8_t> labels(dims.count());
  for (auto& l : labels) l = on(rng) ? 2 : 0;
  silhuetta::VoxelGrid g = silhuetta::VoxelGrid::from_labels(bv, dims, std::move(labels));
  g.relabel();
  return g;
}

}  // namespace test
