#include "doctest.h"

#include <cmath>
#include <queue>
#include <random>

#include "error.hpp"
#include "image.hpp"
#include "silhouette.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "synth.hpp"

using namespace silhuetta;

namespace {

GrayImage gray_from(int w, int h, std::initializer_list<int> values) {
  GrayImage g(w, h);
  int i = 0;
  for (int v : values) g.data[i++] = static_cast<std::uint8_t>(v);
  return g;
}

BinaryMask erode_oracle(const BinaryMask& m, const StructuringElement& se) {
  BinaryMask out(m.width, m.height);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      bool all = true;
      for (int sy = 0; sy < se.height && all; ++sy)
        for (int sx = 0; sx < se.width && all; ++sx) {
          if (!se.cell(sx, sy)) continue;
          const int xx = x + sx - se.anchor_x, yy = y + sy - se.anchor_y;
          if (xx < 0 || yy < 0 || xx >= m.width || yy >= m.height || !m.at(xx, yy)) all = false;
        }
      out.set(x, y, all);
    }
  return out;
}

BinaryMask dilate_oracle(const BinaryMask& m, const StructuringElement& se) {
  // gather form: p is set iff some se cell, reflected through the anchor, hits a set pixel
  BinaryMask out(m.width, m.height);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      bool any = false;
      for (int sy = 0; sy < se.height && !any; ++sy)
        for (int sx = 0; sx < se.width && !any; ++sx) {
          if (!se.cell(sx, sy)) continue;
          const int xx = x - (sx - se.anchor_x), yy = y - (sy - se.anchor_y);
          if (xx >= 0 && yy >= 0 && xx < m.width && yy < m.height && m.at(xx, yy)) any = true;
        }
      out.set(x, y, any);
    }
  return out;
}

std::size_t component_count(const BinaryMask& m, int connectivity) {
  BinaryMask rest = m;
  std::size_t n = 0;
  while (rest.count() > 0) {
    const auto big = oracle::largest(rest, connectivity);
    for (std::size_t i = 0; i < rest.data.size(); ++i)
      if (big.data[i]) rest.data[i] = 0;
    ++n;
  }
  return n;
}

bool subset(const BinaryMask& a, const BinaryMask& b) {
  for (std::size_t i = 0; i < a.data.size(); ++i)
    if (a.data[i] && !b.data[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("grayscale conversion") {
  RgbImage img(3, 1);
  const std::uint8_t px[9] = {255, 255, 255, 0, 0, 0, 255, 0, 0};
  std::copy(px, px + 9, img.data.begin());
  const auto g = to_grayscale(img);
  CHECK(g.at(0, 0) == 255);
  CHECK(g.at(1, 0) == 0);
  CHECK(g.at(2, 0) == 76);

  std::mt19937_64 rng(1);
  RgbImage r(256, 256);
  for (auto& c : r.data) c = static_cast<std::uint8_t>(rng());
  const auto gr = to_grayscale(r);
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 256; ++x) {
      const auto* p = r.px(x, y);
      // integer numerator is exact in double; halves round away from zero
      const double v = (299.0 * p[0] + 587.0 * p[1] + 114.0 * p[2]) / 1000.0;
      REQUIRE(gr.at(x, y) == static_cast<int>(std::round(v)));
    }
}

TEST_CASE("local normalization") {
  CHECK(normalize_local(GrayImage(6, 4, 7), 3) == GrayImage(6, 4, 255));
  CHECK(normalize_local(GrayImage(6, 4, 0), 3) == GrayImage(6, 4, 0));
  CHECK_THROWS_AS(normalize_local(GrayImage(4, 4, 1), 2), Error);
  CHECK_THROWS_AS(normalize_local(GrayImage(4, 4, 1), 0), Error);

  auto oracle = [](const GrayImage& img, int window) {
    GrayImage out(img.width, img.height);
    const int r = window / 2;
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        int m = 0;
        for (int yy = y - r; yy <= y + r; ++yy)
          for (int xx = x - r; xx <= x + r; ++xx)
            if (xx >= 0 && yy >= 0 && xx < img.width && yy < img.height)
              m = std::max<int>(m, img.at(xx, yy));
        out.at(x, y) = m == 0 ? 0 : static_cast<std::uint8_t>(std::lround(255.0 * img.at(x, y) / m));
      }
    return out;
  };

  GrayImage ramp(5, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) ramp.at(x, y) = static_cast<std::uint8_t>(10 * (y * 5 + x));
  CHECK(normalize_local(ramp, 3) == oracle(ramp, 3));
  // top-left: p = 0; centre: p = 120 against max 180
  CHECK(normalize_local(ramp, 3).at(0, 0) == 0);
  CHECK(normalize_local(ramp, 3).at(2, 2) == 170);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage img(37, 23);
    for (auto& p : img.data) p = static_cast<std::uint8_t>(rng() % 256);
    for (int w : {1, 3, 5, 7}) REQUIRE(normalize_local(img, w) == oracle(img, w));
  }
}

TEST_CASE("otsu threshold") {
  CHECK(otsu_threshold(gray_from(6, 1, {0, 0, 0, 255, 255, 255})) == 0);
  CHECK(otsu_threshold(GrayImage(5, 5, 128)) == 128);
  CHECK(otsu_threshold(GrayImage(5, 5, 0)) == 0);
  CHECK(otsu_threshold(GrayImage(5, 5, 255)) == 255);

  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 1000; ++trial) {
    Histogram h{};
    const int mode = trial % 4;
    for (int i = 0; i < 256; ++i) {
      switch (mode) {
        case 0: h[i] = rng() % 1000; break;
        case 1: h[i] = (rng() % 8 == 0) ? rng() % 100000 : 0; break;
        case 2: h[i] = rng() % (1u << 20); break;
        default: h[i] = (rng() % 64 == 0) ? 1 + rng() % 3 : 0; break;
      }
    }
    if (std::all_of(h.begin(), h.end(), [](auto c) { return c == 0; })) h[rng() % 256] = 1;
    REQUIRE(otsu_threshold(h) == oracle::otsu(h));
  }
}

TEST_CASE("threshold application") {
  const auto img = gray_from(2, 1, {10, 200});
  const auto m = threshold_apply(img, 100);
  CHECK_FALSE(m.at(0, 0));
  CHECK(m.at(1, 0));
  CHECK(threshold_apply(GrayImage(4, 4, 255), 255).count() == 0);

  // bimodal blob: otsu recovers exactly the blob
  std::mt19937_64 rng(9);
  GrayImage g(64, 48);
  BinaryMask truth(64, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 64; ++x) {
      const bool in = (x - 30) * (x - 30) + (y - 22) * (y - 22) < 15 * 15;
      truth.set(x, y, in);
      g.at(x, y) = static_cast<std::uint8_t>(in ? 190 + rng() % 20 : 30 + rng() % 20);
    }
  CHECK(threshold_apply(g, otsu_threshold(g)) == truth);
}

TEST_CASE("opening") {
  const auto se = StructuringElement::square(3);
  BinaryMask dot(9, 9);
  dot.set(4, 4, true);
  CHECK(morph_open(dot, se).count() == 0);

  BinaryMask square(20, 20);
  for (int y = 5; y < 15; ++y)
    for (int x = 5; x < 15; ++x) square.set(x, y, true);
  CHECK(morph_open(square, se) == square);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = test::random_mask(rng, 32, 32, 0.3 + 0.4 * (trial % 3) / 2.0);
    for (int side : {1, 3, 5}) {
      const auto s = StructuringElement::square(side);
      REQUIRE(erode(m, s) == erode_oracle(m, s));
      REQUIRE(dilate(m, s) == dilate_oracle(m, s));
      const auto o = morph_open(m, s);
      REQUIRE(o == dilate_oracle(erode_oracle(m, s), s));
      REQUIRE(morph_open(o, s) == o);
      REQUIRE(subset(o, m));
    }
  }
}

TEST_CASE("asymmetric structuring element against the oracle") {
  StructuringElement se;
  se.width = 3;
  se.height = 2;
  se.cells = {1, 0, 1, 0, 1, 1};
  se.anchor_x = 0;
  se.anchor_y = 1;
  se.validate();
  std::mt19937_64 rng(70);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = test::random_mask(rng, 17, 13, 0.6);
    REQUIRE(erode(m, se) == erode_oracle(m, se));
    REQUIRE(dilate(m, se) == dilate_oracle(m, se));
  }
  StructuringElement bad = se;
  bad.cells.assign(6, 0);
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = se;
  bad.anchor_x = 3;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("largest component") {
  BinaryMask m(12, 6);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) m.set(x, y, true);  // 9 pixels
  for (int x = 6; x < 11; ++x) m.set(x, 4, true);   // 5 pixels
  const auto big = largest_component(m, 8);
  CHECK(big.count() == 9);
  CHECK(big.at(0, 0));
  CHECK_FALSE(big.at(6, 4));
  CHECK(largest_component(BinaryMask(5, 5), 8).count() == 0);

  // equal sizes: the one seen first in row-major order wins
  BinaryMask tie(10, 3);
  tie.set(7, 0, true), tie.set(8, 0, true);
  tie.set(1, 2, true), tie.set(2, 2, true);
  const auto t = largest_component(tie, 4);
  CHECK(t.at(7, 0));
  CHECK_FALSE(t.at(1, 2));

  // diagonal pixels join under 8- but not 4-connectivity
  BinaryMask diag(4, 4);
  diag.set(0, 0, true), diag.set(1, 1, true), diag.set(2, 2, true);
  CHECK(largest_component(diag, 8).count() == 3);
  CHECK(largest_component(diag, 4).count() == 1);
  CHECK_THROWS_AS(largest_component(diag, 6), Error);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = test::random_mask(rng, 40, 30, 0.35 + 0.1 * (trial % 4));
    for (int c : {4, 8}) {
      const auto got = largest_component(r, c);
      REQUIRE(got == oracle::largest(r, c));
      if (got.count() > 0) REQUIRE(component_count(got, c) == 1);
    }
  }
}

TEST_CASE("hole filling") {
  BinaryMask ring(21, 21), disk(21, 21);
  for (int y = 0; y < 21; ++y)
    for (int x = 0; x < 21; ++x) {
      const int d2 = (x - 10) * (x - 10) + (y - 10) * (y - 10);
      ring.set(x, y, d2 <= 64 && d2 >= 16);
      disk.set(x, y, d2 <= 64);
    }
  CHECK(fill_holes(ring) == disk);
  CHECK(fill_holes(disk) == disk);
  CHECK(fill_holes(BinaryMask(5, 5, true)) == BinaryMask(5, 5, true));

  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = test::random_mask(rng, 30, 25, 0.5 + 0.05 * (trial % 5));
    const auto f = fill_holes(m);
    REQUIRE(f == oracle::fill(m));
    REQUIRE(subset(m, f));
    REQUIRE(fill_holes(f) == f);
  }
}

TEST_CASE("silhouette of a shadowed render") {
  const auto scene = load_scene(test::source_dir() / "scenes" / "exp1_sphere_shadow.json");
  for (const auto& cam : scene.rig.cameras) {
    CAPTURE(cam.id);
    const auto img = render_color(scene, cam);
    const auto exact = render_silhouette_exact(scene, cam);
    // shadow footprint: background pixels the renderer darkened
    std::size_t shadow = 0, shadow_naive = 0, shadow_opt = 0;
    PreprocessConfig opt, naive;
    opt.invert = naive.invert = true;
    naive.naive = true;
    const auto m_opt = extract_silhouette(img, opt);
    const auto m_naive = extract_silhouette(img, naive);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        const auto* p = img.px(x, y);
        if (exact.at(x, y) || p[0] == scene.background.r) continue;
        ++shadow;
        shadow_naive += m_naive.at(x, y);
        shadow_opt += m_opt.at(x, y);
      }
    if (cam.id == "cam3") {
      CHECK(shadow == 0);  // hidden below the object from above
    } else {
      CHECK(shadow > 500);
      CHECK(shadow_opt == 0);
      CHECK(2 * shadow_naive >= shadow);
    }
    // one 8-connected blob without holes
    CHECK(component_count(m_opt, 8) == 1);
    CHECK(fill_holes(m_opt) == m_opt);
  }
}

TEST_CASE("blank image yields no silhouette") {
  RgbImage blank(64, 48);
  std::fill(blank.data.begin(), blank.data.end(), 200);
  try {
    extract_silhouette(blank, PreprocessConfig{});
    FAIL("expected EmptySilhouette");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySilhouette);
  }
  PreprocessConfig naive;
  naive.naive = true;
  CHECK_THROWS_AS(extract_silhouette(blank, naive), Error);
}

TEST_CASE("PNM round trips") {
  test::TempDir tmp("pnm");
  std::mt19937_64 rng(11);
  RgbImage rgb(17, 9);
  for (auto& c : rgb.data) c = static_cast<std::uint8_t>(rng());
  write_ppm(rgb, tmp / "a.ppm");
  CHECK(read_color_image(tmp / "a.ppm") == rgb);

  GrayImage g(13, 7);
  for (auto& c : g.data) c = static_cast<std::uint8_t>(rng());
  write_pgm(g, tmp / "g.pgm");
  CHECK(read_pgm(tmp / "g.pgm") == g);
  // gray input is promoted to RGB
  const auto promoted = read_color_image(tmp / "g.pgm");
  CHECK(promoted.px(3, 2)[0] == g.at(3, 2));
  CHECK(promoted.px(3, 2)[2] == g.at(3, 2));

  const auto m = test::random_mask(rng, 11, 5, 0.5);
  write_mask_pgm(m, tmp / "m.pgm");
  CHECK(read_mask_pgm(tmp / "m.pgm") == m);
  const auto raw = read_pgm(tmp / "m.pgm");
  for (std::size_t i = 0; i < raw.data.size(); ++i) CHECK(raw.data[i] == (m.data[i] ? 255 : 0));

  {
    std::ofstream f(tmp / "c.pgm", std::ios::binary);
    f << "P5\n# a comment\n2 1\n255\n" << '\x05' << '\xfa';
  }
  const auto c = read_pgm(tmp / "c.pgm");
  CHECK(c.width == 2);
  CHECK(c.at(1, 0) == 250);

  {
    std::ofstream f(tmp / "bad.pgm", std::ios::binary);
    f << "P2\n2 1\n255\n1 2\n";
  }
  CHECK_THROWS_AS(read_pgm(tmp / "bad.pgm"), Error);
  {
    std::ofstream f(tmp / "short.ppm", std::ios::binary);
    f << "P6\n4 4\n255\n" << "abc";
  }
  CHECK_THROWS_AS(read_color_image(tmp / "short.ppm"), Error);
}
