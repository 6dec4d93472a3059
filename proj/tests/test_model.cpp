#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "tumorcheck/eval.hpp"
#include "tumorcheck/model.hpp"
#include "tumorcheck/parser.hpp"

using namespace tumorcheck;
using helpers::caught;
using helpers::mask_of;
using helpers::ring_image;

namespace {

PixelModel grid(int w, int h) { return build_model(GrayImage::filled(w, h, 0)); }

}  // namespace

TEST_CASE("model state and transition counts") {
  CHECK(grid(1, 1).num_states() == 1);
  CHECK(grid(1, 1).num_transitions() == 0);
  CHECK(grid(2, 2).num_transitions() == 8);
  for (int w = 1; w <= 5; ++w)
    for (int h = 1; h <= 5; ++h)
      CHECK(grid(w, h).num_transitions() ==
            static_cast<std::size_t>(2 * (2 * w * h - w - h)));
}

TEST_CASE("model rejects mismatched label dimensions") {
  SegmentImage seg;
  seg.width = 2;
  seg.height = 2;
  seg.labels = {25, 25, 25, 25};
  GrayImage img = GrayImage::filled(3, 3, 0);
  CHECK(caught([&] { build_model(img, &seg); }) == Errc::dimension_mismatch);
}

TEST_CASE("ex lights exactly the neighbors") {
  PixelModel m = grid(3, 3);
  BinaryMask center = mask_of(3, 3,
                              "...|"
                              ".#.|"
                              "...");
  BinaryMask plus = mask_of(3, 3,
                            ".#.|"
                            "#.#|"
                            ".#.");
  CHECK(ex(m, center) == plus);
  CHECK(ex(m, BinaryMask::zeros(3, 3)) == BinaryMask::zeros(3, 3));
  CHECK(ex(m, BinaryMask::ones(3, 3)) == BinaryMask::ones(3, 3));
}

TEST_CASE("ef reaches everything on a connected grid") {
  PixelModel m = grid(4, 5);
  BinaryMask corner = BinaryMask::zeros(4, 5);
  corner.set(0, 0, true);
  CHECK(ef(m, corner) == BinaryMask::ones(4, 5));
  CHECK(ef(m, BinaryMask::zeros(4, 5)) == BinaryMask::zeros(4, 5));
  CHECK(ef(m, BinaryMask::ones(4, 5)) == BinaryMask::ones(4, 5));
}

TEST_CASE("eg keeps only states with an endless stay") {
  PixelModel m = grid(3, 3);
  CHECK(eg(m, BinaryMask::ones(3, 3)) == BinaryMask::ones(3, 3));

  BinaryMask lone = BinaryMask::zeros(3, 3);
  lone.set(1, 1, true);
  CHECK(eg(m, lone) == BinaryMask::zeros(3, 3));

  BinaryMask pair = mask_of(3, 3,
                            "##.|"
                            "...|"
                            "...");
  CHECK(eg(m, pair) == pair);
}

TEST_CASE("ctl operators match walk-enumeration oracles on every labeling") {
  PixelModel m = grid(3, 3);
  for (int bits = 0; bits < 512; ++bits) {
    BinaryMask phi = BinaryMask::zeros(3, 3);
    for (int i = 0; i < 9; ++i)
      if (bits & (1 << i)) phi.set(i % 3, i / 3, true);
    CHECK(ex(m, phi) == oracle::ex(phi));
    CHECK(ef(m, phi) == oracle::ef(phi));
    CHECK(eg(m, phi) == oracle::eg(phi));
  }
}

TEST_CASE("ctl containment and monotonicity properties") {
  PixelModel m = grid(8, 8);
  std::mt19937 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    BinaryMask phi = oracle::random_mask(rng, 8, 8, 45);
    BinaryMask psi = mask_or(phi, oracle::random_mask(rng, 8, 8, 30));
    CHECK(subset_of(phi, ef(m, phi)));
    CHECK(subset_of(eg(m, phi), phi));
    CHECK(subset_of(ex(m, phi), ex(m, psi)));
  }
}

TEST_CASE("border picks the outer frame") {
  PixelModel m3 = grid(3, 3);
  CHECK(border(m3).count() == 8);
  CHECK_FALSE(border(m3).at(1, 1));
  CHECK(border(grid(1, 7)) == BinaryMask::ones(1, 7));
  CHECK(border(grid(256, 256)).count() == 1020);
}

TEST_CASE("connect follows the frame but not the enclosed hole") {
  GrayImage img = ring_image({0, 5, 200, 200, 2});
  PixelModel m = build_model(img);
  BinaryMask dark = evaluate(m, parse("intensity < 10"));
  BinaryMask frame = connect(m, dark, border(m));
  BinaryMask ring1 = BinaryMask::zeros(9, 9);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) {
      int ring = std::min(std::min(x, 8 - x), std::min(y, 8 - y));
      if (ring == 1) ring1.set(x, y, true);
    }
  CHECK(frame == ring1);
  CHECK_FALSE(frame.at(4, 4));
}

TEST_CASE("connect from the border reaches all interior pixels") {
  PixelModel m = grid(5, 5);
  BinaryMask all = BinaryMask::ones(5, 5);
  BinaryMask inner = connect(m, all, border(m));
  CHECK(inner.count() == 9);
  CHECK(inner == mask_not(border(m)));
  CHECK(connect(m, BinaryMask::zeros(5, 5), border(m)) == BinaryMask::zeros(5, 5));
}

TEST_CASE("connect with threshold binarizes a normalized field") {
  PixelModel m = grid(2, 2);
  ScalarField f{2, 2, {0.0, 2.0, 6.0, 10.0}};
  BinaryMask phi2 = BinaryMask::zeros(2, 2);
  phi2.set(0, 0, true);
  BinaryMask got = connect(m, f, 0.5, phi2);
  BinaryMask expect = BinaryMask::zeros(2, 2);
  expect.set(1, 1, true);
  expect.set(0, 1, true);
  CHECK(got == expect);
}

TEST_CASE("spatial operators match naive oracles on random masks") {
  std::mt19937 rng(22);
  PixelModel m = grid(16, 16);
  for (int trial = 0; trial < 60; ++trial) {
    BinaryMask phi1 = oracle::random_mask(rng, 16, 16, 55);
    BinaryMask phi2 = oracle::random_mask(rng, 16, 16, 20);

    BinaryMask got = connect(m, phi1, phi2);
    CHECK(got == oracle::connect(phi1, phi2));
    CHECK(subset_of(got, mask_and(phi1, mask_not(phi2))));

    BinaryMask grown = increase(m, phi1, phi2);
    CHECK(grown == oracle::increase(phi1, phi2));
    CHECK(subset_of(grown, phi1));

    ScalarField dist = distance_transform(m, phi2);
    std::vector<double> want = oracle::distance(phi2);
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(dist.values[i] == want[i]);

    for (double d : {0.5, 2.0, 5.0}) CHECK(str(m, d, phi2) == oracle::str(d, phi2));
  }
}

TEST_CASE("str boundary cases") {
  PixelModel m = grid(5, 5);
  BinaryMask center = BinaryMask::zeros(5, 5);
  center.set(2, 2, true);
  CHECK(str(m, 0.5, center) == center);
  BinaryMask d2 = str(m, 2.0, center);
  CHECK(d2.count() == 5);
  CHECK(d2 == mask_or(center, ex(m, center)));
  CHECK(str(m, 1.0, BinaryMask::ones(5, 5)) == BinaryMask::ones(5, 5));
  CHECK(str(m, 100.0, BinaryMask::zeros(5, 5)) == BinaryMask::zeros(5, 5));
}

TEST_CASE("str is monotone in the distance bound") {
  std::mt19937 rng(23);
  PixelModel m = grid(10, 10);
  for (int trial = 0; trial < 10; ++trial) {
    BinaryMask phi2 = oracle::random_mask(rng, 10, 10, 15);
    BinaryMask prev = BinaryMask::zeros(10, 10);
    for (double d : {0.5, 1.5, 2.5, 4.0, 8.0}) {
      BinaryMask cur = str(m, d, phi2);
      CHECK(subset_of(prev, cur));
      prev = cur;
    }
  }
}

TEST_CASE("increase boundary cases") {
  PixelModel m = grid(6, 6);
  BinaryMask blob = mask_of(6, 6,
                            "......|"
                            ".###..|"
                            ".###..|"
                            "......|"
                            "...##.|"
                            "...##.");
  BinaryMask seed = BinaryMask::zeros(6, 6);
  seed.set(2, 1, true);
  BinaryMask top = mask_of(6, 6,
                           "......|"
                           ".###..|"
                           ".###..|"
                           "......|"
                           "......|"
                           "......");
  CHECK(increase(m, blob, seed) == top);
  CHECK(increase(m, blob, BinaryMask::zeros(6, 6)) == BinaryMask::zeros(6, 6));
  CHECK(increase(m, blob, blob) == blob);
}

TEST_CASE("distance transform basics") {
  PixelModel strip = grid(5, 1);
  BinaryMask left = BinaryMask::zeros(5, 1);
  left.set(0, 0, true);
  ScalarField d = distance_transform(strip, left);
  CHECK(d.values == std::vector<double>{0, 1, 2, 3, 4});

  PixelModel m = grid(4, 4);
  ScalarField zero = distance_transform(m, BinaryMask::ones(4, 4));
  for (double v : zero.values) CHECK(v == 0.0);

  ScalarField inf = distance_transform(m, BinaryMask::zeros(4, 4));
  for (double v : inf.values) CHECK(std::isinf(v));
}

TEST_CASE("distance transform is 1-lipschitz over adjacency") {
  std::mt19937 rng(24);
  PixelModel m = grid(12, 12);
  for (int trial = 0; trial < 10; ++trial) {
    BinaryMask phi = oracle::random_mask(rng, 12, 12, 10);
    if (phi.empty()) continue;
    ScalarField d = distance_transform(m, phi);
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x + 1 < 12; ++x) CHECK(std::abs(d.at(x, y) - d.at(x + 1, y)) <= 1.0);
    for (int y = 0; y + 1 < 12; ++y)
      for (int x = 0; x < 12; ++x) CHECK(std::abs(d.at(x, y) - d.at(x, y + 1)) <= 1.0);
  }
}

TEST_CASE("component count agrees with the labeling oracle") {
  std::mt19937 rng(25);
  for (int trial = 0; trial < 30; ++trial) {
    BinaryMask m = oracle::random_mask(rng, 14, 14, 40);
    CHECK(component_count(m) == oracle::component_count(m));
  }
  CHECK(component_count(BinaryMask::zeros(3, 3)) == 0);
}

TEST_CASE("eight adjacency adds diagonal transitions when enabled") {
  GrayImage img = GrayImage::filled(3, 3, 0);
  PixelModel m8 = build_model(img, nullptr, true);
  BinaryMask corner = BinaryMask::zeros(3, 3);
  corner.set(0, 0, true);
  CHECK(ex(m8, corner).at(1, 1));
  CHECK_FALSE(ex(build_model(img), corner).at(1, 1));
  CHECK(m8.num_transitions() == 40u);
}

TEST_CASE("evaluate handles atoms and tautologies") {
  GrayImage img = ring_image({0, 5, 200, 200, 2});
  PixelModel m = build_model(img);
  CHECK(evaluate(m, parse("intensity > 255")) == BinaryMask::zeros(9, 9));
  CHECK(evaluate(m, parse("border | !border")) == BinaryMask::ones(9, 9));
  CHECK(evaluate(m, parse("intensity == 2")).count() == 1);
  CHECK(evaluate(m, parse("EX EF border")) == BinaryMask::ones(9, 9));
}

TEST_CASE("brain keeps the enclosed bright region only") {
  GrayImage img = ring_image({0, 200, 5, 200, 40});
  PixelModel m = build_model(img);
  BinaryMask got = evaluate(m, parse("brain(intensity >= 30, intensity >= 30)"));
  BinaryMask expect = BinaryMask::zeros(9, 9);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) {
      int ring = std::min(std::min(x, 8 - x), std::min(y, 8 - y));
      if (ring >= 3) expect.set(x, y, true);
    }
  CHECK(got == expect);

  BinaryMask bg = evaluate(m, parse("background(intensity >= 30)"));
  for (int x = 1; x < 8; ++x) CHECK(bg.at(x, 1));
  CHECK(disjoint(bg, got));
}

TEST_CASE("cluster atoms need segment labels") {
  GrayImage img = GrayImage::filled(2, 2, 9);
  PixelModel bare = build_model(img);
  CHECK(caught([&] { evaluate(bare, parse("cluster == 25")); }) == Errc::unbound_atom);

  SegmentImage seg;
  seg.width = 2;
  seg.height = 2;
  seg.labels = {25, 50, 25, 50};
  PixelModel labeled = build_model(img, &seg);
  CHECK(evaluate(labeled, parse("cluster == 25")).count() == 2);
}

TEST_CASE("syntactically equal formulas evaluate identically") {
  GrayImage img = ring_image({0, 5, 200, 200, 2});
  PixelModel m = build_model(img);
  std::mt19937 rng(26);
  for (int trial = 0; trial < 50; ++trial) {
    FormulaPtr a = oracle::random_formula(rng, 3);
    FormulaPtr b = parse(print(a));
    REQUIRE(equal(a, b));
    bool needs_labels = print(a).find("cluster") != std::string::npos;
    if (needs_labels) continue;
    CHECK(evaluate(m, a) == evaluate(m, b));
  }
}
