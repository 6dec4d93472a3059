#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tumorcheck/features.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

using namespace tumorcheck;

namespace {

FeatureVector reference_features(const GrayImage& img, const BinaryMask& region) {
  const int L = kGlcmLevels;
  std::vector<std::vector<double>> averaged(L, std::vector<double>(L, 0.0));
  const int offs[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  int contributing = 0;
  for (auto [dx, dy] : offs) {
    std::vector<std::vector<double>> counts(L, std::vector<double>(L, 0.0));
    double pairs = 0.0;
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        int nx = x + dx, ny = y + dy;
        if (nx < 0 || nx >= img.width || ny < 0 || ny >= img.height) continue;
        if (!region.at(x, y) || !region.at(nx, ny)) continue;
        counts[img.at(x, y) >> 5][img.at(nx, ny) >> 5] += 1.0;
        pairs += 1.0;
      }
    if (pairs == 0.0) continue;
    ++contributing;
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j)
        averaged[i][j] += (counts[i][j] + counts[j][i]) / (2.0 * pairs);
  }
  double area = 0.0;
  for (std::uint8_t bit : region.bits) area += bit;
  if (contributing > 0) {
    for (auto& row : averaged)
      for (double& v : row) v /= contributing;
  } else {
    for (std::size_t idx = 0; idx < region.bits.size(); ++idx)
      if (region.bits[idx]) averaged[img.pixels[idx] >> 5][img.pixels[idx] >> 5] += 1.0 / area;
  }

  double contrast = 0.0, energy = 0.0, homogeneity = 0.0, entropy = 0.0;
  double mi = 0.0, mj = 0.0;
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      double v = averaged[i][j];
      contrast += (i - j) * (i - j) * v;
      energy += v * v;
      homogeneity += v / (1.0 + std::abs(i - j));
      if (v > 0.0) entropy -= v * std::log2(v);
      mi += i * v;
      mj += j * v;
    }
  double vi = 0.0, vj = 0.0, cov = 0.0;
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      double v = averaged[i][j];
      vi += (i - mi) * (i - mi) * v;
      vj += (j - mj) * (j - mj) * v;
      cov += (i - mi) * (j - mj) * v;
    }
  double corr = std::sqrt(vi * vj) > 0.0 ? cov / std::sqrt(vi * vj) : 1.0;

  double mean = 0.0;
  for (std::size_t idx = 0; idx < region.bits.size(); ++idx)
    if (region.bits[idx]) mean += img.pixels[idx];
  mean /= area;
  double var = 0.0, cube = 0.0;
  for (std::size_t idx = 0; idx < region.bits.size(); ++idx)
    if (region.bits[idx]) {
      double d = img.pixels[idx] - mean;
      var += d * d;
      cube += d * d * d;
    }
  var /= area;
  cube /= area;
  double sd = std::sqrt(var);
  double skew = sd > 0.0 ? cube / (sd * sd * sd) : 0.0;
  return {contrast, corr, energy, homogeneity, entropy, mean, sd, skew,
          area / static_cast<double>(img.size())};
}

}  // namespace

TEST_CASE("constant region has trivial texture") {
  GrayImage img = GrayImage::filled(6, 5, 77);
  FeatureVector fv = extract_features(img, BinaryMask::ones(6, 5));
  CHECK(fv[0] == 0.0);
  CHECK(fv[1] == 1.0);
  CHECK(fv[2] == 1.0);
  CHECK(fv[3] == 1.0);
  CHECK(fv[4] == 0.0);
  CHECK(fv[5] == 77.0);
  CHECK(fv[6] == 0.0);
  CHECK(fv[7] == 0.0);
  CHECK(fv[8] == 1.0);

  BinaryMask half = helpers::mask_of(6, 5, "######|######|......|......|......");
  FeatureVector part = extract_features(img, half);
  CHECK(part[5] == 77.0);
  CHECK(part[8] == Catch::Approx(12.0 / 30.0));
}

TEST_CASE("checkerboard features match the hand computation") {
  GrayImage img = GrayImage::filled(8, 8, 0);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) img.at(x, y) = (x + y) % 2 ? 255 : 0;
  FeatureVector fv = extract_features(img, BinaryMask::ones(8, 8));
  CHECK(fv[0] == Catch::Approx(24.5).margin(1e-12));
  CHECK(fv[1] == Catch::Approx(0.0).margin(1e-12));
  CHECK(fv[2] == Catch::Approx(0.25).margin(1e-12));
  CHECK(fv[3] == Catch::Approx(0.5625).margin(1e-12));
  CHECK(fv[4] == Catch::Approx(2.0).margin(1e-12));
  CHECK(fv[5] == 127.5);
  CHECK(fv[6] == 127.5);
  CHECK(fv[7] == Catch::Approx(0.0).margin(1e-12));
  CHECK(fv[8] == 1.0);
}

TEST_CASE("isolated pixels co-occur with themselves") {
  GrayImage img = GrayImage::filled(5, 5, 0);
  img.at(2, 2) = 200;
  BinaryMask one = BinaryMask::zeros(5, 5);
  one.set(2, 2, true);
  FeatureVector fv = extract_features(img, one);
  CHECK(fv[0] == 0.0);
  CHECK(fv[2] == 1.0);
  CHECK(fv[4] == 0.0);
  CHECK(fv[5] == 200.0);
  CHECK(fv[6] == 0.0);
  CHECK(fv[8] == Catch::Approx(1.0 / 25.0));

  img.at(0, 0) = 40;
  BinaryMask two = one;
  two.set(0, 0, true);
  FeatureVector pair = extract_features(img, two);
  CHECK(pair[2] == Catch::Approx(0.5));
  CHECK(pair[5] == 120.0);
}

TEST_CASE("features are translation invariant") {
  std::mt19937 rng(11);
  GrayImage img = GrayImage::filled(12, 12, 0);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() % 256);
  BinaryMask region = BinaryMask::zeros(12, 12);
  for (int y = 3; y < 7; ++y)
    for (int x = 2; x < 6; ++x) region.set(x, y, true);

  GrayImage shifted = GrayImage::filled(12, 12, 0);
  BinaryMask shifted_region = BinaryMask::zeros(12, 12);
  for (int y = 3; y < 7; ++y)
    for (int x = 2; x < 6; ++x) {
      shifted.at(x + 5, y + 4) = img.at(x, y);
      shifted_region.set(x + 5, y + 4, true);
    }

  FeatureVector a = extract_features(img, region);
  FeatureVector b = extract_features(shifted, shifted_region);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("features agree with a direct reimplementation") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage img = GrayImage::filled(10, 9, 0);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() % 256);
    BinaryMask region = oracle::random_mask(rng, 10, 9, 50);
    if (region.count() == 0) region.set(0, 0, true);
    FeatureVector got = extract_features(img, region);
    FeatureVector want = reference_features(img, region);
    for (std::size_t i = 0; i < got.size(); ++i) {
      INFO("trial " << trial << " feature " << i);
      CHECK(got[i] == Catch::Approx(want[i]).margin(1e-12));
    }
  }
}

TEST_CASE("feature extraction rejects unusable regions") {
  GrayImage img = GrayImage::filled(4, 4, 1);
  CHECK(helpers::caught([&] { extract_features(img, BinaryMask::zeros(4, 4)); }) ==
        Errc::empty_region);
  CHECK(helpers::caught([&] { extract_features(img, BinaryMask::zeros(5, 4)); }) ==
        Errc::dimension_mismatch);
}

TEST_CASE("classification finds the nearest training row") {
  TrainingSet train;
  train.push_back({{1, 2, 3, 4, 5, 6, 7, 8, 9}, 1});
  train.push_back({{9, 8, 7, 6, 5, 4, 3, 2, 1}, 2});

  Classification exact = classify(train[1].features, train);
  CHECK(exact.label == 2);
  CHECK(exact.message == "Abnormal");
  CHECK(exact.distance == 0.0);
  CHECK(exact.row == 1);

  Classification near = classify({1, 2, 3, 4, 5, 6, 7, 8, 10}, train);
  CHECK(near.label == 1);
  CHECK(near.message == "Normal");
  CHECK(near.distance == Catch::Approx(1.0 / 9.0));
  CHECK(near.row == 0);
}

TEST_CASE("classification ties go to the earliest row") {
  TrainingSet train;
  train.push_back({{0, 0, 0, 0, 0, 0, 0, 0, 0}, 1});
  train.push_back({{2, 2, 2, 2, 2, 2, 2, 2, 2}, 2});
  Classification c = classify({1, 1, 1, 1, 1, 1, 1, 1, 1}, train);
  CHECK(c.row == 0);
  CHECK(c.label == 1);
  CHECK(c.message == "Normal");
  CHECK(c.distance == 1.0);
}

TEST_CASE("classification is permutation invariant without ties") {
  std::mt19937 rng(5);
  TrainingSet train;
  for (int r = 0; r < 6; ++r) {
    TrainingRow row;
    for (double& v : row.features) v = static_cast<double>(rng() % 1000);
    row.label = 1 + r % 2;
    train.push_back(row);
  }
  FeatureVector test;
  for (double& v : test) v = static_cast<double>(rng() % 1000);

  Classification base = classify(test, train);
  TrainingSet reversed(train.rbegin(), train.rend());
  Classification flipped = classify(test, reversed);
  CHECK(base.label == flipped.label);
  CHECK(base.distance == flipped.distance);
  CHECK(train[base.row].features == reversed[flipped.row].features);
}

TEST_CASE("signed distance lets opposite deviations cancel") {
  TrainingSet train;
  train.push_back({{5, -5, 5, -5, 5, -5, 5, -5, 0}, 2});
  train.push_back({{1, 1, 1, 1, 1, 1, 1, 1, 1}, 1});
  FeatureVector test{};

  Classification plain = classify(test, train, false);
  CHECK(plain.row == 1);
  CHECK(plain.distance == 1.0);

  Classification cancel = classify(test, train, true);
  CHECK(cancel.row == 0);
  CHECK(cancel.distance == 0.0);

  train.push_back({{-2, -2, -2, -2, -2, -2, -2, -2, -2}, 1});
  Classification lowest = classify(test, train, true);
  CHECK(lowest.row == 2);
  CHECK(lowest.distance == -2.0);
}

TEST_CASE("classifying against an empty training set fails") {
  CHECK(helpers::caught([&] { classify(FeatureVector{}, TrainingSet{}); }) ==
        Errc::empty_training_set);
}

TEST_CASE("training CSV parses valid rows") {
  std::string csv =
      "f1,f2,f3,f4,f5,f6,f7,f8,f9,label\n"
      "0,0,0,0,0,0,0,0,0,1\n"
      " 24.5 , -0.25 , 0.25 , 0.5625 , 2 , 127.5 , 127.5 , -0.5 , 1 , 2 \r\n"
      "\n";
  TrainingSet ts = load_training(csv);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].label == 1);
  CHECK(ts[0].features == FeatureVector{});
  CHECK(ts[1].label == 2);
  CHECK(ts[1].features[0] == 24.5);
  CHECK(ts[1].features[1] == -0.25);
  CHECK(ts[1].features[7] == -0.5);
}

TEST_CASE("training CSV rejects malformed content") {
  CHECK(helpers::caught([&] { load_training("a,b\n1,2\n"); }) == Errc::bad_header);
  CHECK(helpers::caught([&] { load_training("f1,f2,f3,f4,f5,f6,f7,f8,f9,label\n"); }) ==
        Errc::empty_training_set);
  CHECK(helpers::caught([&] {
          load_training("f1,f2,f3,f4,f5,f6,f7,f8,f9,label\n1,2,3,4,5,6,7,8,2\n");
        }) == Errc::ragged_row);
  CHECK(helpers::caught([&] {
          load_training("f1,f2,f3,f4,f5,f6,f7,f8,f9,label\n1,2,3,4,5,x,7,8,9,2\n");
        }) == Errc::ragged_row);
  CHECK(helpers::caught([&] {
          load_training("f1,f2,f3,f4,f5,f6,f7,f8,f9,label\n1,2,3,4,5,6,7,8,9,3\n");
        }) == Errc::bad_label);
}

TEST_CASE("training CSV round trips") {
  std::mt19937 rng(31);
  TrainingSet ts;
  for (int r = 0; r < 50; ++r) {
    TrainingRow row;
    for (double& v : row.features)
      v = (static_cast<double>(rng() % 2000001) - 1000000.0) / 10000.0;
    row.label = 1 + static_cast<int>(rng() % 2);
    ts.push_back(row);
  }
  std::string csv = save_training(ts);
  CHECK(csv.substr(0, csv.find('\n')) == "f1,f2,f3,f4,f5,f6,f7,f8,f9,label");
  TrainingSet back = load_training(csv);
  REQUIRE(back.size() == ts.size());
  for (std::size_t r = 0; r < ts.size(); ++r) {
    CHECK(back[r].label == ts[r].label);
    for (int i = 0; i < 9; ++i)
      CHECK(back[r].features[i] == Catch::Approx(ts[r].features[i]).margin(1e-12));
  }
}
