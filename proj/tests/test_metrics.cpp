#include "metrics.hpp"

#include <cmath>
#include <limits>

#include "common.hpp"
#include "doctest.h"
#include "reference.hpp"

using namespace afa;

namespace {

LabelMap random_map(int w, int h, int max_labels, SplitMix64& rng) {
  std::vector<int32_t> labels(size_t(w) * h);
  for (auto& l : labels) l = int32_t(rng.next_u64() % uint64_t(max_labels));
  return make_label_map(w, h, std::move(labels));
}

LabelMap vertical_split(int w, int h, int first_cols) {
  std::vector<int32_t> labels(size_t(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) labels[size_t(y) * w + x] = x < first_cols;
  return make_label_map(w, h, std::move(labels));
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("self comparison is exact") {
  SplitMix64 rng(1);
  for (int rep = 0; rep < 10; ++rep) {
    LabelMap m = random_map(9, 7, 5, rng);
    std::vector<LabelMap> gt{m};
    CHECK(pri(m, gt) == 1.0);
    CHECK(voi(m, gt) == 0.0);
    CHECK(gce(m, gt) == 0.0);
    CHECK(bde(m, gt) == 0.0);
  }
}

TEST_CASE("frozen extreme and hand values") {
  // One label against all-distinct: every pair disagrees.
  LabelMap ones = make_label_map(4, 4, std::vector<int32_t>(16, 0));
  std::vector<int32_t> distinct(16);
  for (int i = 0; i < 16; ++i) distinct[i] = i;
  LabelMap each = make_label_map(4, 4, distinct);
  CHECK(pri(ones, {each}) == 0.0);

  // Flat map against two equal halves: VoI equals the halves' entropy.
  LabelMap flat = make_label_map(8, 4, std::vector<int32_t>(32, 0));
  LabelMap halves = vertical_split(8, 4, 4);
  CHECK(voi(flat, {halves}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(voi(flat, {halves}, true) == doctest::Approx(1.0).epsilon(1e-12));

  // Two vertical boundaries three pixels apart.
  LabelMap near = vertical_split(12, 4, 5);
  LabelMap far = vertical_split(12, 4, 8);
  CHECK(bde(near, {far}) == doctest::Approx(3.0).epsilon(1e-12));

  // A strict refinement has zero consistency error.
  LabelMap quarters = make_label_map(4, 4, {0, 0, 1, 1, 0, 0, 1, 1,
                                            2, 2, 3, 3, 2, 2, 3, 3});
  LabelMap top_bottom = make_label_map(4, 4, {0, 0, 0, 0, 0, 0, 0, 0,
                                              1, 1, 1, 1, 1, 1, 1, 1});
  CHECK(gce(quarters, {top_bottom}) == 0.0);
}

TEST_CASE("contingency counts joint labels") {
  LabelMap a = make_label_map(2, 2, {0, 0, 1, 1});
  LabelMap b = make_label_map(2, 2, {0, 1, 0, 1});
  auto table = contingency(a, b);
  REQUIRE(table.size() == 2);
  REQUIRE(table[0].size() == 2);
  CHECK(table[0][0] == 1);
  CHECK(table[0][1] == 1);
  CHECK(table[1][0] == 1);
  CHECK(table[1][1] == 1);
}

TEST_CASE("matches the direct-definition references on random pairs") {
  SplitMix64 rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    LabelMap a = random_map(8, 8, 2 + int(rng.next_u64() % 5), rng);
    LabelMap b = random_map(8, 8, 2 + int(rng.next_u64() % 5), rng);
    CHECK(pri(a, {b}) ==
          doctest::Approx(testref::pri_pairs(a, b)).epsilon(1e-12));
    CHECK(voi(a, {b}) ==
          doctest::Approx(testref::voi_direct(a, b, false)).epsilon(1e-12));
    CHECK(voi(a, {b}, true) ==
          doctest::Approx(testref::voi_direct(a, b, true)).epsilon(1e-12));
    CHECK(gce(a, {b}) ==
          doctest::Approx(testref::gce_sets(a, b)).epsilon(1e-12));
    CHECK(bde(a, {b}) ==
          doctest::Approx(testref::bde_scan(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("label permutation changes nothing") {
  SplitMix64 rng(44);
  LabelMap a = random_map(8, 6, 4, rng);
  LabelMap b = random_map(8, 6, 3, rng);
  LabelMap swapped = a;
  for (auto& l : swapped.labels) l = (a.num_labels - 1) - l;
  swapped = make_label_map(8, 6, swapped.labels);
  CHECK(pri(a, {b}) == doctest::Approx(pri(swapped, {b})).epsilon(1e-14));
  CHECK(voi(a, {b}) == doctest::Approx(voi(swapped, {b})).epsilon(1e-14));
  CHECK(gce(a, {b}) == doctest::Approx(gce(swapped, {b})).epsilon(1e-14));
  CHECK(bde(a, {b}) == doctest::Approx(bde(swapped, {b})).epsilon(1e-14));
}

TEST_CASE("multiple annotations average per-annotation scores") {
  SplitMix64 rng(3);
  LabelMap seg = random_map(8, 8, 3, rng);
  LabelMap g1 = random_map(8, 8, 3, rng);
  LabelMap g2 = random_map(8, 8, 4, rng);
  MetricReport r = evaluate(seg, {g1, g2});
  REQUIRE(r.per_annotation.size() == 2);
  CHECK(r.pri ==
        doctest::Approx(0.5 * (pri(seg, {g1}) + pri(seg, {g2}))).epsilon(1e-14));
  CHECK(r.voi ==
        doctest::Approx(0.5 * (voi(seg, {g1}) + voi(seg, {g2}))).epsilon(1e-14));
  CHECK(r.gce ==
        doctest::Approx(0.5 * (gce(seg, {g1}) + gce(seg, {g2}))).epsilon(1e-14));
  CHECK(r.bde ==
        doctest::Approx(0.5 * (bde(seg, {g1}) + bde(seg, {g2}))).epsilon(1e-14));
  CHECK(r.per_annotation[0].pri == doctest::Approx(pri(seg, {g1})));
  CHECK(r.per_annotation[1].pri == doctest::Approx(pri(seg, {g2})));
}

TEST_CASE("dimension and emptiness guards") {
  LabelMap a = make_label_map(2, 2, {0, 1, 0, 1});
  LabelMap wide = make_label_map(3, 2, {0, 1, 0, 1, 0, 1});
  CHECK_THROWS_AS(pri(a, {wide}), DataError);
  CHECK_THROWS_AS(evaluate(a, {}), DataError);
}

TEST_CASE("distance transform is exact euclidean") {
  // Single set pixel in a 4x3 grid.
  std::vector<uint8_t> mask(12, 0);
  mask[1 * 4 + 2] = 1;  // (x=2, y=1)
  std::vector<double> dist = distance_transform(mask, 4, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 4; ++x) {
      double dx = x - 2, dy = y - 1;
      CHECK(dist[size_t(y) * 4 + x] ==
            doctest::Approx(std::sqrt(dx * dx + dy * dy)).epsilon(1e-12));
    }

  std::vector<double> inf = distance_transform(std::vector<uint8_t>(12, 0), 4, 3);
  CHECK(inf[0] == std::numeric_limits<double>::infinity());
}

TEST_CASE("boundary mask follows the forward-difference convention") {
  LabelMap split = vertical_split(4, 2, 2);
  std::vector<uint8_t> mask = boundary_mask(split);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 4; ++x)
      CHECK(mask[size_t(y) * 4 + x] == (x == 1 ? 1 : 0));

  LabelMap flat = make_label_map(3, 3, std::vector<int32_t>(9, 0));
  std::vector<uint8_t> border = boundary_mask(flat);
  CHECK(border[4] == 0);  // centre
  int set = 0;
  for (uint8_t v : border) set += v;
  CHECK(set == 8);
}

}  // TEST_SUITE
