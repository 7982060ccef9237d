#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"

#include "cursive/error.hpp"
#include "cursive/features.hpp"
#include "cursive/imgproc.hpp"

using namespace cursive;

namespace {

constexpr int kGridCells = 64;

CandidateCut cut_at(int c) { return {c, CutStatus::heuristic_valid, 0}; }

}  // namespace

TEST_CASE("default dimension is 70") {
    CHECK(FeatureConfig{}.dim() == 70);
}

TEST_CASE("blank image gives a zero grid and zero crossings") {
    const SkeletonImage img(BinaryImage(100, 30));
    const auto f = extract_features(img, cut_at(50), {cut_at(50)}, {}, 10);
    REQUIRE(f.size() == 70);
    for (int i = 0; i < kGridCells; ++i) CHECK(f[static_cast<std::size_t>(i)] == 0.0);
    CHECK(f[64] == 0.0);
    CHECK(f[65] == 0.0);
    CHECK(f[67] == 0.0);
    CHECK(f[68] == 0.0);
}

TEST_CASE("fully inked window saturates the grid") {
    BinaryImage img(100, 30);
    std::fill(img.pixels.begin(), img.pixels.end(), 1);
    const auto f = extract_features(SkeletonImage(img), cut_at(50), {cut_at(50)}, {}, 10);
    for (int i = 0; i < kGridCells; ++i) CHECK(f[static_cast<std::size_t>(i)] == 1.0);
}

TEST_CASE("position and nearest-cut arithmetic") {
    const SkeletonImage img(BinaryImage(100, 30));
    const auto f = extract_features(img, cut_at(0), {cut_at(0), cut_at(10)}, {}, 10);
    CHECK(f[66] == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(f[69] == 0.0);
}

TEST_CASE("inactive cuts do not count as neighbours") {
    const SkeletonImage img(BinaryImage(100, 30));
    CandidateCut merged{10, CutStatus::width_merged, 0};
    const auto f = extract_features(img, cut_at(0), {cut_at(0), merged, cut_at(40)}, {}, 10);
    CHECK(f[66] == doctest::Approx(0.40));
}

TEST_CASE("crossing features") {
    BinaryImage img(40, 20);
    for (int x = 0; x < 40; ++x) {
        img.set(x, 3);
        img.set(x, 10);
    }
    for (int y = 0; y < 20; ++y) img.set(25, y);  // a full column at 25
    const auto f = extract_features(SkeletonImage(img), cut_at(20), {cut_at(20)}, {}, 8);
    CHECK(f[64] == doctest::Approx(0.2));
    CHECK(f[65] == doctest::Approx(0.2));
    const auto g = extract_features(SkeletonImage(img), cut_at(24), {cut_at(24)}, {}, 8);
    CHECK(g[64] == doctest::Approx(0.2));
    CHECK(g[65] == doctest::Approx(0.1));  // column 25 within +-2 has one run
}

TEST_CASE("all components lie in [0,1] for random inputs") {
    Rng rng(77);
    for (int t = 0; t < 200; ++t) {
        const int w = 2 + static_cast<int>(rng.below(80));
        const int h = 1 + static_cast<int>(rng.below(40));
        const SkeletonImage img(testutil::random_blob_image(rng, w, h, rng.uniform(0.0, 1.0)));
        std::vector<CandidateCut> cuts;
        for (int k = 0; k < 5; ++k) cuts.push_back(cut_at(static_cast<int>(rng.below(static_cast<std::size_t>(w)))));
        FeatureConfig cfg;
        if (rng.below(2)) cfg.window_cols = 2 + static_cast<int>(rng.below(60));
        cfg.grid = 2 + static_cast<int>(rng.below(8));
        const auto f = extract_features(img, cuts[0], cuts, cfg, 1 + static_cast<int>(rng.below(30)));
        REQUIRE(static_cast<int>(f.size()) == cfg.dim());
        for (double v : f) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("translation leaves the grid unchanged") {
    Rng rng(3);
    const BinaryImage base = testutil::random_blob_image(rng, 60, 20, 0.3);
    BinaryImage shifted(80, 20);
    const int k = 13;
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 60; ++x)
            if (base.at(x, y)) shifted.set(x + k, y);
    BinaryImage widened(80, 20);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 60; ++x)
            if (base.at(x, y)) widened.set(x, y);

    const auto a = extract_features(SkeletonImage(widened), cut_at(30), {cut_at(30)}, {}, 8);
    const auto b = extract_features(SkeletonImage(shifted), cut_at(30 + k), {cut_at(30 + k)}, {}, 8);
    for (int i = 0; i < kGridCells; ++i) CHECK(a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(i)]);
    CHECK(b[69] - a[69] == doctest::Approx(static_cast<double>(k) / 80));
}

TEST_CASE("invalid inputs") {
    const SkeletonImage img(BinaryImage(10, 10));
    CHECK_THROWS_AS(extract_features(img, cut_at(10), {}, {}, 5), InvalidArgument);
    FeatureConfig bad;
    bad.grid = 1;
    CHECK_THROWS_AS(extract_features(img, cut_at(3), {}, bad, 5), InvalidArgument);
    FeatureConfig narrow;
    narrow.window_cols = 1;
    CHECK_THROWS_AS(extract_features(img, cut_at(3), {}, narrow, 5), InvalidArgument);
}
