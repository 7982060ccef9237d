#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include "cursive/imgproc.hpp"

using namespace cursive;

TEST_CASE("Otsu on a two-level image separates the levels") {
    GrayImage img(10, 10, 255);
    for (int i = 0; i < 40; ++i) img.pixels[static_cast<std::size_t>(i * 10 % 100 + i / 10)] = 0;
    const auto r = otsu_threshold(img);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) CHECK(r.image.pixels[i] == (img.pixels[i] == 0));
    CHECK(r.threshold == oracle::otsu_exhaustive(img));
}

TEST_CASE("Otsu on a constant image gives no ink") {
    const auto r = otsu_threshold(GrayImage(6, 4, 128));
    CHECK(r.threshold == 0);
    CHECK(r.image.count() == 0);
}

TEST_CASE("Otsu ties go to the lowest threshold") {
    // Levels 10 and 200 only: every t in 11..200 splits identically.
    GrayImage img(2, 1);
    img.pixels = {10, 200};
    CHECK(otsu_threshold(img).threshold == 11);
    CHECK(oracle::otsu_exhaustive(img) == 11);
}

TEST_CASE("Otsu matches the exhaustive oracle on skewed histograms") {
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const int w = 1 + static_cast<int>(rng.below(20));
        const int h = 1 + static_cast<int>(rng.below(20));
        GrayImage img(w, h);
        const int lo = static_cast<int>(rng.below(256));
        const int span = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(256 - lo)));
        for (auto& p : img.pixels) p = static_cast<std::uint8_t>(lo + static_cast<int>(rng.below(static_cast<std::size_t>(span))));
        CHECK(otsu_threshold(img).threshold == oracle::otsu_exhaustive(img));
    }
}

namespace {

BinaryImage vertical_bars(int w, int h, std::initializer_list<int> columns) {
    BinaryImage img(w, h);
    for (int c : columns)
        for (int y = 0; y < h; ++y) img.set(c, y);
    return img;
}

}  // namespace

TEST_CASE("upright strokes keep angle 0") {
    const BinaryImage img = vertical_bars(30, 20, {3, 10, 20});
    CHECK(estimate_slant(img) == 0);
    const BinaryImage out = correct_slant(img);
    CHECK(out == crop(img, content_box(img)));
}

TEST_CASE("a sheared image is slant-corrected back") {
    const BinaryImage img = vertical_bars(40, 30, {5, 15, 25});
    const ShearResult sheared = shear(img, 15);
    const int angle = estimate_slant(sheared.image);
    CHECK(std::abs(angle - (-15)) <= 2);
}

TEST_CASE("slant correction leaves an empty image unchanged") {
    const BinaryImage empty(12, 7);
    CHECK(correct_slant(empty) == empty);
}

TEST_CASE("corrected output touches all four content extremes") {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        BinaryImage img = testutil::random_blob_image(rng, 25, 18, 0.15);
        if (img.count() == 0) continue;
        const BinaryImage out = correct_slant(img);
        const Box b = content_box(out);
        CHECK(b.left == 0);
        CHECK(b.top == 0);
        CHECK(b.right == out.width - 1);
        CHECK(b.bottom == out.height - 1);
        CHECK(out.count() == img.count());  // shear moves pixels without merging them
    }
}

TEST_CASE("slant transform maps source columns into the corrected frame") {
    // A single slanted stroke: after correction its pixels line up in one column.
    BinaryImage img(30, 21);
    for (int y = 0; y < 21; ++y) img.set(5 + (20 - y) / 2, y);
    const SlantCorrection c = correct_slant_with_transform(img);
    for (int y = 0; y < 21; ++y) {
        const int x = 5 + (20 - y) / 2;
        const int mx = c.map_column(x, y);
        REQUIRE(mx >= 0);
        REQUIRE(mx < c.image.width);
        CHECK(c.image.at(mx, c.map_row(y)));
    }
}

TEST_CASE("thinning examples") {
    CHECK(thin(BinaryImage(8, 8)) == BinaryImage(8, 8));

    BinaryImage line(20, 5);
    for (int x = 2; x < 18; ++x) line.set(x, 2);
    CHECK(static_cast<const BinaryImage&>(thin(line)) == line);

    BinaryImage square(30, 30);
    for (int y = 5; y < 25; ++y)
        for (int x = 5; x < 25; ++x) square.set(x, y);
    const SkeletonImage s = thin(square);
    CHECK(s.count() < square.count());
    CHECK(s.count() > 0);
    CHECK(oracle::count_components(s) == 1);
}

TEST_CASE("a 2x2 block keeps its component") {
    const BinaryImage block = testutil::from_rows({"....", ".##.", ".##.", "...."});
    const SkeletonImage s = thin(block);
    CHECK(s.count() >= 1);
    CHECK(oracle::count_components(s) == 1);
}

TEST_CASE("thinning properties on random blobs") {
    Rng rng(11);
    for (int t = 0; t < 25; ++t) {
        const BinaryImage img = testutil::random_blob_image(rng, 16 + static_cast<int>(rng.below(10)), 16, 0.55);
        const SkeletonImage s = thin(img);
        CHECK(thin(s) == s);
        CHECK(s.count() <= img.count());
        CHECK(oracle::count_components(s) == oracle::count_components(img));
    }
}
