#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace cursive {

// Row-major 8-bit intensity raster.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0);
    GrayImage(int w, int h, std::vector<std::uint8_t> data);

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool empty() const { return width == 0 || height == 0; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// Row-major binary raster, 1 = ink (foreground), 0 = background.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    BinaryImage() = default;
    BinaryImage(int w, int h);
    BinaryImage(int w, int h, std::vector<std::uint8_t> data);

    bool at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool ink = true) { pixels[static_cast<std::size_t>(y) * width + x] = ink ? 1 : 0; }
    // Out-of-range coordinates read as background.
    bool ink(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height && at(x, y);
    }
    bool empty() const { return width == 0 || height == 0; }
    std::size_t count() const;

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;
};

// A binary image that is a thinning fixed point. Constructing one from an
// arbitrary BinaryImage is the caller's assertion; thin() is the normal source.
struct SkeletonImage : BinaryImage {
    SkeletonImage() = default;
    explicit SkeletonImage(BinaryImage img) : BinaryImage(std::move(img)) {}
};

// Inclusive content bounding box.
struct Box {
    int left = 0;
    int top = 0;
    int right = -1;
    int bottom = -1;

    bool empty() const { return right < left || bottom < top; }
    int width() const { return empty() ? 0 : right - left + 1; }
    int height() const { return empty() ? 0 : bottom - top + 1; }
};

Box content_box(const BinaryImage& img);
BinaryImage crop(const BinaryImage& img, const Box& box);

// Binary PGM (P5), maxval <= 255.
GrayImage load_pgm(const std::filesystem::path& path);
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

// Ink is written as 0, background as 255.
GrayImage to_gray(const BinaryImage& img);
void save_pgm(const BinaryImage& img, const std::filesystem::path& path);

// Portable bitmap (P4); ink bits are 1.
std::vector<std::uint8_t> encode_pbm(const BinaryImage& img);
void save_pbm(const BinaryImage& img, const std::filesystem::path& path);

// 8-bit grayscale PNG.
std::vector<std::uint8_t> encode_png(const GrayImage& img);

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace cursive
