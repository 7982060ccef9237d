#include "cursive/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>

#include "cursive/error.hpp"

namespace cursive {

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

GrayImage::GrayImage(int w, int h, std::vector<std::uint8_t> data)
    : width(w), height(h), pixels(std::move(data)) {
    if (pixels.size() != static_cast<std::size_t>(w) * h)
        throw InvalidArgument("gray image: pixel count does not match width x height");
}

BinaryImage::BinaryImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

BinaryImage::BinaryImage(int w, int h, std::vector<std::uint8_t> data)
    : width(w), height(h), pixels(std::move(data)) {
    if (pixels.size() != static_cast<std::size_t>(w) * h)
        throw InvalidArgument("binary image: pixel count does not match width x height");
    for (auto& p : pixels) p = p ? 1 : 0;
}

std::size_t BinaryImage::count() const {
    return static_cast<std::size_t>(std::count(pixels.begin(), pixels.end(), std::uint8_t{1}));
}

Box content_box(const BinaryImage& img) {
    Box b{img.width, img.height, -1, -1};
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y)) {
                b.left = std::min(b.left, x);
                b.right = std::max(b.right, x);
                b.top = std::min(b.top, y);
                b.bottom = std::max(b.bottom, y);
            }
    if (b.right < 0) return Box{};
    return b;
}

BinaryImage crop(const BinaryImage& img, const Box& box) {
    if (box.empty()) return BinaryImage{};
    BinaryImage out(box.width(), box.height());
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) out.set(x, y, img.ink(box.left + x, box.top + y));
    return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    if (path.empty()) throw IoError("empty output path");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

namespace {

// Header tokens of a netpbm file: whitespace separated, '#' starts a comment.
class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    long next_int() {
        skip_space_and_comments();
        long value = 0;
        int digits = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_++] - '0');
            if (++digits > 9) throw FormatError("pgm: header number too large");
        }
        if (digits == 0) throw FormatError("pgm: malformed header");
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_start() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) throw FormatError("pgm: malformed header");
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 2;
};

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw FormatError("pgm: malformed header (expected P5)");
    HeaderReader header(bytes);
    const long w = header.next_int();
    const long h = header.next_int();
    const long maxval = header.next_int();
    if (w < 1 || h < 1) throw FormatError("pgm: malformed header (zero dimension)");
    if (maxval < 1) throw FormatError("pgm: malformed header (maxval)");
    if (maxval > 255) throw FormatError("pgm: maxval > 255 is not supported");
    const std::size_t start = header.raster_start();
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (bytes.size() < start + n) throw FormatError("pgm: truncated raster");
    std::vector<std::uint8_t> px(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(start + n));
    return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

GrayImage load_pgm(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
    return decode_pgm(read_file(path));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    const std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) { write_file(path, encode_pgm(img)); }

GrayImage to_gray(const BinaryImage& img) {
    GrayImage g(img.width, img.height, 255);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        if (img.pixels[i]) g.pixels[i] = 0;
    return g;
}

void save_pgm(const BinaryImage& img, const std::filesystem::path& path) { save_pgm(to_gray(img), path); }

std::vector<std::uint8_t> encode_pbm(const BinaryImage& img) {
    const std::string header = "P4\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const int row_bytes = (img.width + 7) / 8;
    for (int y = 0; y < img.height; ++y) {
        std::vector<std::uint8_t> row(static_cast<std::size_t>(row_bytes), 0);
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y)) row[static_cast<std::size_t>(x / 8)] |= static_cast<std::uint8_t>(0x80u >> (x % 8));
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

void save_pbm(const BinaryImage& img, const std::filesystem::path& path) { write_file(path, encode_pbm(img)); }

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type, std::span<const std::uint8_t> data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t type_pos = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = crc32(0L, out.data() + type_pos, static_cast<uInt>(4 + data.size()));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
    static constexpr std::array<std::uint8_t, 8> signature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> out(signature.begin(), signature.end());

    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(img.width));
    put_u32(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // 8-bit grayscale, no interlace
    put_chunk(out, "IHDR", ihdr);

    // Filter type 0 on every scanline.
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(img.width + 1) * img.height);
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0);
        const auto row = img.pixels.begin() + static_cast<std::ptrdiff_t>(y) * img.width;
        raw.insert(raw.end(), row, row + img.width);
    }
    uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> packed(packed_size);
    if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), Z_BEST_SPEED) != Z_OK)
        throw Error("png: deflate failed");
    packed.resize(packed_size);
    put_chunk(out, "IDAT", packed);
    put_chunk(out, "IEND", {});
    return out;
}

}  // namespace cursive
