#pragma once

#include <filesystem>
#include <string>

#include "cursive/image.hpp"
#include "cursive/neural.hpp"

namespace testutil {

// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "cursive_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline cursive::BinaryImage from_rows(std::initializer_list<const char*> rows) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(std::string(*rows.begin()).size());
    cursive::BinaryImage img(w, h);
    int y = 0;
    for (const char* r : rows) {
        for (int x = 0; x < w; ++x)
            if (r[x] == '#') img.set(x, y);
        ++y;
    }
    return img;
}

inline cursive::BinaryImage random_blob_image(cursive::Rng& rng, int w, int h, double p) {
    cursive::BinaryImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (rng.uniform(0.0, 1.0) < p) img.set(x, y);
    return img;
}

}  // namespace testutil
