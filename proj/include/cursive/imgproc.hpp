#pragma once

#include "cursive/image.hpp"

namespace cursive {

struct OtsuResult {
    int threshold = 0;
    BinaryImage image;
};

// Global Otsu binarization. A pixel is ink iff its intensity is below the
// threshold. The threshold maximizes the between-class variance over 1..255,
// lowest level on ties; a constant image yields threshold 0 and no ink.
OtsuResult otsu_threshold(const GrayImage& img);

// Horizontal shear by `degrees`: row y moves by round(tan(degrees) * (height-1-y))
// columns, so positive angles push the top of the image right. The canvas grows
// to hold every shifted row; pixel count is preserved.
struct ShearResult {
    BinaryImage image;
    int origin_shift = 0;  // canvas column of source column 0 on the bottom row
};
ShearResult shear(const BinaryImage& img, int degrees);

// Slant estimate and the coordinate transform applied by correct_slant.
struct SlantCorrection {
    int angle = 0;       // degrees, -45..45
    int shift_base = 0;  // canvas offset of the unsheared bottom row
    Box crop_box;        // content box in the sheared canvas
    int source_height = 0;
    Box source_box;      // content box of the input
    BinaryImage image;

    // Maps a source pixel position to the corrected image's column.
    int map_column(int x, int y) const;
    int map_row(int y) const { return y - crop_box.top; }
};

// Angle in -45..45 maximizing the variance of the vertical projection profile
// of the sheared image. Ties go to the smaller |angle|, then the negative one.
int estimate_slant(const BinaryImage& img);

// Applies the estimated shear and crops to content. Empty images come back unchanged.
SlantCorrection correct_slant_with_transform(const BinaryImage& img);
BinaryImage correct_slant(const BinaryImage& img);

// Zhang-Suen thinning run to a fixed point.
SkeletonImage thin(const BinaryImage& img);

}  // namespace cursive
