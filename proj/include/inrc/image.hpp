#pragma once

#include <cstdint>
#include <vector>

namespace inrc {

// RGB image, channel values in [0, 1], row-major pixel order
// (index = y * width + x), 3 interleaved channels per pixel.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // size width * height * 3

    int pixel_count() const { return width * height; }
    void validate() const;
};

// Pixel-centre coordinates normalized to [-1, 1], same pixel order as
// ImageBuffer; 2 interleaved values (x, y) per pixel.
struct CoordinateGrid {
    int width = 0;
    int height = 0;
    std::vector<double> coords;  // size width * height * 2

    int pixel_count() const { return width * height; }
};

// Column i of n maps to -1 + 2i/(n-1); a single column maps to 0.
// Rows follow the same rule. Endpoints land exactly on -1 and 1.
CoordinateGrid make_grid(int width, int height);

}  // namespace inrc
