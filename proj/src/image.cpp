#include "inrc/image.hpp"

#include <cmath>
#include <stdexcept>

namespace inrc {

void ImageBuffer::validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("image: dimensions must be positive");
    if (pixels.size() != static_cast<size_t>(width) * height * 3)
        throw std::invalid_argument("image: pixel buffer size mismatch");
    for (double v : pixels)
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("image: channel value outside [0, 1]");
}

CoordinateGrid make_grid(int width, int height) {
    if (width < 1 || height < 1) throw std::invalid_argument("make_grid: dimensions must be positive");
    CoordinateGrid grid;
    grid.width = width;
    grid.height = height;
    grid.coords.resize(static_cast<size_t>(width) * height * 2);
    auto axis = [](int i, int n) {
        if (n == 1) return 0.0;
        if (i == 0) return -1.0;
        if (i == n - 1) return 1.0;  // exact endpoints
        return -1.0 + 2.0 * i / (n - 1);
    };
    size_t at = 0;
    for (int y = 0; y < height; ++y) {
        const double cy = axis(y, height);
        for (int x = 0; x < width; ++x) {
            grid.coords[at++] = axis(x, width);
            grid.coords[at++] = cy;
        }
    }
    return grid;
}

}  // namespace inrc
