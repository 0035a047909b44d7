#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "eyesym/errors.hpp"

namespace eyesym {

/// Row-major 2D raster with value semantics. Immutable-after-construction in
/// practice: every library operation takes rasters by const reference and
/// returns fresh ones, so concurrent reads and per-image batch parallelism
/// are safe.
template <typename T>
class Raster {
public:
    Raster() = default;

    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(check_dims(width, height)) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    /// Replicate-border read: coordinates are clamped into the raster.
    const T& clamped(int x, int y) const {
        x = std::clamp(x, 0, width_ - 1);
        y = std::clamp(y, 0, height_ - 1);
        return at(x, y);
    }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool operator==(const Raster&) const = default;

private:
    static int check_dims(int width, int height) {
        if (width < 1 || height < 1)
            throw ParameterError("raster dimensions must be >= 1");
        return width;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Grayscale image, intensities normalized to [0,1] at load time.
using GrayImage = Raster<double>;

/// Complex-valued field (orientation tensor, filter responses).
using ComplexField = Raster<std::complex<double>>;

/// Bilinear intensity lookup at a subpixel position, replicate borders.
inline double sample_bilinear(const GrayImage& img, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    const double v00 = img.clamped(x0, y0);
    const double v10 = img.clamped(x0 + 1, y0);
    const double v01 = img.clamped(x0, y0 + 1);
    const double v11 = img.clamped(x0 + 1, y0 + 1);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

} // namespace eyesym
