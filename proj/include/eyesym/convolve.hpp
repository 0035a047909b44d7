#pragma once

#include <complex>
#include <vector>

#include "eyesym/image.hpp"
#include "eyesym/kernels.hpp"

namespace eyesym {

namespace detail {

inline void check_kernel_fits(const Kernel1D& k, int side, const char* which) {
    if (k.length() >= 2 * side)
        throw ParameterError(std::string(which) + " kernel length " +
                             std::to_string(k.length()) + " too large for image side " +
                             std::to_string(side));
    if (k.length() % 2 == 0)
        throw ParameterError("kernel length must be odd");
}

template <typename T>
Raster<T> convolve_rows(const Raster<T>& in, const Kernel1D& k) {
    const int w = in.width(), h = in.height(), r = k.radius();
    Raster<T> out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            T acc{};
            for (int u = -r; u <= r; ++u)
                acc += in.clamped(x - u, y) * k.at(u);
            out.at(x, y) = acc;
        }
    }
    return out;
}

template <typename T>
Raster<T> convolve_cols(const Raster<T>& in, const Kernel1D& k) {
    const int w = in.width(), h = in.height(), r = k.radius();
    Raster<T> out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            T acc{};
            for (int v = -r; v <= r; ++v)
                acc += in.clamped(x, y - v) * k.at(v);
            out.at(x, y) = acc;
        }
    }
    return out;
}

} // namespace detail

/// Separable 2D convolution with replicate-edge padding:
///   out(x,y) = sum_{u,v} in(x-u, y-v) * horizontal(u) * vertical(v).
/// Because clamped 2D coordinates factor per axis, the two 1D passes are
/// exactly equivalent to dense 2D convolution with replicate padding.
template <typename T>
Raster<T> convolve_separable(const Raster<T>& in, const Kernel1D& horizontal,
                             const Kernel1D& vertical) {
    if (in.empty())
        throw ParameterError("convolve_separable: empty image");
    detail::check_kernel_fits(horizontal, in.width(), "horizontal");
    detail::check_kernel_fits(vertical, in.height(), "vertical");
    return detail::convolve_cols(detail::convolve_rows(in, horizontal), vertical);
}

/// One separable term of a complex 2D filter: weight * (horizontal x vertical).
struct SeparableTerm {
    Kernel1D horizontal;
    Kernel1D vertical;
    std::complex<double> weight;
};

/// Complex 2D filter expressed as a sum of real rank-1 kernel products.
struct SeparableComplexFilter {
    int order = 0;
    double sigma = 0.0;
    std::vector<SeparableTerm> terms;
};

/// Applies a separable complex filter: the weighted sum of the per-term
/// separable convolutions.
template <typename T>
ComplexField apply_separable_complex(const Raster<T>& image, const SeparableComplexFilter& filter) {
    if (filter.terms.empty())
        throw ParameterError("apply_separable_complex: filter has no terms");
    ComplexField out(image.width(), image.height());
    for (const SeparableTerm& term : filter.terms) {
        const Raster<T> part = convolve_separable(image, term.horizontal, term.vertical);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.data()[i] += term.weight * part.data()[i];
    }
    return out;
}

} // namespace eyesym
