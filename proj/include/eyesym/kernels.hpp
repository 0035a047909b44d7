#pragma once

#include <cmath>
#include <vector>

#include "eyesym/errors.hpp"

namespace eyesym {

/// Odd-length 1D kernel, taps indexed from -radius to +radius.
struct Kernel1D {
    std::vector<double> taps;

    int radius() const { return static_cast<int>(taps.size() / 2); }
    int length() const { return static_cast<int>(taps.size()); }

    /// Tap at signed offset u in [-radius, radius].
    double at(int u) const { return taps[static_cast<std::size_t>(u + radius())]; }
};

inline Kernel1D impulse_kernel() { return Kernel1D{{1.0}}; }

namespace detail {

inline int kernel_radius(double sigma, double truncation) {
    if (!(sigma > 0.0))
        throw ParameterError("kernel sigma must be positive");
    if (!(truncation >= 2.0))
        throw ParameterError("kernel truncation must be >= 2 sigma");
    return static_cast<int>(std::ceil(truncation * sigma));
}

} // namespace detail

/// Samples g(x) = exp(-x^2 / 2 sigma^2) at integer x in [-ceil(trunc*sigma),
/// +ceil(trunc*sigma)], normalized to unit sum.
inline Kernel1D gaussian_kernel(double sigma, double truncation = 3.0) {
    const int r = detail::kernel_radius(sigma, truncation);
    Kernel1D k;
    k.taps.resize(2 * r + 1);
    double sum = 0.0;
    for (int u = -r; u <= r; ++u) {
        const double v = std::exp(-0.5 * u * u / (sigma * sigma));
        k.taps[u + r] = v;
        sum += v;
    }
    for (double& t : k.taps) t /= sum;
    return k;
}

/// Samples x^order * g(x). Order 0 is normalized to unit sum; orders 1 and 2
/// are divided by the same constant as their order-0 sibling, so products of
/// these kernels reconstruct x^n y^m g(x) g(y) with a single normalization.
inline Kernel1D moment_kernel(double sigma, int order, double truncation = 3.0) {
    if (order < 0 || order > 2)
        throw ParameterError("moment kernel order must be 0, 1 or 2");
    const int r = detail::kernel_radius(sigma, truncation);
    Kernel1D k;
    k.taps.resize(2 * r + 1);
    double gauss_sum = 0.0;
    for (int u = -r; u <= r; ++u)
        gauss_sum += std::exp(-0.5 * u * u / (sigma * sigma));
    for (int u = -r; u <= r; ++u) {
        const double g = std::exp(-0.5 * u * u / (sigma * sigma));
        double m = g;
        for (int p = 0; p < order; ++p) m *= u;
        k.taps[u + r] = m / gauss_sum;
    }
    return k;
}

} // namespace eyesym
