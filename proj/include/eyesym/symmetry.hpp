#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "eyesym/convolve.hpp"
#include "eyesym/image.hpp"
#include "eyesym/kernels.hpp"

namespace eyesym {

/// Builds the symmetry derivative of a Gaussian of order n as a sum of
/// separable 1D kernel products:
///
///   n = 1:   (-1/s^2)   * (x + iy) g(x) g(y)
///            = (-1/s^2) * [ xg(x)*g(y) + i g(x)*yg(y) ]
///   n = -2:  (+1/s^4)   * (x - iy)^2 g(x) g(y)
///            = (1/s^4)  * [ x^2g(x)*g(y) - g(x)*y^2g(y) - 2i xg(x)*yg(y) ]
///
/// The 1D factors share one Gaussian normalization constant, so the terms
/// reconstruct the directly sampled 2D filter tap-for-tap.
inline SeparableComplexFilter build_symmetry_filter(int order, double sigma) {
    if (order != -2 && order != 1)
        throw ParameterError("symmetry filter order must be -2 or 1");
    const Kernel1D g = moment_kernel(sigma, 0);
    const Kernel1D xg = moment_kernel(sigma, 1);
    const Kernel1D x2g = moment_kernel(sigma, 2);

    SeparableComplexFilter f;
    f.order = order;
    f.sigma = sigma;
    const double inv_s2 = 1.0 / (sigma * sigma);
    if (order == 1) {
        f.terms.push_back({xg, g, {-inv_s2, 0.0}});
        f.terms.push_back({g, xg, {0.0, -inv_s2}});
    } else {
        const double inv_s4 = inv_s2 * inv_s2;
        f.terms.push_back({x2g, g, {inv_s4, 0.0}});
        f.terms.push_back({g, x2g, {-inv_s4, 0.0}});
        f.terms.push_back({xg, xg, {0.0, -2.0 * inv_s4}});
    }
    return f;
}

/// Complex orientation tensor field: the squared complex gradient of the
/// sigma1-smoothed image. The argument encodes double the local gradient
/// direction, which makes all edges of a circle agree at its center.
inline ComplexField orientation_field(const GrayImage& image, double sigma1) {
    if (image.empty())
        throw ParameterError("orientation_field: empty image");
    ComplexField grad = apply_separable_complex(image, build_symmetry_filter(1, sigma1));
    for (auto& v : grad.data()) v *= v;
    return grad;
}

/// Second-order complex moment response I20 = Gamma^{-2, sigma2^2} applied to
/// the orientation field. |I20| measures circular-pattern evidence; arg(I20)
/// is zero for concentric circles.
inline ComplexField i20_response(const ComplexField& h, double sigma2) {
    return apply_separable_complex(h, build_symmetry_filter(-2, sigma2));
}

struct DetectionResult {
    int x = 0;
    int y = 0;
    double magnitude = 0.0;
    double argument = 0.0; // radians in (-pi, pi]
};

/// Sigma of the pattern filter whose truncated support diameter
/// (2*ceil(3*sigma)+1) covers the given fraction of the shortest image side.
inline double coverage_sigma(double coverage, int min_side) {
    if (!(coverage > 0.0) || coverage > 1.0)
        throw ParameterError("coverage must be in (0, 1]");
    return std::max((coverage * min_side - 1.0) / 6.0, 0.5);
}

/// All local maxima of |I20| under a 7x7 window whose response argument is
/// below the threshold in absolute value, strongest first. Zero-magnitude
/// plateaus are not maxima.
inline std::vector<DetectionResult> local_symmetry_maxima(const ComplexField& i20,
                                                          double angle_threshold) {
    const int w = i20.width(), h = i20.height();
    GrayImage mag(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            mag.at(x, y) = std::abs(i20.at(x, y));

    std::vector<DetectionResult> maxima;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double m = mag.at(x, y);
            if (!(m > 0.0))
                continue;
            bool is_max = true;
            for (int dy = -3; dy <= 3 && is_max; ++dy)
                for (int dx = -3; dx <= 3; ++dx)
                    if (mag.clamped(x + dx, y + dy) > m) {
                        is_max = false;
                        break;
                    }
            if (!is_max)
                continue;
            const double arg = std::arg(i20.at(x, y));
            if (std::abs(arg) < angle_threshold)
                maxima.push_back({x, y, m, arg});
        }
    }
    // Strongest first; equal magnitudes keep row-major scan order (stable).
    std::stable_sort(maxima.begin(), maxima.end(),
                     [](const DetectionResult& a, const DetectionResult& b) {
                         return a.magnitude > b.magnitude;
                     });
    return maxima;
}

/// Full eye detection: orientation field at sigma1, pattern filter sized to
/// cover `coverage` of the shortest side, 7x7 maxima search with the argument
/// gate, highest magnitude wins. Throws NoEyeFound when nothing passes.
inline DetectionResult detect_eye(const GrayImage& image, double sigma1,
                                  double angle_threshold = std::numbers::pi / 6.0,
                                  double coverage = 0.75) {
    const int min_side = std::min(image.width(), image.height());
    if (min_side < 32)
        throw ParameterError("detect_eye: image must be at least 32 px on the shortest side");
    const ComplexField h = orientation_field(image, sigma1);
    const double sigma2 = coverage_sigma(coverage, min_side);
    const ComplexField i20 = i20_response(h, sigma2);
    const std::vector<DetectionResult> maxima = local_symmetry_maxima(i20, angle_threshold);
    if (maxima.empty())
        throw NoEyeFound("no |I20| maximum with argument below threshold");
    return maxima.front();
}

} // namespace eyesym
