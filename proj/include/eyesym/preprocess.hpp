#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "eyesym/annotation.hpp"
#include "eyesym/image.hpp"

namespace eyesym {

/// Horizontal 1xL rank filter: each pixel becomes the p-th brightest value of
/// its row neighborhood (descending order, so p = 1 is a running maximum and
/// p = L a running minimum). p = 2 replaces thin dark structures such as
/// eyelashes with the surrounding brighter skin. Replicate borders.
inline GrayImage rank_filter_1d(const GrayImage& image, int length, int rank) {
    if (length < 3 || length % 2 == 0)
        throw ParameterError("rank filter length must be an odd integer >= 3");
    if (rank < 1 || rank > length)
        throw ParameterError("rank must be in [1, L]");
    const int w = image.width(), h = image.height(), r = length / 2;
    GrayImage out(w, h);
    std::vector<double> window(static_cast<std::size_t>(length));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int u = -r; u <= r; ++u)
                window[u + r] = image.clamped(x + u, y);
            std::nth_element(window.begin(), window.begin() + (rank - 1), window.end(),
                             std::greater<double>());
            out.at(x, y) = window[rank - 1];
        }
    }
    return out;
}

/// L = nearest odd integer >= max(3, round(T')).
inline int adaptive_rank_length(double edge_width) {
    if (!(edge_width >= 2.0) || !(edge_width <= 22.0))
        throw ParameterError("edge width must be in [2, 22]");
    int length = std::max(3, static_cast<int>(std::lround(edge_width)));
    if (length % 2 == 0)
        ++length;
    return length;
}

/// Rank filter with L tied to the image's average edge-transition width, p = 2.
inline GrayImage adaptive_rank_filter(const GrayImage& image, double edge_width) {
    return rank_filter_1d(image, adaptive_rank_length(edge_width), 2);
}

namespace detail {

/// Catmull-Rom cubic weight (a = -0.5).
inline double cubic_weight(double t) {
    t = std::abs(t);
    if (t < 1.0)
        return 1.0 - t * t * (2.5 - 1.5 * t);
    if (t < 2.0)
        return 2.0 - t * (4.0 - t * (2.5 - 0.5 * t));
    return 0.0;
}

inline double sample_bicubic(const GrayImage& img, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0, fy = y - y0;
    double acc = 0.0;
    for (int j = -1; j <= 2; ++j) {
        const double wy = cubic_weight(fy - j);
        if (wy == 0.0)
            continue;
        double row = 0.0;
        for (int i = -1; i <= 2; ++i)
            row += cubic_weight(fx - i) * img.clamped(x0 + i, y0 + j);
        acc += wy * row;
    }
    return std::clamp(acc, 0.0, 1.0);
}

} // namespace detail

struct ResizedEye {
    GrayImage image;
    EyeAnnotation annotation;
};

/// Uniformly rescales the image (bicubic, Catmull-Rom) so the annotated
/// sclera radius becomes `target_radius`; all annotation circles are scaled
/// by the same factor. Corner-aligned mapping keeps annotation coordinates
/// and pixel content consistent: input feature c lands at output c * s.
inline ResizedEye resize_to_sclera(const GrayImage& image, const EyeAnnotation& annotation,
                                   double target_radius) {
    if (!(annotation.sclera.r > 0.0) || !(target_radius > 0.0))
        throw DataError("sclera radius and target radius must be positive");
    const double s = target_radius / annotation.sclera.r;
    const int new_w = std::max(1, static_cast<int>(std::lround(image.width() * s)));
    const int new_h = std::max(1, static_cast<int>(std::lround(image.height() * s)));
    GrayImage out(new_w, new_h);
    for (int y = 0; y < new_h; ++y)
        for (int x = 0; x < new_w; ++x)
            out.at(x, y) = detail::sample_bicubic(image, x / s, y / s);
    return ResizedEye{std::move(out), scaled_annotation(annotation, s)};
}

} // namespace eyesym
