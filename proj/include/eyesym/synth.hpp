#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "eyesym/annotation.hpp"
#include "eyesym/image.hpp"

namespace eyesym {

/// Planar sinusoid f = 0.5 + 0.4 cos(omega * (x cos t + y sin t)).
inline GrayImage gen_sinusoid(int width, int height, double omega, double orientation) {
    if (!(omega > 0.0) || !(omega < std::numbers::pi))
        throw ParameterError("sinusoid frequency must be in (0, pi)");
    GrayImage img(width, height);
    const double ct = std::cos(orientation), st = std::sin(orientation);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            img.at(x, y) = 0.5 + 0.4 * std::cos(omega * (x * ct + y * st));
    return img;
}

namespace detail {

/// Gaussian CDF profile of transition width T (sigma = T/6) evaluated at
/// signed distance d from the transition line.
inline double cdf_profile(double d, double width) {
    const double sigma = width / 6.0;
    return 0.5 * (1.0 + std::erf(d / (std::numbers::sqrt2 * sigma)));
}

} // namespace detail

/// 2D Gaussian-CDF edge of transition width T across the oriented line through
/// the image center. `orientation` is the direction of intensity variation.
inline GrayImage gen_cdf_edge(int width, int height, double transition_width,
                              double orientation) {
    if (!(transition_width >= 2.0) || !(transition_width <= 30.0))
        throw ParameterError("edge transition width must be in [2, 30]");
    GrayImage img(width, height);
    const double cx = 0.5 * (width - 1), cy = 0.5 * (height - 1);
    const double ct = std::cos(orientation), st = std::sin(orientation);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double d = (x - cx) * ct + (y - cy) * st;
            img.at(x, y) = detail::cdf_profile(d, transition_width);
        }
    return img;
}

struct SyntheticEye {
    GrayImage image;
    EyeAnnotation annotation;
};

namespace detail {

/// Band-limited texture: eight seeded cosine components whose radial
/// wavelengths are log-spaced over [4, 16] px (the Gabor bank's span), each
/// with a random phase and a low angular harmonic so rubber-sheet rows carry
/// angular structure. Different seeds produce distinguishable identities.
struct RadialTexture {
    std::array<double, 8> wavelength;
    std::array<double, 8> phase;
    std::array<double, 8> amplitude;
    std::array<int, 8> harmonic;

    explicit RadialTexture(std::mt19937& rng) {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int k = 0; k < 8; ++k) {
            const double t = k / 7.0;
            const double base = 4.0 * std::pow(16.0 / 4.0, t);
            wavelength[k] = base * (0.9 + 0.2 * uni(rng));
            phase[k] = 2.0 * std::numbers::pi * uni(rng);
            amplitude[k] = 0.016 * (0.7 + 0.6 * uni(rng));
            harmonic[k] = 2 + static_cast<int>(uni(rng) * 8.0);
        }
    }

    double operator()(double radius, double theta) const {
        double v = 0.0;
        for (int k = 0; k < 8; ++k)
            v += amplitude[k] * std::cos(2.0 * std::numbers::pi * radius / wavelength[k] +
                                         harmonic[k] * theta + phase[k]);
        return v;
    }
};

inline std::uint32_t quantize_param(double v) {
    return static_cast<std::uint32_t>(static_cast<std::int64_t>(std::llround(v * 64.0)));
}

} // namespace detail

/// Ground-truthed synthetic eye: dark pupil disc, textured mid-gray iris
/// annulus, bright sclera fading to textured skin, every boundary smoothed
/// with a Gaussian-CDF profile of the given transition width. Deterministic
/// for fixed arguments; `noise_salt` selects an independent noise realization
/// without changing the identity texture.
inline SyntheticEye gen_synthetic_eye(int width, int height, const Circle& pupil,
                                      const Circle& sclera, double edge_width,
                                      std::uint32_t texture_seed, double noise_sigma,
                                      std::uint32_t noise_salt = 0) {
    const double dcx = pupil.cx - sclera.cx, dcy = pupil.cy - sclera.cy;
    if (!(pupil.r > 0.0) || !(sclera.r > 0.0) ||
        std::hypot(dcx, dcy) + pupil.r >= sclera.r)
        throw ParameterError("pupil circle must lie strictly inside the sclera circle");
    const double margin = sclera.r + 0.5 * edge_width;
    if (sclera.cx - margin < 0 || sclera.cx + margin > width - 1 ||
        sclera.cy - margin < 0 || sclera.cy + margin > height - 1)
        throw ParameterError("sclera circle and its edge transition must fit in the frame");
    if (!(noise_sigma >= 0.0))
        throw ParameterError("noise sigma must be non-negative");

    std::mt19937 texture_rng(texture_seed);
    const detail::RadialTexture texture(texture_rng);

    constexpr double kPupilLevel = 0.08;
    constexpr double kIrisLevel = 0.45;
    constexpr double kScleraLevel = 0.88;
    constexpr double kSkinLevel = 0.72;
    const double skin_radius = sclera.r * 1.6;

    GrayImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double rp = std::hypot(x - pupil.cx, y - pupil.cy);
            const double rs = std::hypot(x - sclera.cx, y - sclera.cy);
            const double iris = kIrisLevel + texture(rp, std::atan2(y - pupil.cy, x - pupil.cx));
            const double skin = kSkinLevel + 0.6 * texture(rs, std::atan2(y - sclera.cy, x - sclera.cx));
            const double t1 = detail::cdf_profile(rp - pupil.r, edge_width);
            const double t2 = detail::cdf_profile(rs - sclera.r, edge_width);
            const double t3 = detail::cdf_profile(rs - skin_radius, edge_width);
            const double inner = kPupilLevel * (1.0 - t1) + iris * t1;
            const double outer = kScleraLevel * (1.0 - t3) + skin * t3;
            img.at(x, y) = std::clamp(inner * (1.0 - t2) + outer * t2, 0.0, 1.0);
        }
    }

    if (noise_sigma > 0.0) {
        std::seed_seq seq{texture_seed, noise_salt,
                          detail::quantize_param(pupil.cx), detail::quantize_param(pupil.cy),
                          detail::quantize_param(pupil.r), detail::quantize_param(sclera.cx),
                          detail::quantize_param(sclera.cy), detail::quantize_param(sclera.r),
                          detail::quantize_param(noise_sigma)};
        std::mt19937 noise_rng(seq);
        // Box-Muller on raw uniforms keeps the realization compiler-independent.
        auto gauss = [&noise_rng]() {
            const double u1 = (noise_rng() + 1.0) / 4294967297.0;
            const double u2 = (noise_rng() + 1.0) / 4294967297.0;
            return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        };
        for (double& v : img.data())
            v = std::clamp(v + noise_sigma * gauss(), 0.0, 1.0);
    }

    return SyntheticEye{std::move(img), EyeAnnotation{pupil, sclera, {}, {}}};
}

/// Darkens a one-pixel-thick circular arc (angles in radians, swept
/// counterclockwise from theta0 to theta1).
inline void overlay_dark_arc(GrayImage& img, const Circle& arc, double theta0, double theta1,
                             double intensity) {
    const double step = 0.5 / std::max(arc.r, 1.0);
    for (double t = theta0; t <= theta1; t += step) {
        const int x = static_cast<int>(std::lround(arc.cx + arc.r * std::cos(t)));
        const int y = static_cast<int>(std::lround(arc.cy + arc.r * std::sin(t)));
        if (img.in_bounds(x, y))
            img.at(x, y) = std::min(img.at(x, y), intensity);
    }
}

/// Overlays a bundle of thin, near-vertical dark strokes shaped like lashes:
/// short arcs around a common curvature center above the eye. They present
/// strong vertical edges to the orientation field while remaining one pixel
/// wide horizontally, which is what the rank filter removes.
inline void overlay_lash_strokes(GrayImage& img, const Circle& sclera, std::uint32_t seed,
                                 int count, double intensity = 0.05) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double hub_x = sclera.cx + (uni(rng) - 0.5) * 6.0;
    const double hub_y = sclera.cy - sclera.r * 1.35;
    const double span = std::numbers::pi * 0.22;
    for (int i = 0; i < count; ++i) {
        const double radius = sclera.r * (0.35 + 0.9 * uni(rng));
        const bool left = uni(rng) < 0.5;
        const double mid = left ? std::numbers::pi : 0.0;
        const double t0 = mid - span * (0.5 + 0.5 * uni(rng));
        overlay_dark_arc(img, Circle{hub_x, hub_y, radius}, t0, t0 + span, intensity);
    }
}

} // namespace eyesym
