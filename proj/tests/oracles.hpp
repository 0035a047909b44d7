// Independent reference implementations used to check the library: brute
// force only, no shared code with the paths under test.
#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "eyesym/image.hpp"
#include "eyesym/kernels.hpp"

namespace oracles {

/// Dense complex 2D kernel sampled on a centered square support.
struct DenseKernel {
    int radius = 0;
    std::vector<std::complex<double>> taps;

    std::complex<double>& at(int dx, int dy) {
        return taps[static_cast<std::size_t>(dy + radius) * (2 * radius + 1) + (dx + radius)];
    }
    const std::complex<double>& at(int dx, int dy) const {
        return taps[static_cast<std::size_t>(dy + radius) * (2 * radius + 1) + (dx + radius)];
    }
};

/// Directly samples the symmetry derivative of a Gaussian on its truncated
/// support: (-1/s^2)^n (x+iy)^n g  for n >= 0,  (-1/s^2)^|n| (x-iy)^|n| g
/// for n < 0, with the same unit-sum Gaussian normalization the separable
/// kernels use.
inline DenseKernel sample_symmetry_filter(int order, double sigma, double truncation = 3.0) {
    const int r = static_cast<int>(std::ceil(truncation * sigma));
    DenseKernel k;
    k.radius = r;
    k.taps.resize(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1));
    double gauss_sum = 0.0;
    for (int u = -r; u <= r; ++u)
        gauss_sum += std::exp(-0.5 * u * u / (sigma * sigma));
    const int n = std::abs(order);
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x) {
            const double g = std::exp(-0.5 * (x * x + y * y) / (sigma * sigma)) /
                             (gauss_sum * gauss_sum);
            std::complex<double> z = order >= 0 ? std::complex<double>(x, y)
                                                : std::complex<double>(x, -y);
            std::complex<double> zp{1.0, 0.0};
            for (int p = 0; p < n; ++p) zp *= z;
            double prefactor = 1.0;
            for (int p = 0; p < n; ++p) prefactor *= -1.0 / (sigma * sigma);
            k.at(x, y) = prefactor * zp * g;
        }
    return k;
}

/// Dense 2D convolution with replicate borders:
/// out(x,y) = sum_{u,v} in(x-u, y-v) k(u,v).
template <typename T>
eyesym::Raster<std::complex<double>> dense_convolve(const eyesym::Raster<T>& in,
                                                    const DenseKernel& k) {
    eyesym::Raster<std::complex<double>> out(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y)
        for (int x = 0; x < in.width(); ++x) {
            std::complex<double> acc{};
            for (int v = -k.radius; v <= k.radius; ++v)
                for (int u = -k.radius; u <= k.radius; ++u)
                    acc += std::complex<double>(in.clamped(x - u, y - v)) * k.at(u, v);
            out.at(x, y) = acc;
        }
    return out;
}

/// Dense 2D convolution of a real image with a separable real kernel pair,
/// evaluated as one 2D sum (the oracle for convolve_separable).
inline eyesym::ComplexField dense_convolve_separable_pair(const eyesym::GrayImage& in,
                                                          const eyesym::Kernel1D& h,
                                                          const eyesym::Kernel1D& v) {
    DenseKernel k;
    k.radius = std::max(h.radius(), v.radius());
    k.taps.resize(static_cast<std::size_t>(2 * k.radius + 1) * (2 * k.radius + 1));
    for (int y = -k.radius; y <= k.radius; ++y)
        for (int x = -k.radius; x <= k.radius; ++x) {
            const double hx = std::abs(x) <= h.radius() ? h.at(x) : 0.0;
            const double vy = std::abs(y) <= v.radius() ? v.at(y) : 0.0;
            k.at(x, y) = hx * vy;
        }
    return dense_convolve(in, k);
}

/// Equal error rate by exhaustive threshold evaluation with direct counting.
/// Similarity polarity: accept iff score >= t.
inline double brute_force_eer(const std::vector<double>& genuine,
                              const std::vector<double>& impostor) {
    std::vector<double> thresholds;
    thresholds.reserve(genuine.size() + impostor.size() + 2);
    for (double s : genuine) thresholds.push_back(s);
    for (double s : impostor) thresholds.push_back(s);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds.insert(thresholds.begin(), thresholds.front() - 1.0);
    thresholds.push_back(thresholds.back() + 1.0);

    auto rates = [&](double t) {
        int fa = 0, fr = 0;
        for (double s : impostor)
            if (s >= t) ++fa;
        for (double s : genuine)
            if (s < t) ++fr;
        return std::pair<double, double>{double(fa) / impostor.size(),
                                         double(fr) / genuine.size()};
    };

    auto [far_prev, frr_prev] = rates(thresholds[0]);
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        auto [far_i, frr_i] = rates(thresholds[i]);
        const double d = far_i - frr_i;
        if (d <= 0.0) {
            if (d == 0.0)
                return far_i;
            const double d_prev = far_prev - frr_prev;
            const double alpha = d_prev / (d_prev - d);
            return far_prev + alpha * (far_i - far_prev);
        }
        far_prev = far_i;
        frr_prev = frr_i;
    }
    return 0.0;
}

inline eyesym::GrayImage random_image(int w, int h, std::mt19937& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    eyesym::GrayImage img(w, h);
    for (double& v : img.data()) v = uni(rng);
    return img;
}

inline eyesym::ComplexField random_field(int w, int h, std::mt19937& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    eyesym::ComplexField f(w, h);
    for (auto& v : f.data()) v = {uni(rng), uni(rng)};
    return f;
}

/// Concentric-ring pattern around an arbitrary center (radial cosine).
inline eyesym::GrayImage ring_pattern(int w, int h, double cx, double cy, double omega) {
    eyesym::GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y) = 0.5 + 0.4 * std::cos(omega * std::hypot(x - cx, y - cy));
    return img;
}

} // namespace oracles
