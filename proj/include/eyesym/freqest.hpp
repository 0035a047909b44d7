#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "eyesym/convolve.hpp"
#include "eyesym/image.hpp"
#include "eyesym/kernels.hpp"
#include "eyesym/synth.hpp"

namespace eyesym {

/// Per-pixel absolute frequency estimates in rad/pixel. Pixels whose local
/// gradient energy sits below the floor carry no estimate; `energy` holds
/// that local gradient energy for the valid pixels.
struct FrequencyMap {
    GrayImage values;
    Raster<std::uint8_t> valid;
    GrayImage energy;
};

namespace detail {

// Size of the derivative filters used inside the frequency estimator. Wide
// enough that the calibration's T(F) relation stays within reach of the
// second-order polynomial over the full width range.
constexpr double kFreqGradSigma = 1.8;
// Local gradient-energy floor below which a pixel carries no estimate.
constexpr double kEnergyFloor = 1e-6;

/// Per-axis transfer ratio of the discrete second to first derivative
/// kernel, |E2(w)| / |Sd(w)|. On a pure plane wave the measured energy ratio
/// sqrt(W[fxx^2]/W[fx^2]) equals exactly this function of the wave's
/// x-frequency (the cross-axis smoothing cancels), and it is strictly
/// increasing on (0, pi), so inverting it recovers the frequency unbiased.
class DerivativeRatioTable {
public:
    DerivativeRatioTable(const Kernel1D& d1, const Kernel1D& d2) {
        ratio_.resize(kN);
        ratio_[0] = 0.0;
        for (int i = 1; i < kN; ++i) {
            const double w = kMaxOmega * i / (kN - 1);
            double odd = 0.0;
            for (int u = 1; u <= d1.radius(); ++u)
                odd += d1.at(u) * std::sin(w * u);
            double even = d2.at(0);
            for (int u = 1; u <= d2.radius(); ++u)
                even += 2.0 * d2.at(u) * std::cos(w * u);
            const double h = std::abs(even) / std::max(std::abs(2.0 * odd), 1e-12);
            ratio_[i] = std::max(h, ratio_[i - 1]); // monotone envelope
        }
    }

    double invert(double r) const {
        if (r <= 0.0)
            return 0.0;
        if (r >= ratio_.back())
            return kMaxOmega;
        const auto it = std::lower_bound(ratio_.begin(), ratio_.end(), r);
        const int i = static_cast<int>(it - ratio_.begin());
        const double r0 = ratio_[i - 1], r1 = ratio_[i];
        const double t = (r1 > r0) ? (r - r0) / (r1 - r0) : 0.0;
        return kMaxOmega * (i - 1 + t) / (kN - 1);
    }

private:
    static constexpr int kN = 4096;
    static constexpr double kMaxOmega = 3.05;

    std::vector<double> ratio_;
};

} // namespace detail

/// Local absolute-frequency map via the derivative-energy ratio: per axis,
/// sqrt(W[fxx^2] / W[fx^2]) is inverted through the discrete kernels' exact
/// transfer ratio, and F = hypot(wx, wy). For a pure planar sinusoid this is
/// exact at interior pixels for any orientation (in the continuum the ratio
/// is |Hess|^2 / |grad|^2 = omega^2); on CDF edges the calibration
/// polynomial absorbs the estimator-specific bias. W[.] is Gaussian-window
/// local averaging of width `window_sigma`. The ratio cancels intensity
/// scale, and differentiation removes offsets.
inline FrequencyMap local_frequency_map(const GrayImage& image, double window_sigma = 4.0) {
    if (!(window_sigma > 0.0))
        throw ParameterError("window sigma must be positive");
    const double sg = detail::kFreqGradSigma;
    const Kernel1D k0 = moment_kernel(sg, 0);
    const Kernel1D k1 = moment_kernel(sg, 1);
    const Kernel1D k2 = moment_kernel(sg, 2);
    // Discrete-consistent derivative kernels: d2 uses the discretized second
    // moment so its response to constants is exactly zero.
    double m2 = 0.0;
    for (double t : k2.taps) m2 += t;
    Kernel1D d1 = k1, d2 = k2;
    for (int u = -k1.radius(); u <= k1.radius(); ++u)
        d1.taps[u + k1.radius()] = -k1.at(u) / (sg * sg);
    for (int u = -k2.radius(); u <= k2.radius(); ++u)
        d2.taps[u + k2.radius()] = (k2.at(u) - m2 * k0.at(u)) / (sg * sg * sg * sg);

    const Kernel1D window = gaussian_kernel(window_sigma);
    if (image.width() <= window.length() / 2 || image.height() <= window.length() / 2)
        throw ParameterError("image smaller than the frequency estimator's window support");

    const GrayImage fx = convolve_separable(image, d1, k0);
    const GrayImage fy = convolve_separable(image, k0, d1);
    const GrayImage fxx = convolve_separable(image, d2, k0);
    const GrayImage fyy = convolve_separable(image, k0, d2);

    auto squared = [](const GrayImage& f) {
        GrayImage out(f.width(), f.height());
        for (std::size_t i = 0; i < f.size(); ++i)
            out.data()[i] = f.data()[i] * f.data()[i];
        return out;
    };
    const GrayImage ex = convolve_separable(squared(fx), window, window);
    const GrayImage ey = convolve_separable(squared(fy), window, window);
    const GrayImage exx = convolve_separable(squared(fxx), window, window);
    const GrayImage eyy = convolve_separable(squared(fyy), window, window);

    const detail::DerivativeRatioTable table(d1, d2);
    FrequencyMap map{GrayImage(image.width(), image.height()),
                     Raster<std::uint8_t>(image.width(), image.height()),
                     GrayImage(image.width(), image.height())};
    bool any_valid = false;
    for (std::size_t i = 0; i < image.size(); ++i) {
        const double e1 = ex.data()[i] + ey.data()[i];
        if (e1 < detail::kEnergyFloor)
            continue;
        double wx = 0.0, wy = 0.0;
        if (ex.data()[i] > 1e-9 * e1)
            wx = table.invert(std::sqrt(std::max(exx.data()[i], 0.0) / ex.data()[i]));
        if (ey.data()[i] > 1e-9 * e1)
            wy = table.invert(std::sqrt(std::max(eyy.data()[i], 0.0) / ey.data()[i]));
        map.values.data()[i] = std::hypot(wx, wy);
        map.valid.data()[i] = 1;
        map.energy.data()[i] = e1;
        any_valid = true;
    }
    if (!any_valid)
        throw FlatImage("no pixel above the local gradient-energy floor");
    return map;
}

/// Second-order polynomial mapping estimated frequency back to edge
/// transition width, fitted on synthetic Gaussian-CDF edges.
struct WidthCalibration {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double f_min = 0.0;
    double f_max = 0.0;
    double window_sigma = 4.0;

    /// T'(F) = aF^2 + bF + c evaluated on the polynomial's decreasing branch:
    /// F is clamped into the calibrated domain intersected with the monotone
    /// region around the parabola's vertex, and the result is clamped into
    /// the plausible width range [2, 22].
    double width_at(double f) const {
        double lo = f_min, hi = f_max;
        if (a > 0.0)
            hi = std::min(hi, -b / (2.0 * a));
        else if (a < 0.0)
            lo = std::max(lo, -b / (2.0 * a));
        const double fc = std::clamp(f, lo, std::max(lo, hi));
        return std::clamp(a * fc * fc + b * fc + c, 2.0, 22.0);
    }
};

inline std::vector<double> default_width_set() {
    std::vector<double> w;
    for (int t = 2; t <= 22; ++t) w.push_back(t);
    return w;
}

/// Energy-weighted mean frequency of an image: the measurement the width
/// calibration is trained on, shared with estimate_edge_width so edge images
/// round-trip through the same functional.
inline double measure_edge_frequency(const GrayImage& image, double window_sigma = 4.0) {
    const FrequencyMap map = local_frequency_map(image, window_sigma);
    double sum = 0.0, weight = 0.0;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (!map.valid.data()[i])
            continue;
        sum += map.energy.data()[i] * map.values.data()[i];
        weight += map.energy.data()[i];
    }
    return sum / weight;
}

/// Generates a CDF edge per width, measures its frequency with the same
/// energy-weighted whole-image average the width estimator applies (so the
/// calibration absorbs the estimator's behavior around an edge, not just at
/// one reference pixel), and least-squares fits T = a F^2 + b F + c.
inline WidthCalibration calibrate_width_polynomial(const std::vector<double>& widths = default_width_set(),
                                                   double window_sigma = 4.0) {
    std::vector<double> distinct = widths;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3)
        throw ParameterError("width calibration needs at least 3 distinct widths");

    constexpr int kSize = 129;
    std::vector<double> freqs;
    freqs.reserve(distinct.size());
    for (const double t : distinct)
        freqs.push_back(measure_edge_frequency(gen_cdf_edge(kSize, kSize, t, 0.0), window_sigma));

    // Normal equations for T over the basis (F^2, F, 1).
    double s[5] = {0, 0, 0, 0, 0}; // sums of F^k, k = 0..4
    double t0 = 0, t1 = 0, t2 = 0; // sums of T*F^k, k = 0..2
    for (std::size_t i = 0; i < distinct.size(); ++i) {
        const double f = freqs[i];
        double fk = 1.0;
        for (int k = 0; k <= 4; ++k) {
            s[k] += fk;
            if (k <= 2) {
                if (k == 0) t0 += distinct[i];
                if (k == 1) t1 += distinct[i] * f;
                if (k == 2) t2 += distinct[i] * f * f;
            }
            fk *= f;
        }
    }
    const double m[3][3] = {{s[4], s[3], s[2]}, {s[3], s[2], s[1]}, {s[2], s[1], s[0]}};
    const double rhs[3] = {t2, t1, t0};
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (std::abs(det) < 1e-12)
        throw DegenerateCalibration("width calibration fit is singular");
    auto det3 = [&](int col) {
        double mm[3][3];
        for (int r = 0; r < 3; ++r)
            for (int cidx = 0; cidx < 3; ++cidx)
                mm[r][cidx] = (cidx == col) ? rhs[r] : m[r][cidx];
        return mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1]) -
               mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0]) +
               mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]);
    };

    WidthCalibration cal;
    cal.a = det3(0) / det;
    cal.b = det3(1) / det;
    cal.c = det3(2) / det;
    cal.f_min = *std::min_element(freqs.begin(), freqs.end());
    cal.f_max = *std::max_element(freqs.begin(), freqs.end());
    cal.window_sigma = window_sigma;
    return cal;
}

/// Persists a calibration as a one-record text file.
inline void save_width_calibration(const WidthCalibration& cal, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write calibration: " + path);
    out.precision(17);
    out << "EYESYM-WIDTHCAL 1\n"
        << cal.a << ' ' << cal.b << ' ' << cal.c << ' ' << cal.f_min << ' ' << cal.f_max
        << ' ' << cal.window_sigma << '\n';
}

inline WidthCalibration load_width_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read calibration: " + path);
    std::string magic;
    int version = 0;
    WidthCalibration cal;
    in >> magic >> version >> cal.a >> cal.b >> cal.c >> cal.f_min >> cal.f_max >>
        cal.window_sigma;
    if (!in || magic != "EYESYM-WIDTHCAL" || version != 1)
        throw IoError("not a version-1 calibration file: " + path);
    return cal;
}

/// Average edge-transition width of the whole image: T'(F) averaged over the
/// valid pixels, each weighted by its local gradient energy so the image's
/// edges dominate and low-energy background does not dilute the estimate.
inline double estimate_edge_width(const GrayImage& image, const WidthCalibration& cal) {
    const FrequencyMap map = local_frequency_map(image, cal.window_sigma);
    double sum = 0.0, weight = 0.0;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (!map.valid.data()[i])
            continue;
        const double w = map.energy.data()[i];
        sum += w * cal.width_at(map.values.data()[i]);
        weight += w;
    }
    return std::clamp(sum / weight, 2.0, 22.0);
}

} // namespace eyesym
