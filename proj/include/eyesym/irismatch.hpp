#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "eyesym/annotation.hpp"
#include "eyesym/image.hpp"

namespace eyesym {

/// Rubber-sheet normalized iris strip (radial x angular) with its validity
/// mask.
struct IrisStrip {
    GrayImage strip;               // angular along x, radial along y
    Raster<std::uint8_t> mask;     // 1 = valid sample
};

/// Daugman rubber-sheet unwrapping: sample points interpolate linearly
/// between the pupil and sclera boundary points of each angle, bilinear
/// intensity lookup. Samples inside an eyelid circle or outside the image
/// are masked invalid.
inline IrisStrip rubber_sheet(const GrayImage& image, const EyeAnnotation& annotation,
                              int radial = 20, int angular = 240) {
    if (radial < 1 || angular < 1)
        throw ParameterError("rubber_sheet: resolution must be positive");
    validate_annotation(annotation);
    const Circle& p = annotation.pupil;
    const Circle& s = annotation.sclera;
    if (std::hypot(p.cx - s.cx, p.cy - s.cy) + p.r >= s.r)
        throw DataError("rubber_sheet: pupil circle not contained in sclera circle");

    IrisStrip out{GrayImage(angular, radial), Raster<std::uint8_t>(angular, radial)};
    for (int k = 0; k < angular; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / angular;
        const double ct = std::cos(theta), st = std::sin(theta);
        const double px = p.cx + p.r * ct, py = p.cy + p.r * st;
        const double sx = s.cx + s.r * ct, sy = s.cy + s.r * st;
        for (int j = 0; j < radial; ++j) {
            const double t = (j + 0.5) / radial;
            const double x = (1.0 - t) * px + t * sx;
            const double y = (1.0 - t) * py + t * sy;
            out.strip.at(k, j) = sample_bilinear(image, x, y);
            bool valid = x >= 0.0 && x <= image.width() - 1.0 && y >= 0.0 &&
                         y <= image.height() - 1.0;
            if (valid && annotation.upper_eyelid && annotation.upper_eyelid->contains(x, y))
                valid = false;
            if (valid && annotation.lower_eyelid && annotation.lower_eyelid->contains(x, y))
                valid = false;
            out.mask.at(k, j) = valid;
        }
    }
    return out;
}

/// Binary iris code: two bits per strip sample (signs of the real and
/// imaginary filter responses) plus a per-bit validity mask.
struct IrisCode {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> bits; // rows * cols * 2
    std::vector<std::uint8_t> mask; // same shape
};

/// Encodes each row of the normalized strip with a 1D log-Gabor filter
/// (circular convolution over the angular dimension, done in the frequency
/// domain of each row) and quantizes the complex response phase to two bits.
inline IrisCode encode_log_gabor_1d(const IrisStrip& normalized, double wavelength = 18.0,
                                    double sigma_over_f = 0.5) {
    if (!(wavelength > 2.0) || !(sigma_over_f > 0.0) || !(sigma_over_f < 1.0))
        throw ParameterError("encode_log_gabor_1d: bad filter parameters");
    const int rows = normalized.strip.height();
    const int cols = normalized.strip.width();
    using cd = std::complex<double>;

    std::vector<double> gain(static_cast<std::size_t>(cols), 0.0);
    const double log_sigma = std::log(sigma_over_f);
    for (int k = 1; k < cols / 2; ++k) {
        const double f = static_cast<double>(k) / cols; // cycles per sample
        const double r = std::log(f * wavelength);      // log(f / f0)
        gain[k] = std::exp(-r * r / (2.0 * log_sigma * log_sigma));
    }

    std::vector<cd> twiddle(static_cast<std::size_t>(cols) * cols);
    for (int m = 0; m < cols; ++m)
        for (int x = 0; x < cols; ++x)
            twiddle[static_cast<std::size_t>(m) * cols + x] =
                std::polar(1.0, -2.0 * std::numbers::pi * m * x / cols);

    IrisCode code;
    code.rows = rows;
    code.cols = cols;
    code.bits.resize(static_cast<std::size_t>(rows) * cols * 2);
    code.mask.resize(code.bits.size());
    std::vector<cd> spectrum(static_cast<std::size_t>(cols));
    for (int j = 0; j < rows; ++j) {
        for (int m = 0; m < cols; ++m) {
            cd acc{};
            for (int x = 0; x < cols; ++x)
                acc += normalized.strip.at(x, j) * twiddle[static_cast<std::size_t>(m) * cols + x];
            spectrum[m] = acc * gain[m];
        }
        for (int x = 0; x < cols; ++x) {
            cd acc{};
            for (int m = 0; m < cols; ++m)
                acc += spectrum[m] * std::conj(twiddle[static_cast<std::size_t>(m) * cols + x]);
            acc /= static_cast<double>(cols);
            const std::size_t i = (static_cast<std::size_t>(j) * cols + x) * 2;
            code.bits[i] = acc.real() > 0.0;
            code.bits[i + 1] = acc.imag() > 0.0;
            code.mask[i] = normalized.mask.at(x, j);
            code.mask[i + 1] = normalized.mask.at(x, j);
        }
    }
    return code;
}

/// Fraction of disagreeing bits over the jointly valid positions. A single
/// comparison per pair: no code shifting / rotation compensation.
inline double hamming_distance(const IrisCode& a, const IrisCode& b) {
    if (a.rows != b.rows || a.cols != b.cols || a.bits.size() != b.bits.size())
        throw ParameterError("hamming_distance: code shapes differ");
    std::size_t joint = 0, diff = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        if (!a.mask[i] || !b.mask[i])
            continue;
        ++joint;
        diff += a.bits[i] != b.bits[i];
    }
    if (joint == 0)
        throw EmptyOverlap("hamming_distance: no jointly valid bits");
    return static_cast<double>(diff) / static_cast<double>(joint);
}

inline void save_iris_code(const IrisCode& code, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write iris code: " + path);
    out << "EYESYM-IRISCODE 1\n" << code.rows << ' ' << code.cols << '\n';
    for (const auto b : code.bits) out << int(b);
    out << '\n';
    for (const auto m : code.mask) out << int(m);
    out << '\n';
}

inline IrisCode load_iris_code(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read iris code: " + path);
    std::string magic;
    int version = 0;
    IrisCode code;
    std::string bits, mask;
    in >> magic >> version >> code.rows >> code.cols >> bits >> mask;
    const std::size_t n = static_cast<std::size_t>(code.rows) * code.cols * 2;
    if (!in || magic != "EYESYM-IRISCODE" || version != 1 || bits.size() != n ||
        mask.size() != n)
        throw IoError("malformed iris code file: " + path);
    code.bits.reserve(n);
    code.mask.reserve(n);
    for (const char c : bits) code.bits.push_back(c == '1');
    for (const char c : mask) code.mask.push_back(c == '1');
    return code;
}

} // namespace eyesym
