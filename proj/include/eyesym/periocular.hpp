#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "eyesym/image.hpp"

namespace eyesym {

/// Rectangular retinotopic sampling grid centered on the eye. Points are
/// center + (col - (cols-1)/2, row - (rows-1)/2) * spacing; points outside
/// the image are retained but flagged so their responses contribute zeros.
struct GridConfig {
    int rows = 0;
    int cols = 0;
    double spacing = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    std::vector<std::uint8_t> in_bounds; // rows*cols, row-major

    int point_count() const { return rows * cols; }

    std::pair<double, double> point(int row, int col) const {
        return {cx + (col - (cols - 1) / 2.0) * spacing,
                cy + (row - (rows - 1) / 2.0) * spacing};
    }
};

/// Sampling-grid presets per database: dense (d1) and coarse (d2 = 2*d1).
struct GridPreset {
    const char* database;
    int dense_rows, dense_cols;
    double dense_spacing;
    int coarse_rows, coarse_cols;
    double coarse_spacing;
};

inline const std::array<GridPreset, 5>& grid_presets() {
    static const std::array<GridPreset, 5> presets = {{
        {"biosec", 13, 19, 30.0, 7, 9, 60.0},
        {"casia", 9, 11, 30.0, 5, 5, 60.0},
        {"iitd", 9, 13, 30.0, 5, 7, 60.0},
        {"mobbio", 9, 13, 16.0, 5, 7, 32.0},
        {"ubiris", 19, 23, 16.0, 9, 11, 32.0},
    }};
    return presets;
}

/// Grid from explicit geometry, instantiated about the given center.
inline GridConfig build_grid(int rows, int cols, double spacing, int image_width,
                             int image_height, double cx, double cy) {
    if (rows < 1 || cols < 1 || rows % 2 == 0 || cols % 2 == 0)
        throw ParameterError("grid rows and cols must be odd and positive");
    if (!(spacing > 0.0))
        throw ParameterError("grid spacing must be positive");
    GridConfig g{rows, cols, spacing, cx, cy, {}};
    g.in_bounds.resize(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const auto [px, py] = g.point(r, c);
            const int ix = static_cast<int>(std::lround(px));
            const int iy = static_cast<int>(std::lround(py));
            g.in_bounds[static_cast<std::size_t>(r) * cols + c] =
                ix >= 0 && ix < image_width && iy >= 0 && iy < image_height;
        }
    return g;
}

/// Grid from a named database preset.
inline GridConfig build_grid(const std::string& database, bool dense, int image_width,
                             int image_height, double cx, double cy) {
    for (const GridPreset& p : grid_presets()) {
        if (database == p.database) {
            if (dense)
                return build_grid(p.dense_rows, p.dense_cols, p.dense_spacing,
                                  image_width, image_height, cx, cy);
            return build_grid(p.coarse_rows, p.coarse_cols, p.coarse_spacing,
                              image_width, image_height, cx, cy);
        }
    }
    throw ParameterError("unknown grid preset: " + database);
}

/// Bank of modified Gabor filters designed in the log-polar frequency plane:
/// 5 geometrically spaced frequency channels and 6 equally spaced orientation
/// channels, Gaussian in (xi = log|w|, phi). Bandwidths default to half-peak
/// crossing between adjacent channels.
struct GaborBankSpec {
    int num_frequencies = 5;
    int num_orientations = 6;
    double wavelength_min = 4.0;
    double wavelength_max = 16.0;
    double sigma_xi = 0.0;
    double sigma_phi = 0.0;
    double amplitude = 1.0;

    int size() const { return num_frequencies * num_orientations; }

    double delta_xi() const {
        return std::log(wavelength_max / wavelength_min) / (num_frequencies - 1);
    }
    double center_xi(int f) const {
        return std::log(2.0 * std::numbers::pi / wavelength_max) + f * delta_xi();
    }
    double center_phi(int o) const { return o * std::numbers::pi / num_orientations; }
};

inline GaborBankSpec make_bank_spec(double wavelength_min, double wavelength_max) {
    if (!(wavelength_min > 0.0) || !(wavelength_min < wavelength_max))
        throw ParameterError("need 0 < wavelength_min < wavelength_max");
    GaborBankSpec s;
    s.wavelength_min = wavelength_min;
    s.wavelength_max = wavelength_max;
    const double half_peak = 2.0 * std::sqrt(2.0 * std::log(2.0));
    s.sigma_xi = s.delta_xi() / half_peak;
    s.sigma_phi = (std::numbers::pi / s.num_orientations) / half_peak;
    return s;
}

/// Log-polar frequency response of channel (f, o) at coordinates (xi, phi).
inline double log_polar_response(const GaborBankSpec& spec, int f, int o, double xi,
                                 double phi) {
    const double dxi = xi - spec.center_xi(f);
    double dphi = phi - spec.center_phi(o);
    while (dphi > std::numbers::pi) dphi -= 2.0 * std::numbers::pi;
    while (dphi <= -std::numbers::pi) dphi += 2.0 * std::numbers::pi;
    return spec.amplitude * std::exp(-0.5 * dxi * dxi / (spec.sigma_xi * spec.sigma_xi)) *
           std::exp(-0.5 * dphi * dphi / (spec.sigma_phi * spec.sigma_phi));
}

/// Dense complex 2D kernel on a centered square support.
struct ComplexKernel2D {
    int radius = 0;
    std::vector<std::complex<double>> taps; // (2r+1)^2 row-major

    const std::complex<double>& at(int dx, int dy) const {
        return taps[static_cast<std::size_t>(dy + radius) * (2 * radius + 1) + (dx + radius)];
    }
};

/// Realizes the bank as spatial-domain complex kernels: each channel is
/// sampled on an NxN frequency raster and inverse-transformed (row-column
/// factored), then cropped to the smallest centered square holding at least
/// `energy_keep` of its energy. The cropped kernel's mean is subtracted so
/// the band-pass filters are exactly DC-free.
inline std::vector<ComplexKernel2D> build_gabor_bank(const GaborBankSpec& spec,
                                                     int raster = 128,
                                                     double energy_keep = 0.995) {
    if (!(spec.wavelength_min > 0.0) || !(spec.wavelength_min < spec.wavelength_max))
        throw ParameterError("need 0 < wavelength_min < wavelength_max");
    const int n = raster;
    const int half = n / 2;
    using cd = std::complex<double>;

    // e^{i w_a x} with a, x in [-n/2, n/2): shared by both axes.
    std::vector<cd> twiddle(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int x = 0; x < n; ++x) {
            const double w = 2.0 * std::numbers::pi * (a - half) / n;
            twiddle[static_cast<std::size_t>(a) * n + x] =
                std::polar(1.0, w * (x - half));
        }

    std::vector<ComplexKernel2D> bank;
    bank.reserve(spec.size());
    std::vector<double> g(static_cast<std::size_t>(n) * n);
    std::vector<cd> cols(static_cast<std::size_t>(n) * n);
    std::vector<cd> full(static_cast<std::size_t>(n) * n);
    for (int f = 0; f < spec.num_frequencies; ++f) {
        for (int o = 0; o < spec.num_orientations; ++o) {
            for (int a = 0; a < n; ++a) {
                const double wx = 2.0 * std::numbers::pi * (a - half) / n;
                for (int b = 0; b < n; ++b) {
                    const double wy = 2.0 * std::numbers::pi * (b - half) / n;
                    const double mag = std::hypot(wx, wy);
                    g[static_cast<std::size_t>(a) * n + b] =
                        mag > 0.0 ? log_polar_response(spec, f, o, std::log(mag),
                                                       std::atan2(wy, wx))
                                  : 0.0;
                }
            }
            // k(x,y) = (1/n^2) sum_a e^{i w_a x} sum_b G(a,b) e^{i w_b y}
            for (int a = 0; a < n; ++a)
                for (int y = 0; y < n; ++y) {
                    cd acc{};
                    for (int b = 0; b < n; ++b)
                        acc += g[static_cast<std::size_t>(a) * n + b] *
                               twiddle[static_cast<std::size_t>(b) * n + y];
                    cols[static_cast<std::size_t>(a) * n + y] = acc;
                }
            for (int y = 0; y < n; ++y)
                for (int x = 0; x < n; ++x) {
                    cd acc{};
                    for (int a = 0; a < n; ++a)
                        acc += cols[static_cast<std::size_t>(a) * n + y] *
                               twiddle[static_cast<std::size_t>(a) * n + x];
                    full[static_cast<std::size_t>(y) * n + x] = acc / double(n * n);
                }

            // Crop to the smallest centered square with enough energy.
            std::vector<double> ring_energy(half, 0.0);
            double total = 0.0;
            for (int y = 0; y < n; ++y)
                for (int x = 0; x < n; ++x) {
                    const double e = std::norm(full[static_cast<std::size_t>(y) * n + x]);
                    const int r = std::max(std::abs(x - half), std::abs(y - half));
                    ring_energy[std::min(r, half - 1)] += e;
                    total += e;
                }
            int radius = half - 1;
            double acc_e = 0.0;
            for (int r = 0; r < half; ++r) {
                acc_e += ring_energy[r];
                if (acc_e >= energy_keep * total) {
                    radius = r;
                    break;
                }
            }

            ComplexKernel2D k;
            k.radius = radius;
            const int side = 2 * radius + 1;
            k.taps.resize(static_cast<std::size_t>(side) * side);
            cd mean{};
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx) {
                    const cd v = full[static_cast<std::size_t>(dy + half) * n + (dx + half)];
                    k.taps[static_cast<std::size_t>(dy + radius) * side + (dx + radius)] = v;
                    mean += v;
                }
            mean /= double(side * side);
            for (cd& t : k.taps) t -= mean;
            bank.push_back(std::move(k));
        }
    }
    return bank;
}

/// Per-point Gabor jets plus the PDF-normalized magnitude vector used for
/// matching.
struct PeriocularTemplate {
    GridConfig grid;
    std::vector<std::complex<double>> values; // point-major, bank-channel minor
    std::vector<double> pdf;                  // same layout, sums to 1
};

/// Gabor decomposition at every in-bounds grid point (patch correlated with
/// each complex kernel, replicate borders); out-of-bounds points contribute
/// zeros. Magnitudes are normalized to a probability distribution.
inline PeriocularTemplate extract_template(const GrayImage& image, const GridConfig& grid,
                                           const std::vector<ComplexKernel2D>& bank) {
    if (grid.point_count() == 0 || bank.empty())
        throw ParameterError("extract_template: empty grid or bank");
    bool any_in = false;
    for (const auto flag : grid.in_bounds)
        if (flag) any_in = true;
    if (!any_in)
        throw DataError("extract_template: every grid point is outside the image");

    PeriocularTemplate t;
    t.grid = grid;
    const int channels = static_cast<int>(bank.size());
    t.values.assign(static_cast<std::size_t>(grid.point_count()) * channels, {});
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            const int p = r * grid.cols + c;
            if (!grid.in_bounds[p])
                continue;
            const auto [px, py] = grid.point(r, c);
            const int ix = static_cast<int>(std::lround(px));
            const int iy = static_cast<int>(std::lround(py));
            for (int ch = 0; ch < channels; ++ch) {
                const ComplexKernel2D& k = bank[ch];
                std::complex<double> acc{};
                for (int dy = -k.radius; dy <= k.radius; ++dy)
                    for (int dx = -k.radius; dx <= k.radius; ++dx)
                        acc += image.clamped(ix + dx, iy + dy) * k.at(dx, dy);
                t.values[static_cast<std::size_t>(p) * channels + ch] = acc;
            }
        }
    }

    t.pdf.resize(t.values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < t.values.size(); ++i) {
        t.pdf[i] = std::abs(t.values[i]);
        sum += t.pdf[i];
    }
    // Band-pass kernels leave only rounding residue on structure-free input.
    if (sum < 1e-12)
        throw ZeroVector("template magnitudes sum to zero");
    for (double& v : t.pdf) v /= sum;
    return t;
}

/// Chi-square distance between two probability distributions:
/// 0.5 * sum (p-q)^2 / (p+q), empty bins contributing zero.
inline double chi2_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw ParameterError("chi2_distance: length mismatch");
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sp += p[i];
        sq += q[i];
    }
    if (sp == 0.0 || sq == 0.0)
        throw ZeroVector("chi2_distance: zero-sum vector");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double den = p[i] + q[i];
        if (den > 0.0)
            d += (p[i] - q[i]) * (p[i] - q[i]) / den;
    }
    return 0.5 * d;
}

inline double chi2_distance(const PeriocularTemplate& a, const PeriocularTemplate& b) {
    return chi2_distance(std::span<const double>(a.pdf), std::span<const double>(b.pdf));
}

/// Versioned text serialization of a template (grid geometry + pdf vector).
inline void save_template(const PeriocularTemplate& t, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write template: " + path);
    out.precision(17);
    out << "EYESYM-TEMPLATE 1\n";
    out << t.grid.rows << ' ' << t.grid.cols << ' ' << t.grid.spacing << ' ' << t.grid.cx
        << ' ' << t.grid.cy << '\n';
    for (const auto flag : t.grid.in_bounds) out << int(flag);
    out << '\n' << t.pdf.size() << '\n';
    for (const double v : t.pdf) out << v << '\n';
}

inline PeriocularTemplate load_template(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read template: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "EYESYM-TEMPLATE" || version != 1)
        throw IoError("not a version-1 template file: " + path);
    PeriocularTemplate t;
    in >> t.grid.rows >> t.grid.cols >> t.grid.spacing >> t.grid.cx >> t.grid.cy;
    std::string flags;
    in >> flags;
    std::size_t n = 0;
    in >> n;
    if (!in || flags.size() != static_cast<std::size_t>(t.grid.rows) * t.grid.cols)
        throw IoError("malformed template file: " + path);
    t.grid.in_bounds.reserve(flags.size());
    for (const char ch : flags) t.grid.in_bounds.push_back(ch == '1');
    t.pdf.resize(n);
    for (double& v : t.pdf)
        if (!(in >> v))
            throw IoError("malformed template file: " + path);
    return t;
}

} // namespace eyesym
