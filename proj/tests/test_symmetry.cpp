#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "eyesym/symmetry.hpp"
#include "eyesym/synth.hpp"
#include "oracles.hpp"

using namespace eyesym;

namespace {

/// Reconstructs the dense 2D filter from its separable terms.
oracles::DenseKernel reconstruct(const SeparableComplexFilter& f) {
    int radius = 0;
    for (const SeparableTerm& t : f.terms)
        radius = std::max({radius, t.horizontal.radius(), t.vertical.radius()});
    oracles::DenseKernel k;
    k.radius = radius;
    k.taps.assign(static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1), {});
    for (const SeparableTerm& t : f.terms)
        for (int y = -radius; y <= radius; ++y)
            for (int x = -radius; x <= radius; ++x) {
                const double hx = std::abs(x) <= t.horizontal.radius() ? t.horizontal.at(x) : 0.0;
                const double vy = std::abs(y) <= t.vertical.radius() ? t.vertical.at(y) : 0.0;
                k.at(x, y) += t.weight * hx * vy;
            }
    return k;
}

GrayImage rotate90_ccw(const GrayImage& in) {
    GrayImage out(in.height(), in.width());
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            out.at(x, y) = in.at(in.width() - 1 - y, x);
    return out;
}

} // namespace

TEST_CASE("symmetry filter construction") {
    CHECK_THROWS_AS(build_symmetry_filter(0, 1.0), ParameterError);
    CHECK_THROWS_AS(build_symmetry_filter(2, 1.0), ParameterError);
    CHECK_THROWS_AS(build_symmetry_filter(-2, 0.0), ParameterError);

    const SeparableComplexFilter f2 = build_symmetry_filter(-2, 1.8);
    const oracles::DenseKernel dense2 = reconstruct(f2);
    CHECK(std::abs(dense2.at(0, 0)) == 0.0);
    for (int y = -dense2.radius; y <= dense2.radius; ++y)
        for (int x = -dense2.radius; x <= dense2.radius; ++x)
            CHECK(std::abs(dense2.at(x, y) - dense2.at(-x, -y)) < 1e-15);

    const SeparableComplexFilter f1 = build_symmetry_filter(1, 1.8);
    const oracles::DenseKernel dense1 = reconstruct(f1);
    std::complex<double> total{};
    for (const auto& v : dense1.taps) total += v;
    CHECK(std::abs(total) < 1e-12);
    for (int y = -dense1.radius; y <= dense1.radius; ++y)
        for (int x = -dense1.radius; x <= dense1.radius; ++x)
            CHECK(std::abs(dense1.at(x, y) + dense1.at(-x, -y)) < 1e-15);
}

TEST_CASE("separable terms reconstruct the directly sampled filter") {
    for (const int order : {-2, 1}) {
        for (const double sigma : {0.9, 1.8, 4.0}) {
            const oracles::DenseKernel direct = oracles::sample_symmetry_filter(order, sigma);
            const oracles::DenseKernel rebuilt = reconstruct(build_symmetry_filter(order, sigma));
            REQUIRE(direct.radius == rebuilt.radius);
            for (std::size_t i = 0; i < direct.taps.size(); ++i)
                CHECK(std::abs(direct.taps[i] - rebuilt.taps[i]) < 1e-10);
        }
    }
}

TEST_CASE("orientation field on canonical inputs") {
    const GrayImage flat(32, 32, 0.6);
    const ComplexField hz = orientation_field(flat, 1.2);
    for (const auto& v : hz.data())
        CHECK(std::abs(v) < 1e-14);

    // Vertical step edge: intensity varies along x; gradient angle 0 doubles to 0.
    const GrayImage vstep = gen_cdf_edge(32, 32, 6.0, 0.0);
    const ComplexField hv = orientation_field(vstep, 1.0);
    for (int y = 12; y < 20; ++y)
        CHECK(std::abs(std::arg(hv.at(16, y))) < 1e-6);

    // Horizontal step edge: gradient angle pi/2 doubles to pi.
    const GrayImage hstep = gen_cdf_edge(32, 32, 6.0, std::numbers::pi / 2.0);
    const ComplexField hh = orientation_field(hstep, 1.0);
    for (int x = 12; x < 20; ++x)
        CHECK(std::numbers::pi - std::abs(std::arg(hh.at(x, 16))) < 1e-6);
}

TEST_CASE("i20 response basics") {
    const ComplexField zero(24, 24);
    const ComplexField rz = i20_response(zero, 2.0);
    for (const auto& v : rz.data())
        CHECK(std::abs(v) == 0.0);

    std::mt19937 rng(31);
    const ComplexField h = oracles::random_field(40, 40, rng);
    const ComplexField sep = i20_response(h, 2.2);
    const ComplexField dense =
        oracles::dense_convolve(h, oracles::sample_symmetry_filter(-2, 2.2));
    double max_abs = 0.0, max_err = 0.0;
    for (std::size_t i = 0; i < sep.size(); ++i) {
        max_abs = std::max(max_abs, std::abs(dense.data()[i]));
        max_err = std::max(max_err, std::abs(dense.data()[i] - sep.data()[i]));
    }
    CHECK(max_err / max_abs < 1e-8);
}

TEST_CASE("concentric pattern argument near zero at response maximum") {
    const GrayImage rings = oracles::ring_pattern(64, 64, 31.0, 31.0, 0.5);
    const ComplexField h = orientation_field(rings, 1.0);
    const ComplexField i20 = i20_response(h, coverage_sigma(0.75, 64));
    double best = -1.0;
    std::complex<double> at_max{};
    for (const auto& v : i20.data())
        if (std::abs(v) > best) {
            best = std::abs(v);
            at_max = v;
        }
    CHECK(std::abs(std::arg(at_max)) < 0.2);
}

TEST_CASE("detect_eye on a synthetic eye") {
    const SyntheticEye eye = gen_synthetic_eye(96, 96, Circle{48, 48, 10}, Circle{48, 48, 28},
                                               7.0, 42u, 0.0);
    const DetectionResult det = detect_eye(eye.image, 7.0 / 6.0);
    const double nd = std::hypot(det.x - 48.0, det.y - 48.0) / 10.0;
    CHECK(nd <= 0.25);
    CHECK(det.magnitude > 0.0);
    CHECK(std::abs(det.argument) < std::numbers::pi / 6.0);
}

TEST_CASE("detect_eye failure modes") {
    const GrayImage flat(64, 64, 0.5);
    CHECK_THROWS_AS(detect_eye(flat, 1.0), NoEyeFound);

    const GrayImage tiny(20, 64, 0.5);
    CHECK_THROWS_AS(detect_eye(tiny, 1.0), ParameterError);
}

TEST_CASE("higher-contrast pattern wins") {
    // Two localized ring patterns, the right one at half edge contrast.
    GrayImage img(128, 64, 0.5);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 128; ++x) {
            const double rl = std::hypot(x - 32.0, y - 32.0);
            const double rr = std::hypot(x - 96.0, y - 32.0);
            const double left = 0.4 * std::cos(0.55 * rl) * std::exp(-rl * rl / (2 * 20.0 * 20.0));
            const double right = 0.2 * std::cos(0.55 * rr) * std::exp(-rr * rr / (2 * 20.0 * 20.0));
            img.at(x, y) = 0.5 + left + right;
        }
    const DetectionResult det = detect_eye(img, 1.0);
    CHECK(std::hypot(det.x - 32.0, det.y - 32.0) < 4.0);
}

TEST_CASE("rotation moves the detection with the pattern") {
    const SyntheticEye eye = gen_synthetic_eye(96, 96, Circle{40, 52, 9}, Circle{40, 52, 26},
                                               6.0, 7u, 0.0);
    const DetectionResult d0 = detect_eye(eye.image, 1.0);
    const GrayImage rotated = rotate90_ccw(eye.image);
    const DetectionResult d1 = detect_eye(rotated, 1.0);
    // (x, y) maps to (y, W-1-x) under the same rotation.
    CHECK(std::abs(d1.x - d0.y) <= 1);
    CHECK(std::abs(d1.y - (eye.image.width() - 1 - d0.x)) <= 1);
    CHECK(std::abs(d1.magnitude - d0.magnitude) / d0.magnitude < 0.02);
}

TEST_CASE("contrast equivariance of the response") {
    const SyntheticEye eye = gen_synthetic_eye(80, 80, Circle{40, 40, 9}, Circle{40, 40, 24},
                                               6.0, 9u, 0.0);
    GrayImage scaled(80, 80);
    const double c = 0.5;
    for (std::size_t i = 0; i < scaled.size(); ++i)
        scaled.data()[i] = c * eye.image.data()[i];

    const double sigma2 = coverage_sigma(0.75, 80);
    const ComplexField i20a = i20_response(orientation_field(eye.image, 1.0), sigma2);
    const ComplexField i20b = i20_response(orientation_field(scaled, 1.0), sigma2);
    const DetectionResult da = local_symmetry_maxima(i20a, 0.5).front();
    const DetectionResult db = local_symmetry_maxima(i20b, 0.5).front();
    CHECK(da.x == db.x);
    CHECK(da.y == db.y);
    CHECK(db.magnitude == Catch::Approx(c * c * da.magnitude).epsilon(1e-9));
    CHECK(db.argument == Catch::Approx(da.argument).margin(1e-9));
}

TEST_CASE("separable and dense detection pick the same pixel") {
    const SyntheticEye eye = gen_synthetic_eye(72, 72, Circle{36, 36, 8}, Circle{36, 36, 22},
                                               6.0, 3u, 0.0);
    const ComplexField h = orientation_field(eye.image, 1.0);
    const double sigma2 = coverage_sigma(0.75, 72);

    const ComplexField sep = i20_response(h, sigma2);
    const ComplexField dense =
        oracles::dense_convolve(h, oracles::sample_symmetry_filter(-2, sigma2));

    const DetectionResult ds = local_symmetry_maxima(sep, std::numbers::pi / 6.0).front();
    const DetectionResult dd = local_symmetry_maxima(dense, std::numbers::pi / 6.0).front();
    CHECK(ds.x == dd.x);
    CHECK(ds.y == dd.y);
}

TEST_CASE("argument at the true center of concentric edges") {
    for (const std::uint32_t seed : {1u, 2u, 3u, 4u}) {
        const SyntheticEye eye = gen_synthetic_eye(96, 96, Circle{48, 48, 8.0 + seed},
                                                   Circle{48, 48, 24.0 + 2.0 * seed}, 6.0,
                                                   seed, 0.0);
        const ComplexField i20 =
            i20_response(orientation_field(eye.image, 1.0), coverage_sigma(0.75, 96));
        CHECK(std::abs(std::arg(i20.at(48, 48))) < 0.2);
    }
}
