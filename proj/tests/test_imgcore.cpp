#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "eyesym/convolve.hpp"
#include "eyesym/image.hpp"
#include "eyesym/kernels.hpp"
#include "eyesym/symmetry.hpp"
#include "oracles.hpp"

using namespace eyesym;

TEST_CASE("gaussian kernel sampling and normalization") {
    const Kernel1D k = gaussian_kernel(1.0, 3.0);
    REQUIRE(k.length() == 7);
    double sum = 0.0;
    for (double t : k.taps) sum += t;
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));

    for (int u = 1; u <= k.radius(); ++u)
        CHECK(k.at(u) == Catch::Approx(k.at(-u)).margin(0.0));

    const Kernel1D k2 = gaussian_kernel(2.0);
    CHECK(k2.at(0) / k2.at(2) == Catch::Approx(std::exp(0.5)).epsilon(1e-12));

    CHECK_THROWS_AS(gaussian_kernel(0.0), ParameterError);
    CHECK_THROWS_AS(gaussian_kernel(-1.0), ParameterError);
    CHECK_THROWS_AS(gaussian_kernel(1.0, 1.0), ParameterError);
}

TEST_CASE("moment kernels") {
    const Kernel1D odd = moment_kernel(1.5, 1);
    double sum = 0.0;
    for (double t : odd.taps) sum += t;
    CHECK(std::abs(sum) < 1e-12);
    for (int u = 1; u <= odd.radius(); ++u)
        CHECK(odd.at(-u) == Catch::Approx(-odd.at(u)).margin(0.0));

    // Second moment of the discretized Gaussian is close to sigma^2.
    const Kernel1D second = moment_kernel(1.0, 2);
    double m2 = 0.0;
    for (double t : second.taps) m2 += t;
    CHECK(m2 == Catch::Approx(1.0).epsilon(0.02));

    CHECK_THROWS_AS(moment_kernel(1.0, 3), ParameterError);
    CHECK_THROWS_AS(moment_kernel(1.0, -1), ParameterError);
}

TEST_CASE("separable convolution identity and normalization") {
    std::mt19937 rng(7);
    const GrayImage img = oracles::random_image(17, 11, rng);

    const GrayImage same = convolve_separable(img, impulse_kernel(), impulse_kernel());
    CHECK(same == img);

    const GrayImage flat(9, 9, 0.37);
    const GrayImage blurred = convolve_separable(flat, gaussian_kernel(1.2), gaussian_kernel(0.8));
    for (double v : blurred.data())
        CHECK(v == Catch::Approx(0.37).margin(1e-12));
}

TEST_CASE("separable convolution equals dense 2D convolution") {
    std::mt19937 rng(11);
    const GrayImage img = oracles::random_image(32, 32, rng);
    const Kernel1D h = moment_kernel(1.3, 1);
    const Kernel1D v = gaussian_kernel(2.1);

    const GrayImage sep = convolve_separable(img, h, v);
    const ComplexField dense = oracles::dense_convolve_separable_pair(img, h, v);

    double max_abs = 0.0, max_err = 0.0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            max_abs = std::max(max_abs, std::abs(dense.at(x, y)));
            max_err = std::max(max_err, std::abs(dense.at(x, y) - sep.at(x, y)));
        }
    CHECK(max_err / max_abs < 1e-10);
}

TEST_CASE("kernel size preconditions") {
    const GrayImage img(8, 8, 0.5);
    Kernel1D huge;
    huge.taps.assign(17, 1.0 / 17.0);
    CHECK_THROWS_AS(convolve_separable(img, huge, impulse_kernel()), ParameterError);
    CHECK_THROWS_AS(convolve_separable(img, impulse_kernel(), huge), ParameterError);
}

TEST_CASE("apply_separable_complex basics") {
    std::mt19937 rng(3);
    const GrayImage img = oracles::random_image(20, 14, rng);

    SeparableComplexFilter identity;
    identity.terms.push_back({impulse_kernel(), impulse_kernel(), {1.0, 0.0}});
    const ComplexField same = apply_separable_complex(img, identity);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            CHECK(same.at(x, y) == std::complex<double>(img.at(x, y)));

    const GrayImage flat(16, 16, 0.8);
    const ComplexField grad = apply_separable_complex(flat, build_symmetry_filter(1, 1.5));
    for (const auto& v : grad.data())
        CHECK(std::abs(v) < 1e-14);

    SeparableComplexFilter empty;
    CHECK_THROWS_AS(apply_separable_complex(img, empty), ParameterError);
}

TEST_CASE("separable symmetry filter equals dense Eq-sampled filter") {
    std::mt19937 rng(23);
    const GrayImage img = oracles::random_image(48, 48, rng);
    const double sigma = 2.5;

    const ComplexField sep = apply_separable_complex(img, build_symmetry_filter(-2, sigma));
    const ComplexField dense =
        oracles::dense_convolve(img, oracles::sample_symmetry_filter(-2, sigma));

    double max_abs = 0.0, max_err = 0.0;
    for (std::size_t i = 0; i < sep.size(); ++i) {
        max_abs = std::max(max_abs, std::abs(dense.data()[i]));
        max_err = std::max(max_err, std::abs(dense.data()[i] - sep.data()[i]));
    }
    CHECK(max_err / max_abs < 1e-8);
}

TEST_CASE("linearity of separable application") {
    std::mt19937 rng(5);
    const GrayImage f = oracles::random_image(24, 24, rng);
    const GrayImage g = oracles::random_image(24, 24, rng);
    const double a = 0.6, b = -1.7;

    GrayImage combo(24, 24);
    for (std::size_t i = 0; i < combo.size(); ++i)
        combo.data()[i] = a * f.data()[i] + b * g.data()[i];

    const SeparableComplexFilter filt = build_symmetry_filter(-2, 1.4);
    const ComplexField lhs = apply_separable_complex(combo, filt);
    const ComplexField rf = apply_separable_complex(f, filt);
    const ComplexField rg = apply_separable_complex(g, filt);
    for (std::size_t i = 0; i < lhs.size(); ++i)
        CHECK(std::abs(lhs.data()[i] - (a * rf.data()[i] + b * rg.data()[i])) < 1e-10);
}

TEST_CASE("border policy is deterministic") {
    std::mt19937 rng(9);
    const GrayImage img = oracles::random_image(21, 19, rng);
    const SeparableComplexFilter filt = build_symmetry_filter(-2, 2.0);
    const ComplexField r1 = apply_separable_complex(img, filt);
    const ComplexField r2 = apply_separable_complex(img, filt);
    CHECK(r1 == r2);
}
