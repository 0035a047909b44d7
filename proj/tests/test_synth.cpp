#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "eyesym/synth.hpp"

using namespace eyesym;

TEST_CASE("planar sinusoid") {
    const double omega = 2.0 * std::numbers::pi / 12.0;
    const GrayImage img = gen_sinusoid(96, 64, omega, 0.0);

    // Period 12 along the orientation axis.
    for (int y = 0; y < 64; y += 7)
        for (int x = 0; x < 96 - 12; x += 5)
            CHECK(img.at(x, y) == Catch::Approx(img.at(x + 12, y)).margin(1e-9));

    // Orientation pi/2 varies along y only.
    const GrayImage rows = gen_sinusoid(32, 32, omega, std::numbers::pi / 2.0);
    for (int y = 0; y < 32; ++y)
        for (int x = 1; x < 32; ++x)
            CHECK(rows.at(x, y) == Catch::Approx(rows.at(0, y)).margin(1e-12));

    // Mean over whole periods is the 0.5 offset; range stays inside [0,1].
    const GrayImage whole = gen_sinusoid(120, 120, omega, 0.0);
    double mean = 0.0, lo = 1.0, hi = 0.0;
    for (const double v : whole.data()) {
        mean += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    mean /= whole.size();
    CHECK(mean == Catch::Approx(0.5).margin(0.01));
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);

    CHECK_THROWS_AS(gen_sinusoid(32, 32, 0.0, 0.0), ParameterError);
    CHECK_THROWS_AS(gen_sinusoid(32, 32, 4.0, 0.0), ParameterError);
}

TEST_CASE("gaussian cdf edge") {
    const GrayImage edge = gen_cdf_edge(129, 129, 12.0, 0.0);
    CHECK(edge.at(64, 64) == Catch::Approx(0.5).margin(1e-12));
    // Phi(+-3): the transition essentially completes at +-T/2.
    CHECK(edge.at(64 + 6, 64) == Catch::Approx(0.99865).margin(1e-4));
    CHECK(edge.at(64 - 6, 64) == Catch::Approx(0.00135).margin(1e-4));

    // T = 24 gives the sigma = 4 profile: value at one sigma is Phi(1).
    const GrayImage wide = gen_cdf_edge(129, 129, 24.0, 0.0);
    CHECK(wide.at(64 + 4, 64) == Catch::Approx(0.841345).margin(1e-4));

    CHECK_THROWS_AS(gen_cdf_edge(64, 64, 1.0, 0.0), ParameterError);
    CHECK_THROWS_AS(gen_cdf_edge(64, 64, 31.0, 0.0), ParameterError);
}

TEST_CASE("synthetic eye generator") {
    const Circle pupil{48, 48, 10}, sclera{48, 48, 28};

    const SyntheticEye a = gen_synthetic_eye(96, 96, pupil, sclera, 6.0, 42u, 0.02);
    const SyntheticEye b = gen_synthetic_eye(96, 96, pupil, sclera, 6.0, 42u, 0.02);
    CHECK(a.image == b.image); // deterministic under identical arguments
    CHECK(a.annotation == b.annotation);
    CHECK(a.annotation.pupil == pupil);
    CHECK(a.annotation.sclera == sclera);

    // Different noise salt: same annotation, different pixels.
    const SyntheticEye c = gen_synthetic_eye(96, 96, pupil, sclera, 6.0, 42u, 0.02, 1);
    CHECK(c.annotation == a.annotation);
    CHECK(c.image != a.image);

    // Different texture seeds differ even without noise.
    const SyntheticEye d = gen_synthetic_eye(96, 96, pupil, sclera, 6.0, 1u, 0.0);
    const SyntheticEye e = gen_synthetic_eye(96, 96, pupil, sclera, 6.0, 2u, 0.0);
    CHECK(d.image != e.image);

    for (const double v : a.image.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    // Pupil interior is dark, sclera ring bright.
    CHECK(d.image.at(48, 48) < 0.2);
    CHECK(d.image.at(48 + 32, 48) > 0.7);

    CHECK_THROWS_AS(gen_synthetic_eye(96, 96, Circle{48, 48, 30}, sclera, 6.0, 1u, 0.0),
                    ParameterError);
    CHECK_THROWS_AS(gen_synthetic_eye(96, 96, pupil, Circle{48, 48, 60}, 6.0, 1u, 0.0),
                    ParameterError);
    CHECK_THROWS_AS(gen_synthetic_eye(96, 96, pupil, sclera, 6.0, 1u, -0.1), ParameterError);
}

TEST_CASE("stroke overlays are deterministic and dark") {
    const Circle pupil{48, 48, 10}, sclera{48, 48, 26};
    SyntheticEye a = gen_synthetic_eye(96, 96, pupil, sclera, 6.0, 9u, 0.0);
    SyntheticEye b = gen_synthetic_eye(96, 96, pupil, sclera, 6.0, 9u, 0.0);
    overlay_lash_strokes(a.image, sclera, 5u, 12);
    overlay_lash_strokes(b.image, sclera, 5u, 12);
    CHECK(a.image == b.image);

    const SyntheticEye clean = gen_synthetic_eye(96, 96, pupil, sclera, 6.0, 9u, 0.0);
    int darkened = 0;
    for (std::size_t i = 0; i < a.image.size(); ++i) {
        CHECK(a.image.data()[i] <= clean.image.data()[i]);
        if (a.image.data()[i] < clean.image.data()[i])
            ++darkened;
    }
    CHECK(darkened > 50);
}
