#pragma once

#include <cmath>
#include <optional>

#include "eyesym/errors.hpp"

namespace eyesym {

struct Circle {
    double cx = 0.0;
    double cy = 0.0;
    double r = 0.0;

    bool contains(double x, double y) const {
        const double dx = x - cx, dy = y - cy;
        return dx * dx + dy * dy <= r * r;
    }

    bool operator==(const Circle&) const = default;
};

/// Groundtruth annotation of one eye image: pupil and sclera boundary circles
/// plus optional eyelid occlusion circles.
struct EyeAnnotation {
    Circle pupil;
    Circle sclera;
    std::optional<Circle> upper_eyelid;
    std::optional<Circle> lower_eyelid;

    bool operator==(const EyeAnnotation&) const = default;
};

/// Checks radii positive and pupil center inside the sclera circle.
inline void validate_annotation(const EyeAnnotation& a) {
    if (!(a.pupil.r > 0.0) || !(a.sclera.r > 0.0))
        throw DataError("annotation circle radius must be positive");
    if (!a.sclera.contains(a.pupil.cx, a.pupil.cy))
        throw DataError("pupil center lies outside the sclera circle");
    if (a.upper_eyelid && !(a.upper_eyelid->r > 0.0))
        throw DataError("upper eyelid radius must be positive");
    if (a.lower_eyelid && !(a.lower_eyelid->r > 0.0))
        throw DataError("lower eyelid radius must be positive");
}

/// Uniformly scales all circles (centers and radii) by s.
inline EyeAnnotation scaled_annotation(const EyeAnnotation& a, double s) {
    auto scale = [s](const Circle& c) { return Circle{c.cx * s, c.cy * s, c.r * s}; };
    EyeAnnotation out;
    out.pupil = scale(a.pupil);
    out.sclera = scale(a.sclera);
    if (a.upper_eyelid) out.upper_eyelid = scale(*a.upper_eyelid);
    if (a.lower_eyelid) out.lower_eyelid = scale(*a.lower_eyelid);
    return out;
}

} // namespace eyesym
