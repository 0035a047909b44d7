#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "eyesym/annotation.hpp"
#include "eyesym/errors.hpp"

namespace eyesym {

struct ImageRecord {
    std::string path;
    int session = 1;
    EyeAnnotation annotation;

    bool operator==(const ImageRecord&) const = default;
};

struct Identity {
    std::string id;
    std::vector<ImageRecord> images;

    bool operator==(const Identity&) const = default;
};

/// Annotated dataset: one entry per eye identity, identities sorted by id so
/// protocol generation is deterministic.
struct DatasetManifest {
    std::vector<Identity> identities;
    std::string sensor;
    std::string lighting;

    bool two_sessions() const {
        for (const Identity& ident : identities)
            for (const ImageRecord& rec : ident.images)
                if (rec.session == 2)
                    return true;
        return false;
    }

    int image_count() const {
        int n = 0;
        for (const Identity& ident : identities)
            n += static_cast<int>(ident.images.size());
        return n;
    }

    bool operator==(const DatasetManifest&) const = default;
};

/// One comparison: indices into the manifest (identity, image within it).
struct PairRef {
    int identity_a = 0;
    int image_a = 0;
    int identity_b = 0;
    int image_b = 0;
    bool genuine = false;

    bool operator==(const PairRef&) const = default;
};

struct Protocol {
    std::vector<PairRef> pairs;
    int genuine_count = 0;
    int impostor_count = 0;
    bool single_identity_warning = false;
};

/// Verification protocol. Genuine: with two sessions, every session-1 image
/// against every session-2 image of the same eye; with one session, all
/// within-identity pairs avoiding symmetric matches. Impostor: the first
/// image of each eye (session 1 when available) against the second query
/// image of every other eye (query pool: session 2 when available, falling
/// back to the last image when an eye has fewer than two).
inline Protocol generate_protocol(const DatasetManifest& manifest) {
    if (manifest.identities.empty())
        throw ParameterError("generate_protocol: empty manifest");
    const bool two = manifest.two_sessions();
    Protocol proto;

    for (std::size_t a = 0; a < manifest.identities.size(); ++a) {
        const auto& images = manifest.identities[a].images;
        if (two) {
            for (std::size_t i = 0; i < images.size(); ++i) {
                if (images[i].session != 1)
                    continue;
                for (std::size_t j = 0; j < images.size(); ++j) {
                    if (images[j].session != 2)
                        continue;
                    proto.pairs.push_back({int(a), int(i), int(a), int(j), true});
                }
            }
        } else {
            for (std::size_t i = 0; i < images.size(); ++i)
                for (std::size_t j = i + 1; j < images.size(); ++j)
                    proto.pairs.push_back({int(a), int(i), int(a), int(j), true});
        }
    }

    auto enrol_index = [&](const std::vector<ImageRecord>& images) {
        if (two)
            for (std::size_t i = 0; i < images.size(); ++i)
                if (images[i].session == 1)
                    return int(i);
        return 0;
    };
    auto query_index = [&](const std::vector<ImageRecord>& images) {
        std::vector<int> pool;
        for (std::size_t i = 0; i < images.size(); ++i)
            if (!two || images[i].session == 2)
                pool.push_back(int(i));
        if (pool.empty())
            for (std::size_t i = 0; i < images.size(); ++i)
                pool.push_back(int(i));
        return pool[std::min<std::size_t>(1, pool.size() - 1)];
    };

    if (manifest.identities.size() < 2) {
        proto.single_identity_warning = true;
    } else {
        for (std::size_t a = 0; a < manifest.identities.size(); ++a) {
            const int ia = enrol_index(manifest.identities[a].images);
            for (std::size_t b = 0; b < manifest.identities.size(); ++b) {
                if (a == b)
                    continue;
                const int jb = query_index(manifest.identities[b].images);
                proto.pairs.push_back({int(a), ia, int(b), jb, false});
            }
        }
    }

    for (const PairRef& p : proto.pairs)
        (p.genuine ? proto.genuine_count : proto.impostor_count)++;
    return proto;
}

/// tanh-estimator normalization: s' = (1/2){tanh(0.01((s - mu)/sigma)) + 1}.
inline double tanh_normalize(double s, double mu_genuine, double sigma_genuine) {
    if (!(sigma_genuine > 0.0))
        throw ParameterError("tanh_normalize: sigma must be positive");
    return 0.5 * (std::tanh(0.01 * (s - mu_genuine) / sigma_genuine) + 1.0);
}

/// Mean fusion of already-normalized similarity scores.
inline double fuse_mean(std::span<const double> scores) {
    if (scores.empty())
        throw ParameterError("fuse_mean: empty score list");
    double sum = 0.0;
    for (const double s : scores) sum += s;
    return sum / static_cast<double>(scores.size());
}

/// Detection error normalized by the annotated circle radius.
inline double normalized_distance(double x, double y, const Circle& circle) {
    if (!(circle.r > 0.0))
        throw DataError("normalized_distance: circle radius must be positive");
    return std::hypot(x - circle.cx, y - circle.cy) / circle.r;
}

enum class ScorePolarity { distance, similarity };

struct ScoreSet {
    std::vector<double> genuine;
    std::vector<double> impostor;
    ScorePolarity polarity = ScorePolarity::distance;
};

/// Converts a score set to similarity polarity (distances negated) and
/// applies the tanh estimator with mu/sigma taken from the genuine scores,
/// so larger normalized scores always mean more genuine.
inline ScoreSet tanh_normalize_scores(const ScoreSet& raw) {
    if (raw.genuine.empty())
        throw ParameterError("tanh_normalize_scores: no genuine scores");
    const double sign = raw.polarity == ScorePolarity::distance ? -1.0 : 1.0;
    double mu = 0.0;
    for (const double s : raw.genuine) mu += sign * s;
    mu /= static_cast<double>(raw.genuine.size());
    double var = 0.0;
    for (const double s : raw.genuine) {
        const double d = sign * s - mu;
        var += d * d;
    }
    var /= static_cast<double>(raw.genuine.size());
    const double sigma = std::sqrt(var);
    if (!(sigma > 0.0))
        throw ParameterError("tanh_normalize_scores: genuine scores are constant");

    ScoreSet out;
    out.polarity = ScorePolarity::similarity;
    out.genuine.reserve(raw.genuine.size());
    out.impostor.reserve(raw.impostor.size());
    for (const double s : raw.genuine) out.genuine.push_back(tanh_normalize(sign * s, mu, sigma));
    for (const double s : raw.impostor) out.impostor.push_back(tanh_normalize(sign * s, mu, sigma));
    return out;
}

struct CurvePoint {
    double threshold = 0.0;
    double fraction = 0.0;
};

/// Cumulative detection-accuracy curve: fraction of detections whose
/// normalized distance to the reference circle is <= t, on the fixed lattice
/// t = 0.00, 0.05, ..., 2.00 (which contains 0.4 and 1.0).
inline std::vector<CurvePoint> detection_accuracy_curve(
    std::span<const std::pair<double, double>> detected_points,
    std::span<const Circle> reference_circles) {
    if (detected_points.size() != reference_circles.size())
        throw DataError("detection_accuracy_curve: mismatched detections and annotations");
    if (detected_points.empty())
        throw DataError("detection_accuracy_curve: no data");
    std::vector<double> nds;
    nds.reserve(detected_points.size());
    for (std::size_t i = 0; i < detected_points.size(); ++i)
        nds.push_back(normalized_distance(detected_points[i].first, detected_points[i].second,
                                          reference_circles[i]));
    std::vector<CurvePoint> curve;
    curve.reserve(41);
    for (int i = 0; i <= 40; ++i) {
        const double t = i / 20.0;
        int hits = 0;
        for (const double nd : nds)
            if (nd <= t)
                ++hits;
        curve.push_back({t, static_cast<double>(hits) / nds.size()});
    }
    return curve;
}

/// Equal error rate by threshold sweep over the observed scores, linearly
/// interpolated between the bracketing thresholds where FAR and FRR cross.
inline double compute_eer(const ScoreSet& scores) {
    if (scores.genuine.empty() || scores.impostor.empty())
        throw ParameterError("compute_eer: both score classes must be non-empty");
    const double sign = scores.polarity == ScorePolarity::distance ? -1.0 : 1.0;
    std::vector<double> gen, imp;
    gen.reserve(scores.genuine.size());
    imp.reserve(scores.impostor.size());
    for (const double s : scores.genuine) gen.push_back(sign * s);
    for (const double s : scores.impostor) imp.push_back(sign * s);
    std::sort(gen.begin(), gen.end());
    std::sort(imp.begin(), imp.end());

    std::vector<double> thresholds;
    thresholds.reserve(gen.size() + imp.size() + 2);
    thresholds.push_back(std::min(gen.front(), imp.front()) - 1.0);
    std::merge(gen.begin(), gen.end(), imp.begin(), imp.end(), std::back_inserter(thresholds));
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds.push_back(std::max(gen.back(), imp.back()) + 1.0);

    // Accept iff similarity >= t: FAR falls and FRR rises as t sweeps up.
    auto far_at = [&](double t) {
        const auto it = std::lower_bound(imp.begin(), imp.end(), t);
        return static_cast<double>(imp.end() - it) / imp.size();
    };
    auto frr_at = [&](double t) {
        const auto it = std::lower_bound(gen.begin(), gen.end(), t);
        return static_cast<double>(it - gen.begin()) / gen.size();
    };

    double prev_t = thresholds.front();
    double prev_d = far_at(prev_t) - frr_at(prev_t); // starts at +1
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        const double t = thresholds[i];
        const double d = far_at(t) - frr_at(t);
        if (d <= 0.0) {
            if (d == 0.0)
                return far_at(t);
            const double alpha = prev_d / (prev_d - d);
            const double far_prev = far_at(prev_t);
            return far_prev + alpha * (far_at(t) - far_prev);
        }
        prev_t = t;
        prev_d = d;
    }
    return 0.0; // unreachable: the sentinel threshold forces d = -1
}

} // namespace eyesym
