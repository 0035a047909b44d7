#pragma once

#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eyesym/evalfusion.hpp"
#include "eyesym/freqest.hpp"
#include "eyesym/io.hpp"
#include "eyesym/irismatch.hpp"
#include "eyesym/parallel.hpp"
#include "eyesym/periocular.hpp"
#include "eyesym/preprocess.hpp"
#include "eyesym/symmetry.hpp"

namespace eyesym {

/// The four adaptivity scenarios:
///   1: no eyelash removal, fixed sigma1 = 7/6
///   2: rank filter L = 7, fixed sigma1 = 7/6
///   3: no eyelash removal, sigma1 = T'/6
///   4: rank filter L adapted to T', sigma1 = T'/6
struct PipelineConfig {
    int scenario = 4;
    bool manual_centers = false;
    bool dense_grid = true;
    bool resize_sclera = false;
    std::string grid_database;          // Table-style preset name; empty = explicit
    int grid_rows = 9;
    int grid_cols = 13;
    double grid_spacing = 8.0;
    double lambda_min = 4.0;
    double lambda_max = 16.0;
    double angle_threshold = std::numbers::pi / 6.0;
    double coverage = 0.75;
    bool match_periocular = true;
    bool match_iris = false;
    std::optional<WidthCalibration> calibration; // required for scenarios 3-4
    int jobs = 0;
    std::string root;                   // prefix for relative image paths
    /// Overridable image source (defaults to reading root/path from disk).
    std::function<GrayImage(const ImageRecord&)> loader;
};

struct DetectionRow {
    std::string path;
    bool ok = false;
    int x = 0;
    int y = 0;
    double nd_pupil = 0.0;
    double nd_sclera = 0.0;
    std::string error;
};

struct ScoreRow {
    PairRef pair;
    std::vector<double> scores; // one per matcher, then optionally fused
};

struct MatcherResult {
    std::string name;
    ScoreSet scores;
    double eer = 0.0;
};

struct EvalReport {
    int scenario = 0;
    bool manual_centers = false;
    int total_images = 0;
    int failed_images = 0;
    std::vector<DetectionRow> detections;
    std::vector<CurvePoint> pupil_curve;
    std::vector<CurvePoint> sclera_curve;
    std::vector<MatcherResult> matchers;
    std::optional<double> fused_eer;
    std::vector<std::string> matcher_names; // column order of ScoreRow::scores
    std::vector<ScoreRow> score_rows;
    bool fused_column = false;

    bool ok() const { return total_images == 0 || failed_images * 2 <= total_images; }
};

struct ScenarioImage {
    GrayImage image;        // after the scenario's eyelash-removal step
    double edge_width = 0.0; // T' (adaptive scenarios only)
    double sigma1 = 0.0;     // derivative filter size for the orientation field
};

/// Applies one scenario's preprocessing to a raw image and reports the
/// sigma1 the detector should use.
inline ScenarioImage scenario_preprocess(const GrayImage& raw, int scenario,
                                         const std::optional<WidthCalibration>& calibration) {
    if (scenario < 1 || scenario > 4)
        throw ParameterError("scenario must be 1..4");
    ScenarioImage out;
    if (scenario >= 3) {
        if (!calibration)
            throw ParameterError("scenarios 3 and 4 need a width calibration");
        out.edge_width = estimate_edge_width(raw, *calibration);
        out.sigma1 = out.edge_width / 6.0;
    } else {
        out.sigma1 = 7.0 / 6.0;
    }
    switch (scenario) {
    case 2:
        out.image = rank_filter_1d(raw, 7, 2);
        break;
    case 4:
        out.image = adaptive_rank_filter(raw, out.edge_width);
        break;
    default:
        out.image = raw;
        break;
    }
    return out;
}

namespace detail {

struct WorkItem {
    int identity = 0;
    int image = 0;
    ImageRecord record;
    GrayImage raw;
    EyeAnnotation annotation;       // possibly rescaled
    GrayImage preprocessed;
    double edge_width = 0.0;
    bool loaded = false;
    bool detected = false;
    double center_x = 0.0;
    double center_y = 0.0;
    DetectionRow row;
    std::optional<PeriocularTemplate> templ;
    std::optional<IrisCode> iris;
};

} // namespace detail

/// Runs detection (or manual centering), feature extraction, protocol
/// matching, fusion and metrics over an annotated dataset. Per-image
/// failures are recorded and the run continues; ok() reflects the >50%
/// failure gate.
inline EvalReport run_pipeline(const DatasetManifest& manifest, const PipelineConfig& config) {
    if (config.scenario < 1 || config.scenario > 4)
        throw ParameterError("scenario must be 1..4");
    const bool adaptive = config.scenario >= 3;
    if (adaptive && !config.calibration)
        throw ParameterError("scenarios 3 and 4 need a width calibration");
    if (!config.match_periocular && !config.match_iris)
        throw ParameterError("no matcher selected");

    auto loader = config.loader;
    if (!loader) {
        const std::string root = config.root;
        loader = [root](const ImageRecord& rec) {
            const std::filesystem::path p = std::filesystem::path(rec.path).is_absolute()
                                                ? std::filesystem::path(rec.path)
                                                : std::filesystem::path(root) / rec.path;
            return load_gray(p.string());
        };
    }

    std::vector<detail::WorkItem> items;
    for (std::size_t a = 0; a < manifest.identities.size(); ++a)
        for (std::size_t i = 0; i < manifest.identities[a].images.size(); ++i) {
            detail::WorkItem item;
            item.identity = static_cast<int>(a);
            item.image = static_cast<int>(i);
            item.record = manifest.identities[a].images[i];
            item.row.path = item.record.path;
            items.push_back(std::move(item));
        }

    EvalReport report;
    report.scenario = config.scenario;
    report.manual_centers = config.manual_centers;
    report.total_images = static_cast<int>(items.size());

    // Load (and optionally rescale to the dataset's mean sclera radius).
    parallel_for(static_cast<int>(items.size()), [&](int i) {
        detail::WorkItem& item = items[i];
        try {
            item.raw = loader(item.record);
            item.annotation = item.record.annotation;
            item.loaded = true;
        } catch (const std::exception& e) {
            item.row.error = e.what();
        }
    }, config.jobs);

    if (config.resize_sclera) {
        double mean_r = 0.0;
        int n = 0;
        for (const detail::WorkItem& item : items)
            if (item.loaded) {
                mean_r += item.annotation.sclera.r;
                ++n;
            }
        if (n > 0) {
            mean_r /= n;
            parallel_for(static_cast<int>(items.size()), [&](int i) {
                detail::WorkItem& item = items[i];
                if (!item.loaded)
                    return;
                try {
                    ResizedEye resized = resize_to_sclera(item.raw, item.annotation, mean_r);
                    item.raw = std::move(resized.image);
                    item.annotation = resized.annotation;
                } catch (const std::exception& e) {
                    item.loaded = false;
                    item.row.error = e.what();
                }
            }, config.jobs);
        }
    }

    // Preprocess + detect.
    const GaborBankSpec bank_spec = make_bank_spec(config.lambda_min, config.lambda_max);
    const std::vector<ComplexKernel2D> bank =
        config.match_periocular ? build_gabor_bank(bank_spec) : std::vector<ComplexKernel2D>{};

    parallel_for(static_cast<int>(items.size()), [&](int i) {
        detail::WorkItem& item = items[i];
        if (!item.loaded)
            return;
        try {
            ScenarioImage prep = scenario_preprocess(item.raw, config.scenario, config.calibration);
            item.edge_width = prep.edge_width;
            item.preprocessed = std::move(prep.image);
            const double sigma1 = prep.sigma1;
            if (config.manual_centers) {
                item.center_x = item.annotation.pupil.cx;
                item.center_y = item.annotation.pupil.cy;
                item.detected = true;
                item.row.ok = true;
            } else {
                const DetectionResult det =
                    detect_eye(item.preprocessed, sigma1, config.angle_threshold, config.coverage);
                item.center_x = det.x;
                item.center_y = det.y;
                item.detected = true;
                item.row.ok = true;
                item.row.x = det.x;
                item.row.y = det.y;
                item.row.nd_pupil = normalized_distance(det.x, det.y, item.annotation.pupil);
                item.row.nd_sclera = normalized_distance(det.x, det.y, item.annotation.sclera);
            }
        } catch (const std::exception& e) {
            item.row.error = e.what();
        }
    }, config.jobs);

    // Features.
    parallel_for(static_cast<int>(items.size()), [&](int i) {
        detail::WorkItem& item = items[i];
        if (!item.detected)
            return;
        try {
            if (config.match_periocular) {
                GridConfig grid =
                    config.grid_database.empty()
                        ? build_grid(config.grid_rows, config.grid_cols, config.grid_spacing,
                                     item.raw.width(), item.raw.height(), item.center_x,
                                     item.center_y)
                        : build_grid(config.grid_database, config.dense_grid, item.raw.width(),
                                     item.raw.height(), item.center_x, item.center_y);
                item.templ = extract_template(item.preprocessed, grid, bank);
            }
            if (config.match_iris)
                item.iris = encode_log_gabor_1d(rubber_sheet(item.raw, item.annotation));
        } catch (const std::exception& e) {
            item.detected = false;
            item.row.ok = false;
            item.row.error = e.what();
        }
    }, config.jobs);

    for (const detail::WorkItem& item : items) {
        report.detections.push_back(item.row);
        if (!item.row.ok)
            ++report.failed_images;
    }

    if (!config.manual_centers) {
        std::vector<std::pair<double, double>> points;
        std::vector<Circle> pupils, scleras;
        for (const detail::WorkItem& item : items)
            if (item.detected) {
                points.push_back({item.center_x, item.center_y});
                pupils.push_back(item.annotation.pupil);
                scleras.push_back(item.annotation.sclera);
            }
        if (!points.empty()) {
            report.pupil_curve = detection_accuracy_curve(points, pupils);
            report.sclera_curve = detection_accuracy_curve(points, scleras);
        }
    }

    // Matching over the protocol; pairs touching failed images are skipped.
    const Protocol protocol = generate_protocol(manifest);
    std::vector<const detail::WorkItem*> lookup;
    {
        std::vector<std::vector<const detail::WorkItem*>> by_id(manifest.identities.size());
        for (std::size_t a = 0; a < manifest.identities.size(); ++a)
            by_id[a].resize(manifest.identities[a].images.size(), nullptr);
        for (const detail::WorkItem& item : items)
            by_id[item.identity][item.image] = &item;
        for (auto& v : by_id)
            for (auto* p : v) lookup.push_back(p);
    }
    auto item_of = [&](int identity, int image) -> const detail::WorkItem* {
        std::size_t offset = 0;
        for (int a = 0; a < identity; ++a)
            offset += manifest.identities[a].images.size();
        return lookup[offset + image];
    };

    if (config.match_periocular)
        report.matcher_names.push_back("periocular");
    if (config.match_iris)
        report.matcher_names.push_back("iris");

    std::vector<ScoreSet> raw_sets(report.matcher_names.size());
    for (ScoreSet& s : raw_sets) s.polarity = ScorePolarity::distance;

    std::vector<std::optional<ScoreRow>> rows(protocol.pairs.size());
    parallel_for(static_cast<int>(protocol.pairs.size()), [&](int i) {
        const PairRef& pair = protocol.pairs[i];
        const detail::WorkItem* a = item_of(pair.identity_a, pair.image_a);
        const detail::WorkItem* b = item_of(pair.identity_b, pair.image_b);
        if (!a || !b || !a->detected || !b->detected)
            return;
        ScoreRow row;
        row.pair = pair;
        try {
            if (config.match_periocular)
                row.scores.push_back(chi2_distance(*a->templ, *b->templ));
            if (config.match_iris)
                row.scores.push_back(hamming_distance(*a->iris, *b->iris));
        } catch (const std::exception&) {
            return; // unmatched pair: counted by its absence
        }
        rows[i] = std::move(row);
    }, config.jobs);

    for (const auto& row : rows) {
        if (!row)
            continue;
        for (std::size_t m = 0; m < report.matcher_names.size(); ++m) {
            auto& set = raw_sets[m];
            (row->pair.genuine ? set.genuine : set.impostor).push_back(row->scores[m]);
        }
        report.score_rows.push_back(*row);
    }

    for (std::size_t m = 0; m < report.matcher_names.size(); ++m) {
        MatcherResult res;
        res.name = report.matcher_names[m];
        res.scores = raw_sets[m];
        res.eer = (raw_sets[m].genuine.empty() || raw_sets[m].impostor.empty())
                      ? 0.0
                      : compute_eer(raw_sets[m]);
        report.matchers.push_back(std::move(res));
    }

    if (report.matcher_names.size() >= 2 && !raw_sets[0].genuine.empty() &&
        !raw_sets[0].impostor.empty()) {
        std::vector<ScoreSet> normalized;
        normalized.reserve(raw_sets.size());
        for (const ScoreSet& s : raw_sets) normalized.push_back(tanh_normalize_scores(s));
        ScoreSet fused;
        fused.polarity = ScorePolarity::similarity;
        std::size_t gi = 0, ii = 0;
        for (ScoreRow& row : report.score_rows) {
            std::vector<double> parts;
            const std::size_t idx = row.pair.genuine ? gi++ : ii++;
            for (const ScoreSet& s : normalized)
                parts.push_back(row.pair.genuine ? s.genuine[idx] : s.impostor[idx]);
            const double f = fuse_mean(parts);
            row.scores.push_back(f);
            (row.pair.genuine ? fused.genuine : fused.impostor).push_back(f);
        }
        report.fused_column = true;
        if (!fused.genuine.empty() && !fused.impostor.empty())
            report.fused_eer = compute_eer(fused);
    }

    return report;
}

inline void write_detection_curve_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << "threshold,pupil_fraction,sclera_fraction\n";
    for (std::size_t i = 0; i < report.pupil_curve.size(); ++i) {
        out << report.pupil_curve[i].threshold << ',' << report.pupil_curve[i].fraction << ','
            << (i < report.sclera_curve.size() ? report.sclera_curve[i].fraction : 0.0) << '\n';
    }
}

inline void write_scores_csv(const EvalReport& report, const DatasetManifest& manifest,
                             const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << "identity_a,image_a,identity_b,image_b,genuine";
    for (const std::string& name : report.matcher_names) out << ',' << name;
    if (report.fused_column)
        out << ",fused";
    out << '\n';
    out.precision(17);
    for (const ScoreRow& row : report.score_rows) {
        out << manifest.identities[row.pair.identity_a].id << ',' << row.pair.image_a << ','
            << manifest.identities[row.pair.identity_b].id << ',' << row.pair.image_b << ','
            << (row.pair.genuine ? 1 : 0);
        for (const double s : row.scores) out << ',' << s;
        out << '\n';
    }
}

inline void write_summary_json(const EvalReport& report, const std::string& path) {
    nlohmann::json j;
    j["schema"] = 1;
    j["scenario"] = report.scenario;
    j["manual_centers"] = report.manual_centers;
    j["total_images"] = report.total_images;
    j["failed_images"] = report.failed_images;
    j["ok"] = report.ok();
    for (const MatcherResult& m : report.matchers)
        j["eer"][m.name] = m.eer;
    if (report.fused_eer)
        j["eer"]["fused"] = *report.fused_eer;
    auto fraction_at = [](const std::vector<CurvePoint>& curve, double t) -> double {
        for (const CurvePoint& p : curve)
            if (std::abs(p.threshold - t) < 1e-12)
                return p.fraction;
        return 0.0;
    };
    if (!report.pupil_curve.empty()) {
        j["detection"]["pupil_nd04"] = fraction_at(report.pupil_curve, 0.4);
        j["detection"]["pupil_nd10"] = fraction_at(report.pupil_curve, 1.0);
        j["detection"]["sclera_nd04"] = fraction_at(report.sclera_curve, 0.4);
        j["detection"]["sclera_nd10"] = fraction_at(report.sclera_curve, 1.0);
    }
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
}

} // namespace eyesym
