// Command-line front door: dataset calibration, eye detection, template
// extraction, matching and full verification runs over annotated corpora,
// plus a synthetic fixture generator.

#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eyesym/corpus.hpp"
#include "eyesym/evalfusion.hpp"
#include "eyesym/freqest.hpp"
#include "eyesym/io.hpp"
#include "eyesym/manifest.hpp"
#include "eyesym/parallel.hpp"
#include "eyesym/periocular.hpp"
#include "eyesym/pipeline.hpp"
#include "eyesym/symmetry.hpp"

namespace fs = std::filesystem;
using namespace eyesym;

namespace {

struct CommonOpts {
    std::string manifest_path;
    std::string root;
    std::string out_dir = ".";
    std::string calibration_path;
    int scenario = 4;
    double angle_threshold = std::numbers::pi / 6.0;
    double coverage = 0.75;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_manifest = true) {
    if (needs_manifest)
        cmd->add_option("--manifest", opts.manifest_path, "annotation manifest (JSON lines)")
            ->required();
    cmd->add_option("--root", opts.root, "directory image paths are relative to");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--scenario", opts.scenario, "preprocessing scenario 1..4")
        ->check(CLI::Range(1, 4));
    cmd->add_option("--calibration", opts.calibration_path,
                    "width calibration file (scenarios 3-4; computed if omitted)");
    cmd->add_option("--angle-threshold", opts.angle_threshold,
                    "max |arg I20| accepted at maxima (radians)");
    cmd->add_option("--coverage", opts.coverage, "pattern filter coverage of the short side");
    cmd->add_option("--jobs", opts.jobs, "worker threads (0 = all cores)");
}

std::optional<WidthCalibration> resolve_calibration(const CommonOpts& opts) {
    if (opts.scenario < 3)
        return std::nullopt;
    if (!opts.calibration_path.empty())
        return load_width_calibration(opts.calibration_path);
    std::cerr << "calibrating width polynomial (pass --calibration to reuse one)\n";
    return calibrate_width_polynomial();
}

std::string image_root(const CommonOpts& opts) {
    if (!opts.root.empty())
        return opts.root;
    return fs::path(opts.manifest_path).parent_path().string();
}

GrayImage load_record(const std::string& root, const ImageRecord& rec) {
    const fs::path p = fs::path(rec.path).is_absolute() ? fs::path(rec.path)
                                                        : fs::path(root) / rec.path;
    return load_gray(p.string());
}

int cmd_calibrate(const CommonOpts& opts, double window_sigma) {
    const WidthCalibration cal = calibrate_width_polynomial(default_width_set(), window_sigma);
    fs::create_directories(opts.out_dir);
    const std::string path = (fs::path(opts.out_dir) / "width_calibration.txt").string();
    save_width_calibration(cal, path);
    std::cout << "wrote " << path << " (T'(F) = " << cal.a << " F^2 + " << cal.b << " F + "
              << cal.c << ", F in [" << cal.f_min << ", " << cal.f_max << "])\n";
    return 0;
}

int cmd_detect(const CommonOpts& opts) {
    const DatasetManifest manifest = load_manifest(opts.manifest_path);
    const std::optional<WidthCalibration> cal = resolve_calibration(opts);
    const std::string root = image_root(opts);

    struct Row {
        std::string path;
        bool ok = false;
        int x = 0, y = 0;
        double nd_pupil = 0.0, nd_sclera = 0.0;
        std::string error;
        Circle pupil, sclera;
    };
    std::vector<std::pair<const Identity*, const ImageRecord*>> records;
    for (const Identity& ident : manifest.identities)
        for (const ImageRecord& rec : ident.images)
            records.push_back({&ident, &rec});
    std::vector<Row> rows(records.size());

    parallel_for(static_cast<int>(records.size()), [&](int i) {
        const ImageRecord& rec = *records[i].second;
        Row& row = rows[i];
        row.path = rec.path;
        row.pupil = rec.annotation.pupil;
        row.sclera = rec.annotation.sclera;
        try {
            const GrayImage raw = load_record(root, rec);
            const ScenarioImage prep = scenario_preprocess(raw, opts.scenario, cal);
            const DetectionResult det =
                detect_eye(prep.image, prep.sigma1, opts.angle_threshold, opts.coverage);
            row.ok = true;
            row.x = det.x;
            row.y = det.y;
            row.nd_pupil = normalized_distance(det.x, det.y, rec.annotation.pupil);
            row.nd_sclera = normalized_distance(det.x, det.y, rec.annotation.sclera);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    }, opts.jobs);

    fs::create_directories(opts.out_dir);
    std::ofstream csv(fs::path(opts.out_dir) / "detections.csv");
    csv << "path,ok,x,y,nd_pupil,nd_sclera,error\n";
    int failures = 0;
    std::vector<std::pair<double, double>> points;
    std::vector<Circle> pupils, scleras;
    for (const Row& row : rows) {
        csv << row.path << ',' << (row.ok ? 1 : 0) << ',' << row.x << ',' << row.y << ','
            << row.nd_pupil << ',' << row.nd_sclera << ',' << row.error << '\n';
        if (!row.ok) {
            ++failures;
            continue;
        }
        points.push_back({double(row.x), double(row.y)});
        pupils.push_back(row.pupil);
        scleras.push_back(row.sclera);
    }
    if (!points.empty()) {
        const auto pupil_curve = detection_accuracy_curve(points, pupils);
        const auto sclera_curve = detection_accuracy_curve(points, scleras);
        std::ofstream curve(fs::path(opts.out_dir) / "detection_curve.csv");
        curve << "threshold,pupil_fraction,sclera_fraction\n";
        for (std::size_t i = 0; i < pupil_curve.size(); ++i)
            curve << pupil_curve[i].threshold << ',' << pupil_curve[i].fraction << ','
                  << sclera_curve[i].fraction << '\n';
    }
    std::cout << rows.size() - failures << "/" << rows.size() << " images detected\n";
    return failures * 2 > static_cast<int>(rows.size()) ? 1 : 0;
}

int cmd_extract(const CommonOpts& opts, bool manual, const std::string& grid_db, bool dense,
                int rows, int cols, double spacing, double lmin, double lmax, bool iris) {
    const DatasetManifest manifest = load_manifest(opts.manifest_path);
    const std::optional<WidthCalibration> cal = resolve_calibration(opts);
    const std::string root = image_root(opts);
    const std::vector<ComplexKernel2D> bank = build_gabor_bank(make_bank_spec(lmin, lmax));
    fs::create_directories(opts.out_dir);

    std::vector<std::pair<const Identity*, const ImageRecord*>> records;
    for (const Identity& ident : manifest.identities)
        for (const ImageRecord& rec : ident.images)
            records.push_back({&ident, &rec});

    std::atomic<int> failures{0};
    parallel_for(static_cast<int>(records.size()), [&](int i) {
        const ImageRecord& rec = *records[i].second;
        try {
            const GrayImage raw = load_record(root, rec);
            const ScenarioImage prep = scenario_preprocess(raw, opts.scenario, cal);
            double cx = rec.annotation.pupil.cx, cy = rec.annotation.pupil.cy;
            if (!manual) {
                const DetectionResult det =
                    detect_eye(prep.image, prep.sigma1, opts.angle_threshold, opts.coverage);
                cx = det.x;
                cy = det.y;
            }
            const GridConfig grid =
                grid_db.empty()
                    ? build_grid(rows, cols, spacing, raw.width(), raw.height(), cx, cy)
                    : build_grid(grid_db, dense, raw.width(), raw.height(), cx, cy);
            const PeriocularTemplate templ = extract_template(prep.image, grid, bank);
            const std::string stem = fs::path(rec.path).filename().stem().string();
            save_template(templ, (fs::path(opts.out_dir) / (stem + ".tpl")).string());
            if (iris) {
                const IrisCode code = encode_log_gabor_1d(rubber_sheet(raw, rec.annotation));
                save_iris_code(code, (fs::path(opts.out_dir) / (stem + ".irc")).string());
            }
        } catch (const std::exception& e) {
            std::cerr << rec.path << ": " << e.what() << '\n';
            ++failures;
        }
    }, opts.jobs);

    std::cout << records.size() - failures << "/" << records.size() << " templates written to "
              << opts.out_dir << '\n';
    return failures * 2 > static_cast<int>(records.size()) ? 1 : 0;
}

int cmd_match(const CommonOpts& opts, const std::string& template_dir, bool iris) {
    const DatasetManifest manifest = load_manifest(opts.manifest_path);
    const Protocol protocol = generate_protocol(manifest);
    if (protocol.single_identity_warning)
        std::cerr << "warning: single identity, impostor set is empty\n";

    auto stem_of = [&](const PairRef& p, bool first) {
        const ImageRecord& rec = first ? manifest.identities[p.identity_a].images[p.image_a]
                                       : manifest.identities[p.identity_b].images[p.image_b];
        return fs::path(rec.path).filename().stem().string();
    };

    fs::create_directories(opts.out_dir);
    std::ofstream csv(fs::path(opts.out_dir) / "scores.csv");
    csv << "identity_a,image_a,identity_b,image_b,genuine,periocular";
    if (iris)
        csv << ",iris";
    csv << '\n';
    csv.precision(17);

    ScoreSet perio{{}, {}, ScorePolarity::distance};
    ScoreSet iris_set{{}, {}, ScorePolarity::distance};
    for (const PairRef& pair : protocol.pairs) {
        const auto ta = load_template((fs::path(template_dir) / (stem_of(pair, true) + ".tpl")).string());
        const auto tb = load_template((fs::path(template_dir) / (stem_of(pair, false) + ".tpl")).string());
        const double chi2 = chi2_distance(ta, tb);
        (pair.genuine ? perio.genuine : perio.impostor).push_back(chi2);
        csv << manifest.identities[pair.identity_a].id << ',' << pair.image_a << ','
            << manifest.identities[pair.identity_b].id << ',' << pair.image_b << ','
            << (pair.genuine ? 1 : 0) << ',' << chi2;
        if (iris) {
            const auto ca = load_iris_code((fs::path(template_dir) / (stem_of(pair, true) + ".irc")).string());
            const auto cb = load_iris_code((fs::path(template_dir) / (stem_of(pair, false) + ".irc")).string());
            const double hd = hamming_distance(ca, cb);
            (pair.genuine ? iris_set.genuine : iris_set.impostor).push_back(hd);
            csv << ',' << hd;
        }
        csv << '\n';
    }
    if (!perio.genuine.empty() && !perio.impostor.empty()) {
        std::cout << "periocular EER = " << compute_eer(perio) << '\n';
        if (iris)
            std::cout << "iris EER = " << compute_eer(iris_set) << '\n';
    }
    return 0;
}

int cmd_eval(const CommonOpts& opts, PipelineConfig config) {
    const DatasetManifest manifest = load_manifest(opts.manifest_path);
    config.scenario = opts.scenario;
    config.angle_threshold = opts.angle_threshold;
    config.coverage = opts.coverage;
    config.jobs = opts.jobs;
    config.root = image_root(opts);
    config.calibration = resolve_calibration(opts);

    const EvalReport report = run_pipeline(manifest, config);
    fs::create_directories(opts.out_dir);
    if (!config.manual_centers)
        write_detection_curve_csv(report, (fs::path(opts.out_dir) / "detection_curve.csv").string());
    write_scores_csv(report, manifest, (fs::path(opts.out_dir) / "scores.csv").string());
    write_summary_json(report, (fs::path(opts.out_dir) / "summary.json").string());

    for (const MatcherResult& m : report.matchers)
        std::cout << m.name << " EER = " << m.eer << '\n';
    if (report.fused_eer)
        std::cout << "fused EER = " << *report.fused_eer << '\n';
    std::cout << report.total_images - report.failed_images << "/" << report.total_images
              << " images processed; reports in " << opts.out_dir << '\n';
    return report.ok() ? 0 : 1;
}

int cmd_synth(const CorpusSpec& spec, const std::string& out_dir) {
    emit_corpus(spec, out_dir);
    std::cout << "wrote " << spec.identities * spec.samples_per_identity << " images and "
              << "manifest.jsonl to " << out_dir << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Training-free eye detection, periocular and iris verification"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* calibrate = app.add_subcommand("calibrate", "fit the edge-width polynomial");
    double window_sigma = 4.0;
    calibrate->add_option("--out", opts.out_dir, "output directory");
    calibrate->add_option("--window-sigma", window_sigma, "local averaging window sigma");

    auto* detect = app.add_subcommand("detect", "detect eye centers over a manifest");
    add_common(detect, opts);

    auto* extract = app.add_subcommand("extract", "write periocular templates (and iris codes)");
    bool manual = false, iris = false;
    std::string grid_db;
    int grid_rows = 9, grid_cols = 13;
    double grid_spacing = 8.0, lmin = 4.0, lmax = 16.0;
    std::string grid_mode = "dense";
    add_common(extract, opts);
    extract->add_flag("--manual", manual, "use annotated pupil centers instead of detection");
    extract->add_option("--db-grid", grid_db, "named grid preset (biosec, casia, iitd, mobbio, ubiris)");
    extract->add_option("--grid", grid_mode, "dense or coarse (with --db-grid)")
        ->check(CLI::IsMember({"dense", "coarse"}));
    extract->add_option("--grid-rows", grid_rows, "explicit grid rows (odd)");
    extract->add_option("--grid-cols", grid_cols, "explicit grid cols (odd)");
    extract->add_option("--grid-spacing", grid_spacing, "explicit grid spacing (px)");
    extract->add_option("--lambda-min", lmin, "shortest Gabor wavelength (px)");
    extract->add_option("--lambda-max", lmax, "longest Gabor wavelength (px)");
    extract->add_flag("--iris", iris, "also write iris codes");

    auto* match = app.add_subcommand("match", "match stored templates under the protocol");
    std::string template_dir;
    add_common(match, opts);
    match->add_option("--templates", template_dir, "directory with .tpl/.irc files")->required();
    match->add_flag("--iris", iris, "also match iris codes");

    auto* eval = app.add_subcommand("eval", "full pipeline: detect, extract, match, fuse, report");
    PipelineConfig config;
    std::string matchers = "periocular";
    add_common(eval, opts);
    eval->add_flag("--manual", config.manual_centers, "use annotated pupil centers");
    eval->add_flag("--resize-sclera", config.resize_sclera,
                   "rescale images to the mean annotated sclera radius");
    eval->add_option("--db-grid", config.grid_database, "named grid preset");
    eval->add_option("--grid", grid_mode, "dense or coarse (with --db-grid)")
        ->check(CLI::IsMember({"dense", "coarse"}));
    eval->add_option("--grid-rows", config.grid_rows, "explicit grid rows (odd)");
    eval->add_option("--grid-cols", config.grid_cols, "explicit grid cols (odd)");
    eval->add_option("--grid-spacing", config.grid_spacing, "explicit grid spacing (px)");
    eval->add_option("--lambda-min", config.lambda_min, "shortest Gabor wavelength (px)");
    eval->add_option("--lambda-max", config.lambda_max, "longest Gabor wavelength (px)");
    eval->add_option("--matchers", matchers, "comma list: periocular,iris");

    auto* synth = app.add_subcommand("synth", "emit a synthetic ground-truthed corpus");
    CorpusSpec spec;
    std::string synth_out = "corpus";
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--identities", spec.identities, "number of eye identities");
    synth->add_option("--samples", spec.samples_per_identity, "images per identity");
    synth->add_option("--width", spec.width, "image width");
    synth->add_option("--height", spec.height, "image height");
    synth->add_option("--noise", spec.noise_sigma, "additive Gaussian noise sigma");
    synth->add_option("--edge-min", spec.edge_width_min, "min edge transition width");
    synth->add_option("--edge-max", spec.edge_width_max, "max edge transition width");
    synth->add_option("--lash-count", spec.lash_count, "thin dark strokes per image");
    synth->add_option("--seed", spec.seed, "master seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*calibrate)
            return cmd_calibrate(opts, window_sigma);
        if (*detect)
            return cmd_detect(opts);
        if (*extract)
            return cmd_extract(opts, manual, grid_db, grid_mode == "dense", grid_rows,
                               grid_cols, grid_spacing, lmin, lmax, iris);
        if (*match)
            return cmd_match(opts, template_dir, iris);
        if (*eval) {
            config.dense_grid = grid_mode == "dense";
            config.match_periocular = matchers.find("periocular") != std::string::npos;
            config.match_iris = matchers.find("iris") != std::string::npos;
            return cmd_eval(opts, config);
        }
        if (*synth)
            return cmd_synth(spec, synth_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
