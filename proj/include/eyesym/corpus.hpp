#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "eyesym/evalfusion.hpp"
#include "eyesym/io.hpp"
#include "eyesym/manifest.hpp"
#include "eyesym/synth.hpp"

namespace eyesym {

/// Recipe for a deterministic synthetic verification corpus.
struct CorpusSpec {
    int identities = 30;
    int samples_per_identity = 6;
    int width = 96;
    int height = 96;
    double pupil_radius_min = 8.0;
    double pupil_radius_max = 13.0;
    double sclera_ratio_min = 2.3;  // sclera radius over pupil radius
    double sclera_ratio_max = 2.9;
    double edge_width_min = 4.0;
    double edge_width_max = 16.0;
    double center_jitter = 3.0;     // per-sample eye placement jitter, px
    double noise_sigma = 0.01;
    int lash_count = 0;             // thin dark strokes per image (0 = clean)
    std::uint32_t seed = 1;
};

struct CorpusImage {
    std::string identity;
    std::string name;
    int session = 1;
    GrayImage image;
    EyeAnnotation annotation;
};

/// Builds the corpus in memory. Each identity keeps one texture seed and base
/// geometry; samples jitter the placement and radii slightly and draw fresh
/// noise, so same-identity images differ the way repeated captures do.
inline std::vector<CorpusImage> build_corpus(const CorpusSpec& spec) {
    std::vector<CorpusImage> corpus;
    corpus.reserve(static_cast<std::size_t>(spec.identities) * spec.samples_per_identity);
    for (int ident = 0; ident < spec.identities; ++ident) {
        std::mt19937 rng(spec.seed * 7919u + static_cast<std::uint32_t>(ident));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const double pupil_r =
            spec.pupil_radius_min + (spec.pupil_radius_max - spec.pupil_radius_min) * uni(rng);
        const double sclera_r =
            pupil_r * (spec.sclera_ratio_min +
                       (spec.sclera_ratio_max - spec.sclera_ratio_min) * uni(rng));
        const double edge_w =
            spec.edge_width_min + (spec.edge_width_max - spec.edge_width_min) * uni(rng);
        const std::uint32_t texture_seed = spec.seed * 2654435761u + ident;

        char id_buf[16];
        std::snprintf(id_buf, sizeof id_buf, "id%03d", ident);
        for (int sample = 0; sample < spec.samples_per_identity; ++sample) {
            const double jx = (uni(rng) * 2.0 - 1.0) * spec.center_jitter;
            const double jy = (uni(rng) * 2.0 - 1.0) * spec.center_jitter;
            const double cx = 0.5 * (spec.width - 1) + jx;
            const double cy = 0.5 * (spec.height - 1) + jy;
            // The pupil sits near but not exactly at the sclera center.
            const double px = cx + (uni(rng) * 2.0 - 1.0) * 1.5;
            const double py = cy + (uni(rng) * 2.0 - 1.0) * 1.5;
            const double pr = pupil_r * (0.96 + 0.08 * uni(rng));

            SyntheticEye eye = gen_synthetic_eye(
                spec.width, spec.height, Circle{px, py, pr}, Circle{cx, cy, sclera_r},
                edge_w, texture_seed, spec.noise_sigma, static_cast<std::uint32_t>(sample));
            if (spec.lash_count > 0)
                overlay_lash_strokes(eye.image, eye.annotation.sclera,
                                     texture_seed + 17u * sample, spec.lash_count);

            char name_buf[32];
            std::snprintf(name_buf, sizeof name_buf, "%s_%02d.pgm", id_buf, sample);
            corpus.push_back(CorpusImage{id_buf, name_buf, 1, std::move(eye.image),
                                         eye.annotation});
        }
    }
    return corpus;
}

/// Manifest view of an in-memory corpus (paths are the image names).
inline DatasetManifest corpus_manifest(const std::vector<CorpusImage>& corpus) {
    DatasetManifest manifest;
    manifest.sensor = "synthetic";
    manifest.lighting = "none";
    std::map<std::string, std::size_t> index;
    for (const CorpusImage& img : corpus) {
        auto [it, inserted] = index.try_emplace(img.identity, manifest.identities.size());
        if (inserted)
            manifest.identities.push_back(Identity{img.identity, {}});
        manifest.identities[it->second].images.push_back(
            ImageRecord{img.name, img.session, img.annotation});
    }
    std::sort(manifest.identities.begin(), manifest.identities.end(),
              [](const Identity& a, const Identity& b) { return a.id < b.id; });
    return manifest;
}

/// Writes the corpus images (PGM) plus manifest.jsonl into a directory.
inline void emit_corpus(const CorpusSpec& spec, const std::string& directory) {
    const std::vector<CorpusImage> corpus = build_corpus(spec);
    std::filesystem::create_directories(directory);
    for (const CorpusImage& img : corpus)
        save_pgm(img.image, (std::filesystem::path(directory) / img.name).string());
    save_manifest(corpus_manifest(corpus),
                  (std::filesystem::path(directory) / "manifest.jsonl").string());
}

} // namespace eyesym
