#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "eyesym/evalfusion.hpp"

namespace eyesym {

namespace detail {

inline nlohmann::json circle_to_json(const Circle& c) {
    return nlohmann::json::array({c.cx, c.cy, c.r});
}

inline Circle circle_from_json(const nlohmann::json& j, int line, const char* name) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number())
        throw DataError("manifest line " + std::to_string(line) + ": malformed " + name +
                        " circle (expected [cx, cy, r])");
    return Circle{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

} // namespace detail

/// Writes a manifest as JSON Lines: a header record followed by one record
/// per image:
///   {"identity": ..., "session": 1, "image": "f.pgm",
///    "pupil": [cx,cy,r], "sclera": [cx,cy,r],
///    "eyelids": {"upper": [...], "lower": [...]}}
inline void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write manifest: " + path);
    nlohmann::json header{{"manifest", 1}};
    if (!manifest.sensor.empty()) header["sensor"] = manifest.sensor;
    if (!manifest.lighting.empty()) header["lighting"] = manifest.lighting;
    out << header.dump() << '\n';
    for (const Identity& ident : manifest.identities) {
        for (const ImageRecord& rec : ident.images) {
            nlohmann::json j{{"identity", ident.id},
                             {"session", rec.session},
                             {"image", rec.path},
                             {"pupil", detail::circle_to_json(rec.annotation.pupil)},
                             {"sclera", detail::circle_to_json(rec.annotation.sclera)}};
            if (rec.annotation.upper_eyelid || rec.annotation.lower_eyelid) {
                nlohmann::json lids = nlohmann::json::object();
                if (rec.annotation.upper_eyelid)
                    lids["upper"] = detail::circle_to_json(*rec.annotation.upper_eyelid);
                if (rec.annotation.lower_eyelid)
                    lids["lower"] = detail::circle_to_json(*rec.annotation.lower_eyelid);
                j["eyelids"] = lids;
            }
            out << j.dump() << '\n';
        }
    }
}

/// Loads a JSON-Lines manifest. Parse and schema problems are reported with
/// their line number; images missing pupil or sclera annotations are all
/// listed in one hard error. Identities come out sorted by id (deterministic
/// protocols); images stay in file order.
inline DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open manifest: " + path);

    DatasetManifest manifest;
    std::map<std::string, std::size_t> index;
    std::vector<std::string> missing;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError("manifest line " + std::to_string(line_no) + ": " + e.what());
        }
        if (j.contains("manifest")) {
            manifest.sensor = j.value("sensor", "");
            manifest.lighting = j.value("lighting", "");
            continue;
        }
        if (!j.contains("identity") || !j.contains("image"))
            throw DataError("manifest line " + std::to_string(line_no) +
                            ": record needs identity and image fields");
        const std::string image = j["image"].get<std::string>();
        if (!j.contains("pupil") || !j.contains("sclera")) {
            missing.push_back(image);
            continue;
        }
        ImageRecord rec;
        rec.path = image;
        rec.session = j.value("session", 1);
        if (rec.session != 1 && rec.session != 2)
            throw DataError("manifest line " + std::to_string(line_no) +
                            ": session must be 1 or 2");
        rec.annotation.pupil = detail::circle_from_json(j["pupil"], line_no, "pupil");
        rec.annotation.sclera = detail::circle_from_json(j["sclera"], line_no, "sclera");
        if (j.contains("eyelids")) {
            const auto& lids = j["eyelids"];
            if (lids.contains("upper"))
                rec.annotation.upper_eyelid = detail::circle_from_json(lids["upper"], line_no, "upper eyelid");
            if (lids.contains("lower"))
                rec.annotation.lower_eyelid = detail::circle_from_json(lids["lower"], line_no, "lower eyelid");
        }
        try {
            validate_annotation(rec.annotation);
        } catch (const DataError& e) {
            throw DataError("manifest line " + std::to_string(line_no) + ": " + e.what());
        }

        const std::string id = j["identity"].get<std::string>();
        auto [it, inserted] = index.try_emplace(id, manifest.identities.size());
        if (inserted)
            manifest.identities.push_back(Identity{id, {}});
        manifest.identities[it->second].images.push_back(std::move(rec));
    }
    if (!missing.empty()) {
        std::string msg = "images missing pupil/sclera annotation:";
        for (const std::string& m : missing) msg += " " + m;
        throw DataError(msg);
    }
    if (manifest.identities.empty())
        throw DataError("manifest contains no image records: " + path);
    std::sort(manifest.identities.begin(), manifest.identities.end(),
              [](const Identity& a, const Identity& b) { return a.id < b.id; });
    return manifest;
}

} // namespace eyesym
