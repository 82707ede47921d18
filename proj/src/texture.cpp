#include "cartonsynth/texture.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cartonsynth/errors.hpp"

namespace cartonsynth {

using nlohmann::json;

const std::vector<TexturePatch>& TextureLibrary::subset(int surface_count) const {
    static const std::vector<TexturePatch> kEmpty;
    const auto it = subsets.find(surface_count);
    return it == subsets.end() ? kEmpty : it->second;
}

bool TextureLibrary::empty() const {
    for (const auto& [count, patches] : subsets)
        if (!patches.empty()) return false;
    return true;
}

namespace {

constexpr double kEdgeTol = 1e-6;

bool same_point(const Point2D& a, const Point2D& b) { return distance(a, b) <= kEdgeTol; }

bool same_segment(const Point2D& a0, const Point2D& a1, const Point2D& b0, const Point2D& b1) {
    return (same_point(a0, b0) && same_point(a1, b1)) || (same_point(a0, b1) && same_point(a1, b0));
}

void check_patch(const TexturePatch& patch) {
    const std::string who = "texture patch " + std::to_string(patch.id);
    if (patch.surface_count < 1 || patch.surface_count > 3)
        throw DataError(who + ": surface_count must be 1, 2 or 3");
    if (static_cast<int>(patch.surface_quads.size()) != patch.surface_count)
        throw DataError(who + ": declares " + std::to_string(patch.surface_count) +
                        " surfaces but has " + std::to_string(patch.surface_quads.size()) + " quads");
    for (const auto& quad : patch.surface_quads)
        if (polygon_area(quad) <= 0.0) throw DataError(who + ": degenerate quad");

    // combination contract: quads start at the shared feature.
    if (patch.surface_count == 2) {
        const auto& a = patch.surface_quads[0];
        const auto& b = patch.surface_quads[1];
        if (!same_segment(a[0], a[1], b[0], b[1]))
            throw DataError(who + ": two-surface quads must share their first edge");
    } else if (patch.surface_count == 3) {
        const Point2D& c = patch.surface_quads[0][0];
        for (int q = 1; q < 3; ++q)
            if (!same_point(c, patch.surface_quads[q][0]))
                throw DataError(who + ": three-surface quads must share their first vertex");
    }
}

}  // namespace

TextureLibrary load_texture_manifest(const std::string& bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }

    TextureLibrary lib;
    lib.subsets[1];
    lib.subsets[2];
    lib.subsets[3];
    try {
        for (const auto& jp : doc.at("patches")) {
            TexturePatch patch;
            patch.id = jp.at("id").get<int>();
            patch.image_path = jp.at("image").get<std::string>();
            patch.surface_count = jp.at("surface_count").get<int>();
            for (const auto& jq : jp.at("surface_quads")) {
                if (!jq.is_array() || jq.size() != 4)
                    throw DataError("texture patch " + std::to_string(patch.id) +
                                    ": quad must have 4 points");
                std::array<Point2D, 4> quad;
                for (int k = 0; k < 4; ++k) quad[k] = {jq[k][0].get<double>(), jq[k][1].get<double>()};
                patch.surface_quads.push_back(quad);
            }
            check_patch(patch);
            lib.subsets[patch.surface_count].push_back(std::move(patch));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("texture manifest: ") + e.what());
    }
    return lib;
}

TextureLibrary load_texture_manifest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open texture manifest " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    TextureLibrary lib = load_texture_manifest(ss.str());

    const auto base = std::filesystem::path(path).parent_path();
    for (auto& [count, patches] : lib.subsets)
        for (auto& patch : patches) {
            std::filesystem::path img(patch.image_path);
            if (img.is_relative()) img = base / img;
            if (!std::filesystem::exists(img))
                throw DataError("texture patch " + std::to_string(patch.id) +
                                ": missing image file " + img.string());
            patch.image_path = img.string();
        }
    return lib;
}

std::string serialize_texture_manifest(const TextureLibrary& lib) {
    json patches = json::array();
    for (const auto& [count, subset] : lib.subsets)
        for (const auto& patch : subset) {
            json quads = json::array();
            for (const auto& quad : patch.surface_quads) {
                json jq = json::array();
                for (const auto& p : quad) jq.push_back({p.x, p.y});
                quads.push_back(jq);
            }
            patches.push_back({{"id", patch.id},
                               {"image", patch.image_path},
                               {"surface_count", patch.surface_count},
                               {"surface_quads", quads}});
        }
    return json{{"patches", patches}}.dump(2);
}

const TexturePatch& sample_patch(const TextureLibrary& lib, int surface_count, RandomStream& rng) {
    const auto& subset = lib.subset(surface_count);
    if (subset.empty())
        throw DataError("no texture patches with surface_count " + std::to_string(surface_count));
    return subset[rng.next_below(subset.size())];
}

Raster make_noise_patch(int width, int height, RandomStream& rng) {
    if (width < 1 || height < 1) throw ConfigError("make_noise_patch: non-positive size");
    Raster img(width, height);
    for (auto& byte : img.data) byte = static_cast<std::uint8_t>(rng.next_below(256));
    return img;
}

}  // namespace cartonsynth
