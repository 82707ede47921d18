#include "cartonsynth/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "cartonsynth/errors.hpp"
#include "cartonsynth/segmentation.hpp"

namespace cartonsynth {

namespace fs = std::filesystem;
using nlohmann::json;

void SynthesisConfig::validate() const {
    if (noise_prob < 0.0 || noise_prob > 1.0) throw ConfigError("noise_prob must be in [0, 1]");
    if (gamma <= 0.0 || gamma > 1.0) throw ConfigError("gamma must be in (0, 1]");
    if (psi <= 0.0) throw ConfigError("psi must be positive");
    if (fusion_sigma < 0.0) throw ConfigError("sigma must be >= 0");
    if (count < 1) throw ConfigError("count must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

void apply_config_json(SynthesisConfig& cfg, const std::string& bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (doc.contains("psi")) cfg.psi = doc["psi"].get<double>();
    if (doc.contains("gamma")) cfg.gamma = doc["gamma"].get<double>();
    if (doc.contains("noise_prob")) cfg.noise_prob = doc["noise_prob"].get<double>();
    if (doc.contains("fusion_sigma")) cfg.fusion_sigma = doc["fusion_sigma"].get<double>();
    if (doc.contains("count")) cfg.count = doc["count"].get<int>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("jobs")) cfg.jobs = doc["jobs"].get<int>();
    if (doc.contains("strict")) cfg.strict = doc["strict"].get<bool>();
    if (doc.contains("skeleton_dir")) cfg.skeleton_dir = doc["skeleton_dir"].get<std::string>();
    if (doc.contains("texture_manifest")) cfg.texture_manifest = doc["texture_manifest"].get<std::string>();
    if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
}

SynthesisConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    SynthesisConfig cfg;
    apply_config_json(cfg, ss.str());
    return cfg;
}

namespace {

// Process-wide texture image cache; loads are idempotent so a race only
// costs a duplicate decode.
class RasterCache {
  public:
    const Raster& get(const std::string& path) {
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(path); it != cache_.end()) return *it->second;
        }
        auto img = std::make_unique<Raster>(read_png(path));
        std::lock_guard lock(mutex_);
        auto [it, inserted] = cache_.try_emplace(path, std::move(img));
        return *it->second;
    }

  private:
    std::mutex mutex_;
    std::map<std::string, std::unique_ptr<Raster>> cache_;
};

RasterCache& texture_cache() {
    static RasterCache cache;
    return cache;
}

// Warp geometry needs a quad even when the kept contour has more points; in
// that case the minimum-area parallelogram over the contour stands in, while
// the visible mask stays the original polygon.
std::array<Point2D, 4> warp_quad(const ReconstructedSurface& rec) {
    if (rec.contour.size() == 4)
        return {rec.contour[0], rec.contour[1], rec.contour[2], rec.contour[3]};
    const auto para = reconstruct_single(rec.contour, Occlusion::Occlusion, 0.0);
    return {para.contour[0], para.contour[1], para.contour[2], para.contour[3]};
}

Mask clipped_alpha(const Mask& mask, double sigma) {
    if (sigma == 0.0) return mask;

    // blur only a band around the mask support; elsewhere alpha is 0 anyway
    int x0 = mask.width, y0 = mask.height, x1 = -1, y1 = -1;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y) > 0.0f) {
                x0 = std::min(x0, x); x1 = std::max(x1, x);
                y0 = std::min(y0, y); y1 = std::max(y1, y);
            }
    Mask alpha(mask.width, mask.height);
    if (x1 < 0) return alpha;

    const int margin = static_cast<int>(std::ceil(3.0 * sigma)) + 1;
    x0 = std::max(0, x0 - margin); y0 = std::max(0, y0 - margin);
    x1 = std::min(mask.width - 1, x1 + margin); y1 = std::min(mask.height - 1, y1 + margin);

    Mask crop(x1 - x0 + 1, y1 - y0 + 1);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) crop.at(x - x0, y - y0) = mask.at(x, y);
    const Mask blurred = gaussian_alpha(crop, sigma);

    // keep the blend strictly inside the visible polygon so untouched pixels
    // stay bit-identical to the source
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (mask.at(x, y) > 0.0f) alpha.at(x, y) = blurred.at(x - x0, y - y0);
    return alpha;
}

Raster place_noise(const Raster& noise, const Mask& mask, int x0, int y0) {
    Raster out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (mask.at(x, y) <= 0.0f) continue;
            const int nx = std::clamp(x - x0, 0, noise.width - 1);
            const int ny = std::clamp(y - y0, 0, noise.height - 1);
            const std::uint8_t* src = noise.pixel(nx, ny);
            std::uint8_t* dst = out.pixel(x, y);
            dst[0] = src[0]; dst[1] = src[1]; dst[2] = src[2];
        }
    return out;
}

}  // namespace

SynthesisResult synthesize_image(const SkeletonRecord& record, const Raster& source,
                                 const TextureLibrary& lib, const SynthesisConfig& cfg,
                                 RandomStream& rng) {
    SynthesisResult result;
    result.provenance.skeleton_image = record.image_path;
    result.annotation.image_file = record.image_path;

    std::vector<Layer> layers;
    for (std::size_t ii = 0; ii < record.instances.size(); ++ii) {
        const LabeledInstance& inst = record.instances[ii];
        RandomStream inst_rng = rng.derive(ii);

        InstanceProvenance prov;
        prov.instance_id = inst.id;
        InstanceAnnotation anno;
        anno.instance_id = inst.id;
        anno.occlusion = inst.occlusion;
        anno.box = tight_bounds(inst.points);

        try {
            const Segmentation seg = extract_surfaces(inst, cfg.psi);
            const auto recs = reconstruct_instance(seg, inst.occlusion, cfg.gamma);
            const int surface_count = static_cast<int>(seg.surfaces.loops.size());

            std::vector<std::vector<Point2D>> visible;
            for (const auto& loop : seg.surfaces.loops)
                visible.push_back(loop_polygon(seg.clusters, loop));

            const bool use_noise = inst_rng.next_double() < cfg.noise_prob;
            if (use_noise) {
                // one noise texture per instance, pinned to the instance box
                const BoundingBox box = tight_bounds(inst.points);
                const int x0 = static_cast<int>(std::floor(box.min_x));
                const int y0 = static_cast<int>(std::floor(box.min_y));
                const int nw = std::max(1, static_cast<int>(std::ceil(box.max_x)) - x0);
                const int nh = std::max(1, static_cast<int>(std::ceil(box.max_y)) - y0);
                const Raster noise = make_noise_patch(nw, nh, inst_rng);

                Mask mask(source.width, source.height);
                for (const auto& poly : visible) {
                    const Mask m = rasterize_quad_mask(poly, source.width, source.height);
                    for (std::size_t i = 0; i < mask.data.size(); ++i)
                        mask.data[i] = std::max(mask.data[i], m.data[i]);
                }
                layers.push_back({place_noise(noise, mask, x0, y0), clipped_alpha(mask, cfg.fusion_sigma)});
                prov.noise = true;
            } else {
                const TexturePatch& patch = sample_patch(lib, surface_count, inst_rng);
                const Raster& texture = texture_cache().get(patch.image_path);
                prov.texture_patch_id = patch.id;
                for (int k = 0; k < surface_count; ++k) {
                    const Homography h = solve_homography(patch.surface_quads[k], warp_quad(recs[k]));
                    const Mask mask = rasterize_quad_mask(visible[k], source.width, source.height);
                    layers.push_back({warp_texture(texture, h, mask), clipped_alpha(mask, cfg.fusion_sigma)});
                    prov.surfaces.push_back({k, h});
                }
            }
            anno.surfaces = std::move(visible);
        } catch (const DataError& e) {
            // skip-and-log: the instance keeps its original texture
            prov.error = e.what();
        }
        result.annotation.instances.push_back(std::move(anno));
        result.provenance.instances.push_back(std::move(prov));
    }

    result.image = compose(source, layers);
    return result;
}

namespace {

std::vector<SkeletonRecord> load_skeleton_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("skeleton dir " + dir + " does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<SkeletonRecord> records;
    for (const auto& file : files) {
        auto recs = load_skeleton_file(file.string());
        for (auto& rec : recs) {
            // image paths are relative to the skeleton dir
            fs::path img(rec.image_path);
            if (img.is_relative()) rec.image_path = (fs::path(dir) / img).string();
            records.push_back(std::move(rec));
        }
    }
    if (records.empty()) throw ConfigError("skeleton dir " + dir + " holds no records");
    return records;
}

}  // namespace

std::vector<ImageProvenance> run_generation(const SynthesisConfig& cfg) {
    cfg.validate();
    if (cfg.output_dir.empty()) throw ConfigError("output dir is required");

    const std::vector<SkeletonRecord> records = load_skeleton_dir(cfg.skeleton_dir);
    const TextureLibrary lib = cfg.texture_manifest.empty()
                                   ? TextureLibrary{}
                                   : load_texture_manifest_file(cfg.texture_manifest);

    // Startup check: every surface count we will have to texture must have a
    // non-empty subset (unless noise replaces everything).
    std::set<int> needed_counts;
    for (const auto& rec : records)
        for (const auto& inst : rec.instances) {
            try {
                needed_counts.insert(static_cast<int>(
                    extract_surfaces(inst, cfg.psi).surfaces.loops.size()));
            } catch (const DataError&) {
                // a bad instance degrades at synthesis time, not at startup
            }
        }
    if (cfg.noise_prob < 1.0)
        for (int count : needed_counts)
            if (lib.subset(count).empty())
                throw ConfigError("texture subset for surface count " + std::to_string(count) +
                                  " is empty");

    fs::create_directories(cfg.output_dir);

    std::vector<Raster> sources;
    sources.reserve(records.size());
    for (const auto& rec : records) sources.push_back(read_png(rec.image_path));

    std::vector<SynthesisResult> results(cfg.count);
    std::atomic<int> next_index{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const int i = next_index.fetch_add(1);
            if (i >= cfg.count || failed.load()) return;
            try {
                const std::uint64_t sub_seed =
                    RandomStream::derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
                RandomStream img_rng(sub_seed);
                const std::size_t rec_idx = img_rng.next_below(records.size());

                SynthesisResult res =
                    synthesize_image(records[rec_idx], sources[rec_idx], lib, cfg, img_rng);
                res.provenance.image_index = i;
                res.provenance.sub_seed = sub_seed;

                char name[32];
                std::snprintf(name, sizeof name, "synth_%06d.png", i);
                res.annotation.image_file = name;
                write_png((fs::path(cfg.output_dir) / name).string(), res.image);
                results[i] = std::move(res);
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_mutex);
                failure = e.what();
                failed.store(true);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    const int threads = std::min(cfg.jobs, cfg.count);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) throw DataError("generation failed: " + failure);

    std::vector<OutputAnnotation> annotations;
    std::vector<ImageProvenance> manifest;
    for (auto& res : results) {
        annotations.push_back(std::move(res.annotation));
        manifest.push_back(std::move(res.provenance));
    }

    std::ofstream anno_out(fs::path(cfg.output_dir) / "annotations.json", std::ios::binary);
    anno_out << serialize_annotations(annotations);
    std::ofstream prov_out(fs::path(cfg.output_dir) / "provenance.json", std::ios::binary);
    prov_out << serialize_provenance(manifest);
    return manifest;
}

OverlayResult render_overlays(const SkeletonRecord& record, const Raster& source,
                              const SynthesisConfig& cfg) {
    OverlayResult out{source, source};
    for (const auto& inst : record.instances) {
        try {
            const Segmentation seg = extract_surfaces(inst, cfg.psi);
            for (std::size_t li = 0; li < seg.surfaces.loops.size(); ++li) {
                const auto poly = loop_polygon(seg.clusters, seg.surfaces.loops[li]);
                draw_polygon(out.segmentation, poly, loop_color(static_cast<int>(li)));
            }
            const auto recs = reconstruct_instance(seg, inst.occlusion, cfg.gamma);
            for (std::size_t li = 0; li < recs.size(); ++li)
                draw_polygon(out.reconstruction, recs[li].contour, loop_color(static_cast<int>(li)));
        } catch (const DataError&) {
            // overlays are diagnostics; unrecoverable instances stay undrawn
        }
    }
    return out;
}

namespace {

json point_json(const Point2D& p) { return json::array({p.x, p.y}); }

json polygon_json(const std::vector<Point2D>& poly) {
    json arr = json::array();
    for (const auto& p : poly) arr.push_back(point_json(p));
    return arr;
}

}  // namespace

std::string serialize_annotations(const std::vector<OutputAnnotation>& annotations) {
    json arr = json::array();
    for (const auto& anno : annotations) {
        json instances = json::array();
        for (const auto& inst : anno.instances) {
            json surfaces = json::array();
            for (const auto& poly : inst.surfaces) surfaces.push_back(polygon_json(poly));
            instances.push_back({{"id", inst.instance_id},
                                 {"occlusion", to_string(inst.occlusion)},
                                 {"bbox", {inst.box.min_x, inst.box.min_y, inst.box.max_x, inst.box.max_y}},
                                 {"surfaces", surfaces}});
        }
        arr.push_back({{"image", anno.image_file}, {"instances", instances}});
    }
    return json{{"annotations", arr}}.dump(2);
}

std::string serialize_provenance(const std::vector<ImageProvenance>& manifest) {
    json arr = json::array();
    for (const auto& img : manifest) {
        json instances = json::array();
        for (const auto& inst : img.instances) {
            json surfaces = json::array();
            for (const auto& s : inst.surfaces) {
                json hom = json::array();
                for (double v : s.homography.m) hom.push_back(v);
                surfaces.push_back({{"surface", s.surface_index}, {"homography", hom}});
            }
            json ji = {{"id", inst.instance_id}, {"surfaces", surfaces}};
            if (!inst.error.empty())
                ji["error"] = inst.error;
            else
                ji["texture"] = inst.noise ? json("noise") : json(*inst.texture_patch_id);
            instances.push_back(std::move(ji));
        }
        arr.push_back({{"image_index", img.image_index},
                       {"skeleton", img.skeleton_image},
                       {"sub_seed", img.sub_seed},
                       {"instances", instances}});
    }
    return json{{"images", arr}}.dump(2);
}

}  // namespace cartonsynth
