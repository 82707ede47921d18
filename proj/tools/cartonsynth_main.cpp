#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "cartonsynth/errors.hpp"
#include "cartonsynth/pipeline.hpp"
#include "cartonsynth/segmentation.hpp"

namespace fs = std::filesystem;
using namespace cartonsynth;

namespace {

struct CliOptions {
    SynthesisConfig cfg;
    std::string config_path;
};

// --config values load first; explicit flags override them.
void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--psi", opt.cfg.psi, "faceted-point merge distance (px)");
    cmd->add_option("--gamma", opt.cfg.gamma, "original-contour area-ratio gate");
    cmd->add_option("--noise-prob", opt.cfg.noise_prob, "per-instance noise texture probability");
    cmd->add_option("--sigma", opt.cfg.fusion_sigma, "Gaussian fusion sigma (px)");
    cmd->add_option("--count", opt.cfg.count, "images to generate");
    cmd->add_option("--seed", opt.cfg.seed, "master RNG seed");
    cmd->add_option("--skeletons", opt.cfg.skeleton_dir, "skeleton annotation directory");
    cmd->add_option("--textures", opt.cfg.texture_manifest, "texture manifest JSON");
    cmd->add_option("--out", opt.cfg.output_dir, "output directory");
    cmd->add_option("--jobs", opt.cfg.jobs, "worker threads");
    cmd->add_flag("--strict", opt.cfg.strict, "promote validation violations to errors");
}

void finalize_config(CLI::App* cmd, CliOptions& opt) {
    if (opt.config_path.empty()) return;
    SynthesisConfig from_file = load_config_file(opt.config_path);
    // keep any value given explicitly on the command line
    const SynthesisConfig flags = opt.cfg;
    opt.cfg = from_file;
    if (cmd->count("--psi")) opt.cfg.psi = flags.psi;
    if (cmd->count("--gamma")) opt.cfg.gamma = flags.gamma;
    if (cmd->count("--noise-prob")) opt.cfg.noise_prob = flags.noise_prob;
    if (cmd->count("--sigma")) opt.cfg.fusion_sigma = flags.fusion_sigma;
    if (cmd->count("--count")) opt.cfg.count = flags.count;
    if (cmd->count("--seed")) opt.cfg.seed = flags.seed;
    if (cmd->count("--skeletons")) opt.cfg.skeleton_dir = flags.skeleton_dir;
    if (cmd->count("--textures")) opt.cfg.texture_manifest = flags.texture_manifest;
    if (cmd->count("--out")) opt.cfg.output_dir = flags.output_dir;
    if (cmd->count("--jobs")) opt.cfg.jobs = flags.jobs;
    if (cmd->count("--strict")) opt.cfg.strict = flags.strict;
}

std::vector<fs::path> skeleton_files(const std::string& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("skeleton dir " + dir + " does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no skeleton files in " + dir);
    return files;
}

int run_validate(const CliOptions& opt) {
    bool any_violation = false;
    for (const auto& file : skeleton_files(opt.cfg.skeleton_dir)) {
        for (const auto& rec : load_skeleton_file(file.string())) {
            for (const auto& inst : rec.instances) {
                const ValidationReport report = validate_instance(inst, opt.cfg.psi);
                if (report.ok()) {
                    std::cout << file.filename().string() << " instance " << inst.id << ": ok\n";
                } else {
                    any_violation = true;
                    for (const auto& v : report.violations)
                        std::cout << file.filename().string() << " instance " << inst.id << ": "
                                  << v.rule << " " << v.message << "\n";
                }
            }
        }
    }
    if (any_violation && opt.cfg.strict) return 2;
    return 0;
}

Raster load_record_image(const SkeletonRecord& rec, const fs::path& skeleton_file) {
    fs::path img(rec.image_path);
    if (img.is_relative()) img = skeleton_file.parent_path() / img;
    return read_png(img.string());
}

int run_stage_overlays(const CliOptions& opt, bool segmentation, bool reconstruction) {
    if (opt.cfg.output_dir.empty()) throw ConfigError("--out is required");
    fs::create_directories(opt.cfg.output_dir);
    for (const auto& file : skeleton_files(opt.cfg.skeleton_dir)) {
        int rec_idx = 0;
        for (const auto& rec : load_skeleton_file(file.string())) {
            const Raster source = load_record_image(rec, file);
            const OverlayResult overlays = render_overlays(rec, source, opt.cfg);
            const std::string stem =
                file.stem().string() + (rec_idx ? "_" + std::to_string(rec_idx) : "");

            if (segmentation)
                write_png((fs::path(opt.cfg.output_dir) / (stem + "_segment.png")).string(),
                          overlays.segmentation);
            if (reconstruction)
                write_png((fs::path(opt.cfg.output_dir) / (stem + "_reconstruct.png")).string(),
                          overlays.reconstruction);

            // JSON sidecar with loops / quads per instance
            nlohmann::json sidecar = nlohmann::json::array();
            for (const auto& inst : rec.instances) {
                nlohmann::json ji{{"id", inst.id}};
                try {
                    const Segmentation seg = extract_surfaces(inst, opt.cfg.psi);
                    ji["loops"] = seg.surfaces.loops;
                    nlohmann::json lines = nlohmann::json::array();
                    for (const auto& cl : seg.surfaces.common_lines)
                        lines.push_back({cl.first, cl.second});
                    ji["common_lines"] = lines;
                    if (reconstruction) {
                        nlohmann::json quads = nlohmann::json::array();
                        for (const auto& r : reconstruct_instance(seg, inst.occlusion, opt.cfg.gamma)) {
                            nlohmann::json q = nlohmann::json::array();
                            for (const auto& p : r.contour) q.push_back({p.x, p.y});
                            quads.push_back({{"surface", r.surface_index},
                                             {"source", r.source == ContourSource::Original
                                                            ? "original"
                                                            : "parallelogram"},
                                             {"contour", q}});
                        }
                        ji["quads"] = quads;
                    }
                } catch (const DataError& e) {
                    ji["error"] = e.what();
                    if (opt.cfg.strict) throw;
                }
                sidecar.push_back(std::move(ji));
            }
            std::ofstream out(fs::path(opt.cfg.output_dir) / (stem + ".json"), std::ios::binary);
            out << sidecar.dump(2);
            ++rec_idx;
        }
    }
    return 0;
}

int run_synth(const CliOptions& opt) {
    const auto manifest = run_generation(opt.cfg);
    std::cout << "generated " << manifest.size() << " images in " << opt.cfg.output_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"carton dataset synthesis by foreground texture replacement"};
    app.require_subcommand(1);

    CliOptions opt;
    CLI::App* validate = app.add_subcommand("validate", "check labeling rules");
    CLI::App* segment = app.add_subcommand("segment", "surface segmentation overlays + sidecars");
    CLI::App* reconstruct = app.add_subcommand("reconstruct", "contour reconstruction overlays + sidecars");
    CLI::App* synth = app.add_subcommand("synth", "generate synthesized images");
    CLI::App* overlay = app.add_subcommand("overlay", "all debug overlays");
    for (auto* cmd : {validate, segment, reconstruct, synth, overlay}) add_common_flags(cmd, opt);

    CLI11_PARSE(app, argc, argv);
    CLI::App* cmd = app.get_subcommands().front();

    try {
        finalize_config(cmd, opt);
        if (cmd == validate) return run_validate(opt);
        if (cmd == segment) return run_stage_overlays(opt, true, false);
        if (cmd == reconstruct) return run_stage_overlays(opt, false, true);
        if (cmd == overlay) return run_stage_overlays(opt, true, true);
        return run_synth(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
