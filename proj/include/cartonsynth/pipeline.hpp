#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cartonsynth/annotation.hpp"
#include "cartonsynth/raster.hpp"
#include "cartonsynth/reconstruction.hpp"
#include "cartonsynth/rng.hpp"
#include "cartonsynth/texture.hpp"
#include "cartonsynth/warp.hpp"

namespace cartonsynth {

struct SynthesisConfig {
    double psi = 25.0;
    double gamma = 2.0 / 3.0;
    double noise_prob = 0.2;
    double fusion_sigma = 2.0;
    int count = 1;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool strict = false;
    std::string skeleton_dir;
    std::string texture_manifest;
    std::string output_dir;

    void validate() const;  // throws ConfigError
};

SynthesisConfig load_config_file(const std::string& path);
void apply_config_json(SynthesisConfig& cfg, const std::string& bytes);

struct InstanceAnnotation {
    int instance_id = 0;
    Occlusion occlusion = Occlusion::All;
    BoundingBox box;                                // tight bounds of the original points
    std::vector<std::vector<Point2D>> surfaces;     // polygons actually textured
};

struct OutputAnnotation {
    std::string image_file;
    std::vector<InstanceAnnotation> instances;
};

struct SurfaceProvenance {
    int surface_index = 0;
    Homography homography;
};

struct InstanceProvenance {
    int instance_id = 0;
    std::optional<int> texture_patch_id;  // nullopt means noise (or failure)
    bool noise = false;
    std::vector<SurfaceProvenance> surfaces;
    std::string error;  // non-empty when the instance was skipped
};

struct ImageProvenance {
    int image_index = 0;
    std::string skeleton_image;
    std::uint64_t sub_seed = 0;
    std::vector<InstanceProvenance> instances;
};

struct SynthesisResult {
    Raster image;
    OutputAnnotation annotation;
    ImageProvenance provenance;
};

// Synthesizes one image: segment, reconstruct, texture (noise with
// probability noise_prob), warp into each surface's visible polygon, fuse and
// compose. Per-instance failures are recorded and skipped, never fatal.
SynthesisResult synthesize_image(const SkeletonRecord& record, const Raster& source,
                                 const TextureLibrary& lib, const SynthesisConfig& cfg,
                                 RandomStream& rng);

// Batch driver: samples skeletons uniformly with replacement, derives one
// stream per output image from cfg.seed, writes PNGs plus one annotations
// JSON and one provenance JSON. Byte-identical re-runs for identical config,
// regardless of cfg.jobs.
std::vector<ImageProvenance> run_generation(const SynthesisConfig& cfg);

struct OverlayResult {
    Raster segmentation;    // loops colored in discovery order
    Raster reconstruction;  // reconstructed quads
};

OverlayResult render_overlays(const SkeletonRecord& record, const Raster& source,
                              const SynthesisConfig& cfg);

std::string serialize_annotations(const std::vector<OutputAnnotation>& annotations);
std::string serialize_provenance(const std::vector<ImageProvenance>& manifest);

}  // namespace cartonsynth
