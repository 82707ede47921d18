#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "cartonsynth/geometry.hpp"
#include "cartonsynth/raster.hpp"
#include "cartonsynth/rng.hpp"

namespace cartonsynth {

// A pre-cropped foreground texture with one quad per visible surface.
// Quad ordering follows the common-line-first convention:
//   count 2: each quad starts with the shared edge (v0->v1), opposite
//            directions on the two quads;
//   count 3: every quad starts at the shared corner vertex (v0).
struct TexturePatch {
    int id = 0;
    std::string image_path;
    int surface_count = 1;
    std::vector<std::array<Point2D, 4>> surface_quads;
};

struct TextureLibrary {
    std::map<int, std::vector<TexturePatch>> subsets;  // surface_count -> patches

    const std::vector<TexturePatch>& subset(int surface_count) const;
    bool empty() const;
};

// Parses the texture manifest JSON and checks every patch invariant (quad
// count, non-degeneracy, shared-edge convention). Throws DataError naming the
// offending patch id.
TextureLibrary load_texture_manifest(const std::string& bytes);

// Also verifies that each referenced image file exists.
TextureLibrary load_texture_manifest_file(const std::string& path);

std::string serialize_texture_manifest(const TextureLibrary& lib);

// Uniform over the requested subset; throws DataError when it is empty.
const TexturePatch& sample_patch(const TextureLibrary& lib, int surface_count, RandomStream& rng);

// Per-pixel iid uniform noise over the full 8-bit range.
Raster make_noise_patch(int width, int height, RandomStream& rng);

}  // namespace cartonsynth
