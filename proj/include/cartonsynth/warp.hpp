#pragma once

#include <array>
#include <vector>

#include "cartonsynth/geometry.hpp"
#include "cartonsynth/raster.hpp"

namespace cartonsynth {

// 3x3 projective transform, row-major, normalized so m[8] == 1.
struct Homography {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    Point2D apply(const Point2D& p) const {
        const double w = m[6] * p.x + m[7] * p.y + m[8];
        return {(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
    }
    Homography inverse() const;
    double determinant() const;
};

// Solves the 4-correspondence system mapping contour_quad (background) to
// texture_quad, vertex i to vertex i. Throws DataError when the system is
// singular (three collinear points).
Homography solve_homography(const std::array<Point2D, 4>& texture_quad,
                            const std::array<Point2D, 4>& contour_quad);

// Binary mask: 1 where the pixel center falls inside the polygon (even-odd),
// clipped to the image bounds.
Mask rasterize_quad_mask(const std::vector<Point2D>& polygon, int width, int height);

// Inverse-samples the texture at M * destination pixel center with bilinear
// interpolation and border clamping; pixels with zero mask stay black.
Raster warp_texture(const Raster& texture, const Homography& m, const Mask& target_mask);

// Normalized Gaussian blur, kernel half-width ceil(3*sigma), replicate
// border. sigma == 0 returns the input unchanged.
Mask gaussian_alpha(const Mask& mask, double sigma);

struct Layer {
    Raster warped;
    Mask alpha;
};

// out = alpha*warped + (1-alpha)*out, folded over the layers in order.
// Pixels where every alpha is 0 stay bit-identical to the source.
Raster compose(const Raster& source, const std::vector<Layer>& layers);

}  // namespace cartonsynth
