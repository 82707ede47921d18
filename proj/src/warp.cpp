#include "cartonsynth/warp.hpp"

#include <algorithm>
#include <cmath>

#include "cartonsynth/errors.hpp"

namespace cartonsynth {

double Homography::determinant() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography Homography::inverse() const {
    const double det = determinant();
    if (std::abs(det) < 1e-12) throw DataError("homography is singular");
    Homography inv;
    inv.m = {(m[4] * m[8] - m[5] * m[7]) / det, (m[2] * m[7] - m[1] * m[8]) / det,
             (m[1] * m[5] - m[2] * m[4]) / det, (m[5] * m[6] - m[3] * m[8]) / det,
             (m[0] * m[8] - m[2] * m[6]) / det, (m[2] * m[3] - m[0] * m[5]) / det,
             (m[3] * m[7] - m[4] * m[6]) / det, (m[1] * m[6] - m[0] * m[7]) / det,
             (m[0] * m[4] - m[1] * m[3]) / det};
    // renormalize so the bottom-right entry is 1
    const double w = inv.m[8];
    if (std::abs(w) > 1e-12)
        for (auto& v : inv.m) v /= w;
    return inv;
}

namespace {

// Gaussian elimination with partial pivoting on an n x (n+1) augmented system.
void solve_linear(std::vector<double>& a, std::vector<double>& x, int n) {
    const int cols = n + 1;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * cols + col]) > std::abs(a[pivot * cols + col])) pivot = r;
        if (std::abs(a[pivot * cols + col]) < 1e-10)
            throw DataError("solve_homography: singular system (collinear points)");
        if (pivot != col)
            for (int c = 0; c < cols; ++c) std::swap(a[col * cols + c], a[pivot * cols + c]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r * cols + col] / a[col * cols + col];
            for (int c = col; c < cols; ++c) a[r * cols + c] -= f * a[col * cols + c];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = a[r * cols + n];
        for (int c = r + 1; c < n; ++c) s -= a[r * cols + c] * x[c];
        x[r] = s / a[r * cols + r];
    }
}

}  // namespace

Homography solve_homography(const std::array<Point2D, 4>& texture_quad,
                            const std::array<Point2D, 4>& contour_quad) {
    // Unknowns a00..a21 with a22 fixed to 1; two equations per correspondence
    // (contour -> texture).
    std::vector<double> aug(8 * 9, 0.0);
    for (int i = 0; i < 4; ++i) {
        const Point2D& s = contour_quad[i];
        const Point2D& d = texture_quad[i];
        double* r0 = aug.data() + (2 * i) * 9;
        double* r1 = aug.data() + (2 * i + 1) * 9;
        r0[0] = s.x; r0[1] = s.y; r0[2] = 1;
        r0[6] = -d.x * s.x; r0[7] = -d.x * s.y; r0[8] = d.x;
        r1[3] = s.x; r1[4] = s.y; r1[5] = 1;
        r1[6] = -d.y * s.x; r1[7] = -d.y * s.y; r1[8] = d.y;
    }
    std::vector<double> x;
    solve_linear(aug, x, 8);

    Homography h;
    for (int i = 0; i < 8; ++i) h.m[i] = x[i];
    h.m[8] = 1.0;
    if (std::abs(h.determinant()) < 1e-12)
        throw DataError("solve_homography: degenerate quad pair");
    return h;
}

Mask rasterize_quad_mask(const std::vector<Point2D>& polygon, int width, int height) {
    Mask mask(width, height);
    if (polygon.size() < 3) return mask;

    const BoundingBox box = tight_bounds(polygon);
    const int x0 = std::max(0, static_cast<int>(std::floor(box.min_x)));
    const int y0 = std::max(0, static_cast<int>(std::floor(box.min_y)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(box.max_x)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(box.max_y)));

    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (point_in_polygon({x + 0.5, y + 0.5}, polygon)) mask.at(x, y) = 1.0f;
    return mask;
}

namespace {

// Bilinear sample at continuous coordinates (texel centers at i+0.5), with
// border clamping.
void sample_bilinear(const Raster& img, double u, double v, std::uint8_t* out) {
    const double fx = std::clamp(u - 0.5, 0.0, static_cast<double>(img.width - 1));
    const double fy = std::clamp(v - 0.5, 0.0, static_cast<double>(img.height - 1));
    const int ix = std::min(static_cast<int>(fx), img.width - 2 >= 0 ? img.width - 2 : 0);
    const int iy = std::min(static_cast<int>(fy), img.height - 2 >= 0 ? img.height - 2 : 0);
    const double tx = fx - ix;
    const double ty = fy - iy;
    const int ix1 = std::min(ix + 1, img.width - 1);
    const int iy1 = std::min(iy + 1, img.height - 1);

    const std::uint8_t* p00 = img.pixel(ix, iy);
    const std::uint8_t* p10 = img.pixel(ix1, iy);
    const std::uint8_t* p01 = img.pixel(ix, iy1);
    const std::uint8_t* p11 = img.pixel(ix1, iy1);
    for (int c = 0; c < 3; ++c) {
        const double v0 = p00[c] * (1 - tx) + p10[c] * tx;
        const double v1 = p01[c] * (1 - tx) + p11[c] * tx;
        out[c] = static_cast<std::uint8_t>(std::lround(std::clamp(v0 * (1 - ty) + v1 * ty, 0.0, 255.0)));
    }
}

}  // namespace

Raster warp_texture(const Raster& texture, const Homography& m, const Mask& target_mask) {
    Raster out(target_mask.width, target_mask.height);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
            if (target_mask.at(x, y) <= 0.0f) continue;
            const Point2D src = m.apply({x + 0.5, y + 0.5});
            sample_bilinear(texture, src.x, src.y, out.pixel(x, y));
        }
    return out;
}

Mask gaussian_alpha(const Mask& mask, double sigma) {
    if (sigma < 0) throw ConfigError("gaussian_alpha: sigma must be >= 0");
    if (sigma == 0.0) return mask;

    const int half = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * half + 1);
    double sum = 0.0;
    for (int i = -half; i <= half; ++i) {
        kernel[i + half] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + half];
    }
    for (auto& k : kernel) k /= sum;

    const int w = mask.width, h = mask.height;
    Mask tmp(w, h), out(w, h);
    // horizontal pass, replicate border
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -half; i <= half; ++i)
                acc += kernel[i + half] * mask.at(std::clamp(x + i, 0, w - 1), y);
            tmp.at(x, y) = static_cast<float>(acc);
        }
    // vertical pass
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -half; i <= half; ++i)
                acc += kernel[i + half] * tmp.at(x, std::clamp(y + i, 0, h - 1));
            out.at(x, y) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
        }
    return out;
}

Raster compose(const Raster& source, const std::vector<Layer>& layers) {
    Raster out = source;
    for (const auto& layer : layers) {
        if (layer.warped.width != out.width || layer.warped.height != out.height ||
            layer.alpha.width != out.width || layer.alpha.height != out.height)
            throw DataError("compose: layer dimensions do not match the source");
        for (int y = 0; y < out.height; ++y)
            for (int x = 0; x < out.width; ++x) {
                const float a = layer.alpha.at(x, y);
                if (a <= 0.0f) continue;
                std::uint8_t* o = out.pixel(x, y);
                const std::uint8_t* wp = layer.warped.pixel(x, y);
                if (a >= 1.0f) {
                    o[0] = wp[0]; o[1] = wp[1]; o[2] = wp[2];
                } else {
                    for (int c = 0; c < 3; ++c)
                        o[c] = static_cast<std::uint8_t>(
                            std::lround(a * wp[c] + (1.0 - a) * o[c]));
                }
            }
    }
    return out;
}

}  // namespace cartonsynth
