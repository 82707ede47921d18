#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cartonsynth/geometry.hpp"

namespace cartonsynth {

// 8-bit RGB image, row-major.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // width*height*3

    Raster() = default;
    Raster(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t* pixel(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
    const std::uint8_t* pixel(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    bool operator==(const Raster&) const = default;
};

// Single-channel float mask, values in [0,1].
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    Mask() = default;
    Mask(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0f) {}

    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

Raster read_png(const std::string& path);
void write_png(const std::string& path, const Raster& img);
void write_png_gray(const std::string& path, const Mask& mask);

struct Color {
    std::uint8_t r = 0, g = 0, b = 0;
};

// Overlay colors follow loop-discovery order: blue, green, red.
inline Color loop_color(int loop_index) {
    static constexpr Color kColors[3] = {{0, 0, 255}, {0, 255, 0}, {255, 0, 0}};
    return kColors[loop_index % 3];
}

void draw_line(Raster& img, const Point2D& a, const Point2D& b, Color color);
void draw_polygon(Raster& img, std::span<const Point2D> poly, Color color);

}  // namespace cartonsynth
