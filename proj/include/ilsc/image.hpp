#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ilsc {

inline constexpr double kDefaultResolutionUmPerPx = 2.8;

/// 8-bit grayscale intensity grid, row-major. The physical resolution is
/// carried as metadata only and never enters any computation.
struct SpeckleImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
    double resolution_um_per_px = kDefaultResolutionUmPerPx;
    bool resolution_defaulted = true;

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
    std::size_t size() const { return pixels.size(); }
};

SpeckleImage make_image(int width, int height, std::uint8_t fill = 0);

/// Non-negative real-valued intensity grid, the working representation of
/// synthesis before 8-bit quantization.
struct Field {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    double& at(int x, int y) {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    std::size_t size() const { return values.size(); }
};

Field make_field(int width, int height, double fill = 0.0);

struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
};

Rect full_rect(const SpeckleImage& image);
bool rect_inside(const Rect& r, int width, int height);
bool rects_overlap(const Rect& a, const Rect& b);

} // namespace ilsc
