#include "ilsc/image.hpp"

namespace ilsc {

SpeckleImage make_image(int width, int height, std::uint8_t fill) {
    SpeckleImage img;
    img.width = width;
    img.height = height;
    img.pixels.assign(static_cast<std::size_t>(width) * height, fill);
    return img;
}

Field make_field(int width, int height, double fill) {
    Field f;
    f.width = width;
    f.height = height;
    f.values.assign(static_cast<std::size_t>(width) * height, fill);
    return f;
}

Rect full_rect(const SpeckleImage& image) {
    return Rect{0, 0, image.width, image.height};
}

bool rect_inside(const Rect& r, int width, int height) {
    return r.x >= 0 && r.y >= 0 && r.width >= 1 && r.height >= 1 &&
           r.x + r.width <= width && r.y + r.height <= height;
}

bool rects_overlap(const Rect& a, const Rect& b) {
    return a.x < b.x + b.width && b.x < a.x + a.width &&
           a.y < b.y + b.height && b.y < a.y + a.height;
}

} // namespace ilsc
