#include "ilsc/texture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ilsc/errors.hpp"

namespace ilsc {

namespace {

void validate_region(const SpeckleImage& image, const SampleRegion& region) {
    if (region.side < 3)
        throw ValidationError("sample region side must be >= 3");
    if (!rect_inside(region.rect(), image.width, image.height))
        throw ValidationError("sample region out of image bounds");
}

} // namespace

const std::vector<std::string>& TextureFeatures::attribute_names() {
    static const std::vector<std::string> names = {
        "russ1", "levine1", "sigm1", "skew1",
        "russ2", "levine2", "sigm2", "skew2", "stdev"};
    return names;
}

LocalStats local_stats(const SpeckleImage& image, const SampleRegion& region,
                       int window_side) {
    validate_region(image, region);
    if (window_side < 3 || window_side % 2 == 0)
        throw ValidationError("window side must be odd and >= 3");
    if (region.side < window_side)
        throw ValidationError("sample region smaller than scan window");

    const int positions = region.side - window_side + 1;
    const double inv_n = 1.0 / (window_side * window_side);

    double sigma_sum = 0.0;
    double skew_sum = 0.0;
    for (int wy = 0; wy < positions; ++wy) {
        for (int wx = 0; wx < positions; ++wx) {
            double sum = 0.0;
            for (int dy = 0; dy < window_side; ++dy)
                for (int dx = 0; dx < window_side; ++dx)
                    sum += image.at(region.origin_x + wx + dx,
                                    region.origin_y + wy + dy);
            const double mean = sum * inv_n;
            double m2 = 0.0, m3 = 0.0;
            for (int dy = 0; dy < window_side; ++dy) {
                for (int dx = 0; dx < window_side; ++dx) {
                    const double d = image.at(region.origin_x + wx + dx,
                                              region.origin_y + wy + dy) - mean;
                    m2 += d * d;
                    m3 += d * d * d;
                }
            }
            const double var = m2 * inv_n;
            const double sd = std::sqrt(var);
            sigma_sum += sd;
            if (var > 0.0) skew_sum += (m3 * inv_n) / (var * sd);
        }
    }
    const double n_windows = static_cast<double>(positions) * positions;
    LocalStats out;
    out.sigma = sigma_sum / n_windows;
    out.levine = out.sigma * out.sigma;
    out.skew = skew_sum / n_windows;
    return out;
}

double russ_response(const SpeckleImage& image, const SampleRegion& region) {
    validate_region(image, region);

    double total = 0.0;
    const int inner = region.side - 2;
    for (int gy = 0; gy < inner; ++gy) {
        for (int gx = 0; gx < inner; ++gx) {
            const int px = region.origin_x + gx + 1;
            const int py = region.origin_y + gy + 1;
            const int c = image.at(px, py);
            double r = 0.0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (dx != 0 || dy != 0)
                        r += std::abs(c - image.at(px + dx, py + dy));
            total += r;
        }
    }
    return total / (static_cast<double>(inner) * inner);
}

double area_stdev(const SpeckleImage& image, const SampleRegion& a,
                  const SampleRegion& b) {
    validate_region(image, a);
    validate_region(image, b);

    const Rect ra = a.rect();
    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    auto accumulate = [&](const Rect& r, bool skip_in_a) {
        for (int y = r.y; y < r.y + r.height; ++y) {
            for (int x = r.x; x < r.x + r.width; ++x) {
                if (skip_in_a && x >= ra.x && x < ra.x + ra.width &&
                    y >= ra.y && y < ra.y + ra.height)
                    continue;
                const double v = image.at(x, y);
                sum += v;
                sum_sq += v * v;
                ++n;
            }
        }
    };
    accumulate(ra, false);
    accumulate(b.rect(), true);  // union semantics if the regions overlap

    const double mean = sum / static_cast<double>(n);
    double var = sum_sq / static_cast<double>(n) - mean * mean;
    if (var < 0.0) var = 0.0;
    return std::sqrt(var);
}

BrightSpot locate_bright_spot(const SpeckleImage& image) {
    if (image.size() == 0)
        throw ValidationError("empty image");

    const auto [min_it, max_it] =
        std::minmax_element(image.pixels.begin(), image.pixels.end());
    if (*min_it == *max_it)
        throw ValidationError("no bright spot");

    std::array<std::size_t, 256> hist{};
    for (std::uint8_t v : image.pixels) ++hist[v];

    // nearest-rank 99th percentile
    const std::size_t rank = (image.size() * 99 + 99) / 100;
    std::size_t cum = 0;
    int threshold = 255;
    for (int v = 0; v < 256; ++v) {
        cum += hist[v];
        if (cum >= rank) {
            threshold = v;
            break;
        }
    }

    double sx = 0.0, sy = 0.0;
    std::size_t count = 0;
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            if (image.at(x, y) > threshold) {
                sx += x;
                sy += y;
                ++count;
            }
        }
    }
    if (count < 10)
        throw ValidationError("spot too small");

    BrightSpot spot;
    spot.center_x = sx / static_cast<double>(count);
    spot.center_y = sy / static_cast<double>(count);
    spot.radius = std::sqrt(static_cast<double>(count) / std::numbers::pi);
    return spot;
}

namespace {

SampleRegion place_clamped(const SpeckleImage& image, double center_x,
                           double center_y, int side, Band band) {
    SampleRegion r;
    r.side = side;
    r.band = band;
    r.origin_x = std::clamp(static_cast<int>(std::lround(center_x)) - side / 2,
                            0, image.width - side);
    r.origin_y = std::clamp(static_cast<int>(std::lround(center_y)) - side / 2,
                            0, image.height - side);
    return r;
}

} // namespace

std::pair<SampleRegion, SampleRegion> default_regions(const SpeckleImage& image,
                                                      const BrightSpot& spot,
                                                      int side) {
    if (side < 3)
        throw ValidationError("sample region side must be >= 3");
    if (side > image.width || side > image.height)
        throw ValidationError("image too small for sample windows");

    SampleRegion interior = place_clamped(image, spot.center_x + spot.radius,
                                          spot.center_y, side, Band::Interior);
    SampleRegion exterior = place_clamped(image, spot.center_x + 2.5 * spot.radius,
                                          spot.center_y, side, Band::Exterior);
    if (rects_overlap(interior.rect(), exterior.rect()))
        throw ValidationError("sample windows cannot be placed without overlap");
    return {interior, exterior};
}

std::pair<SampleRegion, SampleRegion> side_by_side_regions(const SpeckleImage& image,
                                                           int side) {
    if (side < 3)
        throw ValidationError("sample region side must be >= 3");
    if (2 * side > image.width || side > image.height)
        throw ValidationError("image too small for sample windows");

    const int oy = (image.height - side) / 2;
    SampleRegion interior{image.width / 2 - side, oy, side, Band::Interior};
    SampleRegion exterior{image.width / 2, oy, side, Band::Exterior};
    return {interior, exterior};
}

TextureFeatures extract_features(const SpeckleImage& image,
                                 const SampleRegion& interior,
                                 const SampleRegion& exterior,
                                 std::optional<std::string> label) {
    validate_region(image, interior);
    validate_region(image, exterior);
    if (rects_overlap(interior.rect(), exterior.rect()))
        throw ValidationError("sample regions overlap");

    const LocalStats a = local_stats(image, interior);
    const LocalStats b = local_stats(image, exterior);

    TextureFeatures f;
    f.russ1 = russ_response(image, interior);
    f.levine1 = a.levine;
    f.sigm1 = a.sigma;
    f.skew1 = a.skew;
    f.russ2 = russ_response(image, exterior);
    f.levine2 = b.levine;
    f.sigm2 = b.sigma;
    f.skew2 = b.skew;
    f.stdev = area_stdev(image, interior, exterior);
    f.label = std::move(label);
    return f;
}

} // namespace ilsc
