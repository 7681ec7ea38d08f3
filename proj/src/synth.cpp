#include "ilsc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ilsc/errors.hpp"

namespace ilsc {

namespace {

ContrastReport contrast_from_sums(double sum, double sum_sq, std::size_t n) {
    ContrastReport r;
    const double nd = static_cast<double>(n);
    r.mean = sum / nd;
    double var = sum_sq / nd - r.mean * r.mean;
    if (var < 0.0) var = 0.0;  // rounding guard for constant data
    r.std_dev = std::sqrt(var);
    if (r.mean == 0.0)
        throw ValidationError("zero mean intensity, contrast undefined");
    r.k = r.std_dev / r.mean;
    return r;
}

template <typename Grid>
ContrastReport region_contrast(const Grid& g, const Rect& region) {
    if (region.width <= 0 || region.height <= 0)
        throw ValidationError("empty region");
    if (!rect_inside(region, g.width, g.height))
        throw ValidationError("region out of bounds");
    double sum = 0.0, sum_sq = 0.0;
    for (int y = region.y; y < region.y + region.height; ++y) {
        for (int x = region.x; x < region.x + region.width; ++x) {
            const double v = static_cast<double>(g.at(x, y));
            sum += v;
            sum_sq += v * v;
        }
    }
    return contrast_from_sums(sum, sum_sq,
                              static_cast<std::size_t>(region.width) * region.height);
}

int wrap(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

// Separable Gaussian filter with periodic boundaries, so the filtered field
// stays stationary right up to the edges.
void gaussian_filter_wrap(Field& f, double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        ksum += kernel[i + radius];
    }
    for (double& w : kernel) w /= ksum;

    Field tmp = make_field(f.width, f.height);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * f.at(wrap(x + i, f.width), y);
            tmp.at(x, y) = acc;
        }
    }
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp.at(x, wrap(y + i, f.height));
            f.at(x, y) = acc;
        }
    }
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

Field box_blur_clamped(const Field& f, int radius) {
    const double inv = 1.0 / (2 * radius + 1);
    Field tmp = make_field(f.width, f.height);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += f.at(clamp_index(x + i, f.width), y);
            tmp.at(x, y) = acc * inv;
        }
    }
    Field out = make_field(f.width, f.height);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += tmp.at(x, clamp_index(y + i, f.height));
            out.at(x, y) = acc * inv;
        }
    }
    return out;
}

std::uint8_t quantize_value(double v) {
    const long q = std::lround(v);
    return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
}

void validate_params(const SynthParams& p) {
    if (p.width < 1 || p.height < 1)
        throw ValidationError("image dimensions must be >= 1");
    if (!(p.mean_intensity > 0.0))
        throw ValidationError("mean_intensity must be > 0");
    if (p.grain_size_px < 1)
        throw ValidationError("grain_size_px must be >= 1");
    if (p.blur_radius_px < 0)
        throw ValidationError("blur_radius_px must be >= 0");
    if (p.grain_size_px >= std::min(p.width, p.height) / 4.0)
        throw ValidationError("grain too large for field");
}

} // namespace

ContrastReport speckle_contrast(const SpeckleImage& image, const Rect& region) {
    return region_contrast(image, region);
}

ContrastReport speckle_contrast(const SpeckleImage& image) {
    return region_contrast(image, full_rect(image));
}

ContrastReport speckle_contrast(const Field& field, const Rect& region) {
    return region_contrast(field, region);
}

ContrastReport speckle_contrast(const Field& field) {
    return region_contrast(field, Rect{0, 0, field.width, field.height});
}

SynthResult generate_fully_developed(const SynthParams& params) {
    validate_params(params);

    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Field re = make_field(params.width, params.height);
    Field im = make_field(params.width, params.height);
    for (std::size_t i = 0; i < re.size(); ++i) {
        re.values[i] = gauss(rng);
        im.values[i] = gauss(rng);
    }

    if (params.grain_size_px > 1) {
        const double sigma = params.grain_size_px / 2.0;
        gaussian_filter_wrap(re, sigma);
        gaussian_filter_wrap(im, sigma);
    }

    Field intensity = make_field(params.width, params.height);
    double sum = 0.0;
    for (std::size_t i = 0; i < intensity.size(); ++i) {
        intensity.values[i] = re.values[i] * re.values[i] + im.values[i] * im.values[i];
        sum += intensity.values[i];
    }
    const double scale = params.mean_intensity * intensity.size() / sum;
    for (double& v : intensity.values) v *= scale;

    if (params.blur_radius_px > 0)
        intensity = box_blur_clamped(intensity, params.blur_radius_px);

    SynthResult result;
    result.image = make_image(params.width, params.height);
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < intensity.size(); ++i) {
        if (std::lround(intensity.values[i]) > 255L) ++clipped;
        result.image.pixels[i] = quantize_value(intensity.values[i]);
    }
    result.pre_quant = std::move(intensity);
    result.clip_fraction = static_cast<double>(clipped) / result.image.size();
    return result;
}

Field apply_blur(const Field& field, int radius) {
    if (radius < 0) throw ValidationError("blur radius must be >= 0");
    if (radius == 0) return field;
    return box_blur_clamped(field, radius);
}

SpeckleImage apply_blur(const SpeckleImage& image, int radius) {
    if (radius < 0) throw ValidationError("blur radius must be >= 0");
    if (radius == 0) return image;
    Field f = make_field(image.width, image.height);
    for (std::size_t i = 0; i < image.size(); ++i)
        f.values[i] = static_cast<double>(image.pixels[i]);
    f = box_blur_clamped(f, radius);
    SpeckleImage out = image;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.pixels[i] = quantize_value(f.values[i]);
    return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SynthParams corpus_member_params(const SynthParams& healthy,
                                 const SynthParams& diseased, int n_per_class,
                                 std::uint64_t base_seed, int index) {
    if (n_per_class < 1)
        throw ValidationError("n_per_class must be >= 1");
    if (index < 0 || index >= 2 * n_per_class)
        throw ValidationError("corpus index out of range");
    if (healthy.mean_intensity == diseased.mean_intensity &&
        healthy.grain_size_px == diseased.grain_size_px &&
        healthy.blur_radius_px == diseased.blur_radius_px)
        throw ValidationError("classes statistically indistinguishable by construction");
    validate_params(healthy);
    validate_params(diseased);

    SynthParams p = index < n_per_class ? healthy : diseased;
    p.seed = derive_seed(base_seed, static_cast<std::uint64_t>(index));
    return p;
}

std::vector<LabeledImage> two_class_corpus(const SynthParams& healthy,
                                           const SynthParams& diseased,
                                           int n_per_class,
                                           std::uint64_t base_seed) {
    (void)corpus_member_params(healthy, diseased, n_per_class, base_seed, 0);

    std::vector<LabeledImage> corpus;
    corpus.reserve(2 * static_cast<std::size_t>(n_per_class));
    for (int i = 0; i < 2 * n_per_class; ++i) {
        const SynthParams p =
            corpus_member_params(healthy, diseased, n_per_class, base_seed, i);
        LabeledImage li;
        li.image = generate_fully_developed(p).image;
        li.label = i < n_per_class ? "h" : "d";
        li.seed = p.seed;
        corpus.push_back(std::move(li));
    }
    return corpus;
}

} // namespace ilsc
