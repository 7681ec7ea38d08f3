#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ilsc/image.hpp"

namespace ilsc {

/// Population statistics of a region together with the speckle contrast
/// K = std_dev / mean.
struct ContrastReport {
    double mean = 0.0;
    double std_dev = 0.0;
    double k = 0.0;
};

ContrastReport speckle_contrast(const SpeckleImage& image, const Rect& region);
ContrastReport speckle_contrast(const SpeckleImage& image);
ContrastReport speckle_contrast(const Field& field, const Rect& region);
ContrastReport speckle_contrast(const Field& field);

struct SynthParams {
    int width = 256;
    int height = 256;
    double mean_intensity = 60.0;  // target mean in pre-quantization units
    int grain_size_px = 1;         // speckle correlation length in pixels
    int blur_radius_px = 0;        // post-synthesis box smoothing radius
    std::uint64_t seed = 0;
};

struct SynthResult {
    SpeckleImage image;        // quantized 8-bit output
    Field pre_quant;           // intensity grid just before quantization
    double clip_fraction = 0;  // share of pixels saturated at 255
};

/// Fully developed speckle: an i.i.d. circular complex Gaussian field,
/// optionally low-pass filtered to enlarge the grain (linear filtering keeps
/// the field Gaussian, so the intensity law stays exponential), squared to
/// intensity, rescaled to the requested mean, optionally blurred in the
/// intensity domain, then quantized to 8 bits. Same params give bit-identical
/// output.
SynthResult generate_fully_developed(const SynthParams& params);

/// Uniform box smoothing of side 2*radius+1 with edge-clamped borders.
/// radius 0 returns the input unchanged.
SpeckleImage apply_blur(const SpeckleImage& image, int radius);
Field apply_blur(const Field& field, int radius);

struct LabeledImage {
    SpeckleImage image;
    std::string label;
    std::uint64_t seed = 0;
};

/// 2*n_per_class images with labels "h"/"d", each generated from a per-image
/// seed derived from base_seed and the image index. The parameter sets must
/// differ in at least one of mean, grain, blur.
std::vector<LabeledImage> two_class_corpus(const SynthParams& healthy,
                                           const SynthParams& diseased,
                                           int n_per_class,
                                           std::uint64_t base_seed);

/// Parameters of corpus member `index` (0..2*n_per_class-1; the first half is
/// the healthy class). Validates the pair the same way two_class_corpus does.
SynthParams corpus_member_params(const SynthParams& healthy,
                                 const SynthParams& diseased, int n_per_class,
                                 std::uint64_t base_seed, int index);

/// splitmix64-style per-item seed derivation.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

} // namespace ilsc
