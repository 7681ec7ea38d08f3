#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ilsc/image.hpp"

namespace ilsc {

enum class Band { Interior, Exterior };

/// Square sampling window on a speckle image. Interior straddles the edge of
/// the laser bright spot, Exterior sits beyond it.
struct SampleRegion {
    int origin_x = 0;
    int origin_y = 0;
    int side = 200;
    Band band = Band::Interior;

    Rect rect() const { return Rect{origin_x, origin_y, side, side}; }
};

/// The nine-attribute feature vector: four windowed measures per band plus
/// the standard deviation over both sample areas.
struct TextureFeatures {
    double russ1 = 0, levine1 = 0, sigm1 = 0, skew1 = 0;
    double russ2 = 0, levine2 = 0, sigm2 = 0, skew2 = 0;
    double stdev = 0;
    std::optional<std::string> label;

    std::array<double, 9> values() const {
        return {russ1, levine1, sigm1, skew1, russ2, levine2, sigm2, skew2, stdev};
    }
    static const std::vector<std::string>& attribute_names();
};

struct BrightSpot {
    double center_x = 0;
    double center_y = 0;
    double radius = 0;
};

struct LocalStats {
    double sigma = 0;   // mean over scan windows of population std deviation
    double levine = 0;  // sigma squared
    double skew = 0;    // mean over scan windows of the third standardized moment
};

/// Scans every fully contained window_side x window_side window of the region
/// and averages the per-window statistics. Zero-variance windows contribute
/// skew 0.
LocalStats local_stats(const SpeckleImage& image, const SampleRegion& region,
                       int window_side = 3);

/// Mean over interior region pixels of the summed absolute differences to the
/// 8-neighborhood.
double russ_response(const SpeckleImage& image, const SampleRegion& region);

/// Population standard deviation over the union of the two regions' pixels.
double area_stdev(const SpeckleImage& image, const SampleRegion& a,
                  const SampleRegion& b);

/// Thresholds at the 99th intensity percentile and returns the centroid of
/// the super-threshold pixels with an effective radius sqrt(count/pi).
BrightSpot locate_bright_spot(const SpeckleImage& image);

/// Interior window centered one spot radius from the spot center along +x,
/// Exterior at 2.5 radii, both clamped inside the image. Errors if the
/// clamped windows overlap.
std::pair<SampleRegion, SampleRegion> default_regions(const SpeckleImage& image,
                                                      const BrightSpot& spot,
                                                      int side = 200);

/// Fallback placement when no bright spot is available: two adjacent windows
/// centered in the image.
std::pair<SampleRegion, SampleRegion> side_by_side_regions(const SpeckleImage& image,
                                                           int side = 200);

TextureFeatures extract_features(const SpeckleImage& image,
                                 const SampleRegion& interior,
                                 const SampleRegion& exterior,
                                 std::optional<std::string> label = std::nullopt);

} // namespace ilsc
