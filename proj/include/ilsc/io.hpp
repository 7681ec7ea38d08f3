#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ilsc/bayes_net.hpp"
#include "ilsc/dataset.hpp"
#include "ilsc/image.hpp"
#include "ilsc/synth.hpp"

namespace ilsc {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& token);  // throws on malformed input

inline constexpr const char* kFeatureCsvHeader =
    "sample_no,russ1,levine1,sigm1,skew1,russ2,levine2,sigm2,skew2,stdev,class";

/// Feature table in the fixed 11-column schema. Labels are open-set; the
/// distinct values are collected in first-appearance order.
Dataset read_feature_csv(const std::filesystem::path& path);
void write_feature_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Binary PGM (P5, maxval 255). A header comment of the form
/// `# resolution_um_per_px=<float>` carries the physical scale; absent, the
/// default 2.8 is used and flagged on the image.
SpeckleImage read_pgm(const std::filesystem::path& path);
void write_pgm(const SpeckleImage& image, const std::filesystem::path& path);

struct ManifestEntry {
    std::string filename;
    std::string label;
    std::optional<std::uint64_t> seed;
};

/// Tab-separated corpus manifest: `<filename>\t<label>[\t<seed>]`.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::filesystem::path& path);

/// Loads every manifest image (paths resolved relative to the manifest).
std::vector<LabeledImage> ingest_corpus(const std::filesystem::path& manifest_path);

/// Self-describing line-oriented model document. Probabilities and cut points
/// are written in full round-trip precision, so a loaded model reproduces the
/// saved model's posteriors.
void save_model(const BayesNet& net, const std::filesystem::path& path);
BayesNet load_model(const std::filesystem::path& path);

} // namespace ilsc
