#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ilsc/bayes_net.hpp"
#include "ilsc/errors.hpp"
#include "ilsc/io.hpp"
#include "ilsc/synth.hpp"
#include "ilsc/texture.hpp"

namespace fs = std::filesystem;
using namespace ilsc;

namespace {

// Collects either human-readable lines or append-only key=value lines and
// writes them to stdout or a file at the end of the run.
class Report {
public:
    explicit Report(bool machine) : machine_(machine) {}

    bool machine() const { return machine_; }
    void kv(const std::string& key, const std::string& value) {
        if (machine_) lines_ << key << '=' << value << '\n';
    }
    void kv(const std::string& key, double value) { kv(key, format_double(value)); }
    void kv(const std::string& key, std::int64_t value) {
        kv(key, std::to_string(value));
    }
    void text(const std::string& line) {
        if (!machine_) lines_ << line << '\n';
    }

    void write(const std::string& out_path) const {
        if (out_path.empty()) {
            std::cout << lines_.str();
            return;
        }
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot write " + out_path);
        out << lines_.str();
        if (!out) throw IoError("write failed: " + out_path);
    }

private:
    bool machine_;
    std::ostringstream lines_;
};

unsigned worker_count(std::size_t n_items) {
    unsigned cap = std::thread::hardware_concurrency();
    if (cap == 0) cap = 1;
    if (const char* env = std::getenv("ILSC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != nullptr && *end == '\0' && v >= 1 &&
            v <= static_cast<long>(std::numeric_limits<unsigned>::max()))
            cap = std::min<unsigned>(cap, static_cast<unsigned>(v));
    }
    return static_cast<unsigned>(std::min<std::size_t>(cap, n_items));
}

// Index-sliced fan-out; fn(i) must write only to slot i of its outputs, so
// results are identical at any parallelism level. fn must not throw.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const unsigned workers = worker_count(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (std::thread& t : pool) t.join();
}

std::string zero_pad(int value, int digits) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < digits) s.insert(s.begin(), '0');
    return s;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthOptions {
    std::string out_dir;
    int n_per_class = 0;
    int width = 512, height = 512;
    double mean = 60.0;
    int grain = 1, blur = 0;
    std::optional<double> mean_d;
    std::optional<int> grain_d, blur_d;
    std::uint64_t seed = 0;
};

void run_synth(const SynthOptions& opt, Report& report) {
    SynthParams healthy;
    healthy.width = opt.width;
    healthy.height = opt.height;
    healthy.mean_intensity = opt.mean;
    healthy.grain_size_px = opt.grain;
    healthy.blur_radius_px = opt.blur;

    SynthParams diseased = healthy;
    if (opt.mean_d) diseased.mean_intensity = *opt.mean_d;
    if (opt.grain_d) diseased.grain_size_px = *opt.grain_d;
    if (opt.blur_d) diseased.blur_radius_px = *opt.blur_d;

    const int total = 2 * opt.n_per_class;
    // validates the pair before any file is written
    (void)corpus_member_params(healthy, diseased, opt.n_per_class, opt.seed, 0);

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw IoError("cannot create directory " + opt.out_dir);

    std::vector<SynthResult> results(total);
    parallel_for(static_cast<std::size_t>(total), [&](std::size_t i) {
        const SynthParams p = corpus_member_params(
            healthy, diseased, opt.n_per_class, opt.seed, static_cast<int>(i));
        results[i] = generate_fully_developed(p);
    });

    std::vector<ManifestEntry> entries;
    double clip_max = 0.0;
    for (int i = 0; i < total; ++i) {
        const bool is_healthy = i < opt.n_per_class;
        const std::string name =
            std::string(is_healthy ? "h_" : "d_") +
            zero_pad(is_healthy ? i : i - opt.n_per_class, 4) + ".pgm";
        write_pgm(results[i].image, fs::path(opt.out_dir) / name);
        entries.push_back({name, is_healthy ? "h" : "d",
                           derive_seed(opt.seed, static_cast<std::uint64_t>(i))});
        clip_max = std::max(clip_max, results[i].clip_fraction);
    }
    const fs::path manifest = fs::path(opt.out_dir) / "manifest.tsv";
    write_manifest(entries, manifest);

    report.kv("images", static_cast<std::int64_t>(total));
    report.kv("width", static_cast<std::int64_t>(opt.width));
    report.kv("height", static_cast<std::int64_t>(opt.height));
    report.kv("out_dir", opt.out_dir);
    report.kv("manifest", manifest.string());
    report.kv("clip_fraction_max", clip_max);
    report.text("wrote " + std::to_string(total) + " images (" +
                std::to_string(opt.width) + "x" + std::to_string(opt.height) +
                ") to " + opt.out_dir);
    report.text("manifest: " + manifest.string());
    report.text("max clip fraction: " + format_double(clip_max));
}

// ---------------------------------------------------------------------------
// contrast
// ---------------------------------------------------------------------------

void run_contrast(const std::vector<std::string>& files, Report& report) {
    report.kv("n", static_cast<std::int64_t>(files.size()));
    std::vector<double> ks;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const SpeckleImage img = read_pgm(files[i]);
        const ContrastReport c = speckle_contrast(img);
        ks.push_back(c.k);
        const std::string idx = std::to_string(i);
        report.kv("file." + idx, files[i]);
        report.kv("mean." + idx, c.mean);
        report.kv("std_dev." + idx, c.std_dev);
        report.kv("k." + idx, c.k);
        report.text(files[i] + ": mean=" + format_double(c.mean) +
                    " std_dev=" + format_double(c.std_dev) +
                    " k=" + format_double(c.k));
    }

    // plot-ready histogram of K over [0, 1]; values above 1 land in the top bin
    const int bins = 20;
    std::vector<int> hist(bins, 0);
    for (double k : ks) {
        int b = static_cast<int>(k * bins);
        ++hist[std::clamp(b, 0, bins - 1)];
    }
    report.kv("k_hist.bins", static_cast<std::int64_t>(bins));
    report.kv("k_hist.lo", 0.0);
    report.kv("k_hist.hi", 1.0);
    for (int b = 0; b < bins; ++b)
        report.kv("k_hist.count." + std::to_string(b),
                  static_cast<std::int64_t>(hist[b]));
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

struct FeaturesOptions {
    std::string manifest;
    std::string out;
    int side = 200;
    bool spot_auto = false;
    std::string region_a, region_b;  // "x,y"
};

std::pair<int, int> parse_xy(const std::string& text) {
    const std::size_t comma = text.find(',');
    if (comma == std::string::npos)
        throw ValidationError("expected X,Y origin, got '" + text + "'");
    try {
        return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ValidationError("expected X,Y origin, got '" + text + "'");
    }
}

void run_features(const FeaturesOptions& opt, Report& report) {
    if (opt.spot_auto && (!opt.region_a.empty() || !opt.region_b.empty()))
        throw ValidationError("--spot-auto and --region-a/--region-b are exclusive");
    if (opt.region_a.empty() != opt.region_b.empty())
        throw ValidationError("--region-a and --region-b must be given together");

    const std::vector<LabeledImage> corpus = ingest_corpus(opt.manifest);
    const std::vector<ManifestEntry> entries = read_manifest(opt.manifest);

    std::optional<std::pair<SampleRegion, SampleRegion>> fixed;
    if (!opt.region_a.empty()) {
        const auto [ax, ay] = parse_xy(opt.region_a);
        const auto [bx, by] = parse_xy(opt.region_b);
        fixed = {{SampleRegion{ax, ay, opt.side, Band::Interior},
                  SampleRegion{bx, by, opt.side, Band::Exterior}}};
    }

    const std::size_t n = corpus.size();
    std::vector<TextureFeatures> features(n);
    std::vector<std::string> errors(n);
    parallel_for(n, [&](std::size_t i) {
        try {
            std::pair<SampleRegion, SampleRegion> regions;
            if (fixed)
                regions = *fixed;
            else if (opt.spot_auto)
                regions = default_regions(corpus[i].image,
                                          locate_bright_spot(corpus[i].image),
                                          opt.side);
            else
                regions = side_by_side_regions(corpus[i].image, opt.side);
            features[i] = extract_features(corpus[i].image, regions.first,
                                           regions.second, corpus[i].label);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    bool failed = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) {
            failed = true;
            std::cerr << "row " << i + 1 << " (" << entries[i].filename
                      << "): " << errors[i] << '\n';
        }
    }
    if (failed) throw ValidationError("feature extraction failed for some rows");

    Dataset dataset;
    dataset.attribute_names = TextureFeatures::attribute_names();
    for (std::size_t i = 0; i < n; ++i) {
        DataRow row;
        row.sample_no = static_cast<std::int64_t>(i + 1);
        const auto values = features[i].values();
        row.values.assign(values.begin(), values.end());
        row.label = corpus[i].label;
        dataset.note_label(row.label);
        dataset.rows.push_back(std::move(row));
    }
    write_feature_csv(dataset, opt.out);

    report.kv("rows", static_cast<std::int64_t>(n));
    report.kv("out", opt.out);
    report.text("wrote " + std::to_string(n) + " feature rows to " + opt.out);
}

// ---------------------------------------------------------------------------
// learn
// ---------------------------------------------------------------------------

struct LearnOptions {
    std::string features;
    std::string out;
    LearnParams params;
};

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

void run_learn(const LearnOptions& opt, Report& report) {
    const Dataset data = read_feature_csv(opt.features);
    const BayesNet net = train(data, opt.params);
    save_model(net, opt.out);

    report.kv("attributes", static_cast<std::int64_t>(net.n_attributes()));
    report.text("attributes: " + std::to_string(net.n_attributes()));
    for (int a = 0; a < net.n_attributes(); ++a) {
        report.kv("mi." + net.attribute_names[a], net.class_mi[a]);
        report.text("  I(" + net.attribute_names[a] + "; Class) = " +
                    format_double(net.class_mi[a]) + " bits");
    }

    const std::vector<std::string> selected = net.selected_attributes();
    report.kv("selected", join(selected, ","));
    report.text("selected: " + (selected.empty() ? "(none)" : join(selected, ", ")));

    std::vector<std::string> edge_strs;
    for (const auto& [from, to] : net.edges()) edge_strs.push_back(from + "->" + to);
    report.kv("edges", join(edge_strs, ","));
    report.text("edges: " + (edge_strs.empty() ? "(none)" : join(edge_strs, ", ")));

    if (selected.empty()) {
        report.kv("warning", "prior-only classifier");
        report.text("warning: prior-only classifier (no attribute reached the threshold)");
    }
    report.kv("model", opt.out);
    report.text("model written to " + opt.out);
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

void run_classify(const std::string& model_path, const std::string& features_path,
                  Report& report) {
    const BayesNet net = load_model(model_path);
    const Dataset data = read_feature_csv(features_path);
    if (data.attribute_names != net.attribute_names)
        throw ValidationError("feature columns do not match the model attributes");

    report.kv("rows", static_cast<std::int64_t>(data.rows.size()));
    int labeled = 0, correct = 0;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        const DataRow& row = data.rows[i];
        const std::vector<double> post = posterior(net, row.values);
        int best = 0;
        for (int c = 1; c < net.n_classes(); ++c)
            if (post[c] > post[best]) best = c;

        const std::string idx = std::to_string(i);
        report.kv("row." + idx + ".sample_no", row.sample_no);
        report.kv("row." + idx + ".predicted", net.class_values[best]);
        std::string text_line = "sample " + std::to_string(row.sample_no) +
                                ": predicted=" + net.class_values[best];
        for (int c = 0; c < net.n_classes(); ++c) {
            report.kv("row." + idx + ".p." + net.class_values[c], post[c]);
            text_line += " p(" + net.class_values[c] + ")=" + format_double(post[c]);
        }
        report.text(text_line);

        for (int c = 0; c < net.n_classes(); ++c) {
            if (net.class_values[c] == row.label) {
                ++labeled;
                if (c == best) ++correct;
                break;
            }
        }
    }
    report.kv("labeled_rows", static_cast<std::int64_t>(labeled));
    if (labeled > 0) {
        const double accuracy = static_cast<double>(correct) / labeled;
        report.kv("accuracy", accuracy);
        report.text("accuracy on " + std::to_string(labeled) +
                    " labeled rows: " + format_double(accuracy));
    }
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateOptions {
    std::string features;
    int k = 5;
    LearnParams params;
    std::uint64_t seed = 0;
};

void run_evaluate(const EvaluateOptions& opt, Report& report) {
    const Dataset data = read_feature_csv(opt.features);
    const CvReport cv = cross_validate(data, opt.k, opt.params, opt.seed);

    report.kv("rows", static_cast<std::int64_t>(data.rows.size()));
    report.kv("folds", static_cast<std::int64_t>(cv.folds));
    report.kv("bins", static_cast<std::int64_t>(opt.params.n_bins));
    report.kv("t", opt.params.threshold);
    report.kv("alpha", opt.params.alpha);
    report.kv("seed", static_cast<std::int64_t>(opt.seed));
    report.kv("accuracy", cv.accuracy);
    report.kv("correct", static_cast<std::int64_t>(cv.correct));
    report.kv("total", static_cast<std::int64_t>(cv.total));

    report.text("stratified " + std::to_string(cv.folds) + "-fold cross-validation on " +
                std::to_string(data.rows.size()) + " rows");
    report.text("accuracy: " + format_double(cv.accuracy) + " (" +
                std::to_string(cv.correct) + "/" + std::to_string(cv.total) + ")");

    const auto& classes = data.class_values;
    for (std::size_t t = 0; t < classes.size(); ++t) {
        std::string text_line = "confusion " + classes[t] + ":";
        for (std::size_t p = 0; p < classes.size(); ++p) {
            report.kv("confusion." + classes[t] + "." + classes[p],
                      static_cast<std::int64_t>(cv.confusion[t][p]));
            text_line += " " + classes[p] + "=" + std::to_string(cv.confusion[t][p]);
        }
        report.text(text_line);
    }
    for (std::size_t f = 0; f < cv.selected_per_fold.size(); ++f) {
        report.kv("selected." + std::to_string(f), join(cv.selected_per_fold[f], ","));
        report.text("fold " + std::to_string(f) + " selected: " +
                    (cv.selected_per_fold[f].empty()
                         ? "(none)"
                         : join(cv.selected_per_fold[f], ", ")));
    }
    for (std::size_t r = 0; r < cv.fold_of_row.size(); ++r)
        report.kv("fold." + std::to_string(r),
                  static_cast<std::int64_t>(cv.fold_of_row[r]));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"laser speckle synthesis, texture features, and Bayesian-network classification"};
    app.require_subcommand(1);

    std::string format = "text";
    app.add_option("--format", format, "report format: text or machine")
        ->check(CLI::IsMember({"text", "machine"}));

    SynthOptions synth_opt;
    CLI::App* synth = app.add_subcommand("synth", "generate a labeled two-class speckle corpus");
    synth->fallthrough();
    synth->add_option("--out-dir", synth_opt.out_dir, "output directory")->required();
    synth->add_option("--n-per-class", synth_opt.n_per_class, "images per class")->required();
    synth->add_option("--width", synth_opt.width, "image width");
    synth->add_option("--height", synth_opt.height, "image height");
    synth->add_option("--mean", synth_opt.mean, "healthy-class mean intensity");
    synth->add_option("--grain", synth_opt.grain, "healthy-class grain size in px");
    synth->add_option("--blur", synth_opt.blur, "healthy-class blur radius in px");
    synth->add_option("--mean-d", synth_opt.mean_d, "diseased-class mean intensity");
    synth->add_option("--grain-d", synth_opt.grain_d, "diseased-class grain size");
    synth->add_option("--blur-d", synth_opt.blur_d, "diseased-class blur radius");
    synth->add_option("--seed", synth_opt.seed, "base seed");

    std::vector<std::string> contrast_files;
    std::string contrast_out;
    CLI::App* contrast = app.add_subcommand("contrast", "report speckle contrast per image");
    contrast->fallthrough();
    contrast->add_option("images", contrast_files, "PGM images")->required();
    contrast->add_option("--out", contrast_out, "write the report to a file");

    FeaturesOptions features_opt;
    CLI::App* features = app.add_subcommand("features", "extract texture features from a corpus");
    features->fallthrough();
    features->add_option("--manifest", features_opt.manifest, "corpus manifest")->required();
    features->add_option("--out", features_opt.out, "output feature CSV")->required();
    features->add_option("--side", features_opt.side, "sample window side in px");
    features->add_flag("--spot-auto", features_opt.spot_auto,
                       "place windows from the detected bright spot");
    features->add_option("--region-a", features_opt.region_a, "interior window origin X,Y");
    features->add_option("--region-b", features_opt.region_b, "exterior window origin X,Y");

    LearnOptions learn_opt;
    CLI::App* learn = app.add_subcommand("learn", "learn a Bayesian-network model");
    learn->fallthrough();
    learn->add_option("--features", learn_opt.features, "feature CSV")->required();
    learn->add_option("--out", learn_opt.out, "output model document")->required();
    learn->add_option("--t", learn_opt.params.threshold, "information threshold in bits");
    learn->add_option("--bins", learn_opt.params.n_bins, "equal-frequency bins");
    learn->add_option("--alpha", learn_opt.params.alpha, "CPT smoothing pseudo-count");

    std::string classify_model, classify_features, classify_out;
    CLI::App* classify = app.add_subcommand("classify", "classify feature rows with a model");
    classify->fallthrough();
    classify->add_option("--model", classify_model, "model document")->required();
    classify->add_option("--features", classify_features, "feature CSV")->required();
    classify->add_option("--out", classify_out, "write the report to a file");

    EvaluateOptions eval_opt;
    std::string eval_out;
    CLI::App* evaluate = app.add_subcommand("evaluate", "cross-validated evaluation");
    evaluate->fallthrough();
    evaluate->add_option("--features", eval_opt.features, "feature CSV")->required();
    evaluate->add_option("--k", eval_opt.k, "number of folds");
    evaluate->add_option("--t", eval_opt.params.threshold, "information threshold in bits");
    evaluate->add_option("--bins", eval_opt.params.n_bins, "equal-frequency bins");
    evaluate->add_option("--alpha", eval_opt.params.alpha, "CPT smoothing pseudo-count");
    evaluate->add_option("--seed", eval_opt.seed, "fold-assignment seed");
    evaluate->add_option("--out", eval_out, "write the report to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Report report(format == "machine");
        if (synth->parsed()) {
            run_synth(synth_opt, report);
            report.write("");
        } else if (contrast->parsed()) {
            run_contrast(contrast_files, report);
            report.write(contrast_out);
        } else if (features->parsed()) {
            run_features(features_opt, report);
            report.write("");
        } else if (learn->parsed()) {
            run_learn(learn_opt, report);
            report.write("");
        } else if (classify->parsed()) {
            run_classify(classify_model, classify_features, report);
            report.write(classify_out);
        } else if (evaluate->parsed()) {
            run_evaluate(eval_opt, report);
            report.write(eval_out);
        }
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
