// Acceptance suite: runs every gate criterion end to end and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "ilsc/bayes_net.hpp"
#include "ilsc/io.hpp"
#include "ilsc/synth.hpp"
#include "ilsc/texture.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace ilsc;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------------------
// CLI subprocess plumbing
// ---------------------------------------------------------------------------

fs::path g_work;

int run_cli(const std::string& args, const fs::path& stdout_file) {
    const std::string cmd = "cd '" + g_work.string() + "' && '" ILSC_CLI_PATH "' " +
                            args + " > '" + stdout_file.string() + "' 2> /dev/null";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// value of `key=` in a machine-format report
std::string machine_value(const fs::path& report, const std::string& key) {
    std::ifstream in(report);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
    return "";
}

bool same_bytes(const fs::path& a, const fs::path& b) { return slurp(a) == slurp(b); }

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

Outcome criterion_contrast_law() {
    const auto start = Clock::now();
    double k_min = 1e9, k_max = -1e9;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SynthParams p;
        p.width = 256;
        p.height = 256;
        p.grain_size_px = 1;
        p.blur_radius_px = 0;
        p.seed = seed;
        const double k = speckle_contrast(generate_fully_developed(p).pre_quant).k;
        k_min = std::min(k_min, k);
        k_max = std::max(k_max, k);
    }
    const double elapsed = seconds_since(start);
    const bool ok = k_min >= 0.95 && k_max <= 1.05 && elapsed < 5.0;
    return {ok, "K in [" + fmt(k_min) + ", " + fmt(k_max) + "] over 20 seeds, " +
                    fmt(elapsed) + " s"};
}

Outcome criterion_blur_monotone() {
    int violations = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SynthParams p;
        p.width = 256;
        p.height = 256;
        p.seed = seed;
        const SpeckleImage base = generate_fully_developed(p).image;
        double prev = speckle_contrast(base).k;
        for (int radius : {1, 2, 4}) {
            const double k = speckle_contrast(apply_blur(base, radius)).k;
            if (!(k < prev)) ++violations;
            prev = k;
        }
    }
    return {violations == 0,
            violations == 0 ? "K strictly decreases over blur 0->1->2->4 for 20 seeds"
                            : std::to_string(violations) + " monotonicity violations"};
}

Outcome criterion_levine_relation() {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        SynthParams p;
        p.width = 460;
        p.height = 230;
        p.grain_size_px = 2;
        p.seed = seed;
        const SpeckleImage img = generate_fully_developed(p).image;
        const auto [a, b] = side_by_side_regions(img, 200);
        const TextureFeatures f = extract_features(img, a, b);
        if (f.levine1 != f.sigm1 * f.sigm1 || f.levine2 != f.sigm2 * f.sigm2)
            return {false, "computed levine != sigma^2 (seed " + std::to_string(seed) + ")"};
    }

    const Dataset fixture = read_feature_csv(fs::path(ILSC_TEST_DATA_DIR) / "table1.csv");
    double worst = 0.0;
    for (const DataRow& row : fixture.rows) {
        const double r1 = std::abs(row.values[1] - row.values[2] * row.values[2]) /
                          row.values[1];
        const double r2 = std::abs(row.values[5] - row.values[6] * row.values[6]) /
                          row.values[5];
        worst = std::max({worst, r1, r2});
    }
    const bool ok = worst <= 0.01;
    return {ok, "computed features exact; fixture worst relative error " + fmt(worst)};
}

Outcome criterion_equal_frequency() {
    std::mt19937_64 rng(4242);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int bins = 2 + static_cast<int>(rng() % 9);
        const int n = bins + static_cast<int>(rng() % (201 - bins));
        std::vector<double> values(n);
        for (int i = 0; i < n; ++i)
            values[i] = i * 0.25 + 3.0;  // all distinct
        std::shuffle(values.begin(), values.end(), rng);

        Dataset d;
        d.attribute_names = {"x"};
        d.class_values = {"a"};
        for (int i = 0; i < n; ++i)
            d.rows.push_back({i + 1, {values[i]}, "a"});

        const Discretization disc = fit_equal_frequency(d, bins);
        std::vector<int> occ(disc.attributes[0].n_states(), 0);
        for (double v : values) ++occ[bin_of(disc.attributes[0], v)];
        const auto [lo, hi] = std::minmax_element(occ.begin(), occ.end());
        if (!disc.attributes[0].degraded && *hi - *lo > 1)
            return {false, "occupancy imbalance " + std::to_string(*hi - *lo) +
                               " at n=" + std::to_string(n) +
                               " bins=" + std::to_string(bins)};
        ++checked;
    }

    for (int trial = 0; trial < 300; ++trial) {
        const int bins = 2 + static_cast<int>(rng() % 9);
        const int n = 5 + static_cast<int>(rng() % 150);
        Dataset d;
        d.attribute_names = {"x"};
        d.class_values = {"a"};
        std::vector<double> values(n);
        for (int i = 0; i < n; ++i) {
            values[i] = static_cast<double>(rng() % 9);  // heavy ties
            d.rows.push_back({i + 1, {values[i]}, "a"});
        }
        const Discretization disc = fit_equal_frequency(d, bins);
        std::map<double, int> bin_of_value;
        for (double v : values) {
            const int b = bin_of(disc.attributes[0], v);
            const auto [it, inserted] = bin_of_value.emplace(v, b);
            if (!inserted && it->second != b)
                return {false, "tie split across bins at value " + fmt(v)};
        }
    }
    return {true, std::to_string(checked) + " distinct datasets within imbalance 1; "
                  "no tie split in 300 tie datasets"};
}

Outcome criterion_cmi_oracle() {
    std::mt19937_64 rng(9001);
    double max_err = 0.0;
    int tables = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n_vars = 2 + static_cast<int>(rng() % 2);
        std::vector<int> states(n_vars);
        for (int& s : states) s = 2 + static_cast<int>(rng() % 2);

        std::vector<int> counts(ilsc_test::table_size(states));
        int total = 0;
        for (int& c : counts) {
            c = static_cast<int>(rng() % 6);
            total += c;
        }
        if (total == 0) {
            counts[0] = 1;
            total = 1;
        }
        ilsc_test::JointTable table{states, std::vector<double>(counts.size())};
        for (std::size_t i = 0; i < counts.size(); ++i)
            table.p[i] = static_cast<double>(counts[i]) / total;
        const DiscreteDataset dd = ilsc_test::dataset_from_counts(states, counts);
        ++tables;

        auto to_node = [&](int var) { return var == n_vars - 1 ? dd.class_node() : var; };
        for (int i = 0; i < n_vars; ++i) {
            for (int j = i + 1; j < n_vars; ++j) {
                std::vector<int> cond_vars;
                for (int v = 0; v < n_vars; ++v)
                    if (v != i && v != j) cond_vars.push_back(v);
                std::vector<int> cond_nodes;
                for (int v : cond_vars) cond_nodes.push_back(to_node(v));

                const double expect =
                    std::max(0.0, ilsc_test::cmi_oracle(table, i, j, cond_vars));
                const double got = conditional_mutual_information(
                    dd, to_node(i), to_node(j), cond_nodes);
                max_err = std::max(max_err, std::abs(got - expect));

                const double expect_mi =
                    std::max(0.0, ilsc_test::cmi_oracle(table, i, j, {}));
                const double got_mi =
                    conditional_mutual_information(dd, to_node(i), to_node(j));
                max_err = std::max(max_err, std::abs(got_mi - expect_mi));
            }
        }
    }

    // Z = X xor Y, all outcomes equally frequent
    std::vector<int> counts(8, 0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) counts[(x * 2 + y) * 2 + (x ^ y)] = 2;
    const DiscreteDataset dd = ilsc_test::dataset_from_counts({2, 2, 2}, counts);
    const int cond[1] = {dd.class_node()};
    const double xor_bits = conditional_mutual_information(dd, 0, 1, cond);

    const bool ok = max_err < 1e-12 && xor_bits == 1.0;
    return {ok, std::to_string(tables) + " tables, max abs error " + fmt(max_err) +
                    "; xor triple = " + fmt(xor_bits) + " bits"};
}

Outcome criterion_structure_recovery() {
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Dataset data = ilsc_test::planted_dataset(100, 4, seed);
        const Discretization disc = fit_equal_frequency(data, 3);
        const Structure s = learn_structure(discretize(data, disc), 0.1);

        bool exact = s.selected[0];
        for (int a = 1; a < 5; ++a) exact = exact && !s.selected[a];
        for (int a = 0; a < 5; ++a) exact = exact && s.attr_parent[a] == -1;
        if (exact) ++recovered;
    }
    return {recovered >= 95,
            std::to_string(recovered) + "/100 seeds recovered exactly {Class->informative}"};
}

Outcome criterion_posterior_oracle() {
    std::mt19937_64 rng(31415);
    double max_err = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const BayesNet net = ilsc_test::random_net(rng);
        std::vector<int> states(net.n_attributes());
        for (int a = 0; a < net.n_attributes(); ++a) states[a] = net.nodes[a].n_states;

        std::vector<int> bins(net.n_attributes(), 0);
        while (true) {
            const std::vector<double> fast = posterior_discrete(net, bins);
            const ilsc_test::JointPosterior slow =
                ilsc_test::joint_posterior_oracle(net, bins);
            if (std::abs(slow.joint_total - 1.0) > 1e-9)
                return {false, "joint table does not sum to 1"};
            for (std::size_t c = 0; c < fast.size(); ++c)
                max_err = std::max(max_err, std::abs(fast[c] - slow.posterior[c]));

            int a = net.n_attributes() - 1;
            while (a >= 0 && ++bins[a] == states[a]) bins[a--] = 0;
            if (a < 0) break;
        }
    }
    return {max_err < 1e-12,
            "200 random structures, all instances, max abs error " + fmt(max_err)};
}

Outcome criterion_end_to_end() {
    const auto start = Clock::now();
    const fs::path out = g_work / "c8";
    fs::create_directories(out);

    if (run_cli("synth --out-dir c8/corpus --n-per-class 20 --grain 2 --blur 0 "
                "--grain-d 2 --blur-d 2 --seed 11 --format machine",
                out / "synth.txt") != 0)
        return {false, "synth failed"};
    if (run_cli("features --manifest c8/corpus/manifest.tsv --out c8/features.csv "
                "--format machine",
                out / "features.txt") != 0)
        return {false, "features failed"};
    if (run_cli("evaluate --features c8/features.csv --k 5 --t 0.1 --bins 3 --alpha 1 "
                "--seed 0 --format machine",
                out / "eval.txt") != 0)
        return {false, "evaluate failed"};

    const double accuracy = std::stod(machine_value(out / "eval.txt", "accuracy"));
    if (!(accuracy >= 0.80))
        return {false, "pooled CV accuracy " + fmt(accuracy) + " < 0.80"};

    // random-label control: permuted labels must score at chance level
    const Dataset features = read_feature_csv(out / "features.csv");
    double control_lo = 1.0, control_hi = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Dataset shuffled = features;
        std::vector<std::string> labels;
        for (const DataRow& row : shuffled.rows) labels.push_back(row.label);
        std::mt19937_64 rng(seed);
        for (std::size_t i = labels.size(); i > 1; --i)
            std::swap(labels[i - 1], labels[rng() % i]);
        for (std::size_t i = 0; i < labels.size(); ++i)
            shuffled.rows[i].label = labels[i];
        write_feature_csv(shuffled, out / "control.csv");

        if (run_cli("evaluate --features c8/control.csv --k 5 --t 0.1 --bins 3 "
                    "--alpha 1 --seed " + std::to_string(seed) + " --format machine",
                    out / "control_eval.txt") != 0)
            return {false, "control evaluate failed"};
        const double acc =
            std::stod(machine_value(out / "control_eval.txt", "accuracy"));
        control_lo = std::min(control_lo, acc);
        control_hi = std::max(control_hi, acc);
    }
    const double elapsed = seconds_since(start);
    const bool ok = control_lo >= 0.3 && control_hi <= 0.7 && elapsed < 60.0;
    return {ok, "accuracy " + fmt(accuracy) + "; control in [" + fmt(control_lo) +
                    ", " + fmt(control_hi) + "] over 20 seeds; " + fmt(elapsed) + " s"};
}

Outcome criterion_determinism() {
    const fs::path out = g_work / "c9";
    fs::create_directories(out);

    // identical flags, byte-identical outputs
    for (int run = 1; run <= 2; ++run) {
        const std::string dir = "c9/run" + std::to_string(run);
        if (run_cli("synth --out-dir " + dir + " --n-per-class 3 --grain 2 --blur 0 "
                    "--grain-d 2 --blur-d 2 --seed 5 --format machine",
                    out / ("synth" + std::to_string(run) + ".txt")) != 0)
            return {false, "synth failed"};
        if (run_cli("features --manifest " + dir + "/manifest.tsv --out " + dir +
                    "/features.csv --side 100 --format machine",
                    out / ("features" + std::to_string(run) + ".txt")) != 0)
            return {false, "features failed"};
        if (run_cli("evaluate --features " + dir + "/features.csv --k 3 --format machine",
                    out / ("eval" + std::to_string(run) + ".txt")) != 0)
            return {false, "evaluate failed"};
    }
    for (const auto& entry : fs::directory_iterator(out / "run1")) {
        const fs::path twin = out / "run2" / entry.path().filename();
        if (!same_bytes(entry.path(), twin))
            return {false, "rerun differs: " + entry.path().filename().string()};
    }
    if (!same_bytes(out / "eval1.txt", out / "eval2.txt"))
        return {false, "evaluate reports differ between reruns"};

    // model save/load posterior identity
    const Dataset fixture = read_feature_csv(fs::path(ILSC_TEST_DATA_DIR) / "table1.csv");
    const BayesNet net = train(fixture, LearnParams{3, 0.1, 1.0});
    save_model(net, out / "model.ilsc");
    const BayesNet loaded = load_model(out / "model.ilsc");
    double max_err = 0.0;
    for (const DataRow& row : fixture.rows) {
        const auto a = posterior(net, row.values);
        const auto b = posterior(loaded, row.values);
        for (std::size_t c = 0; c < a.size(); ++c)
            max_err = std::max(max_err, std::abs(a[c] - b[c]));
    }
    if (max_err > 1e-12)
        return {false, "model round-trip shifted posteriors by " + fmt(max_err)};

    // canonical CSV and PGM round-trips
    write_feature_csv(fixture, out / "fixture_copy.csv");
    if (!same_bytes(fs::path(ILSC_TEST_DATA_DIR) / "table1.csv", out / "fixture_copy.csv"))
        return {false, "CSV round-trip not byte-identical"};
    const fs::path pgm = out / "run1" / "h_0000.pgm";
    write_pgm(read_pgm(pgm), out / "pgm_copy.pgm");
    if (!same_bytes(pgm, out / "pgm_copy.pgm"))
        return {false, "PGM round-trip not byte-identical"};

    return {true, "reruns byte-identical; model/CSV/PGM round-trips clean"};
}

Outcome criterion_reference_rows() {
    const Dataset fixture = read_feature_csv(fs::path(ILSC_TEST_DATA_DIR) / "table1.csv");
    const BayesNet net = train(fixture, LearnParams{3, 0.1, 1.0});
    int correct = 0;
    for (const DataRow& row : fixture.rows) {
        const int truth = fixture.class_index_of(row.label);
        if (predict(net, row.values) == truth) ++correct;
    }
    return {correct >= 9, "resubstitution " + std::to_string(correct) +
                              "/11 with n_bins=3, t=0.1, alpha=1 (gate: >= 9)"};
}

} // namespace

int main() {
    g_work = fs::temp_directory_path() /
             ("ilsc_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(g_work);

    struct Entry {
        int id;
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Entry> criteria = {
        {1, "ideal speckle contrast law", criterion_contrast_law},
        {2, "blur degradation monotonicity", criterion_blur_monotone},
        {3, "levine = sigma^2 relation", criterion_levine_relation},
        {4, "equal-frequency occupancy and ties", criterion_equal_frequency},
        {5, "CMI matches brute-force oracle", criterion_cmi_oracle},
        {6, "planted structure recovery", criterion_structure_recovery},
        {7, "posterior matches joint enumeration", criterion_posterior_oracle},
        {8, "end-to-end corpus evaluation", criterion_end_to_end},
        {9, "determinism and persistence", criterion_determinism},
        {10, "reference-table resubstitution", criterion_reference_rows},
    };

    int failures = 0;
    for (const Entry& entry : criteria) {
        Outcome outcome;
        try {
            outcome = entry.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.ok) ++failures;
        std::printf("[%s] criterion %2d: %s — %s\n", outcome.ok ? "PASS" : "FAIL",
                    entry.id, entry.title, outcome.detail.c_str());
    }

    std::error_code ec;
    fs::remove_all(g_work, ec);

    if (failures > 0)
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    else
        std::printf("all %zu criteria passed\n", criteria.size());
    return failures;
}
