#include "ilsc/bayes_net.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ilsc/errors.hpp"

namespace ilsc {

double conditional_mutual_information(const DiscreteDataset& data, int i, int j,
                                      std::span<const int> cond) {
    const int class_node = data.class_node();
    if (i == j)
        throw ValidationError("mutual information needs two distinct nodes");
    auto check_node = [&](int node) {
        if (node < 0 || node > class_node)
            throw ValidationError("node index out of range");
    };
    check_node(i);
    check_node(j);
    for (int c : cond) {
        check_node(c);
        if (c == i || c == j)
            throw ValidationError("conditioning set must exclude the query nodes");
    }
    if (data.rows.empty())
        throw ValidationError("dataset is empty");

    if (i > j) std::swap(i, j);  // the estimate is symmetric; canonicalize

    const int si = data.states_of(i);
    const int sj = data.states_of(j);
    int sc = 1;
    for (int c : cond) sc *= data.states_of(c);

    std::vector<std::int64_t> n_ijc(static_cast<std::size_t>(si) * sj * sc, 0);
    std::vector<std::int64_t> n_ic(static_cast<std::size_t>(si) * sc, 0);
    std::vector<std::int64_t> n_jc(static_cast<std::size_t>(sj) * sc, 0);
    std::vector<std::int64_t> n_c(static_cast<std::size_t>(sc), 0);

    const std::size_t n_rows = data.rows.size();
    for (std::size_t r = 0; r < n_rows; ++r) {
        const int vi = data.value_of(static_cast<int>(r), i);
        const int vj = data.value_of(static_cast<int>(r), j);
        int vc = 0;
        for (int c : cond) vc = vc * data.states_of(c) + data.value_of(static_cast<int>(r), c);
        ++n_ijc[(static_cast<std::size_t>(vc) * si + vi) * sj + vj];
        ++n_ic[static_cast<std::size_t>(vc) * si + vi];
        ++n_jc[static_cast<std::size_t>(vc) * sj + vj];
        ++n_c[vc];
    }

    const double total = static_cast<double>(n_rows);
    double info = 0.0;
    for (int vc = 0; vc < sc; ++vc) {
        for (int vi = 0; vi < si; ++vi) {
            for (int vj = 0; vj < sj; ++vj) {
                const std::int64_t joint =
                    n_ijc[(static_cast<std::size_t>(vc) * si + vi) * sj + vj];
                if (joint == 0) continue;
                const double num = static_cast<double>(joint) *
                                   static_cast<double>(n_c[vc]);
                const double den =
                    static_cast<double>(n_ic[static_cast<std::size_t>(vc) * si + vi]) *
                    static_cast<double>(n_jc[static_cast<std::size_t>(vc) * sj + vj]);
                info += (static_cast<double>(joint) / total) * std::log2(num / den);
            }
        }
    }
    return info < 0.0 ? 0.0 : info;
}

Structure learn_structure(const DiscreteDataset& data, double threshold) {
    if (!(threshold > 0.0))
        throw ValidationError("threshold must be > 0");
    if (data.class_values.empty())
        throw ValidationError("dataset has no class column");

    const int m = data.n_attributes();
    const int class_node = data.class_node();

    Structure s;
    s.selected.assign(m, false);
    s.attr_parent.assign(m, -1);
    s.class_mi.assign(m, 0.0);

    for (int k = 0; k < m; ++k) {
        s.class_mi[k] = conditional_mutual_information(data, k, class_node);
        s.selected[k] = s.class_mi[k] >= threshold;
    }

    const int cond[1] = {class_node};
    for (int k = 0; k < m; ++k) {
        if (!s.selected[k]) continue;
        for (int l = k + 1; l < m; ++l) {
            if (!s.selected[l] || s.attr_parent[l] != -1) continue;
            const double cmi = conditional_mutual_information(data, k, l, cond);
            if (cmi >= threshold) s.attr_parent[l] = k;
        }
    }
    return s;
}

namespace {

std::vector<double> smoothed_row(std::span<const std::int64_t> counts, double alpha,
                                 bool* uniform_fallback) {
    const int states = static_cast<int>(counts.size());
    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    std::vector<double> row(states);
    if (total == 0 && alpha == 0.0) {
        for (double& p : row) p = 1.0 / states;
        if (uniform_fallback) *uniform_fallback = true;
        return row;
    }
    const double den = static_cast<double>(total) + alpha * states;
    for (int v = 0; v < states; ++v)
        row[v] = (static_cast<double>(counts[v]) + alpha) / den;
    return row;
}

} // namespace

BayesNet fit_cpts(const Structure& structure, const DiscreteDataset& data,
                  const Discretization& disc, const LearnParams& params) {
    if (params.alpha < 0.0)
        throw ValidationError("alpha must be >= 0");

    const int m = data.n_attributes();
    const int n_classes = static_cast<int>(data.class_values.size());
    const std::size_t n_rows = data.rows.size();

    BayesNet net;
    net.attribute_names = data.attribute_names;
    net.class_values = data.class_values;
    net.discretization = disc;
    net.threshold = params.threshold;
    net.n_bins = params.n_bins;
    net.alpha = params.alpha;
    net.class_mi = structure.class_mi;

    {
        std::vector<std::int64_t> counts(n_classes, 0);
        for (int label : data.labels) ++counts[label];
        net.class_prior = smoothed_row(counts, params.alpha, nullptr);
    }

    net.nodes.resize(m);
    for (int a = 0; a < m; ++a) {
        NodeModel& node = net.nodes[a];
        node.n_states = data.n_states[a];
        node.class_parent = structure.selected[a];
        node.attr_parent = structure.selected[a] ? structure.attr_parent[a] : -1;

        const int parent_states = node.attr_parent >= 0
                                      ? data.n_states[node.attr_parent]
                                      : 1;
        const int rows = node.class_parent ? n_classes * parent_states : 1;

        std::vector<std::int64_t> counts(static_cast<std::size_t>(rows) * node.n_states, 0);
        for (std::size_t r = 0; r < n_rows; ++r) {
            int row_idx = 0;
            if (node.class_parent) {
                row_idx = data.labels[r];
                if (node.attr_parent >= 0)
                    row_idx = row_idx * parent_states + data.rows[r][node.attr_parent];
            }
            ++counts[static_cast<std::size_t>(row_idx) * node.n_states +
                     data.rows[r][a]];
        }

        node.cpt.resize(counts.size());
        for (int row = 0; row < rows; ++row) {
            bool uniform = false;
            const std::vector<double> probs = smoothed_row(
                std::span<const std::int64_t>(counts).subspan(
                    static_cast<std::size_t>(row) * node.n_states, node.n_states),
                params.alpha, &uniform);
            if (uniform) ++node.uniform_rows;
            std::copy(probs.begin(), probs.end(),
                      node.cpt.begin() + static_cast<std::ptrdiff_t>(row) * node.n_states);
        }
    }
    return net;
}

BayesNet train(const Dataset& dataset, const LearnParams& params) {
    if (dataset.rows.size() < 2)
        throw ValidationError("fewer than 2 rows");
    const Discretization disc = fit_equal_frequency(dataset, params.n_bins);
    const DiscreteDataset ddata = discretize(dataset, disc);
    const Structure structure = learn_structure(ddata, params.threshold);
    return fit_cpts(structure, ddata, disc, params);
}

std::vector<double> posterior_discrete(const BayesNet& net, std::span<const int> bins) {
    if (static_cast<int>(bins.size()) != net.n_attributes())
        throw ValidationError("instance is missing attributes");

    const int n_classes = net.n_classes();
    for (int a = 0; a < net.n_attributes(); ++a)
        if (bins[a] < 0 || bins[a] >= net.nodes[a].n_states)
            throw ValidationError("attribute state out of range");

    std::vector<double> score(net.class_prior);
    for (int a = 0; a < net.n_attributes(); ++a) {
        const NodeModel& node = net.nodes[a];
        const int parent_states = node.attr_parent >= 0
                                      ? net.nodes[node.attr_parent].n_states
                                      : 1;
        for (int c = 0; c < n_classes; ++c) {
            int row = 0;
            if (node.class_parent) {
                row = c;
                if (node.attr_parent >= 0)
                    row = row * parent_states + bins[node.attr_parent];
            }
            score[c] *= node.cpt[static_cast<std::size_t>(row) * node.n_states +
                                 bins[a]];
        }
    }

    double total = 0.0;
    for (double s : score) total += s;
    if (total <= 0.0) {
        // all factored scores vanished; fall back to the prior
        return net.class_prior;
    }
    for (double& s : score) s /= total;
    return score;
}

std::vector<double> posterior(const BayesNet& net, std::span<const double> values) {
    if (static_cast<int>(values.size()) != net.n_attributes())
        throw ValidationError("instance is missing attributes");
    std::vector<int> bins(values.size());
    for (std::size_t a = 0; a < values.size(); ++a)
        bins[a] = bin_of(net.discretization.attributes[a], values[a]);
    return posterior_discrete(net, bins);
}

int predict(const BayesNet& net, std::span<const double> values, double* confidence) {
    const std::vector<double> post = posterior(net, values);
    int best = 0;
    for (int c = 1; c < static_cast<int>(post.size()); ++c)
        if (post[c] > post[best]) best = c;  // ties keep the earlier class
    if (confidence) *confidence = post[best];
    return best;
}

std::vector<std::string> BayesNet::selected_attributes() const {
    std::vector<std::string> out;
    for (int a = 0; a < n_attributes(); ++a)
        if (nodes[a].class_parent) out.push_back(attribute_names[a]);
    return out;
}

std::vector<std::pair<std::string, std::string>> BayesNet::edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (int a = 0; a < n_attributes(); ++a)
        if (nodes[a].class_parent) out.emplace_back("Class", attribute_names[a]);
    for (int a = 0; a < n_attributes(); ++a)
        if (nodes[a].attr_parent >= 0)
            out.emplace_back(attribute_names[nodes[a].attr_parent], attribute_names[a]);
    return out;
}

namespace {

// portable Fisher-Yates so fold assignments do not depend on the standard
// library's std::shuffle implementation
void shuffle_indices(std::vector<int>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace

CvReport cross_validate(const Dataset& dataset, int k, const LearnParams& params,
                        std::uint64_t seed) {
    if (k < 2)
        throw ValidationError("k must be >= 2");
    if (dataset.rows.size() < 2)
        throw ValidationError("fewer than 2 rows");

    const int n_classes = static_cast<int>(dataset.class_values.size());
    std::vector<std::vector<int>> by_class(n_classes);
    for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
        const int c = dataset.class_index_of(dataset.rows[r].label);
        by_class[c].push_back(static_cast<int>(r));
    }
    for (int c = 0; c < n_classes; ++c) {
        if (static_cast<int>(by_class[c].size()) < k)
            throw ValidationError("cannot stratify: class '" +
                                  dataset.class_values[c] + "' has " +
                                  std::to_string(by_class[c].size()) +
                                  " rows, needs >= " + std::to_string(k));
    }

    CvReport report;
    report.folds = k;
    report.fold_of_row.assign(dataset.rows.size(), 0);
    report.confusion.assign(n_classes, std::vector<int>(n_classes, 0));

    std::mt19937_64 rng(seed);
    for (int c = 0; c < n_classes; ++c) {
        shuffle_indices(by_class[c], rng);
        for (std::size_t pos = 0; pos < by_class[c].size(); ++pos)
            report.fold_of_row[by_class[c][pos]] = static_cast<int>(pos % k);
    }

    for (int fold = 0; fold < k; ++fold) {
        Dataset training;
        training.attribute_names = dataset.attribute_names;
        training.class_values = dataset.class_values;
        std::vector<int> test_rows;
        for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
            if (report.fold_of_row[r] == fold)
                test_rows.push_back(static_cast<int>(r));
            else
                training.rows.push_back(dataset.rows[r]);
        }

        const BayesNet net = train(training, params);
        report.selected_per_fold.push_back(net.selected_attributes());

        for (int r : test_rows) {
            const int truth = dataset.class_index_of(dataset.rows[r].label);
            const int pred = predict(net, dataset.rows[r].values);
            ++report.confusion[truth][pred];
            if (pred == truth) ++report.correct;
            ++report.total;
        }
    }
    report.accuracy = static_cast<double>(report.correct) / report.total;
    return report;
}

} // namespace ilsc
