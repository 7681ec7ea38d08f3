#include "ilsc/discretize.hpp"

#include <algorithm>

#include "ilsc/errors.hpp"

namespace ilsc {

int Dataset::class_index_of(const std::string& label) const {
    for (std::size_t i = 0; i < class_values.size(); ++i)
        if (class_values[i] == label) return static_cast<int>(i);
    return -1;
}

void Dataset::note_label(const std::string& label) {
    if (class_index_of(label) < 0) class_values.push_back(label);
}

namespace {

AttributeCuts fit_attribute(std::vector<double> sorted, int n_bins) {
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    std::size_t distinct = 1;
    for (std::size_t i = 1; i < n; ++i)
        if (sorted[i] != sorted[i - 1]) ++distinct;

    AttributeCuts out;
    if (distinct <= static_cast<std::size_t>(n_bins)) {
        // fewer distinct values than bins: one bin per distinct value
        out.degraded = true;
        for (std::size_t i = 1; i < n; ++i) {
            if (sorted[i] != sorted[i - 1]) {
                double cut = sorted[i - 1] + (sorted[i] - sorted[i - 1]) / 2.0;
                if (cut <= sorted[i - 1] || cut >= sorted[i]) cut = sorted[i - 1];
                if (out.cuts.empty() || cut > out.cuts.back()) out.cuts.push_back(cut);
            }
        }
        return out;
    }

    // group sizes differ by at most one, larger groups first
    const std::size_t base = n / n_bins;
    const std::size_t extra = n % n_bins;
    std::size_t boundary = 0;
    for (int g = 0; g < n_bins - 1; ++g) {
        boundary += base + (static_cast<std::size_t>(g) < extra ? 1 : 0);
        std::size_t p = boundary;
        while (p < n && sorted[p] == sorted[p - 1]) ++p;  // never split ties
        if (p >= n) break;
        double cut = sorted[p - 1] + (sorted[p] - sorted[p - 1]) / 2.0;
        // midpoint of adjacent representable doubles can round onto an
        // endpoint; fall back to the lower value (bins are closed above)
        if (cut <= sorted[p - 1] || cut >= sorted[p]) cut = sorted[p - 1];
        if (out.cuts.empty() || cut > out.cuts.back()) out.cuts.push_back(cut);
    }
    return out;
}

} // namespace

Discretization fit_equal_frequency(const Dataset& dataset, int n_bins) {
    if (n_bins < 2)
        throw ValidationError("n_bins must be >= 2");
    if (dataset.rows.empty())
        throw ValidationError("dataset is empty");

    Discretization disc;
    disc.attribute_names = dataset.attribute_names;
    disc.n_bins = n_bins;
    disc.attributes.reserve(dataset.attribute_names.size());

    std::vector<double> column(dataset.rows.size());
    for (int a = 0; a < dataset.n_attributes(); ++a) {
        for (std::size_t r = 0; r < dataset.rows.size(); ++r)
            column[r] = dataset.rows[r].values[a];
        disc.attributes.push_back(fit_attribute(column, n_bins));
    }
    return disc;
}

int bin_of(const AttributeCuts& cuts, double value) {
    // closed-above: value equal to a cut point goes to the lower bin
    const auto it = std::lower_bound(cuts.cuts.begin(), cuts.cuts.end(), value);
    return static_cast<int>(it - cuts.cuts.begin());
}

DiscreteDataset discretize(const Dataset& dataset, const Discretization& disc) {
    if (dataset.attribute_names != disc.attribute_names)
        throw ValidationError("attribute names do not match discretization");

    DiscreteDataset out;
    out.attribute_names = dataset.attribute_names;
    out.class_values = dataset.class_values;
    out.n_states.reserve(disc.attributes.size());
    for (const AttributeCuts& c : disc.attributes)
        out.n_states.push_back(c.n_states());

    out.rows.reserve(dataset.rows.size());
    out.labels.reserve(dataset.rows.size());
    for (const DataRow& row : dataset.rows) {
        std::vector<int> bins(row.values.size());
        for (std::size_t a = 0; a < row.values.size(); ++a)
            bins[a] = bin_of(disc.attributes[a], row.values[a]);
        out.rows.push_back(std::move(bins));
        const int label = dataset.class_index_of(row.label);
        if (label < 0)
            throw ValidationError("row label '" + row.label +
                                  "' missing from class values");
        out.labels.push_back(label);
    }
    return out;
}

} // namespace ilsc
