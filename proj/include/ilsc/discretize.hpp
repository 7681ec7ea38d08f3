#pragma once

#include <string>
#include <vector>

#include "ilsc/dataset.hpp"

namespace ilsc {

struct AttributeCuts {
    std::vector<double> cuts;  // strictly increasing
    bool degraded = false;     // fewer distinct values than requested bins

    int n_states() const { return static_cast<int>(cuts.size()) + 1; }
};

/// Per-attribute equal-frequency cut points. Bins are closed above: a value
/// equal to a cut point falls in the lower bin.
struct Discretization {
    std::vector<std::string> attribute_names;
    std::vector<AttributeCuts> attributes;
    int n_bins = 0;
};

/// Splits each attribute's sorted values into n_bins groups whose sizes
/// differ by at most one. Cut points are midpoints between adjacent distinct
/// values; a boundary falling inside a run of equal values is pushed past the
/// run, so ties are never split (bins may collapse).
Discretization fit_equal_frequency(const Dataset& dataset, int n_bins);

int bin_of(const AttributeCuts& cuts, double value);

struct DiscreteDataset {
    std::vector<std::string> attribute_names;
    std::vector<std::string> class_values;
    std::vector<int> n_states;          // per attribute
    std::vector<std::vector<int>> rows; // per row: bin index per attribute
    std::vector<int> labels;            // per row: index into class_values

    int n_attributes() const { return static_cast<int>(attribute_names.size()); }
    /// Node index used to address the class column in information queries.
    int class_node() const { return n_attributes(); }
    int states_of(int node) const {
        return node == class_node() ? static_cast<int>(class_values.size())
                                    : n_states[node];
    }
    int value_of(int row, int node) const {
        return node == class_node() ? labels[row] : rows[row][node];
    }
};

DiscreteDataset discretize(const Dataset& dataset, const Discretization& disc);

} // namespace ilsc
