#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ilsc/dataset.hpp"
#include "ilsc/discretize.hpp"

namespace ilsc {

/// Plug-in conditional mutual information I(i; j | cond) in bits, estimated
/// from empirical joint frequencies. Node indices address attribute columns;
/// data.class_node() addresses the class column. An empty conditioning set
/// gives ordinary mutual information. Zero-probability terms contribute 0.
double conditional_mutual_information(const DiscreteDataset& data, int i, int j,
                                      std::span<const int> cond = {});

/// Selective augmented-naive structure: Class->X_k for every attribute whose
/// mutual information with the class reaches the threshold, then for selected
/// pairs (column order) X_k->X_l when I(X_k;X_l|Class) reaches the threshold
/// and X_l has no attribute parent yet.
struct Structure {
    std::vector<bool> selected;       // Class->X_k edge present
    std::vector<int> attr_parent;     // -1 or parent attribute index
    std::vector<double> class_mi;     // I(X_k; Class) in bits
};

Structure learn_structure(const DiscreteDataset& data, double threshold);

/// Per-attribute conditional probability model. Parents are at most
/// {Class, one attribute}; row index is c*parent_states + parent_bin when an
/// attribute parent is present, c with only the class parent, and 0 for an
/// isolated node.
struct NodeModel {
    bool class_parent = false;
    int attr_parent = -1;
    int n_states = 1;
    std::vector<double> cpt;  // rows x n_states, row-major
    int uniform_rows = 0;     // zero-count contexts filled uniformly (alpha = 0)

    int n_rows() const { return static_cast<int>(cpt.size()) / n_states; }
};

struct BayesNet {
    std::vector<std::string> attribute_names;
    std::vector<std::string> class_values;
    Discretization discretization;
    double threshold = 0.1;
    int n_bins = 3;
    double alpha = 1.0;
    std::vector<double> class_prior;
    std::vector<NodeModel> nodes;   // one per attribute
    std::vector<double> class_mi;   // selection scores, for reporting

    int n_attributes() const { return static_cast<int>(attribute_names.size()); }
    int n_classes() const { return static_cast<int>(class_values.size()); }
    std::vector<std::string> selected_attributes() const;
    /// Directed edges as (parent, child) name pairs, "Class" included.
    std::vector<std::pair<std::string, std::string>> edges() const;
};

struct LearnParams {
    int n_bins = 3;
    double threshold = 0.1;
    double alpha = 1.0;
};

/// Laplace-style estimation: each CPT entry is
/// (count + alpha) / (total + alpha * n_states).
BayesNet fit_cpts(const Structure& structure, const DiscreteDataset& data,
                  const Discretization& disc, const LearnParams& params);

/// fit_equal_frequency + discretize + learn_structure + fit_cpts.
BayesNet train(const Dataset& dataset, const LearnParams& params);

/// Posterior over class values for a continuous instance (discretized with
/// the net's stored cut points). Scores are prior times the product of the
/// attribute conditionals, normalized.
std::vector<double> posterior(const BayesNet& net, std::span<const double> values);
std::vector<double> posterior_discrete(const BayesNet& net, std::span<const int> bins);

/// Predicted class index; ties break toward the earlier class value.
int predict(const BayesNet& net, std::span<const double> values,
            double* confidence = nullptr);

struct CvReport {
    int folds = 0;
    int correct = 0;
    int total = 0;
    double accuracy = 0.0;
    std::vector<std::vector<int>> confusion;  // [true class][predicted class]
    std::vector<int> fold_of_row;
    std::vector<std::vector<std::string>> selected_per_fold;
};

/// Stratified k-fold cross-validation. Discretization, structure and CPTs are
/// fitted on training rows only; the same seed always produces the same fold
/// assignment and report.
CvReport cross_validate(const Dataset& dataset, int k, const LearnParams& params,
                        std::uint64_t seed);

} // namespace ilsc
