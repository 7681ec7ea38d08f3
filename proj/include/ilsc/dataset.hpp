#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ilsc {

struct DataRow {
    std::int64_t sample_no = 0;
    std::vector<double> values;
    std::string label;
};

/// Ordered collection of labeled feature vectors. class_values keeps the
/// distinct labels in first-appearance order; labels are an open set.
struct Dataset {
    std::vector<std::string> attribute_names;
    std::vector<DataRow> rows;
    std::vector<std::string> class_values;

    int n_attributes() const { return static_cast<int>(attribute_names.size()); }
    int class_index_of(const std::string& label) const;  // -1 when unknown
    void note_label(const std::string& label);           // extend class_values
};

} // namespace ilsc
