#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "ilsc/discretize.hpp"
#include "ilsc/errors.hpp"

using namespace ilsc;

namespace {

Dataset column_dataset(const std::vector<double>& values) {
    Dataset d;
    d.attribute_names = {"x"};
    for (std::size_t i = 0; i < values.size(); ++i) {
        DataRow row;
        row.sample_no = static_cast<std::int64_t>(i + 1);
        row.values = {values[i]};
        row.label = "a";
        d.rows.push_back(std::move(row));
    }
    d.class_values = {"a"};
    return d;
}

std::vector<int> occupancies(const std::vector<double>& values,
                             const AttributeCuts& cuts) {
    std::vector<int> counts(cuts.n_states(), 0);
    for (double v : values) ++counts[bin_of(cuts, v)];
    return counts;
}

} // namespace

TEST_SUITE("discretize") {

TEST_CASE("exact three-way split") {
    const std::vector<double> values{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const Discretization d = fit_equal_frequency(column_dataset(values), 3);
    REQUIRE(d.attributes[0].cuts.size() == 2);
    CHECK(d.attributes[0].cuts[0] == 3.5);
    CHECK(d.attributes[0].cuts[1] == 6.5);
    CHECK(!d.attributes[0].degraded);
    CHECK(occupancies(values, d.attributes[0]) == std::vector<int>{3, 3, 3});
}

TEST_CASE("imbalance of at most one, larger groups first") {
    std::vector<double> values(40);
    for (int i = 0; i < 40; ++i) values[i] = i * 1.25;
    const Discretization d = fit_equal_frequency(column_dataset(values), 3);
    CHECK(occupancies(values, d.attributes[0]) == std::vector<int>{14, 13, 13});
}

TEST_CASE("identical values collapse to one bin") {
    const std::vector<double> values(12, 5.0);
    const Discretization d = fit_equal_frequency(column_dataset(values), 4);
    CHECK(d.attributes[0].cuts.empty());
    CHECK(d.attributes[0].degraded);
    CHECK(occupancies(values, d.attributes[0]) == std::vector<int>{12});
}

TEST_CASE("fewer distinct values than bins degrades to distinct-value bins") {
    const std::vector<double> values{1, 1, 2, 2, 3, 3};
    const Discretization d = fit_equal_frequency(column_dataset(values), 5);
    CHECK(d.attributes[0].degraded);
    CHECK(d.attributes[0].cuts == std::vector<double>{1.5, 2.5});
    CHECK(occupancies(values, d.attributes[0]) == std::vector<int>{2, 2, 2});
}

TEST_CASE("cut point convention is closed above") {
    AttributeCuts cuts;
    cuts.cuts = {3.5, 6.5};
    CHECK(bin_of(cuts, 3.5) == 0);
    CHECK(bin_of(cuts, 3.6) == 1);
    CHECK(bin_of(cuts, 6.5) == 1);
    CHECK(bin_of(cuts, -100.0) == 0);
    CHECK(bin_of(cuts, 100.0) == 2);
}

TEST_CASE("attribute mismatch is rejected") {
    const Dataset d = column_dataset({1, 2, 3});
    Discretization disc = fit_equal_frequency(d, 2);
    disc.attribute_names = {"y"};
    CHECK_THROWS_AS(discretize(d, disc), ValidationError);
}

TEST_CASE("validation of fit arguments") {
    CHECK_THROWS_AS(fit_equal_frequency(column_dataset({1, 2}), 1), ValidationError);
    Dataset empty;
    empty.attribute_names = {"x"};
    CHECK_THROWS_AS(fit_equal_frequency(empty, 3), ValidationError);
}

TEST_CASE("occupancies differ by at most one on distinct data") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 199);
        std::vector<double> values(n);
        for (int i = 0; i < n; ++i) values[i] = i * 0.5 + 1.0;
        std::shuffle(values.begin(), values.end(), rng);
        const int bins = 2 + static_cast<int>(rng() % 9);
        if (bins > n) continue;

        const Discretization d = fit_equal_frequency(column_dataset(values), bins);
        const std::vector<int> occ = occupancies(values, d.attributes[0]);
        int total = 0;
        for (int c : occ) total += c;
        CHECK(total == n);
        if (!d.attributes[0].degraded) {
            const auto [lo, hi] = std::minmax_element(occ.begin(), occ.end());
            CHECK(*hi - *lo <= 1);
        }
    }
}

TEST_CASE("ties are never split across bins") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 5 + static_cast<int>(rng() % 100);
        std::vector<double> values(n);
        for (int i = 0; i < n; ++i)
            values[i] = static_cast<double>(rng() % 7);  // heavy ties
        const int bins = 2 + static_cast<int>(rng() % 9);

        const Discretization d = fit_equal_frequency(column_dataset(values), bins);
        std::map<double, int> bin_of_value;
        for (double v : values) {
            const int b = bin_of(d.attributes[0], v);
            const auto [it, inserted] = bin_of_value.emplace(v, b);
            if (!inserted) CHECK(it->second == b);
        }
    }
}

TEST_CASE("discretizing the fitting data reproduces the fitted occupancies") {
    std::mt19937_64 rng(123);
    std::vector<double> values(60);
    for (double& v : values) v = static_cast<double>(rng() % 20);
    Dataset data = column_dataset(values);
    const Discretization d = fit_equal_frequency(data, 4);
    const DiscreteDataset dd = discretize(data, d);

    std::vector<int> counts(d.attributes[0].n_states(), 0);
    for (const auto& row : dd.rows) ++counts[row[0]];
    CHECK(counts == occupancies(values, d.attributes[0]));
    int total = 0;
    for (int c : counts) total += c;
    CHECK(total == 60);
}

} // TEST_SUITE
