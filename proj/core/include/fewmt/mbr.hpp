#ifndef FEWMT_MBR_HPP
#define FEWMT_MBR_HPP

#include <span>
#include <string>
#include <vector>

#include "fewmt/metrics.hpp"

namespace fewmt {

// values[i*n + j] = u(candidate_i as hypothesis, candidate_j as pseudo-reference)
struct UtilityMatrix {
    std::size_t n = 0;
    std::vector<double> values;
    std::string metric_name;

    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

struct MbrOptions {
    bool include_self = true;  // hypothesis scored against itself as pseudo-reference
    bool use_cache = true;     // duplicate string pairs evaluated once
};

struct MbrResult {
    std::size_t selected_index = 0;
    std::string selected_text;
    std::vector<double> expected_utilities;  // eu[i] = mean_j u(i, j)
};

// All n^2 pairs evaluated, diagonal included. Duplicate candidate strings
// share one evaluation when caching is on; the result is identical either
// way.
UtilityMatrix compute_utility_matrix(std::span<const std::string> candidates,
                                     const Metric& metric, const MbrOptions& options = {});

// Candidate maximizing mean utility against every candidate treated as a
// pseudo-reference. Ties break to the lowest index, which is the backend's
// wire order.
MbrResult mbr_select(std::span<const std::string> candidates, const Metric& metric,
                     const MbrOptions& options = {});

MbrResult mbr_select(const UtilityMatrix& matrix, std::span<const std::string> candidates,
                     const MbrOptions& options = {});

}  // namespace fewmt

#endif  // FEWMT_MBR_HPP
