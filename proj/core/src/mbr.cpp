#include "fewmt/mbr.hpp"

#include <unordered_map>

#include "fewmt/errors.hpp"

namespace fewmt {

UtilityMatrix compute_utility_matrix(std::span<const std::string> candidates,
                                     const Metric& metric, const MbrOptions& options) {
    if (candidates.empty()) throw EmptyInput("utility matrix of zero candidates");
    const std::size_t n = candidates.size();

    UtilityMatrix matrix;
    matrix.n = n;
    matrix.metric_name = metric.name();
    matrix.values.assign(n * n, 0.0);

    if (!options.use_cache) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                try {
                    matrix.at(i, j) = metric.score(candidates[i], candidates[j]);
                } catch (const Error&) {
                    throw;
                } catch (const std::exception& e) {
                    throw MetricFailure(i, j, e.what());
                }
            }
        }
        return matrix;
    }

    // map each candidate to its first occurrence, score unique pairs once
    std::unordered_map<std::string, std::size_t> first_seen;
    std::vector<std::size_t> unique_of(n);
    std::vector<std::size_t> representative;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [it, inserted] = first_seen.emplace(candidates[i], representative.size());
        if (inserted) representative.push_back(i);
        unique_of[i] = it->second;
    }

    const std::size_t u = representative.size();
    std::vector<double> unique_values(u * u);
    if (metric.prefers_batch()) {
        std::vector<std::pair<std::string, std::string>> pairs;
        pairs.reserve(u * u);
        for (std::size_t a = 0; a < u; ++a) {
            for (std::size_t b = 0; b < u; ++b) {
                pairs.emplace_back(candidates[representative[a]], candidates[representative[b]]);
            }
        }
        std::vector<double> scored;
        try {
            scored = metric.scores(pairs);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw MetricFailure(representative[0], representative[0], e.what());
        }
        if (scored.size() != pairs.size()) {
            throw LengthMismatch("utility scores", pairs.size(), scored.size(),
                                 Error::Category::Runtime);
        }
        unique_values = std::move(scored);
    } else {
        for (std::size_t a = 0; a < u; ++a) {
            for (std::size_t b = 0; b < u; ++b) {
                try {
                    unique_values[a * u + b] =
                        metric.score(candidates[representative[a]], candidates[representative[b]]);
                } catch (const Error&) {
                    throw;
                } catch (const std::exception& e) {
                    throw MetricFailure(representative[a], representative[b], e.what());
                }
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            matrix.at(i, j) = unique_values[unique_of[i] * u + unique_of[j]];
        }
    }
    return matrix;
}

MbrResult mbr_select(const UtilityMatrix& matrix, std::span<const std::string> candidates,
                     const MbrOptions& options) {
    const std::size_t n = matrix.n;
    if (n == 0 || candidates.size() != n) {
        throw LengthMismatch("mbr candidates vs matrix", n, candidates.size());
    }

    MbrResult result;
    result.expected_utilities.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        std::size_t denom = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!options.include_self && i == j) continue;
            sum += matrix.at(i, j);
            ++denom;
        }
        // a single candidate with self excluded has no pseudo-references
        // left; fall back to its self-score
        result.expected_utilities[i] =
            denom == 0 ? matrix.at(i, i) : sum / static_cast<double>(denom);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (result.expected_utilities[i] > result.expected_utilities[best]) best = i;
    }
    result.selected_index = best;
    result.selected_text = candidates[best];
    return result;
}

MbrResult mbr_select(std::span<const std::string> candidates, const Metric& metric,
                     const MbrOptions& options) {
    const UtilityMatrix matrix = compute_utility_matrix(candidates, metric, options);
    return mbr_select(matrix, candidates, options);
}

}  // namespace fewmt
