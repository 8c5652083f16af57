#ifndef FEWMT_POOL_HPP
#define FEWMT_POOL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fewmt/rng.hpp"

namespace fewmt {

struct Demonstration {
    std::string source;
    std::string target;
    std::optional<double> cds;             // quality proxy in [0,1]; lower = closer to trusted data
    std::optional<std::string> variety;    // e.g. "mainland", "taiwan"
    std::optional<std::string> formality;  // "formal" | "informal"
};

enum class CdsBucket { Low, Mid, High };

std::string bucket_name(CdsBucket bucket);
CdsBucket bucket_from_name(const std::string& name);

struct BucketBoundaries {
    double low_end = 1.0 / 3.0;  // Low: [0, low_end)
    double mid_end = 2.0 / 3.0;  // Mid: [low_end, mid_end); High: [mid_end, 1]
};

// Half-open thirds, top bucket closed at 1.
CdsBucket assign_bucket(double score, const BucketBoundaries& bounds = {});

struct SelectionStrategy {
    enum class Kind { Uniform, Bucket, TagMatched, TagMismatched };
    Kind kind = Kind::Uniform;
    CdsBucket bucket = CdsBucket::Low;  // Bucket strategy
    std::string axis;                   // "variety" | "formality" for tag strategies
    std::string value;

    std::string describe() const;
};

struct SelectionConfig {
    std::size_t k = 5;
    SelectionStrategy strategy;
    BucketBoundaries bounds;
};

struct PoolStats {
    std::size_t count = 0;
    std::size_t with_cds = 0;
    std::size_t low = 0, mid = 0, high = 0;
    std::map<std::string, std::size_t> variety_counts;
    std::map<std::string, std::size_t> formality_counts;
};

class DemoPool {
public:
    DemoPool() = default;
    explicit DemoPool(std::vector<Demonstration> entries) : entries_(std::move(entries)) {}

    // One JSON object per line:
    //   {"source": str, "target": str, "cds": float?, "variety": str?, "formality": str?}
    // Malformed lines raise ParseError/ValidationError carrying the 1-based
    // line number.
    static DemoPool load_jsonl(const std::string& path);

    const std::vector<Demonstration>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    PoolStats stats(const BucketBoundaries& bounds = {}) const;

private:
    std::vector<Demonstration> entries_;
};

// Per-example quality signal: cross-entropy under the base model minus
// cross-entropy under the trusted-data model. Higher = further from the
// trusted distribution.
std::vector<double> cds_scores(std::span<const double> ce_base,
                               std::span<const double> ce_trusted);

struct NormalizedScores {
    std::vector<double> values;
    bool degenerate = false;  // all inputs equal; values are all 0.5
};

// Min-max map onto [0,1]; order-preserving.
NormalizedScores normalize_cds(std::span<const double> raw);

// k distinct entries sampled uniformly without replacement from the pool
// entries passing the strategy filter.
std::vector<Demonstration> select_demonstrations(const DemoPool& pool,
                                                 const SelectionConfig& cfg, Rng& rng);

}  // namespace fewmt

#endif  // FEWMT_POOL_HPP
