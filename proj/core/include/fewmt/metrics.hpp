#ifndef FEWMT_METRICS_HPP
#define FEWMT_METRICS_HPP

#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fewmt/net.hpp"

namespace fewmt {

// Pairwise scoring contract shared by MBR utilities and evaluation. Total on
// all string pairs; score(x, x) == self_score() for overlap metrics.
class Metric {
public:
    virtual ~Metric() = default;

    virtual std::string name() const = 0;
    virtual double score(const std::string& hypothesis, const std::string& reference) const = 0;

    virtual std::vector<double> scores(
        std::span<const std::pair<std::string, std::string>> pairs) const {
        std::vector<double> out;
        out.reserve(pairs.size());
        for (const auto& [hyp, ref] : pairs) out.push_back(score(hyp, ref));
        return out;
    }

    // Batch-oriented implementations (remote services) answer true so
    // callers collect pairs instead of looping.
    virtual bool prefers_batch() const { return false; }
    virtual double self_score() const { return 1.0; }
    virtual std::pair<double, double> range() const { return {0.0, 1.0}; }
    virtual bool symmetric() const { return false; }
};

// F1 over whitespace-token multisets. Both sides empty scores 1, exactly one
// empty scores 0.
double token_f1(const std::string& hypothesis, const std::string& reference);

// Character n-gram F-score, orders 1..6 over whitespace-stripped bytes,
// beta = 2, precision/recall averaged arithmetically over the orders where
// either side has n-grams.
double chrf(const std::string& hypothesis, const std::string& reference);

// Corpus BLEU surrogate ("bleu-lite"): orders up to 4, exponential smoothing
// of zero-match orders, punctuation-splitting tokenization. Deterministic,
// in [0, 100]. Not a SacreBLEU replacement: scores are comparable only to
// themselves.
double bleu_smoothed(std::span<const std::string> hypotheses,
                     std::span<const std::string> references);

double corpus_mean(std::span<const double> scores);

class TokenF1Metric final : public Metric {
public:
    std::string name() const override { return "token-f1"; }
    double score(const std::string& hyp, const std::string& ref) const override {
        return token_f1(hyp, ref);
    }
    bool symmetric() const override { return true; }
};

class ChrfMetric final : public Metric {
public:
    std::string name() const override { return "chrf"; }
    double score(const std::string& hyp, const std::string& ref) const override {
        return chrf(hyp, ref);
    }
};

// Client for a served learned metric. POST {base_url}/v1/score with body
// {"pairs": [{"hypothesis": str, "reference": str}, ...]} and response
// {"scores": [float, ...]} aligned by index. Requests are cut into batches
// of at most batch_size pairs; output order equals input order.
class RemoteMetric final : public Metric {
public:
    explicit RemoteMetric(std::string base_url, std::size_t batch_size = 128,
                          RetryPolicy retry = {}, std::string auth_token = "");

    std::string name() const override { return "remote:" + base_url_; }
    double score(const std::string& hyp, const std::string& ref) const override;
    std::vector<double> scores(
        std::span<const std::pair<std::string, std::string>> pairs) const override;
    bool prefers_batch() const override { return true; }

private:
    std::string base_url_;
    std::size_t batch_size_;
    RetryPolicy retry_;
    std::string auth_token_;
};

std::vector<double> remote_metric_score(const std::string& base_url,
                                        std::span<const std::pair<std::string, std::string>> pairs,
                                        std::size_t batch_size = 128, RetryPolicy retry = {},
                                        const std::string& auth_token = "");

// "token-f1" | "chrf" | "remote:<base_url>"
std::unique_ptr<Metric> make_metric(const std::string& spec, RetryPolicy retry = {},
                                    const std::string& auth_token = "");

// ---- controllability metrics ----

struct VarietyTermTable {
    struct Entry {
        std::string english_term;
        // variety tag -> acceptable surface forms in that variety
        std::map<std::string, std::vector<std::string>> forms;
    };
    std::vector<Entry> entries;

    static VarietyTermTable load_json(const std::string& path);
    std::size_t find_entry(const std::string& english_term) const;  // throws if absent
};

struct LexicalRuleOptions {
    // A hypothesis counts as correct iff it contains at least one form of
    // the target variety and, when forbid_other_forms is set, none that is
    // exclusive to another variety.
    bool forbid_other_forms = true;
    // Drop items containing no variety form at all from the denominator.
    bool exclude_neutral_from_denominator = false;
};

struct LexicalAccuracyResult {
    double accuracy = 0.0;
    std::size_t correct = 0;
    std::size_t total = 0;
    std::size_t target_only = 0;
    std::size_t other_only = 0;
    std::size_t both = 0;
    std::size_t neither = 0;
};

// entry_indices[i] names the term-table entry hypothesis i is about.
LexicalAccuracyResult lexical_accuracy(std::span<const std::string> hypotheses,
                                       const VarietyTermTable& table,
                                       std::span<const std::size_t> entry_indices,
                                       const std::string& target_variety,
                                       const LexicalRuleOptions& options = {});

// Geometric mean across varieties of the arithmetic mean of each variety's
// bucket-level scores.
double frmt_score(const std::map<std::string, std::vector<double>>& per_variety_bucket_scores);

enum class FormalityLevel { Formal, Informal, Neutral };

std::string formality_level_name(FormalityLevel level);
FormalityLevel formality_level_from_name(const std::string& name);

struct FormalityAnnotatedRef {
    std::string formal_text;    // markers stripped
    std::string informal_text;
    std::vector<std::string> formal_phrases;
    std::vector<std::string> informal_phrases;
    FormalityLevel desired = FormalityLevel::Formal;
};

// "Sind [Sie] sicher" -> text "Sind Sie sicher", phrases {"Sie"}. At least
// one marked span is required.
std::pair<std::string, std::vector<std::string>> parse_marked_reference(const std::string& marked);

// JSONL: {"formal": str, "informal": str, "desired": "formal"|"informal"}
// with contrastive phrases wrapped in square brackets.
std::vector<FormalityAnnotatedRef> load_formality_refs(const std::string& path);

FormalityLevel label_formality(const std::string& hypothesis, const FormalityAnnotatedRef& ref);

struct FormalityAccuracyResult {
    double accuracy = 0.0;
    std::size_t correct = 0;
    std::size_t total = 0;
    std::size_t formal = 0;
    std::size_t informal = 0;
    std::size_t neutral = 0;
};

FormalityAccuracyResult formality_accuracy(std::span<const std::string> hypotheses,
                                           std::span<const FormalityAnnotatedRef> references);

}  // namespace fewmt

#endif  // FEWMT_METRICS_HPP
