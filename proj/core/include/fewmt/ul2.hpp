#ifndef FEWMT_UL2_HPP
#define FEWMT_UL2_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fewmt/rng.hpp"
#include "fewmt/token.hpp"

namespace fewmt {

enum class ObjectiveKind { Causal, Prefix, SpanA, SpanB };

std::string objective_name(ObjectiveKind kind);
ObjectiveKind objective_from_name(const std::string& name);

struct SpanCorruptionConfig {
    double noise_density = 0.15;     // fraction of tokens corrupted, in (0,1)
    double mean_span_length = 3.0;   // average corrupted tokens per span, >= 1
    void validate() const;
};

struct MixtureWeights {
    double causal = 0.6;
    double prefix = 0.2;
    double span_a = 0.1;
    double span_b = 0.1;
    void validate() const;  // throws InvalidWeights unless sum == 1 within 1e-9
};

struct TrainingExample {
    TokenSequence input_tokens;
    TokenSequence target_tokens;
    std::vector<std::uint8_t> loss_mask;  // one flag per target position
    ObjectiveKind kind = ObjectiveKind::Causal;
};

struct PreprocessConfig {
    std::size_t max_sequence_length = 2048;
    MixtureWeights mixture;
    SpanCorruptionConfig span_a{0.15, 3.0};
    SpanCorruptionConfig span_b{0.5, 32.0};
    std::uint64_t rng_seed = 0;
    std::uint64_t max_examples = 0;  // per-language cap; 0 = unlimited
    void validate() const;
};

// Replace non-adjacent token spans with sentinel(0), sentinel(1), ... in
// order; the target lists each sentinel followed by the span it replaced and
// ends with one terminal sentinel. The corrupted-token budget is
// round(noise_density * len) and the span count round(budget / mean_span_length),
// so splicing the target spans back over the input sentinels reproduces seq
// exactly.
std::pair<TokenSequence, TokenSequence> corrupt_spans(const TokenSequence& seq,
                                                      const SpanCorruptionConfig& cfg,
                                                      Rng& rng, const Tokenizer& tokenizer);

// Span count corrupt_spans will use for a sequence of this length, after all
// clamps. Exposed so callers can size a chunk such that
// len + 2 * planned_span_count(...) + 1 fits a packing budget.
std::size_t planned_span_count(std::size_t len, const SpanCorruptionConfig& cfg,
                               std::size_t sentinel_slots);

TrainingExample make_span_example(const TokenSequence& seq, const SpanCorruptionConfig& cfg,
                                  Rng& rng, const Tokenizer& tokenizer, ObjectiveKind kind);

// Split at a point drawn uniformly from [1, len-1]; input is the prefix,
// target the continuation.
TrainingExample make_prefix_lm(const TokenSequence& seq, Rng& rng);

TrainingExample make_causal(const TokenSequence& seq);

ObjectiveKind sample_objective(const MixtureWeights& weights, Rng& rng);

struct DatasetStats {
    std::uint64_t total = 0;
    std::uint64_t causal = 0;
    std::uint64_t prefix = 0;
    std::uint64_t span_a = 0;
    std::uint64_t span_b = 0;
    std::uint64_t documents = 0;
    std::uint64_t skipped_empty_documents = 0;

    std::uint64_t count(ObjectiveKind kind) const;
};

std::string dataset_stats_json(const DatasetStats& stats);

using DocumentSource = std::function<std::optional<std::string>()>;
using ExampleSink = std::function<void(const TrainingExample&)>;

// Tokenize each document, cut it into contiguous windows of at most
// max_sequence_length tokens, sample one objective per window, and emit the
// examples in document order. Each document's randomness comes from
// derive_seed(cfg.rng_seed, document_index), so the worker count never
// changes the output stream.
DatasetStats build_dataset(const DocumentSource& next_document, const PreprocessConfig& cfg,
                           const Tokenizer& tokenizer, const ExampleSink& sink,
                           unsigned workers = 1);

// Decoder-only flat serialization: input ++ separator sentinel ++ target,
// with loss only on target positions. The separator is the tokenizer's
// highest-index sentinel, which span corruption never uses.
std::pair<TokenSequence, std::vector<std::uint8_t>> flatten_example(
    const TrainingExample& example, const Tokenizer& tokenizer);

void write_example_jsonl(std::ostream& out, const TrainingExample& example);
void write_example_binary(std::ostream& out, const TrainingExample& example);
TrainingExample example_from_jsonl_line(const std::string& line, std::size_t line_number);
std::optional<TrainingExample> read_example_binary(std::istream& in);

}  // namespace fewmt

#endif  // FEWMT_UL2_HPP
