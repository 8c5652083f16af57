#include "fewmt/ul2.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_set>

#include "fewmt/errors.hpp"
#include "json.hpp"

namespace fewmt {

namespace {

// Sorted sample of `count` distinct values from {1, ..., universe} (Floyd).
std::vector<std::size_t> sample_distinct_sorted(Rng& rng, std::size_t count,
                                                std::size_t universe) {
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(count * 2);
    for (std::size_t j = universe - count + 1; j <= universe; ++j) {
        const std::size_t t = 1 + static_cast<std::size_t>(rng.below(j));
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::size_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

// Uniform composition of total into parts values each >= 1.
std::vector<std::size_t> compose_positive(Rng& rng, std::size_t total, std::size_t parts) {
    std::vector<std::size_t> lengths;
    lengths.reserve(parts);
    if (parts == 1) {
        lengths.push_back(total);
        return lengths;
    }
    const auto cuts = sample_distinct_sorted(rng, parts - 1, total - 1);
    std::size_t prev = 0;
    for (const std::size_t c : cuts) {
        lengths.push_back(c - prev);
        prev = c;
    }
    lengths.push_back(total - prev);
    return lengths;
}

// Uniform composition of total into parts values each >= 0 (stars and bars).
std::vector<std::size_t> compose_nonnegative(Rng& rng, std::size_t total, std::size_t parts) {
    std::vector<std::size_t> out;
    out.reserve(parts);
    if (parts == 1) {
        out.push_back(total);
        return out;
    }
    const auto bars = sample_distinct_sorted(rng, parts - 1, total + parts - 1);
    std::size_t prev = 0;
    for (const std::size_t b : bars) {
        out.push_back(b - prev - 1);
        prev = b;
    }
    out.push_back(total + parts - 1 - prev);
    return out;
}

std::size_t corruption_budget(std::size_t len, const SpanCorruptionConfig& cfg) {
    const auto budget =
        static_cast<std::size_t>(std::llround(cfg.noise_density * static_cast<double>(len)));
    return std::min(budget, len - 1);  // at least one token stays uncorrupted
}

}  // namespace

void SpanCorruptionConfig::validate() const {
    if (!(noise_density > 0.0) || !(noise_density < 1.0)) {
        throw OutOfRange("noise_density must lie in (0,1)");
    }
    if (!(mean_span_length >= 1.0)) {
        throw OutOfRange("mean_span_length must be >= 1");
    }
}

void MixtureWeights::validate() const {
    const double parts[] = {causal, prefix, span_a, span_b};
    double sum = 0.0;
    for (const double w : parts) {
        if (w < 0.0) throw InvalidWeights("mixture weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw InvalidWeights("mixture weights must sum to 1, got " + std::to_string(sum));
    }
}

void PreprocessConfig::validate() const {
    if (max_sequence_length < 2) {
        throw OutOfRange("max_sequence_length must be >= 2");
    }
    mixture.validate();
    span_a.validate();
    span_b.validate();
}

std::string objective_name(ObjectiveKind kind) {
    switch (kind) {
        case ObjectiveKind::Causal: return "causal";
        case ObjectiveKind::Prefix: return "prefix";
        case ObjectiveKind::SpanA: return "span_a";
        case ObjectiveKind::SpanB: return "span_b";
    }
    throw OutOfRange("unknown objective kind");
}

ObjectiveKind objective_from_name(const std::string& name) {
    if (name == "causal") return ObjectiveKind::Causal;
    if (name == "prefix") return ObjectiveKind::Prefix;
    if (name == "span_a") return ObjectiveKind::SpanA;
    if (name == "span_b") return ObjectiveKind::SpanB;
    throw ValidationError("unknown objective kind: " + name);
}

std::size_t planned_span_count(std::size_t len, const SpanCorruptionConfig& cfg,
                               std::size_t sentinel_slots) {
    if (len < 2) return 0;
    if (sentinel_slots < 3) return 0;  // span marks + terminal + packing separator
    const std::size_t budget = corruption_budget(len, cfg);
    if (budget == 0) return 0;
    auto spans = static_cast<std::size_t>(
        std::llround(cfg.noise_density * static_cast<double>(len) / cfg.mean_span_length));
    spans = std::max<std::size_t>(spans, 1);
    spans = std::min(spans, budget);            // every span holds >= 1 token
    spans = std::min(spans, len - budget + 1);  // middle gaps need >= 1 token each
    spans = std::min(spans, sentinel_slots - 2);
    return spans;
}

std::pair<TokenSequence, TokenSequence> corrupt_spans(const TokenSequence& seq,
                                                      const SpanCorruptionConfig& cfg,
                                                      Rng& rng, const Tokenizer& tokenizer) {
    cfg.validate();
    const std::size_t len = seq.size();
    if (len < 2) {
        throw DegenerateInput("span corruption needs at least 2 tokens, got " +
                              std::to_string(len));
    }

    const std::size_t spans = planned_span_count(len, cfg, tokenizer.sentinel_count());
    if (spans == 0) {
        return {seq, TokenSequence{tokenizer.sentinel(0)}};
    }
    const std::size_t budget = corruption_budget(len, cfg);

    const auto lengths = compose_positive(rng, budget, spans);
    // gaps: before / between / after the spans; the spans - 1 middle gaps
    // each reserve one token so spans never touch
    const std::size_t slack = len - budget - (spans - 1);
    const auto extra = compose_nonnegative(rng, slack, spans + 1);

    TokenSequence input;
    TokenSequence target;
    input.reserve(len - budget + spans);
    target.reserve(budget + spans + 1);

    std::size_t cursor = 0;
    for (std::size_t i = 0; i < spans; ++i) {
        std::size_t gap = extra[i] + (i == 0 ? 0 : 1);
        for (std::size_t g = 0; g < gap; ++g) input.push_back(seq[cursor++]);
        const TokenId mark = tokenizer.sentinel(i);
        input.push_back(mark);
        target.push_back(mark);
        for (std::size_t t = 0; t < lengths[i]; ++t) target.push_back(seq[cursor++]);
    }
    while (cursor < len) input.push_back(seq[cursor++]);
    target.push_back(tokenizer.sentinel(spans));
    return {std::move(input), std::move(target)};
}

TrainingExample make_span_example(const TokenSequence& seq, const SpanCorruptionConfig& cfg,
                                  Rng& rng, const Tokenizer& tokenizer, ObjectiveKind kind) {
    auto [input, target] = corrupt_spans(seq, cfg, rng, tokenizer);
    TrainingExample example;
    example.input_tokens = std::move(input);
    example.target_tokens = std::move(target);
    example.loss_mask.assign(example.target_tokens.size(), 1);
    example.kind = kind;
    return example;
}

TrainingExample make_prefix_lm(const TokenSequence& seq, Rng& rng) {
    if (seq.size() < 2) {
        throw DegenerateInput("prefix LM needs at least 2 tokens, got " +
                              std::to_string(seq.size()));
    }
    const std::size_t split = 1 + static_cast<std::size_t>(rng.below(seq.size() - 1));
    TrainingExample example;
    example.input_tokens.assign(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(split));
    example.target_tokens.assign(seq.begin() + static_cast<std::ptrdiff_t>(split), seq.end());
    example.loss_mask.assign(example.target_tokens.size(), 1);
    example.kind = ObjectiveKind::Prefix;
    return example;
}

TrainingExample make_causal(const TokenSequence& seq) {
    if (seq.empty()) {
        throw DegenerateInput("causal LM needs a non-empty sequence");
    }
    TrainingExample example;
    example.target_tokens = seq;
    example.loss_mask.assign(seq.size(), 1);
    example.kind = ObjectiveKind::Causal;
    return example;
}

ObjectiveKind sample_objective(const MixtureWeights& weights, Rng& rng) {
    weights.validate();
    const double u = rng.next_unit();
    double cum = weights.causal;
    if (u < cum) return ObjectiveKind::Causal;
    cum += weights.prefix;
    if (u < cum) return ObjectiveKind::Prefix;
    cum += weights.span_a;
    if (u < cum) return ObjectiveKind::SpanA;
    return ObjectiveKind::SpanB;
}

std::uint64_t DatasetStats::count(ObjectiveKind kind) const {
    switch (kind) {
        case ObjectiveKind::Causal: return causal;
        case ObjectiveKind::Prefix: return prefix;
        case ObjectiveKind::SpanA: return span_a;
        case ObjectiveKind::SpanB: return span_b;
    }
    throw OutOfRange("unknown objective kind");
}

std::string dataset_stats_json(const DatasetStats& stats) {
    nlohmann::json j;
    j["total"] = stats.total;
    j["per_objective"] = {{"causal", stats.causal},
                          {"prefix", stats.prefix},
                          {"span_a", stats.span_a},
                          {"span_b", stats.span_b}};
    j["documents"] = stats.documents;
    j["skipped_empty_documents"] = stats.skipped_empty_documents;
    return j.dump(2);
}

namespace {

// Largest prefix of the chunk whose corrupted form still packs into
// max_len: len + 2 * spans + 1 tokens (input sentinels, target sentinels,
// terminal).
std::size_t trimmed_span_chunk_length(std::size_t chunk_len, const SpanCorruptionConfig& cfg,
                                      std::size_t sentinel_slots, std::size_t max_len) {
    std::size_t len = chunk_len;
    while (len >= 2) {
        const std::size_t spans = planned_span_count(len, cfg, sentinel_slots);
        if (len + 2 * spans + 1 <= max_len) return len;
        --len;
    }
    return 0;
}

std::vector<TrainingExample> process_document(const std::string& doc, const PreprocessConfig& cfg,
                                              const Tokenizer& tokenizer, std::uint64_t doc_seed,
                                              bool* empty) {
    std::vector<TrainingExample> out;
    const TokenSequence tokens = tokenizer.encode(doc);
    *empty = tokens.empty();
    if (tokens.empty()) return out;

    Rng rng(doc_seed);
    const std::size_t max_len = cfg.max_sequence_length;
    for (std::size_t begin = 0; begin < tokens.size(); begin += max_len) {
        const std::size_t end = std::min(begin + max_len, tokens.size());
        TokenSequence chunk(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                            tokens.begin() + static_cast<std::ptrdiff_t>(end));
        ObjectiveKind kind = sample_objective(cfg.mixture, rng);
        if (chunk.size() < 2 && kind != ObjectiveKind::Causal) {
            kind = ObjectiveKind::Causal;  // too short for a split or a span
        }
        switch (kind) {
            case ObjectiveKind::Causal:
                out.push_back(make_causal(chunk));
                break;
            case ObjectiveKind::Prefix:
                out.push_back(make_prefix_lm(chunk, rng));
                break;
            case ObjectiveKind::SpanA:
            case ObjectiveKind::SpanB: {
                const auto& span_cfg =
                    kind == ObjectiveKind::SpanA ? cfg.span_a : cfg.span_b;
                const std::size_t keep = trimmed_span_chunk_length(
                    chunk.size(), span_cfg, tokenizer.sentinel_count(), max_len);
                if (keep < 2) {
                    out.push_back(make_causal(chunk));
                    break;
                }
                chunk.resize(keep);
                out.push_back(make_span_example(chunk, span_cfg, rng, tokenizer, kind));
                break;
            }
        }
    }
    return out;
}

}  // namespace

DatasetStats build_dataset(const DocumentSource& next_document, const PreprocessConfig& cfg,
                           const Tokenizer& tokenizer, const ExampleSink& sink,
                           unsigned workers) {
    cfg.validate();
    if (workers == 0) workers = 1;

    DatasetStats stats;
    std::uint64_t doc_index = 0;
    bool capped = false;

    const auto emit = [&](const TrainingExample& example) {
        if (cfg.max_examples != 0 && stats.total >= cfg.max_examples) {
            capped = true;
            return;
        }
        sink(example);
        ++stats.total;
        switch (example.kind) {
            case ObjectiveKind::Causal: ++stats.causal; break;
            case ObjectiveKind::Prefix: ++stats.prefix; break;
            case ObjectiveKind::SpanA: ++stats.span_a; break;
            case ObjectiveKind::SpanB: ++stats.span_b; break;
        }
    };

    const std::size_t batch_size = std::max<std::size_t>(workers * 16, 64);
    std::vector<std::string> docs;
    docs.reserve(batch_size);
    while (!capped) {
        docs.clear();
        while (docs.size() < batch_size) {
            auto doc = next_document();
            if (!doc) break;
            docs.push_back(std::move(*doc));
        }
        if (docs.empty()) break;

        std::vector<std::vector<TrainingExample>> results(docs.size());
        std::vector<std::uint8_t> empties(docs.size(), 0);
        if (workers == 1 || docs.size() == 1) {
            for (std::size_t i = 0; i < docs.size(); ++i) {
                bool empty = false;
                results[i] = process_document(docs[i], cfg, tokenizer,
                                              derive_seed(cfg.rng_seed, doc_index + i), &empty);
                empties[i] = empty ? 1 : 0;
            }
        } else {
            std::atomic<std::size_t> cursor{0};
            auto worker = [&] {
                for (;;) {
                    const std::size_t i = cursor.fetch_add(1);
                    if (i >= docs.size()) return;
                    bool empty = false;
                    results[i] =
                        process_document(docs[i], cfg, tokenizer,
                                         derive_seed(cfg.rng_seed, doc_index + i), &empty);
                    empties[i] = empty ? 1 : 0;
                }
            };
            std::vector<std::thread> pool;
            const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(docs.size()));
            pool.reserve(n);
            for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }

        for (std::size_t i = 0; i < docs.size(); ++i) {
            ++stats.documents;
            if (empties[i]) ++stats.skipped_empty_documents;
            for (const auto& example : results[i]) {
                emit(example);
                if (capped) break;
            }
            if (capped) break;
        }
        doc_index += docs.size();
    }
    return stats;
}

std::pair<TokenSequence, std::vector<std::uint8_t>> flatten_example(
    const TrainingExample& example, const Tokenizer& tokenizer) {
    TokenSequence flat;
    flat.reserve(example.input_tokens.size() + 1 + example.target_tokens.size());
    std::vector<std::uint8_t> mask;
    mask.reserve(flat.capacity());

    flat.insert(flat.end(), example.input_tokens.begin(), example.input_tokens.end());
    mask.assign(example.input_tokens.size(), 0);
    flat.push_back(tokenizer.sentinel(tokenizer.sentinel_count() - 1));
    mask.push_back(0);
    flat.insert(flat.end(), example.target_tokens.begin(), example.target_tokens.end());
    mask.insert(mask.end(), example.loss_mask.begin(), example.loss_mask.end());
    return {std::move(flat), std::move(mask)};
}

void write_example_jsonl(std::ostream& out, const TrainingExample& example) {
    nlohmann::json j;
    j["input"] = example.input_tokens;
    j["target"] = example.target_tokens;
    j["loss_mask"] = example.loss_mask;
    j["kind"] = objective_name(example.kind);
    out << j.dump() << '\n';
}

TrainingExample example_from_jsonl_line(const std::string& line, std::size_t line_number) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(line_number, e.what());
    }
    TrainingExample example;
    try {
        example.input_tokens = j.at("input").get<TokenSequence>();
        example.target_tokens = j.at("target").get<TokenSequence>();
        example.loss_mask = j.at("loss_mask").get<std::vector<std::uint8_t>>();
        example.kind = objective_from_name(j.at("kind").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(line_number, e.what());
    }
    if (example.loss_mask.size() != example.target_tokens.size()) {
        throw ValidationError(line_number, "loss_mask length differs from target length");
    }
    return example;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

bool get_u32(std::istream& in, std::uint32_t& v) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
    v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
        (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    return true;
}

}  // namespace

// Record layout: u32 payload bytes, u8 kind, u32 input len, u32 target len,
// u32 ids..., u32 ids..., u8 mask bytes. All integers little-endian.
void write_example_binary(std::ostream& out, const TrainingExample& example) {
    const std::uint32_t payload =
        1 + 4 + 4 + 4 * static_cast<std::uint32_t>(example.input_tokens.size()) +
        4 * static_cast<std::uint32_t>(example.target_tokens.size()) +
        static_cast<std::uint32_t>(example.loss_mask.size());
    put_u32(out, payload);
    out.put(static_cast<char>(example.kind));
    put_u32(out, static_cast<std::uint32_t>(example.input_tokens.size()));
    put_u32(out, static_cast<std::uint32_t>(example.target_tokens.size()));
    for (const TokenId id : example.input_tokens) put_u32(out, id);
    for (const TokenId id : example.target_tokens) put_u32(out, id);
    for (const std::uint8_t m : example.loss_mask) out.put(static_cast<char>(m));
}

std::optional<TrainingExample> read_example_binary(std::istream& in) {
    std::uint32_t payload = 0;
    if (!get_u32(in, payload)) return std::nullopt;
    const int kind_byte = in.get();
    if (kind_byte < 0 || kind_byte > 3) {
        throw ValidationError("corrupt binary record: bad objective tag");
    }
    std::uint32_t input_len = 0;
    std::uint32_t target_len = 0;
    if (!get_u32(in, input_len) || !get_u32(in, target_len)) {
        throw ValidationError("corrupt binary record: truncated header");
    }
    if (payload != 1 + 4 + 4 + 4 * (input_len + target_len) + target_len) {
        throw ValidationError("corrupt binary record: length fields disagree");
    }
    TrainingExample example;
    example.kind = static_cast<ObjectiveKind>(kind_byte);
    example.input_tokens.resize(input_len);
    example.target_tokens.resize(target_len);
    example.loss_mask.resize(target_len);
    for (auto& id : example.input_tokens) {
        if (!get_u32(in, id)) throw ValidationError("corrupt binary record: truncated input");
    }
    for (auto& id : example.target_tokens) {
        if (!get_u32(in, id)) throw ValidationError("corrupt binary record: truncated target");
    }
    for (auto& m : example.loss_mask) {
        const int c = in.get();
        if (c < 0) throw ValidationError("corrupt binary record: truncated mask");
        m = static_cast<std::uint8_t>(c);
    }
    return example;
}

}  // namespace fewmt
