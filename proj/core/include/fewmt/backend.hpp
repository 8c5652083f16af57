#ifndef FEWMT_BACKEND_HPP
#define FEWMT_BACKEND_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fewmt/net.hpp"
#include "fewmt/rng.hpp"

namespace fewmt {

struct BeamParams {
    int beam_size = 4;
    double length_alpha = 0.6;
};

struct GenerationParams {
    enum class Mode { Sample, Beam };

    int num_samples = 64;
    double temperature = 1.0;  // 1.0 = vanilla ancestral sampling
    int max_new_tokens = 256;
    std::vector<std::string> stop_sequences = {"\n"};
    Mode mode = Mode::Sample;
    BeamParams beam;

    // Beam search yields its single best hypothesis; sampling yields
    // num_samples of them.
    std::size_t expected_candidates() const {
        return mode == Mode::Beam ? 1 : static_cast<std::size_t>(num_samples);
    }
    void validate() const;
};

// Ordered completions for one prompt. Duplicates are kept: the multiset is
// the empirical sample distribution MBR weights by.
struct CandidateSet {
    std::vector<std::string> candidates;
    std::string prompt_id;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual CandidateSet generate(const std::string& prompt, const GenerationParams& params) = 0;
    virtual std::string identity() const = 0;
    virtual bool healthy() const = 0;
};

// Weighted completion options for one query string.
struct MockEntry {
    struct Option {
        std::string text;
        double weight = 1.0;
    };
    std::vector<Option> options;
};

struct MockTable {
    std::unordered_map<std::string, MockEntry> entries;

    // JSON: {"entries": [{"query": str,
    //                     "candidates": [{"text": str, "weight": float?}, ...]}, ...]}
    static MockTable load_json(const std::string& path);
};

// Deterministic stand-in backend: completions come from a lookup table keyed
// by the query line of the prompt, sampled with a generator seeded by
// (base_seed, prompt), so a given (prompt, params, seed) always produces the
// same candidate list no matter the call order or thread.
class MockBackend final : public Backend {
public:
    using Fallback = std::function<std::string(const std::string& query, Rng& rng)>;

    explicit MockBackend(MockTable table, std::uint64_t base_seed = 0,
                         Fallback fallback = nullptr);

    CandidateSet generate(const std::string& prompt, const GenerationParams& params) override;
    CandidateSet generate_seeded(const std::string& prompt, const GenerationParams& params,
                                 std::uint64_t seed) const;
    std::string identity() const override { return "mock"; }
    bool healthy() const override { return true; }

private:
    MockTable table_;
    std::uint64_t base_seed_;
    Fallback fallback_;
};

// The query is the text after the final "name: " demonstration label, i.e.
// the last source line of the few-shot template.
std::string query_line_of_prompt(const std::string& prompt);

// Client for a remote generation service. POST {base_url}/v1/generate with
//   {"prompt": str, "num_samples": int, "temperature": float,
//    "max_new_tokens": int, "stop": [str], "mode": "sample"|"beam",
//    "beam_size": int?, "length_alpha": float?}
// and response {"candidates": [str, ...]}; a reply carrying the wrong number
// of candidates is an error, never padded.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(std::string base_url, RetryPolicy retry = {},
                         std::string auth_token = "");

    CandidateSet generate(const std::string& prompt, const GenerationParams& params) override;
    std::string identity() const override { return "http:" + base_url_; }
    bool healthy() const override;

private:
    std::string base_url_;
    RetryPolicy retry_;
    std::string auth_token_;
};

CandidateSet remote_generate(const std::string& base_url, const std::string& prompt,
                             const GenerationParams& params, RetryPolicy retry = {},
                             const std::string& auth_token = "");

}  // namespace fewmt

#endif  // FEWMT_BACKEND_HPP
