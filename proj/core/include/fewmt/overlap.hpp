#ifndef FEWMT_OVERLAP_HPP
#define FEWMT_OVERLAP_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fewmt/token.hpp"

namespace fewmt {

struct OverlapConfig {
    std::size_t n = 15;          // window size in tokens
    bool char_substring = false; // short-reference rule on raw characters
    void validate() const;
};

struct OverlapReport {
    std::size_t total_references = 0;
    std::size_t matched_references = 0;
    double percent = 0.0;  // matched / total * 100
};

// N-gram membership index over a training corpus. Hash hits are confirmed
// against the stored corpus tokens, so queries have no false positives; a
// window that was indexed is always found.
class NGramIndex {
public:
    NGramIndex(std::size_t n, bool keep_raw_text);

    void add_document(const std::string& text, const Tokenizer& tokenizer);
    void add_tokenized_document(TokenSequence tokens, const std::string& raw_text);

    // True iff any n-token window of `reference` occurs in the corpus, or,
    // when the reference is shorter than n, iff it occurs anywhere as a
    // contiguous token run.
    bool contains(const TokenSequence& reference) const;

    // Character-level variant of the short-reference rule.
    bool contains_chars(const std::string& reference) const;

    std::size_t n() const { return n_; }
    std::size_t window_count() const { return window_count_; }
    std::size_t document_count() const { return docs_.size(); }
    bool keeps_raw_text() const { return keep_raw_text_; }

private:
    bool has_window(const TokenSequence& reference, std::size_t offset) const;
    bool has_run(const TokenSequence& run) const;

    std::size_t n_;
    bool keep_raw_text_;
    std::size_t window_count_ = 0;
    std::vector<TokenSequence> docs_;
    std::vector<std::string> raw_docs_;
    struct Location {
        std::uint32_t doc;
        std::uint32_t pos;
    };
    std::unordered_map<std::uint64_t, std::vector<Location>> windows_;
};

using TextSource = std::function<std::optional<std::string>()>;

NGramIndex build_index(const TextSource& training_docs, const OverlapConfig& cfg,
                       const Tokenizer& tokenizer, unsigned workers = 1);

bool is_contaminated(const TokenSequence& reference, const NGramIndex& index);

// Fraction of test references whose target side leaks from the training
// corpus, as a percentage. Throws EmptyTestSet on an empty list.
OverlapReport overlap_report(const std::vector<std::string>& test_references,
                             const NGramIndex& index, const Tokenizer& tokenizer,
                             bool char_substring = false);

}  // namespace fewmt

#endif  // FEWMT_OVERLAP_HPP
