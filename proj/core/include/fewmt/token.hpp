#ifndef FEWMT_TOKEN_HPP
#define FEWMT_TOKEN_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fewmt {

using TokenId = std::uint32_t;
using TokenSequence = std::vector<TokenId>;

// Display names inserted verbatim into prompts, e.g. {"English", "German"}
// or {"English", "Mainland Mandarin"}.
struct LanguagePair {
    std::string source_name;
    std::string target_name;
};

// Tokenizer contract. Implementations must be safe for concurrent reads;
// all methods here are const and the built-in implementation is immutable
// after construction.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;

    virtual TokenSequence encode(std::string_view text) const = 0;
    virtual std::string decode(const TokenSequence& tokens) const = 0;

    // k-th reserved sentinel id, k in [0, sentinel_count()). Sentinels live
    // in a contiguous range at the top of the vocabulary and are never
    // produced by encode().
    virtual TokenId sentinel(std::size_t k) const = 0;
    virtual std::size_t sentinel_count() const = 0;
    virtual std::size_t vocab_size() const = 0;
};

// Deterministic whitespace tokenizer with byte fallback. Words separated by
// a single space carry an implicit joiner: a known word becomes one id, an
// unknown word becomes a word-initial byte id followed by continuation byte
// ids. Any other whitespace (runs, tabs, leading/trailing) is encoded as
// explicit continuation bytes, which makes decode(encode(t)) == t exact for
// every input string.
//
// Id layout: [0,256) continuation bytes, [256,512) word-initial bytes,
// [512, 512+W) lexicon words, then the reserved sentinel range at the top.
class BuiltinTokenizer final : public Tokenizer {
public:
    explicit BuiltinTokenizer(std::vector<std::string> lexicon = {},
                              std::size_t sentinel_slots = 256);

    TokenSequence encode(std::string_view text) const override;
    std::string decode(const TokenSequence& tokens) const override;
    TokenId sentinel(std::size_t k) const override;
    std::size_t sentinel_count() const override { return sentinel_slots_; }
    std::size_t vocab_size() const override;

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, TokenId> word_ids_;
    std::size_t sentinel_slots_;
};

std::shared_ptr<const Tokenizer> make_builtin_tokenizer(
    std::vector<std::string> lexicon = {}, std::size_t sentinel_slots = 256);

}  // namespace fewmt

#endif  // FEWMT_TOKEN_HPP
