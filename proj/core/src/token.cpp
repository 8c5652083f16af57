#include "fewmt/token.hpp"

#include "fewmt/errors.hpp"

namespace fewmt {

namespace {

constexpr TokenId kWordInitialBase = 256;
constexpr TokenId kWordBase = 512;

bool is_space_byte(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

BuiltinTokenizer::BuiltinTokenizer(std::vector<std::string> lexicon,
                                   std::size_t sentinel_slots)
    : sentinel_slots_(sentinel_slots) {
    if (sentinel_slots_ == 0) {
        throw OutOfRange("tokenizer needs at least one sentinel slot");
    }
    words_.reserve(lexicon.size());
    for (auto& word : lexicon) {
        if (word.empty()) {
            throw ValidationError("lexicon words must be non-empty");
        }
        for (unsigned char c : word) {
            if (is_space_byte(c)) {
                throw ValidationError("lexicon word contains whitespace: " + word);
            }
        }
        if (word_ids_.contains(word)) continue;
        const TokenId id = kWordBase + static_cast<TokenId>(words_.size());
        word_ids_.emplace(word, id);
        words_.push_back(std::move(word));
    }
}

std::size_t BuiltinTokenizer::vocab_size() const {
    return kWordBase + words_.size() + sentinel_slots_;
}

TokenId BuiltinTokenizer::sentinel(std::size_t k) const {
    if (k >= sentinel_slots_) {
        throw OutOfRange("sentinel index " + std::to_string(k) + " exceeds reserved range of " +
                         std::to_string(sentinel_slots_));
    }
    return static_cast<TokenId>(vocab_size() - 1 - k);
}

TokenSequence BuiltinTokenizer::encode(std::string_view text) const {
    TokenSequence out;
    out.reserve(text.size() / 4 + 1);

    std::size_t pos = 0;
    bool at_start = true;
    while (pos < text.size()) {
        std::size_t gap_begin = pos;
        while (pos < text.size() && is_space_byte(static_cast<unsigned char>(text[pos]))) ++pos;
        const std::string_view gap = text.substr(gap_begin, pos - gap_begin);

        std::size_t word_begin = pos;
        while (pos < text.size() && !is_space_byte(static_cast<unsigned char>(text[pos]))) ++pos;
        const std::string_view word = text.substr(word_begin, pos - word_begin);

        const bool canonical_gap = at_start ? gap.empty() : gap == " ";
        if (!canonical_gap) {
            for (unsigned char c : gap) out.push_back(static_cast<TokenId>(c));
        }
        if (word.empty()) break;  // trailing whitespace already emitted

        if (canonical_gap) {
            if (auto it = word_ids_.find(std::string(word)); it != word_ids_.end()) {
                out.push_back(it->second);
            } else {
                out.push_back(kWordInitialBase +
                              static_cast<TokenId>(static_cast<unsigned char>(word[0])));
                for (std::size_t i = 1; i < word.size(); ++i) {
                    out.push_back(static_cast<TokenId>(static_cast<unsigned char>(word[i])));
                }
            }
        } else {
            // Implicit joiner would insert a single space on decode, which
            // does not match this gap, so the whole word stays byte-explicit.
            for (unsigned char c : word) out.push_back(static_cast<TokenId>(c));
        }
        at_start = false;
    }
    return out;
}

std::string BuiltinTokenizer::decode(const TokenSequence& tokens) const {
    const std::size_t vocab = vocab_size();
    const std::size_t word_end = kWordBase + words_.size();
    std::string out;
    out.reserve(tokens.size() * 4);
    for (const TokenId id : tokens) {
        if (id < kWordInitialBase) {
            out.push_back(static_cast<char>(id));
        } else if (id < kWordBase) {
            if (!out.empty()) out.push_back(' ');
            out.push_back(static_cast<char>(id - kWordInitialBase));
        } else if (id < word_end) {
            if (!out.empty()) out.push_back(' ');
            out += words_[id - kWordBase];
        } else if (id < vocab) {
            if (!out.empty()) out.push_back(' ');
            out += "<sentinel_" + std::to_string(vocab - 1 - id) + ">";
        } else {
            throw OutOfRange("token id " + std::to_string(id) + " outside vocabulary of " +
                             std::to_string(vocab));
        }
    }
    return out;
}

std::shared_ptr<const Tokenizer> make_builtin_tokenizer(std::vector<std::string> lexicon,
                                                        std::size_t sentinel_slots) {
    return std::make_shared<BuiltinTokenizer>(std::move(lexicon), sentinel_slots);
}

}  // namespace fewmt
