#ifndef FEWMT_NGRAM_HPP
#define FEWMT_NGRAM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "fewmt/token.hpp"

namespace fewmt {

// 64-bit polynomial hash of one n-token window. Tokens are mixed through
// splitmix64 first so small ids spread over the full word.
std::uint64_t window_hash(std::span<const TokenId> window);

// One hash per contiguous n-token window, computed with a rolling update;
// result[i] == window_hash(seq[i..i+n)). Empty when seq.size() < n.
std::vector<std::uint64_t> ngram_hashes(const TokenSequence& seq, std::size_t n);

}  // namespace fewmt

#endif  // FEWMT_NGRAM_HPP
