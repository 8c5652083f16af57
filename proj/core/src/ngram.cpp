#include "fewmt/ngram.hpp"

#include "fewmt/errors.hpp"
#include "fewmt/rng.hpp"

namespace fewmt {

namespace {

// Odd multiplier, so the map x -> x*B is a bijection mod 2^64 and the
// rolling subtraction of the outgoing term is exact.
constexpr std::uint64_t kBase = 0x100000001b3ULL;

std::uint64_t pow_base(std::size_t e) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= kBase;
    return r;
}

}  // namespace

std::uint64_t window_hash(std::span<const TokenId> window) {
    std::uint64_t h = 0;
    for (const TokenId t : window) h = h * kBase + mix64(t);
    return h;
}

std::vector<std::uint64_t> ngram_hashes(const TokenSequence& seq, std::size_t n) {
    if (n == 0) {
        throw OutOfRange("n-gram window size must be >= 1");
    }
    std::vector<std::uint64_t> out;
    if (seq.size() < n) return out;
    out.reserve(seq.size() - n + 1);

    const std::uint64_t top = pow_base(n - 1);
    std::uint64_t h = window_hash(std::span<const TokenId>(seq.data(), n));
    out.push_back(h);
    for (std::size_t i = n; i < seq.size(); ++i) {
        h = (h - mix64(seq[i - n]) * top) * kBase + mix64(seq[i]);
        out.push_back(h);
    }
    return out;
}

}  // namespace fewmt
