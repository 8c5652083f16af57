#include "fewmt/overlap.hpp"

#include <algorithm>
#include <atomic>
#include <span>
#include <thread>

#include "fewmt/errors.hpp"
#include "fewmt/ngram.hpp"

namespace fewmt {

void OverlapConfig::validate() const {
    if (n == 0) throw OutOfRange("overlap window size must be >= 1");
}

NGramIndex::NGramIndex(std::size_t n, bool keep_raw_text)
    : n_(n), keep_raw_text_(keep_raw_text) {
    if (n_ == 0) throw OutOfRange("overlap window size must be >= 1");
}

void NGramIndex::add_document(const std::string& text, const Tokenizer& tokenizer) {
    add_tokenized_document(tokenizer.encode(text), text);
}

void NGramIndex::add_tokenized_document(TokenSequence tokens, const std::string& raw_text) {
    const auto doc_id = static_cast<std::uint32_t>(docs_.size());
    const auto hashes = ngram_hashes(tokens, n_);
    for (std::size_t i = 0; i < hashes.size(); ++i) {
        windows_[hashes[i]].push_back({doc_id, static_cast<std::uint32_t>(i)});
    }
    window_count_ += hashes.size();
    docs_.push_back(std::move(tokens));
    if (keep_raw_text_) raw_docs_.push_back(raw_text);
}

bool NGramIndex::has_window(const TokenSequence& reference, std::size_t offset) const {
    const std::span<const TokenId> window(reference.data() + offset, n_);
    const auto it = windows_.find(window_hash(window));
    if (it == windows_.end()) return false;
    for (const Location& loc : it->second) {
        const TokenSequence& doc = docs_[loc.doc];
        if (std::equal(window.begin(), window.end(), doc.begin() + loc.pos)) return true;
    }
    return false;
}

bool NGramIndex::has_run(const TokenSequence& run) const {
    if (run.empty()) return false;
    const std::uint64_t want = window_hash(std::span<const TokenId>(run.data(), run.size()));
    for (const TokenSequence& doc : docs_) {
        if (doc.size() < run.size()) continue;
        const auto hashes = ngram_hashes(doc, run.size());
        for (std::size_t i = 0; i < hashes.size(); ++i) {
            if (hashes[i] != want) continue;
            if (std::equal(run.begin(), run.end(), doc.begin() + static_cast<std::ptrdiff_t>(i))) {
                return true;
            }
        }
    }
    return false;
}

bool NGramIndex::contains(const TokenSequence& reference) const {
    if (reference.empty()) return false;
    if (reference.size() < n_) return has_run(reference);
    for (std::size_t i = 0; i + n_ <= reference.size(); ++i) {
        if (has_window(reference, i)) return true;
    }
    return false;
}

bool NGramIndex::contains_chars(const std::string& reference) const {
    if (!keep_raw_text_) {
        throw ValidationError("index was built without raw text; rebuild with --char-substring");
    }
    if (reference.empty()) return false;
    for (const std::string& doc : raw_docs_) {
        if (doc.find(reference) != std::string::npos) return true;
    }
    return false;
}

NGramIndex build_index(const TextSource& training_docs, const OverlapConfig& cfg,
                       const Tokenizer& tokenizer, unsigned workers) {
    cfg.validate();
    NGramIndex index(cfg.n, cfg.char_substring);
    if (workers <= 1) {
        while (auto doc = training_docs()) index.add_document(*doc, tokenizer);
        return index;
    }

    // tokenize in parallel, insert serially in document order
    std::vector<std::string> docs;
    while (auto doc = training_docs()) docs.push_back(std::move(*doc));
    std::vector<TokenSequence> tokenized(docs.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= docs.size()) return;
            tokenized[i] = tokenizer.encode(docs[i]);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < docs.size(); ++i) {
        index.add_tokenized_document(std::move(tokenized[i]), docs[i]);
    }
    return index;
}

bool is_contaminated(const TokenSequence& reference, const NGramIndex& index) {
    return index.contains(reference);
}

OverlapReport overlap_report(const std::vector<std::string>& test_references,
                             const NGramIndex& index, const Tokenizer& tokenizer,
                             bool char_substring) {
    if (test_references.empty()) throw EmptyTestSet();
    OverlapReport report;
    report.total_references = test_references.size();
    for (const std::string& ref : test_references) {
        const TokenSequence tokens = tokenizer.encode(ref);
        bool hit;
        if (char_substring && tokens.size() < index.n()) {
            hit = index.contains_chars(ref);
        } else {
            hit = index.contains(tokens);
        }
        if (hit) ++report.matched_references;
    }
    report.percent = 100.0 * static_cast<double>(report.matched_references) /
                     static_cast<double>(report.total_references);
    return report;
}

}  // namespace fewmt
