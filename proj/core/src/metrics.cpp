#include "fewmt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "fewmt/errors.hpp"
#include "http_util.hpp"
#include "json.hpp"

namespace fewmt {

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::vector<std::string> whitespace_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_ws(text[i])) ++i;
        std::size_t j = i;
        while (j < text.size() && !is_ws(text[j])) ++j;
        if (j > i) out.push_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

std::unordered_map<std::string, std::size_t> multiset_counts(
    const std::vector<std::string>& items) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& item : items) ++counts[item];
    return counts;
}

std::size_t multiset_overlap(const std::unordered_map<std::string, std::size_t>& a,
                             const std::unordered_map<std::string, std::size_t>& b) {
    std::size_t overlap = 0;
    for (const auto& [key, count] : a) {
        const auto it = b.find(key);
        if (it != b.end()) overlap += std::min(count, it->second);
    }
    return overlap;
}

std::string strip_whitespace(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
        if (!is_ws(c)) out.push_back(c);
    }
    return out;
}

// Collapse whitespace runs to single spaces and trim the ends.
std::string normalize_whitespace(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (const char c : text) {
        if (is_ws(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace

double token_f1(const std::string& hypothesis, const std::string& reference) {
    const auto hyp = whitespace_tokens(hypothesis);
    const auto ref = whitespace_tokens(reference);
    if (hyp.empty() && ref.empty()) return 1.0;
    if (hyp.empty() || ref.empty()) return 0.0;
    const auto overlap =
        static_cast<double>(multiset_overlap(multiset_counts(hyp), multiset_counts(ref)));
    const double precision = overlap / static_cast<double>(hyp.size());
    const double recall = overlap / static_cast<double>(ref.size());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double chrf(const std::string& hypothesis, const std::string& reference) {
    constexpr std::size_t kMaxOrder = 6;
    constexpr double kBetaSq = 4.0;  // beta = 2: recall weighted twice

    const std::string hyp = strip_whitespace(hypothesis);
    const std::string ref = strip_whitespace(reference);

    double precision_sum = 0.0;
    double recall_sum = 0.0;
    std::size_t effective_orders = 0;
    for (std::size_t n = 1; n <= kMaxOrder; ++n) {
        const std::size_t hyp_total = hyp.size() >= n ? hyp.size() - n + 1 : 0;
        const std::size_t ref_total = ref.size() >= n ? ref.size() - n + 1 : 0;
        if (hyp_total == 0 && ref_total == 0) continue;
        ++effective_orders;

        std::unordered_map<std::string, std::size_t> hyp_grams;
        for (std::size_t i = 0; i < hyp_total; ++i) ++hyp_grams[hyp.substr(i, n)];
        std::unordered_map<std::string, std::size_t> ref_grams;
        for (std::size_t i = 0; i < ref_total; ++i) ++ref_grams[ref.substr(i, n)];
        const auto overlap = static_cast<double>(multiset_overlap(hyp_grams, ref_grams));

        if (hyp_total > 0) precision_sum += overlap / static_cast<double>(hyp_total);
        if (ref_total > 0) recall_sum += overlap / static_cast<double>(ref_total);
    }
    if (effective_orders == 0) return 1.0;  // both empty

    const double precision = precision_sum / static_cast<double>(effective_orders);
    const double recall = recall_sum / static_cast<double>(effective_orders);
    const double denom = kBetaSq * precision + recall;
    if (denom == 0.0) return 0.0;
    return (1.0 + kBetaSq) * precision * recall / denom;
}

namespace {

// Punctuation-splitting tokenization: ASCII non-alphanumerics become
// standalone tokens. Rough cousin of the mteval-13a tokenizer.
std::vector<std::string> bleu_tokens(const std::string& text) {
    std::string spaced;
    spaced.reserve(text.size() * 2);
    for (const char c : text) {
        const auto u = static_cast<unsigned char>(c);
        const bool alnum = (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') ||
                           (u >= 'A' && u <= 'Z') || u >= 0x80;
        if (alnum || is_ws(c)) {
            spaced.push_back(c);
        } else {
            spaced.push_back(' ');
            spaced.push_back(c);
            spaced.push_back(' ');
        }
    }
    return whitespace_tokens(spaced);
}

}  // namespace

double bleu_smoothed(std::span<const std::string> hypotheses,
                     std::span<const std::string> references) {
    constexpr std::size_t kMaxOrder = 4;
    if (hypotheses.empty()) throw EmptyInput("bleu needs at least one sentence");
    if (hypotheses.size() != references.size()) {
        throw LengthMismatch("bleu corpus", references.size(), hypotheses.size());
    }

    std::size_t matches[kMaxOrder] = {};
    std::size_t totals[kMaxOrder] = {};
    std::size_t hyp_len = 0;
    std::size_t ref_len = 0;

    for (std::size_t s = 0; s < hypotheses.size(); ++s) {
        const auto hyp = bleu_tokens(hypotheses[s]);
        const auto ref = bleu_tokens(references[s]);
        hyp_len += hyp.size();
        ref_len += ref.size();
        for (std::size_t n = 1; n <= kMaxOrder; ++n) {
            if (hyp.size() < n) break;
            std::unordered_map<std::string, std::size_t> hyp_grams;
            for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
                std::string gram = hyp[i];
                for (std::size_t j = 1; j < n; ++j) gram += " " + hyp[i + j];
                ++hyp_grams[gram];
            }
            std::unordered_map<std::string, std::size_t> ref_grams;
            for (std::size_t i = 0; i + n <= ref.size(); ++i) {
                std::string gram = ref[i];
                for (std::size_t j = 1; j < n; ++j) gram += " " + ref[i + j];
                ++ref_grams[gram];
            }
            totals[n - 1] += hyp.size() - n + 1;
            matches[n - 1] += multiset_overlap(hyp_grams, ref_grams);
        }
    }
    if (hyp_len == 0) return 0.0;

    // orders beyond the longest hypothesis n-gram are dropped; zero-match
    // orders fall back to exponentially shrinking pseudo-counts
    std::size_t effective = 0;
    double log_precision = 0.0;
    double smooth = 1.0;
    for (std::size_t n = 0; n < kMaxOrder; ++n) {
        if (totals[n] == 0) break;
        ++effective;
        double p;
        if (matches[n] == 0) {
            smooth *= 2.0;
            p = 1.0 / (smooth * static_cast<double>(totals[n]));
        } else {
            p = static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
        }
        log_precision += std::log(p);
    }
    if (effective == 0) return 0.0;
    log_precision /= static_cast<double>(effective);

    double brevity = 1.0;
    if (hyp_len < ref_len) {
        brevity = std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
    }
    return 100.0 * brevity * std::exp(log_precision);
}

double corpus_mean(std::span<const double> scores) {
    if (scores.empty()) throw EmptyInput("corpus mean of zero scores");
    const double sum = std::accumulate(scores.begin(), scores.end(), 0.0);
    return sum / static_cast<double>(scores.size());
}

RemoteMetric::RemoteMetric(std::string base_url, std::size_t batch_size, RetryPolicy retry,
                           std::string auth_token)
    : base_url_(std::move(base_url)),
      batch_size_(batch_size == 0 ? 1 : batch_size),
      retry_(retry),
      auth_token_(std::move(auth_token)) {}

double RemoteMetric::score(const std::string& hyp, const std::string& ref) const {
    const std::pair<std::string, std::string> pair{hyp, ref};
    return scores(std::span(&pair, 1)).front();
}

std::vector<double> RemoteMetric::scores(
    std::span<const std::pair<std::string, std::string>> pairs) const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (std::size_t begin = 0; begin < pairs.size(); begin += batch_size_) {
        const std::size_t end = std::min(begin + batch_size_, pairs.size());
        nlohmann::json body;
        auto& list = body["pairs"] = nlohmann::json::array();
        for (std::size_t i = begin; i < end; ++i) {
            list.push_back({{"hypothesis", pairs[i].first}, {"reference", pairs[i].second}});
        }
        const auto reply =
            detail::post_json(base_url_, "/v1/score", body, retry_, auth_token_, "metric");
        if (!reply.contains("scores") || !reply["scores"].is_array()) {
            throw ProtocolError("metric response lacks a 'scores' array");
        }
        const auto& scored = reply["scores"];
        if (scored.size() != end - begin) {
            throw LengthMismatch("metric scores", end - begin, scored.size(),
                                 Error::Category::Runtime);
        }
        for (const auto& s : scored) {
            if (!s.is_number()) throw ProtocolError("metric score is not a number");
            out.push_back(s.get<double>());
        }
    }
    return out;
}

std::vector<double> remote_metric_score(const std::string& base_url,
                                        std::span<const std::pair<std::string, std::string>> pairs,
                                        std::size_t batch_size, RetryPolicy retry,
                                        const std::string& auth_token) {
    if (pairs.empty()) return {};
    return RemoteMetric(base_url, batch_size, retry, auth_token).scores(pairs);
}

std::unique_ptr<Metric> make_metric(const std::string& spec, RetryPolicy retry,
                                    const std::string& auth_token) {
    if (spec == "token-f1") return std::make_unique<TokenF1Metric>();
    if (spec == "chrf") return std::make_unique<ChrfMetric>();
    if (spec.rfind("remote:", 0) == 0) {
        const std::string url = spec.substr(7);
        if (url.empty()) throw ValidationError("remote metric spec lacks a URL");
        return std::make_unique<RemoteMetric>(url, 128, retry, auth_token);
    }
    throw ValidationError("unknown metric spec: " + spec);
}

VarietyTermTable VarietyTermTable::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open term table: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("term table: ") + e.what());
    }
    VarietyTermTable table;
    for (const auto& entry_json : j.at("entries")) {
        Entry entry;
        entry.english_term = entry_json.at("en").get<std::string>();
        for (const auto& [variety, forms] : entry_json.at("forms").items()) {
            entry.forms[variety] = forms.get<std::vector<std::string>>();
            if (entry.forms[variety].empty()) {
                throw ValidationError("term '" + entry.english_term + "' has no forms for '" +
                                      variety + "'");
            }
        }
        if (entry.forms.size() < 2) {
            throw ValidationError("term '" + entry.english_term +
                                  "' needs forms for at least two varieties");
        }
        table.entries.push_back(std::move(entry));
    }
    return table;
}

std::size_t VarietyTermTable::find_entry(const std::string& english_term) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].english_term == english_term) return i;
    }
    throw ValidationError("term table has no entry for: " + english_term);
}

LexicalAccuracyResult lexical_accuracy(std::span<const std::string> hypotheses,
                                       const VarietyTermTable& table,
                                       std::span<const std::size_t> entry_indices,
                                       const std::string& target_variety,
                                       const LexicalRuleOptions& options) {
    if (hypotheses.size() != entry_indices.size()) {
        throw LengthMismatch("lexical accuracy item map", hypotheses.size(),
                             entry_indices.size());
    }

    LexicalAccuracyResult result;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        const auto& entry = table.entries.at(entry_indices[i]);
        const auto target_it = entry.forms.find(target_variety);
        if (target_it == entry.forms.end()) {
            throw MissingForms(entry.english_term, target_variety);
        }

        const auto contains_any = [&](const std::vector<std::string>& forms) {
            return std::any_of(forms.begin(), forms.end(), [&](const std::string& form) {
                return hypotheses[i].find(form) != std::string::npos;
            });
        };
        const bool has_target = contains_any(target_it->second);

        bool has_other_exclusive = false;
        for (const auto& [variety, forms] : entry.forms) {
            if (variety == target_variety) continue;
            for (const auto& form : forms) {
                const auto& target_forms = target_it->second;
                const bool shared =
                    std::find(target_forms.begin(), target_forms.end(), form) !=
                    target_forms.end();
                if (!shared && hypotheses[i].find(form) != std::string::npos) {
                    has_other_exclusive = true;
                    break;
                }
            }
            if (has_other_exclusive) break;
        }

        if (has_target && has_other_exclusive) ++result.both;
        else if (has_target) ++result.target_only;
        else if (has_other_exclusive) ++result.other_only;
        else ++result.neither;

        const bool neutral = !has_target && !has_other_exclusive;
        if (options.exclude_neutral_from_denominator && neutral) continue;
        ++result.total;
        const bool correct = has_target && !(options.forbid_other_forms && has_other_exclusive);
        if (correct) ++result.correct;
    }
    result.accuracy = result.total == 0
                          ? 0.0
                          : static_cast<double>(result.correct) / static_cast<double>(result.total);
    return result;
}

double frmt_score(const std::map<std::string, std::vector<double>>& per_variety_bucket_scores) {
    if (per_variety_bucket_scores.empty()) throw EmptyInput("frmt score needs >= 1 variety");
    double log_sum = 0.0;
    for (const auto& [variety, buckets] : per_variety_bucket_scores) {
        if (buckets.empty()) throw EmptyInput("variety '" + variety + "' has no bucket scores");
        for (const double s : buckets) {
            if (s < 0.0) {
                throw OutOfRange("negative bucket score for variety '" + variety + "'");
            }
        }
        const double mean = corpus_mean(buckets);
        if (mean == 0.0) return 0.0;
        log_sum += std::log(mean);
    }
    return std::exp(log_sum / static_cast<double>(per_variety_bucket_scores.size()));
}

std::string formality_level_name(FormalityLevel level) {
    switch (level) {
        case FormalityLevel::Formal: return "formal";
        case FormalityLevel::Informal: return "informal";
        case FormalityLevel::Neutral: return "neutral";
    }
    throw OutOfRange("unknown formality level");
}

FormalityLevel formality_level_from_name(const std::string& name) {
    if (name == "formal") return FormalityLevel::Formal;
    if (name == "informal") return FormalityLevel::Informal;
    if (name == "neutral") return FormalityLevel::Neutral;
    throw ValidationError("unknown formality level: " + name);
}

std::pair<std::string, std::vector<std::string>> parse_marked_reference(
    const std::string& marked) {
    std::string text;
    std::vector<std::string> phrases;
    std::string current;
    bool inside = false;
    for (const char c : marked) {
        if (c == '[') {
            if (inside) throw ValidationError("nested '[' in annotated reference: " + marked);
            inside = true;
            current.clear();
        } else if (c == ']') {
            if (!inside) throw ValidationError("unmatched ']' in annotated reference: " + marked);
            inside = false;
            if (current.empty()) {
                throw ValidationError("empty marked span in annotated reference: " + marked);
            }
            phrases.push_back(current);
            text += current;
        } else if (inside) {
            current.push_back(c);
        } else {
            text.push_back(c);
        }
    }
    if (inside) throw ValidationError("unterminated '[' in annotated reference: " + marked);
    if (phrases.empty()) {
        throw UnmarkedReference("annotated reference has no marked phrase: " + marked);
    }
    return {std::move(text), std::move(phrases)};
}

std::vector<FormalityAnnotatedRef> load_formality_refs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open formality references: " + path);
    std::vector<FormalityAnnotatedRef> refs;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_number, e.what());
        }
        FormalityAnnotatedRef ref;
        try {
            auto [ftext, fphrases] = parse_marked_reference(j.at("formal").get<std::string>());
            auto [itext, iphrases] = parse_marked_reference(j.at("informal").get<std::string>());
            ref.formal_text = std::move(ftext);
            ref.formal_phrases = std::move(fphrases);
            ref.informal_text = std::move(itext);
            ref.informal_phrases = std::move(iphrases);
            const auto desired = formality_level_from_name(j.at("desired").get<std::string>());
            if (desired == FormalityLevel::Neutral) {
                throw ValidationError(line_number, "desired level must be formal or informal");
            }
            ref.desired = desired;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_number, e.what());
        }
        refs.push_back(std::move(ref));
    }
    return refs;
}

FormalityLevel label_formality(const std::string& hypothesis, const FormalityAnnotatedRef& ref) {
    const std::string hyp = normalize_whitespace(hypothesis);
    const auto contains_any = [&](const std::vector<std::string>& phrases) {
        return std::any_of(phrases.begin(), phrases.end(), [&](const std::string& phrase) {
            return hyp.find(normalize_whitespace(phrase)) != std::string::npos;
        });
    };
    const bool has_formal = contains_any(ref.formal_phrases);
    const bool has_informal = contains_any(ref.informal_phrases);
    if (has_formal && !has_informal) return FormalityLevel::Formal;
    if (has_informal && !has_formal) return FormalityLevel::Informal;
    return FormalityLevel::Neutral;
}

FormalityAccuracyResult formality_accuracy(std::span<const std::string> hypotheses,
                                           std::span<const FormalityAnnotatedRef> references) {
    if (hypotheses.size() != references.size()) {
        throw LengthMismatch("formality accuracy", references.size(), hypotheses.size());
    }
    FormalityAccuracyResult result;
    result.total = hypotheses.size();
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        const FormalityLevel label = label_formality(hypotheses[i], references[i]);
        switch (label) {
            case FormalityLevel::Formal: ++result.formal; break;
            case FormalityLevel::Informal: ++result.informal; break;
            case FormalityLevel::Neutral: ++result.neutral; break;
        }
        if (label == references[i].desired) ++result.correct;
    }
    result.accuracy = result.total == 0
                          ? 0.0
                          : static_cast<double>(result.correct) / static_cast<double>(result.total);
    return result;
}

}  // namespace fewmt
