#include "fewmt/pool.hpp"

#include <algorithm>
#include <fstream>

#include "fewmt/errors.hpp"
#include "json.hpp"

namespace fewmt {

std::string bucket_name(CdsBucket bucket) {
    switch (bucket) {
        case CdsBucket::Low: return "low";
        case CdsBucket::Mid: return "mid";
        case CdsBucket::High: return "high";
    }
    throw OutOfRange("unknown bucket");
}

CdsBucket bucket_from_name(const std::string& name) {
    if (name == "low") return CdsBucket::Low;
    if (name == "mid") return CdsBucket::Mid;
    if (name == "high") return CdsBucket::High;
    throw ValidationError("unknown bucket name: " + name);
}

CdsBucket assign_bucket(double score, const BucketBoundaries& bounds) {
    if (!(score >= 0.0) || !(score <= 1.0)) {
        throw OutOfRange("cds score " + std::to_string(score) + " outside [0,1]");
    }
    if (score < bounds.low_end) return CdsBucket::Low;
    if (score < bounds.mid_end) return CdsBucket::Mid;
    return CdsBucket::High;
}

std::string SelectionStrategy::describe() const {
    switch (kind) {
        case Kind::Uniform: return "uniform";
        case Kind::Bucket: return "bucket=" + bucket_name(bucket);
        case Kind::TagMatched: return "matched(" + axis + "=" + value + ")";
        case Kind::TagMismatched: return "mismatched(" + axis + "!=" + value + ")";
    }
    throw OutOfRange("unknown strategy kind");
}

DemoPool DemoPool::load_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open pool file: " + path);

    std::vector<Demonstration> entries;
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
        if (!j.is_object()) throw ValidationError(line_number, "record is not a JSON object");

        Demonstration demo;
        try {
            demo.source = j.at("source").get<std::string>();
            demo.target = j.at("target").get<std::string>();
            if (j.contains("cds")) demo.cds = j.at("cds").get<double>();
            if (j.contains("variety")) demo.variety = j.at("variety").get<std::string>();
            if (j.contains("formality")) demo.formality = j.at("formality").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_number, e.what());
        }
        if (demo.source.empty()) throw ValidationError(line_number, "empty source");
        if (demo.target.empty()) throw ValidationError(line_number, "empty target");
        if (demo.cds && (!(*demo.cds >= 0.0) || !(*demo.cds <= 1.0))) {
            throw ValidationError(line_number, "cds score outside [0,1]");
        }
        if (demo.variety && demo.variety->empty()) {
            throw ValidationError(line_number, "empty variety tag");
        }
        if (demo.formality && *demo.formality != "formal" && *demo.formality != "informal") {
            throw ValidationError(line_number, "unknown formality tag: " + *demo.formality);
        }
        entries.push_back(std::move(demo));
    }
    return DemoPool(std::move(entries));
}

PoolStats DemoPool::stats(const BucketBoundaries& bounds) const {
    PoolStats s;
    s.count = entries_.size();
    for (const auto& demo : entries_) {
        if (demo.cds) {
            ++s.with_cds;
            switch (assign_bucket(*demo.cds, bounds)) {
                case CdsBucket::Low: ++s.low; break;
                case CdsBucket::Mid: ++s.mid; break;
                case CdsBucket::High: ++s.high; break;
            }
        }
        if (demo.variety) ++s.variety_counts[*demo.variety];
        if (demo.formality) ++s.formality_counts[*demo.formality];
    }
    return s;
}

std::vector<double> cds_scores(std::span<const double> ce_base,
                               std::span<const double> ce_trusted) {
    if (ce_base.size() != ce_trusted.size()) {
        throw LengthMismatch("cross-entropy lists", ce_base.size(), ce_trusted.size());
    }
    std::vector<double> raw(ce_base.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = ce_base[i] - ce_trusted[i];
    return raw;
}

NormalizedScores normalize_cds(std::span<const double> raw) {
    if (raw.empty()) throw EmptyInput("no scores to normalize");
    const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    NormalizedScores out;
    out.values.resize(raw.size());
    if (lo == hi) {
        std::fill(out.values.begin(), out.values.end(), 0.5);
        out.degenerate = true;
        return out;
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < raw.size(); ++i) out.values[i] = (raw[i] - lo) / range;
    return out;
}

namespace {

const std::optional<std::string>& tag_for_axis(const Demonstration& demo,
                                               const std::string& axis) {
    if (axis == "variety") return demo.variety;
    if (axis == "formality") return demo.formality;
    throw ValidationError("unknown style axis: " + axis);
}

bool passes_filter(const Demonstration& demo, const SelectionConfig& cfg) {
    const auto& strategy = cfg.strategy;
    switch (strategy.kind) {
        case SelectionStrategy::Kind::Uniform:
            return true;
        case SelectionStrategy::Kind::Bucket:
            return demo.cds && assign_bucket(*demo.cds, cfg.bounds) == strategy.bucket;
        case SelectionStrategy::Kind::TagMatched: {
            const auto& tag = tag_for_axis(demo, strategy.axis);
            return tag && *tag == strategy.value;
        }
        case SelectionStrategy::Kind::TagMismatched: {
            const auto& tag = tag_for_axis(demo, strategy.axis);
            return tag && *tag != strategy.value;
        }
    }
    throw OutOfRange("unknown strategy kind");
}

bool carries_metadata(const Demonstration& demo, const SelectionStrategy& strategy) {
    switch (strategy.kind) {
        case SelectionStrategy::Kind::Uniform: return true;
        case SelectionStrategy::Kind::Bucket: return demo.cds.has_value();
        case SelectionStrategy::Kind::TagMatched:
        case SelectionStrategy::Kind::TagMismatched:
            return tag_for_axis(demo, strategy.axis).has_value();
    }
    return false;
}

}  // namespace

std::vector<Demonstration> select_demonstrations(const DemoPool& pool,
                                                 const SelectionConfig& cfg, Rng& rng) {
    if (cfg.k == 0) throw OutOfRange("k must be >= 1");

    const auto& strategy = cfg.strategy;
    if (strategy.kind != SelectionStrategy::Kind::Uniform) {
        const bool any = std::any_of(pool.entries().begin(), pool.entries().end(),
                                     [&](const auto& d) { return carries_metadata(d, strategy); });
        if (!any) {
            throw MissingMetadata(strategy.kind == SelectionStrategy::Kind::Bucket
                                      ? "cds score"
                                      : strategy.axis + " tag");
        }
    }

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (passes_filter(pool.entries()[i], cfg)) eligible.push_back(i);
    }
    if (eligible.size() < cfg.k) {
        throw InsufficientPool(strategy.describe(), eligible.size(), cfg.k);
    }

    // partial Fisher-Yates: the first k slots end up a uniform sample
    std::vector<Demonstration> out;
    out.reserve(cfg.k);
    for (std::size_t i = 0; i < cfg.k; ++i) {
        const std::size_t j = i + rng.index(eligible.size() - i);
        std::swap(eligible[i], eligible[j]);
        out.push_back(pool.entries()[eligible[i]]);
    }
    return out;
}

}  // namespace fewmt
