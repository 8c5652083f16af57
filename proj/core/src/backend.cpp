#include "fewmt/backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fewmt/errors.hpp"
#include "http_util.hpp"
#include "json.hpp"

namespace fewmt {

void GenerationParams::validate() const {
    if (num_samples < 1) throw OutOfRange("num_samples must be >= 1");
    if (mode == Mode::Sample && !(temperature > 0.0)) {
        throw OutOfRange("sampling requires temperature > 0");
    }
    if (max_new_tokens < 1) throw OutOfRange("max_new_tokens must be >= 1");
    if (mode == Mode::Beam && beam.beam_size < 1) throw OutOfRange("beam_size must be >= 1");
}

MockTable MockTable::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock table: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("mock table: ") + e.what());
    }
    MockTable table;
    for (const auto& entry_json : j.at("entries")) {
        MockEntry entry;
        for (const auto& cand : entry_json.at("candidates")) {
            MockEntry::Option option;
            option.text = cand.at("text").get<std::string>();
            if (cand.contains("weight")) option.weight = cand.at("weight").get<double>();
            if (!(option.weight > 0.0)) {
                throw ValidationError("mock candidate weights must be positive");
            }
            entry.options.push_back(std::move(option));
        }
        if (entry.options.empty()) {
            throw ValidationError("mock entry without candidates");
        }
        table.entries[entry_json.at("query").get<std::string>()] = std::move(entry);
    }
    return table;
}

std::string query_line_of_prompt(const std::string& prompt) {
    // template: ...\n{source_name}: {query}\n{target_name}: <- end
    const std::size_t last_nl = prompt.rfind('\n');
    if (last_nl == std::string::npos || last_nl == 0) return prompt;
    const std::size_t prev_nl = prompt.rfind('\n', last_nl - 1);
    const std::size_t begin = prev_nl == std::string::npos ? 0 : prev_nl + 1;
    std::string line = prompt.substr(begin, last_nl - begin);
    const std::size_t label = line.find(": ");
    if (label != std::string::npos) line = line.substr(label + 2);
    return line;
}

MockBackend::MockBackend(MockTable table, std::uint64_t base_seed, Fallback fallback)
    : table_(std::move(table)), base_seed_(base_seed), fallback_(std::move(fallback)) {}

namespace {

std::string apply_stops(std::string text, const std::vector<std::string>& stops) {
    std::size_t cut = text.size();
    for (const auto& stop : stops) {
        if (stop.empty()) continue;
        const std::size_t at = text.find(stop);
        if (at != std::string::npos) cut = std::min(cut, at);
    }
    text.resize(cut);
    return text;
}

}  // namespace

CandidateSet MockBackend::generate_seeded(const std::string& prompt,
                                          const GenerationParams& params,
                                          std::uint64_t seed) const {
    params.validate();
    const std::string query = query_line_of_prompt(prompt);

    const MockEntry* entry = nullptr;
    if (const auto it = table_.entries.find(query); it != table_.entries.end()) {
        entry = &it->second;
    }

    Rng rng(derive_seed(seed, fnv1a64(prompt)));
    CandidateSet result;
    result.prompt_id = std::to_string(fnv1a64(prompt));
    const std::size_t count = params.expected_candidates();
    result.candidates.reserve(count);

    if (entry == nullptr) {
        if (!fallback_) throw UnknownQuery(query);
        for (std::size_t i = 0; i < count; ++i) {
            result.candidates.push_back(
                apply_stops(fallback_(query, rng), params.stop_sequences));
        }
        return result;
    }

    if (params.mode == GenerationParams::Mode::Beam) {
        const auto best = std::max_element(
            entry->options.begin(), entry->options.end(),
            [](const auto& a, const auto& b) { return a.weight < b.weight; });
        result.candidates.push_back(apply_stops(best->text, params.stop_sequences));
        return result;
    }

    // temperature reshapes the categorical the same way it reshapes logits
    std::vector<double> cumulative;
    cumulative.reserve(entry->options.size());
    double total = 0.0;
    for (const auto& option : entry->options) {
        total += std::pow(option.weight, 1.0 / params.temperature);
        cumulative.push_back(total);
    }
    for (std::size_t i = 0; i < count; ++i) {
        const double u = rng.next_unit() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t pick = std::min<std::size_t>(
            static_cast<std::size_t>(it - cumulative.begin()), entry->options.size() - 1);
        result.candidates.push_back(
            apply_stops(entry->options[pick].text, params.stop_sequences));
    }
    return result;
}

CandidateSet MockBackend::generate(const std::string& prompt, const GenerationParams& params) {
    return generate_seeded(prompt, params, base_seed_);
}

HttpBackend::HttpBackend(std::string base_url, RetryPolicy retry, std::string auth_token)
    : base_url_(std::move(base_url)), retry_(retry), auth_token_(std::move(auth_token)) {}

CandidateSet HttpBackend::generate(const std::string& prompt, const GenerationParams& params) {
    params.validate();
    nlohmann::json body;
    body["prompt"] = prompt;
    body["num_samples"] = params.num_samples;
    body["temperature"] = params.temperature;
    body["max_new_tokens"] = params.max_new_tokens;
    body["stop"] = params.stop_sequences;
    body["mode"] = params.mode == GenerationParams::Mode::Beam ? "beam" : "sample";
    if (params.mode == GenerationParams::Mode::Beam) {
        body["beam_size"] = params.beam.beam_size;
        body["length_alpha"] = params.beam.length_alpha;
    }

    const auto reply =
        detail::post_json(base_url_, "/v1/generate", body, retry_, auth_token_, "backend");
    if (!reply.contains("candidates") || !reply["candidates"].is_array()) {
        throw ProtocolError("backend response lacks a 'candidates' array");
    }
    const auto& listed = reply["candidates"];
    if (listed.size() != params.expected_candidates()) {
        throw LengthMismatch("backend candidates", params.expected_candidates(), listed.size(),
                             Error::Category::Runtime);
    }
    CandidateSet result;
    result.prompt_id = std::to_string(fnv1a64(prompt));
    result.candidates.reserve(listed.size());
    for (const auto& c : listed) {
        if (!c.is_string()) throw ProtocolError("backend candidate is not a string");
        result.candidates.push_back(c.get<std::string>());
    }
    return result;
}

bool HttpBackend::healthy() const { return detail::get_ok(base_url_, "/v1/health"); }

CandidateSet remote_generate(const std::string& base_url, const std::string& prompt,
                             const GenerationParams& params, RetryPolicy retry,
                             const std::string& auth_token) {
    HttpBackend backend(base_url, retry, auth_token);
    return backend.generate(prompt, params);
}

}  // namespace fewmt
