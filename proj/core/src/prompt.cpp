#include "fewmt/prompt.hpp"

#include "fewmt/errors.hpp"

namespace fewmt {

namespace {

bool has_newline(std::string_view text) {
    return text.find('\n') != std::string_view::npos ||
           text.find('\r') != std::string_view::npos;
}

}  // namespace

RenderedPrompt render_prompt(std::span<const Demonstration> demos, std::string_view query,
                             const LanguagePair& pair) {
    if (demos.empty()) throw ValidationError("prompt needs at least one demonstration");
    if (pair.source_name.empty() || pair.target_name.empty()) {
        throw ValidationError("language names must be non-empty");
    }
    if (query.empty()) throw EmptyQuery();
    if (has_newline(query)) throw EmbeddedNewline("query", demos.size());

    std::string text;
    for (std::size_t i = 0; i < demos.size(); ++i) {
        if (has_newline(demos[i].source) || has_newline(demos[i].target)) {
            throw EmbeddedNewline("demonstration", i);
        }
        text += pair.source_name;
        text += ": ";
        text += demos[i].source;
        text += '\n';
        text += pair.target_name;
        text += ": ";
        text += demos[i].target;
        text += '\n';
    }
    text += '\n';
    text += pair.source_name;
    text += ": ";
    text += query;
    text += '\n';
    text += pair.target_name;
    text += ": ";

    RenderedPrompt prompt;
    prompt.text = std::move(text);
    prompt.demo_count = demos.size();
    prompt.pair = pair;
    return prompt;
}

ParsedCompletion parse_completion(std::string_view raw) {
    const std::size_t cut = raw.find('\n');
    std::string_view line = cut == std::string_view::npos ? raw : raw.substr(0, cut);

    const auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
    };
    while (!line.empty() && is_ws(line.front())) line.remove_prefix(1);
    while (!line.empty() && is_ws(line.back())) line.remove_suffix(1);

    ParsedCompletion out;
    out.text = std::string(line);
    out.empty = out.text.empty();
    return out;
}

}  // namespace fewmt
