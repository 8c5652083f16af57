#ifndef FEWMT_PROMPT_HPP
#define FEWMT_PROMPT_HPP

#include <span>
#include <string>
#include <string_view>

#include "fewmt/pool.hpp"
#include "fewmt/token.hpp"

namespace fewmt {

struct RenderedPrompt {
    std::string text;
    std::size_t demo_count = 0;
    LanguagePair pair;
};

// Few-shot template, byte-deterministic:
//
//   {source_name}: {x_1}\n{target_name}: {y_1}\n...
//   \n
//   {source_name}: {query}\n{target_name}:<space>
//
// Demonstration lines are adjacent; exactly one blank line separates the
// demonstrations from the query block; the prompt ends after the target
// label and a single space, with the completion to follow. Texts containing
// newlines are rejected because the newline is the generation stop signal.
RenderedPrompt render_prompt(std::span<const Demonstration> demos, std::string_view query,
                             const LanguagePair& pair);

struct ParsedCompletion {
    std::string text;
    bool empty = false;
};

// Completion up to the first newline, whitespace-trimmed. Total: empty or
// junk input yields an empty result flagged for the caller's counter.
ParsedCompletion parse_completion(std::string_view raw);

}  // namespace fewmt

#endif  // FEWMT_PROMPT_HPP
