#pragma once

#include "gem/model.hpp"

#include <string>

namespace gem {

// Rule-based sentence splitter. Breaks on '.', '!', '?' followed by
// whitespace and a capital letter, digit, or newline; newline-delimited
// markdown list items, headings, table rows, and fenced code blocks are one
// sentence each; a built-in abbreviation list and periods inside URLs or
// markdown link targets suppress breaks. Deterministic; offsets are trimmed
// to non-whitespace extents and cover every non-whitespace character.
//
// Throws PreconditionError when the input is empty after trimming.
SegmentedText segment(const std::string& text);

// True when the text contains markdown tables or fenced code blocks; such
// responses get a diagnostics flag in reports because each row/block counts
// as a single sentence.
bool contains_structured_markdown(const std::string& text);

}  // namespace gem
