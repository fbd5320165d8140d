#pragma once

#include <string_view>

namespace gem {

// Fallback token estimate used when an endpoint omits usage counts (and
// always by the stub backend): alphanumeric runs count as one token each,
// every other non-whitespace character counts as one token.
long fallback_token_count(std::string_view text);

}  // namespace gem
