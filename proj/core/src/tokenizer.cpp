#include "gem/tokenizer.hpp"

#include <cctype>

namespace gem {

long fallback_token_count(std::string_view text) {
  long count = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      if (!in_word) {
        ++count;
        in_word = true;
      }
    } else {
      in_word = false;
      if (!std::isspace(c)) ++count;
    }
  }
  return count;
}

}  // namespace gem
