#include "gem/digest.hpp"

#include <array>

namespace gem {

std::string to_hex(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::array<char, 16> buf{};
  for (int i = 15; i >= 0; --i) {
    buf[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
    value >>= 4;
  }
  return std::string(buf.data(), buf.size());
}

std::string hex_digest(std::string_view data) { return to_hex(fnv1a64(data)); }

}  // namespace gem
