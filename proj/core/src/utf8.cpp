#include "timeset/utf8.hpp"

namespace timeset::utf8 {

namespace {
bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }
}  // namespace

std::vector<std::size_t> codepoint_offsets(std::string_view text) {
  std::vector<std::size_t> offsets;
  offsets.reserve(text.size() + 1);
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!is_continuation(static_cast<unsigned char>(text[i]))) {
      offsets.push_back(i);
    }
  }
  offsets.push_back(text.size());
  return offsets;
}

std::size_t length(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if (!is_continuation(static_cast<unsigned char>(c))) ++n;
  }
  return n;
}

std::string slice(std::string_view text, std::size_t cp_begin, std::size_t cp_end) {
  if (cp_begin >= cp_end) return {};
  const auto offsets = codepoint_offsets(text);
  if (cp_end >= offsets.size()) cp_end = offsets.size() - 1;
  if (cp_begin >= offsets.size()) return {};
  return std::string(text.substr(offsets[cp_begin], offsets[cp_end] - offsets[cp_begin]));
}

}  // namespace timeset::utf8
