#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace timeset::utf8 {

// Byte offset of each code point in `text`, plus a trailing sentinel equal to
// text.size(). Annotation offsets count Unicode scalar values, not bytes, so
// every span lookup goes through this table.
std::vector<std::size_t> codepoint_offsets(std::string_view text);

// Number of Unicode scalar values in `text`.
std::size_t length(std::string_view text);

// Substring addressed in code points (half-open).
std::string slice(std::string_view text, std::size_t cp_begin, std::size_t cp_end);

}  // namespace timeset::utf8
