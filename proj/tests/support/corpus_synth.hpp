#pragma once

#include <filesystem>

namespace timeset::testing {

// Writes a corpus with the released dataset's headline statistics: 50
// documents (10 dev / 40 test), 356 events, 314 relations, 654 arguments,
// 437.9 average words per document. Used by the corpus-statistics acceptance
// check when the released data is not on disk (point TIMESET_CORPUS at it to
// check the real corpus instead).
void write_synthetic_corpus(const std::filesystem::path& dir);

}  // namespace timeset::testing
