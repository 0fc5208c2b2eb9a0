#pragma once

#include <string>
#include <vector>

#include "timeset/corpus.hpp"

namespace timeset {

// Static layered left-to-right rendering of a document's gold timeline.
// Cyclic graphs render as an error card instead of a layout.
std::string render_timeline_svg(const DocumentRecord& doc);

struct BoxplotBox {
  std::string label;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  std::size_t count = 0;
};

// One box per group; y axis fixed to [0, 1].
std::string render_boxplot_svg(const std::string& title,
                               const std::vector<BoxplotBox>& boxes);

}  // namespace timeset
