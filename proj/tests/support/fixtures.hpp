#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "timeset/corpus.hpp"
#include "timeset/templates.hpp"

namespace timeset::testing {

// Checked-in sample corpus (data/sample) and template assets (templates/).
std::filesystem::path source_dir();
std::filesystem::path sample_corpus_dir();
std::filesystem::path templates_dir();

const std::vector<timeset::DocumentRecord>& sample_corpus();
const timeset::DocumentRecord& sample_doc(const std::string& id);
const timeset::TemplateSet& shipped_templates();

// Fresh scratch directory under the build tree, cleared on entry.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace timeset::testing
