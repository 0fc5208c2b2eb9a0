#include "support/fixtures.hpp"

#include <stdexcept>

namespace timeset::testing {

std::filesystem::path source_dir() { return TIMESET_SOURCE_DIR; }

std::filesystem::path sample_corpus_dir() { return source_dir() / "data" / "sample"; }

std::filesystem::path templates_dir() { return source_dir() / "templates"; }

const std::vector<timeset::DocumentRecord>& sample_corpus() {
  static const auto docs = timeset::load_corpus(sample_corpus_dir());
  return docs;
}

const timeset::DocumentRecord& sample_doc(const std::string& id) {
  for (const auto& doc : sample_corpus()) {
    if (doc.id == id) return doc;
  }
  throw std::runtime_error("no sample document " + id);
}

const timeset::TemplateSet& shipped_templates() {
  static const auto templates = timeset::TemplateSet::load(templates_dir());
  return templates;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("timeset_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace timeset::testing
