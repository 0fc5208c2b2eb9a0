#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "timeset/graph.hpp"

namespace timeset {

// Document creation time bucket around the 2022-09 pretraining-cutoff
// boundary: documents dated 2022-09-01 or later are "new".
enum class Era { Old, New };

const char* to_string(Era era);
Era era_for_dct(const std::string& iso_date);

struct DocumentRecord {
  std::string id;
  std::string title;
  std::string dct;  // ISO date, e.g. "2022-09-06"
  std::string topic;
  std::string split;  // "dev" or "test"
  std::string text;
  Era era = Era::Old;
  TimelineGraph graph;
  int word_count = 0;
  int sentence_count = 0;

  // Code-point window of the title line; events must not overlap it.
  Span title_zone() const;
};

int count_words(std::string_view text);
int count_sentences(std::string_view text);

// Assembles a record from raw text + standoff annotation and computes the
// derived fields.
DocumentRecord make_document(const std::string& id, const std::string& title,
                             const std::string& dct, const std::string& topic,
                             const std::string& split, const std::string& text,
                             const std::string& annotation);

// Loads a corpus directory: manifest.jsonl with one {id, title, dct, topic,
// split} object per line, plus <id>.txt / <id>.ann pairs. Documents are
// returned in manifest order. Throws MissingPair / ManifestError.
std::vector<DocumentRecord> load_corpus(const std::filesystem::path& root);

struct CorpusStats {
  int documents = 0;
  int events = 0;
  int relations = 0;
  int arguments = 0;
  int dev_documents = 0;
  int test_documents = 0;
  int dev_events = 0;
  double avg_words = 0.0;
};

CorpusStats corpus_stats(const std::vector<DocumentRecord>& docs);

}  // namespace timeset
