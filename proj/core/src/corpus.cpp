#include "timeset/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "timeset/errors.hpp"
#include "timeset/standoff.hpp"
#include "timeset/utf8.hpp"

namespace timeset {

const char* to_string(Era era) { return era == Era::New ? "new" : "old"; }

Era era_for_dct(const std::string& iso_date) {
  // Expect YYYY-MM[-DD].
  if (iso_date.size() < 7 || iso_date[4] != '-') {
    fail(ErrorKind::ManifestError, "bad dct: " + iso_date);
  }
  const int year = std::stoi(iso_date.substr(0, 4));
  const int month = std::stoi(iso_date.substr(5, 2));
  if (month < 1 || month > 12) fail(ErrorKind::ManifestError, "bad dct month: " + iso_date);
  if (year > 2022) return Era::New;
  if (year == 2022 && month >= 9) return Era::New;
  return Era::Old;
}

int count_words(std::string_view text) {
  int count = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

int count_sentences(std::string_view text) {
  int count = 0;
  bool in_terminator = false;
  for (char c : text) {
    const bool terminator = c == '.' || c == '!' || c == '?';
    if (terminator && !in_terminator) ++count;
    in_terminator = terminator;
  }
  return count;
}

Span DocumentRecord::title_zone() const {
  const auto newline = text.find('\n');
  const std::string first_line =
      newline == std::string::npos ? text : text.substr(0, newline);
  return Span{0, utf8::length(first_line)};
}

DocumentRecord make_document(const std::string& id, const std::string& title,
                             const std::string& dct, const std::string& topic,
                             const std::string& split, const std::string& text,
                             const std::string& annotation) {
  DocumentRecord doc;
  doc.id = id;
  doc.title = title;
  doc.dct = dct;
  doc.topic = topic;
  doc.split = split;
  doc.text = text;
  doc.era = era_for_dct(dct);
  doc.graph = parse_standoff(annotation, text);
  doc.word_count = count_words(text);
  doc.sentence_count = count_sentences(text);
  return doc;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::MissingPair, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::vector<DocumentRecord> load_corpus(const std::filesystem::path& root) {
  const auto manifest_path = root / "manifest.jsonl";
  if (!std::filesystem::exists(manifest_path)) {
    fail(ErrorKind::MissingPair, "no manifest.jsonl under " + root.string());
  }
  std::ifstream manifest(manifest_path);
  std::vector<DocumentRecord> docs;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(manifest, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::ManifestError,
           "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    for (const char* field : {"id", "title", "dct", "topic", "split"}) {
      if (!row.contains(field) || !row[field].is_string()) {
        fail(ErrorKind::ManifestError,
             "manifest line " + std::to_string(line_no) + " missing " + field);
      }
    }
    const auto id = row["id"].get<std::string>();
    const auto split = row["split"].get<std::string>();
    if (split != "dev" && split != "test") {
      fail(ErrorKind::ManifestError, id + ": split must be dev or test, got " + split);
    }
    if (!seen_ids.insert(id).second) {
      fail(ErrorKind::ManifestError, "duplicate manifest id " + id);
    }
    const auto text_path = root / (id + ".txt");
    const auto ann_path = root / (id + ".ann");
    if (!std::filesystem::exists(text_path) || !std::filesystem::exists(ann_path)) {
      fail(ErrorKind::MissingPair, id + ": expected " + id + ".txt and " + id + ".ann");
    }
    docs.push_back(make_document(id, row["title"].get<std::string>(),
                                 row["dct"].get<std::string>(),
                                 row["topic"].get<std::string>(), split,
                                 read_file(text_path), read_file(ann_path)));
  }
  if (docs.empty()) {
    fail(ErrorKind::MissingPair, "no documents listed in " + manifest_path.string());
  }
  return docs;
}

CorpusStats corpus_stats(const std::vector<DocumentRecord>& docs) {
  CorpusStats stats;
  long total_words = 0;
  for (const auto& doc : docs) {
    ++stats.documents;
    stats.events += static_cast<int>(doc.graph.event_count());
    stats.relations +=
        static_cast<int>(doc.graph.edges().size() + doc.graph.coex_links().size());
    for (const auto& [id, ev] : doc.graph.events()) {
      stats.arguments += static_cast<int>(ev.arguments.size());
    }
    if (doc.split == "dev") {
      ++stats.dev_documents;
      stats.dev_events += static_cast<int>(doc.graph.event_count());
    } else {
      ++stats.test_documents;
    }
    total_words += doc.word_count;
  }
  if (stats.documents > 0) {
    stats.avg_words = static_cast<double>(total_words) / stats.documents;
  }
  return stats;
}

}  // namespace timeset
