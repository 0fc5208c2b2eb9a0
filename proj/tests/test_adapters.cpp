#include "timeset/adapters.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "support/fixtures.hpp"
#include "timeset/errors.hpp"

using timeset::BenchmarkDataset;
using timeset::BenchmarkInstance;
using timeset::Formulation;

namespace {

void write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// A MATRES/TDDiscourse-style source layout with TimeML documents.
std::filesystem::path make_tml_sources(const std::filesystem::path& dir) {
  write(dir / "docs" / "doc_police.tml", R"(<?xml version="1.0" ?>
<TimeML>
<DOCID>doc_police</DOCID>
<TEXT>Serbian police <EVENT eid="e1" class="OCCURRENCE">tried</EVENT> to eliminate the pro-independence army and restore order. At least 51 people were <EVENT eid="e2" class="OCCURRENCE">killed</EVENT> in clashes in the troubled region.</TEXT>
<MAKEINSTANCE eiid="ei1" eventID="e1" pos="VERB"/>
<MAKEINSTANCE eiid="ei2" eventID="e2" pos="VERB"/>
</TimeML>
)");
  write(dir / "docs" / "doc_blast.tml", R"(<TimeML>
<TEXT>A bomb <EVENT eid="e1">blast</EVENT> shocks the games. One person is killed. This time a bomb hits a clinic. More people are <EVENT eid="e2">hurt</EVENT>.</TEXT>
<MAKEINSTANCE eiid="ei1" eventID="e1"/>
<MAKEINSTANCE eiid="ei2" eventID="e2"/>
</TimeML>
)");
  write(dir / "docs" / "doc_market.tml", R"(<TimeML>
<TEXT>Shares <EVENT eid="e1">fell</EVENT> sharply before the bank <EVENT eid="e2">announced</EVENT> its rescue package. Trading <EVENT eid="e3">resumed</EVENT> the next morning.</TEXT>
<MAKEINSTANCE eiid="ei1" eventID="e1"/>
<MAKEINSTANCE eiid="ei2" eventID="e2"/>
<MAKEINSTANCE eiid="ei3" eventID="e3"/>
</TimeML>
)");
  return dir;
}

}  // namespace

TEST(Matres, LoadsRowsWithSplitsAndContexts) {
  const auto dir = timeset::testing::scratch_dir("matres");
  make_tml_sources(dir);
  write(dir / "annotations" / "timebank.txt",
        "doc_police\ttried\tkilled\t1\t2\tBEFORE\n"
        "doc_market\tfell\tannounced\tei1\tei2\tBEFORE\n"
        "doc_market\tannounced\tresumed\tei2\tei3\tBEFORE\n"
        "doc_market\tresumed\tfell\tei3\tei1\tAFTER\n");
  write(dir / "annotations" / "aquaint.txt",
        "doc_blast\tblast\thurt\tei1\tei2\tBEFORE\n");
  write(dir / "annotations" / "platinum.txt",
        "doc_police\ttried\tkilled\tei1\tei2\tBEFORE\n"
        "doc_market\tfell\tresumed\tei1\tei3\tVAGUE\n");

  const auto instances = timeset::load_matres({dir / "annotations", dir / "docs"}, 5);
  ASSERT_EQ(instances.size(), 7u);

  // The worked pair: tried BEFORE killed, with both events marked in context.
  const auto* found = static_cast<const BenchmarkInstance*>(nullptr);
  for (const auto& instance : instances) {
    if (instance.id == "doc_police:ei1:ei2" && instance.split != "test") found = &instance;
  }
  ASSERT_NE(found, nullptr);
  const auto& tried = *found;
  EXPECT_EQ(tried.dataset, BenchmarkDataset::Matres);
  EXPECT_EQ(tried.formulation, Formulation::Pairwise);
  EXPECT_EQ(tried.gold_label, "BEFORE");
  EXPECT_NE(tried.context.find("[e1]tried[/e1]"), std::string::npos);
  EXPECT_NE(tried.context.find("[e2]killed[/e2]"), std::string::npos);
  EXPECT_EQ(tried.arg1, "[e1]tried[/e1]");
  EXPECT_EQ(tried.arg2, "[e2]killed[/e2]");

  // Platinum rows land in the test split; train pool is carved 80/20.
  int test_rows = 0, dev_rows = 0, train_rows = 0;
  for (const auto& instance : instances) {
    if (instance.split == "test") ++test_rows;
    if (instance.split == "dev") ++dev_rows;
    if (instance.split == "train") ++train_rows;
  }
  EXPECT_EQ(test_rows, 2);
  EXPECT_GT(dev_rows, 0);
  EXPECT_GT(train_rows, 0);

  // The carve-out is document-level and deterministic.
  const auto again = timeset::load_matres({dir / "annotations", dir / "docs"}, 5);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    EXPECT_EQ(instances[i].split, again[i].split);
  }
  std::map<std::string, std::set<std::string>> splits_by_doc;
  for (const auto& instance : instances) {
    if (instance.split == "test") continue;
    splits_by_doc[instance.id.substr(0, instance.id.find(':'))].insert(instance.split);
  }
  for (const auto& [doc, splits] : splits_by_doc) {
    EXPECT_EQ(splits.size(), 1u) << doc << " appears in several carve-out splits";
  }
}

TEST(Matres, ErrorsForMissingSourcesAndBadLabels) {
  const auto dir = timeset::testing::scratch_dir("matres_bad");
  make_tml_sources(dir);
  write(dir / "annotations" / "timebank.txt", "no_such_doc\ta\tb\tei1\tei2\tBEFORE\n");
  write(dir / "annotations" / "aquaint.txt", "");
  write(dir / "annotations" / "platinum.txt", "");
  try {
    timeset::load_matres({dir / "annotations", dir / "docs"});
    FAIL() << "expected MissingSource";
  } catch (const timeset::TimesetError& e) {
    EXPECT_EQ(e.kind(), timeset::ErrorKind::MissingSource);
  }

  write(dir / "annotations" / "timebank.txt",
        "doc_police\ttried\tkilled\tei1\tei2\tSOMETIME\n");
  try {
    timeset::load_matres({dir / "annotations", dir / "docs"});
    FAIL() << "expected FormatError";
  } catch (const timeset::TimesetError& e) {
    EXPECT_EQ(e.kind(), timeset::ErrorKind::FormatError);
  }
}

TEST(TdDiscourse, OriginalSplitsAndLetterCodes) {
  const auto dir = timeset::testing::scratch_dir("tdd");
  make_tml_sources(dir);
  write(dir / "annotations" / "TDDManTrain.tsv",
        "doc_blast\te1\te2\tb\n"
        "doc_market\te1\te3\tb\n"
        "doc_market\te2\te1\ta\n");
  write(dir / "annotations" / "TDDManDev.tsv", "doc_market\te1\te2\ts\n");
  write(dir / "annotations" / "TDDManTest.tsv",
        "doc_market\te2\te3\ti\n"
        "doc_market\te3\te2\tii\n");
  // TDDAuto files in the same directory are out of scope and ignored.
  write(dir / "annotations" / "TDDAutoTrain.tsv", "doc_market\te1\te2\tb\n");

  const auto instances = timeset::load_tddiscourse({dir / "annotations", dir / "docs"});
  ASSERT_EQ(instances.size(), 6u);
  EXPECT_EQ(instances[0].gold_label, "BEFORE");
  EXPECT_EQ(instances[0].split, "train");
  EXPECT_NE(instances[0].context.find("[e1]blast[/e1]"), std::string::npos);
  EXPECT_NE(instances[0].context.find("[e2]hurt[/e2]"), std::string::npos);
  EXPECT_EQ(instances[3].split, "dev");
  EXPECT_EQ(instances[3].gold_label, "SIMULTANEOUS");
  EXPECT_EQ(instances[4].split, "test");
  EXPECT_EQ(instances[4].gold_label, "INCLUDE");
  EXPECT_EQ(instances[5].gold_label, "INCLUDED");
  const std::vector<std::string> want_labels{"BEFORE", "AFTER", "SIMULTANEOUS",
                                             "INCLUDE", "INCLUDED"};
  EXPECT_EQ(instances[0].label_set, want_labels);
}

TEST(TdDiscourse, MissingPairDocument) {
  const auto dir = timeset::testing::scratch_dir("tdd_missing");
  make_tml_sources(dir);
  write(dir / "annotations" / "TDDManTrain.tsv", "ghost_doc\te1\te2\tb\n");
  write(dir / "annotations" / "TDDManDev.tsv", "");
  write(dir / "annotations" / "TDDManTest.tsv", "");
  try {
    timeset::load_tddiscourse({dir / "annotations", dir / "docs"});
    FAIL() << "expected MissingSource";
  } catch (const timeset::TimesetError& e) {
    EXPECT_EQ(e.kind(), timeset::ErrorKind::MissingSource);
  }
}

TEST(TemporalNli, BinaryLabelsAndDeduplication) {
  const auto dir = timeset::testing::scratch_dir("tnli");
  write(dir / "train.jsonl",
        R"({"context": "Reggie said he will pay us soon.", "hypothesis": "The paying ended before the saying started.", "label": "not-entailed"})"
        "\n"
        R"({"context": "Reggie said he will pay us soon.", "hypothesis": "The paying ended before the saying started.", "label": "not-entailed"})"
        "\n"
        R"({"context": "She left after dinner.", "hypothesis": "The leaving started after the dinner started.", "label": "entailed"})"
        "\n");
  write(dir / "test.jsonl",
        R"({"context": "He won the race.", "hypothesis": "The winning happened.", "label": "entailed"})"
        "\n");

  const auto instances = timeset::load_temporal_nli(dir);
  ASSERT_EQ(instances.size(), 3u);  // duplicate row dropped
  EXPECT_EQ(instances[0].gold_label, "NOT_ENTAILMENT");
  EXPECT_EQ(instances[0].split, "train");
  EXPECT_EQ(instances[1].gold_label, "ENTAILMENT");
  EXPECT_EQ(instances[2].split, "test");

  write(dir / "dev.jsonl", "{\"context\": \"broken row\"}\n");
  try {
    timeset::load_temporal_nli(dir);
    FAIL() << "expected FormatError";
  } catch (const timeset::TimesetError& e) {
    EXPECT_EQ(e.kind(), timeset::ErrorKind::FormatError);
  }
}

namespace {

std::filesystem::path make_torque_fixture(const std::filesystem::path& dir) {
  write(dir / "train.json", R"([
  {"passage": "The council approved the plan. Work began a week later.",
   "question_answer_pairs": [
     {"question": "What happened after the plan was approved?", "answer": {"spans": ["began"]}},
     {"question": "What happened before work began?", "answer": {"spans": ["approved"]}}
   ]},
  {"passage": "The storm hit the coast. Crews restored power overnight.",
   "question_answer_pairs": [
     {"question": "What happened after the storm hit?", "answer": {"spans": ["restored"]}},
     {"question": "What happened while power was out?", "answer": {"spans": []}}
   ]},
  {"passage": "The team lost the final. Fans left quietly.",
   "question_answer_pairs": [
     {"question": "What happened after the loss?", "answer": {"spans": ["left"]}}
   ]}
])");
  write(dir / "dev.json", R"([
  {"passage": "Rescuers searching for a woman trapped in a landslide said they had found a body.",
   "question_answer_pairs": [
     {"question": "What happened after a woman was trapped?",
      "answers": [{"spans": ["searching", "said", "found"]}, {"spans": ["searching", "found"]}]},
     {"question": "What happened before the landslide?", "answer": {"spans": []}}
   ]}
])");
  return dir;
}

}  // namespace

TEST(Torque, SplitsAndAnnotatorSets) {
  const auto dir = make_torque_fixture(timeset::testing::scratch_dir("torque"));
  const auto instances = timeset::load_torque({dir / "train.json", dir / "dev.json"}, 3);
  ASSERT_EQ(instances.size(), 7u);

  int train_rows = 0, dev_rows = 0, test_rows = 0;
  for (const auto& instance : instances) {
    EXPECT_EQ(instance.formulation, Formulation::Mrc);
    if (instance.split == "train") ++train_rows;
    if (instance.split == "dev") ++dev_rows;
    if (instance.split == "test") ++test_rows;
  }
  EXPECT_EQ(test_rows, 2);  // the original dev file is the reporting split
  EXPECT_GT(train_rows, 0);
  EXPECT_GT(dev_rows, 0);

  // The woman-trapped example keeps every annotator's answer set.
  const auto* trapped = &instances[5];
  ASSERT_EQ(trapped->gold_answer_sets.size(), 2u);
  EXPECT_EQ(trapped->gold_answer_sets[0],
            (std::set<std::string>{"searching", "said", "found"}));

  write(dir / "dev.json",
        R"([{"passage": "x.", "question_answer_pairs": [{"question": "q?"}]}])");
  try {
    timeset::load_torque({dir / "train.json", dir / "dev.json"});
    FAIL() << "expected FormatError";
  } catch (const timeset::TimesetError& e) {
    EXPECT_EQ(e.kind(), timeset::ErrorKind::FormatError);
  }
}

TEST(Adapters, EveryInstanceRendersUnderItsBoundFormulation) {
  const auto& templates = timeset::testing::shipped_templates();
  const auto matres_dir = timeset::testing::scratch_dir("matres_render");
  make_tml_sources(matres_dir);
  write(matres_dir / "annotations" / "timebank.txt",
        "doc_police\ttried\tkilled\tei1\tei2\tBEFORE\n");
  write(matres_dir / "annotations" / "aquaint.txt", "");
  write(matres_dir / "annotations" / "platinum.txt", "");
  const auto torque_dir = make_torque_fixture(timeset::testing::scratch_dir("torque_render"));
  const auto tnli_dir = timeset::testing::scratch_dir("tnli_render");
  write(tnli_dir / "test.jsonl",
        R"({"context": "He won.", "hypothesis": "The winning happened.", "label": "entailed"})"
        "\n");

  std::vector<BenchmarkInstance> all;
  for (const auto& instance :
       timeset::load_matres({matres_dir / "annotations", matres_dir / "docs"})) {
    all.push_back(instance);
  }
  for (const auto& instance :
       timeset::load_torque({torque_dir / "train.json", torque_dir / "dev.json"})) {
    all.push_back(instance);
  }
  for (const auto& instance : timeset::load_temporal_nli(tnli_dir)) {
    all.push_back(instance);
  }

  const std::map<Formulation, std::string> template_for{
      {Formulation::Nli, "nli_00"},
      {Formulation::Pairwise, "pw_00"},
      {Formulation::Mrc, "mrc_01"}};
  for (const auto& instance : all) {
    const auto& t = templates.get(instance.formulation, template_for.at(instance.formulation));
    const auto prompt = timeset::render_benchmark_prompt(instance, t);
    EXPECT_FALSE(prompt.empty());
    EXPECT_EQ(prompt.find('\x00'), std::string::npos);
  }
}

TEST(Adapters, InterchangeRoundTrip) {
  const auto dir = make_torque_fixture(timeset::testing::scratch_dir("torque_json"));
  const auto instances = timeset::load_torque({dir / "train.json", dir / "dev.json"});
  for (const auto& instance : instances) {
    const auto back =
        timeset::benchmark_instance_from_json(timeset::to_interchange_json(instance));
    EXPECT_EQ(back.id, instance.id);
    EXPECT_EQ(back.split, instance.split);
    EXPECT_EQ(back.context, instance.context);
    EXPECT_EQ(back.question, instance.question);
    EXPECT_EQ(back.gold_answer_sets, instance.gold_answer_sets);
  }
}

TEST(Adapters, OracleAnswersScorePerfectly) {
  const auto& templates = timeset::testing::shipped_templates();
  const auto dir = make_torque_fixture(timeset::testing::scratch_dir("torque_oracle"));
  const auto instances = timeset::load_torque({dir / "train.json", dir / "dev.json"});
  const auto& t = templates.get(Formulation::Mrc, "mrc_01");

  std::vector<timeset::BenchmarkPrediction> predictions;
  for (const auto& instance : instances) {
    predictions.push_back(timeset::parse_benchmark_completion(
        instance, t, timeset::benchmark_gold_answer(instance, t)));
  }
  EXPECT_DOUBLE_EQ(timeset::score_benchmark(instances, predictions), 1.0);
}
