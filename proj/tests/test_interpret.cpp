#include "timeset/interpret.hpp"

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "timeset/errors.hpp"
#include "timeset/metrics.hpp"

using timeset::AnswerPayload;
using timeset::Formulation;
using timeset::GenerationOptions;
using timeset::ParseStatus;
using timeset::PredictionRecord;
using timeset::PromptInstance;
using timeset::QueryPayload;
using timeset::RelationLabel;

namespace {

const timeset::PromptTemplate& tmpl(Formulation f, const std::string& id) {
  return timeset::testing::shipped_templates().get(f, id);
}

// Instance/record pair helpers for assemble_graph tests.
struct Joined {
  std::vector<PromptInstance> instances;
  std::vector<PredictionRecord> records;

  void add_pairwise_vote(const std::string& doc_id, int a, int b, RelationLabel vote) {
    PromptInstance instance;
    instance.instance_id = doc_id + "#" + std::to_string(instances.size());
    instance.doc_id = doc_id;
    instance.formulation = Formulation::Pairwise;
    instance.query = {QueryPayload::Kind::Pair, a, b, RelationLabel::None};
    PredictionRecord record;
    record.instance_id = instance.instance_id;
    record.status = ParseStatus::Ok;
    record.payload.kind = AnswerPayload::Kind::Relation;
    record.payload.relation = vote;
    instances.push_back(std::move(instance));
    records.push_back(std::move(record));
  }

  void add_timeline(const std::string& doc_id, std::vector<std::vector<int>> layers) {
    PromptInstance instance;
    instance.instance_id = doc_id + "#tl" + std::to_string(instances.size());
    instance.doc_id = doc_id;
    instance.formulation = Formulation::Timeline;
    instance.query = {QueryPayload::Kind::Document, 0, 0, RelationLabel::None};
    PredictionRecord record;
    record.instance_id = instance.instance_id;
    record.status = ParseStatus::Ok;
    record.payload.kind = AnswerPayload::Kind::Layers;
    record.payload.layers = std::move(layers);
    instances.push_back(std::move(instance));
    records.push_back(std::move(record));
  }

  std::vector<std::pair<const PromptInstance*, const PredictionRecord*>> view() const {
    std::vector<std::pair<const PromptInstance*, const PredictionRecord*>> out;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      out.emplace_back(&instances[i], &records[i]);
    }
    return out;
  }
};

}  // namespace

TEST(ParseNli, VocabularyMatches) {
  const auto& t01 = tmpl(Formulation::Nli, "nli_01");  // Yes / No
  EXPECT_EQ(timeset::parse_nli("Yes", t01), std::optional<bool>(true));
  EXPECT_EQ(timeset::parse_nli("  no, I think not", t01), std::optional<bool>(false));
  EXPECT_EQ(timeset::parse_nli("maybe?", t01), std::nullopt);

  const auto& t00 = tmpl(Formulation::Nli, "nli_00");  // Entailment / Not entailment
  EXPECT_EQ(timeset::parse_nli("Entailment.", t00), std::optional<bool>(true));
  EXPECT_EQ(timeset::parse_nli("Not entailment", t00), std::optional<bool>(false));
  // The negative surface contains the affirmative one; position decides.
  EXPECT_EQ(timeset::parse_nli("It is not entailment after all", t00),
            std::optional<bool>(false));
}

TEST(ParsePairwise, SurfaceLabelsMapToCanonical) {
  const auto& three_choice = tmpl(Formulation::Pairwise, "pw_00");
  EXPECT_EQ(timeset::parse_pairwise("Answer: AFTER", three_choice),
            std::optional<RelationLabel>(RelationLabel::After));
  EXPECT_EQ(timeset::parse_pairwise("VAGUE", three_choice),
            std::optional<RelationLabel>(RelationLabel::Coex));
  EXPECT_EQ(timeset::parse_pairwise("", three_choice), std::nullopt);

  const auto& injective = tmpl(Formulation::Pairwise, "pw_01");
  EXPECT_EQ(timeset::parse_pairwise("SIMULTANEOUS", injective),
            std::optional<RelationLabel>(RelationLabel::Coex));
  EXPECT_EQ(timeset::parse_pairwise("NONE of these", injective),
            std::optional<RelationLabel>(RelationLabel::None));
}

TEST(ParseMrc, IdPatternFirstThenSurfaceFallback) {
  const auto& doc = timeset::testing::sample_doc("monkeypox");
  EXPECT_EQ(timeset::parse_mrc("[e2]death[/e2], [e3]diagnosed[/e3]", doc),
            (std::set<int>{2, 3}));
  EXPECT_EQ(timeset::parse_mrc("death, diagnosed", doc), (std::set<int>{2, 3}));
  EXPECT_EQ(timeset::parse_mrc("nothing happened", doc), (std::set<int>{}));
  // Unknown items dropped, duplicates collapsed, bad ids ignored.
  EXPECT_EQ(timeset::parse_mrc("[e2]death[/e2], [e2]death[/e2], [e9]x[/e9]", doc),
            (std::set<int>{2}));
  // Star-marked items resolve through the mention fallback.
  EXPECT_EQ(timeset::parse_mrc("**death**, **diagnosed**", doc), (std::set<int>{2, 3}));
}

TEST(ParseMrc, TableTwoAnswerShape) {
  const auto& doc = timeset::testing::sample_doc("bookstore");
  EXPECT_EQ(timeset::parse_mrc("went, bought", doc), (std::set<int>{1, 2}));
}

TEST(ParseTimeline, BulletAndInlineForms) {
  const auto& doc = timeset::testing::sample_doc("monkeypox");
  const std::string bullets =
      "T1:\n- [e3]diagnosed[/e3]\nT2:\n- [e2]death[/e2]\nT3:\n- [e1]identified[/e1]\n- "
      "[e4]investigating[/e4]";
  const auto parsed = timeset::parse_timeline(bullets, doc);
  ASSERT_TRUE(parsed.has_value());
  const std::vector<std::vector<int>> want{{3}, {2}, {1, 4}};
  EXPECT_EQ(*parsed, want);

  const auto& bookstore = timeset::testing::sample_doc("bookstore");
  const auto inline_form =
      timeset::parse_timeline("T1: visited \n T2: went \n T3: bought", bookstore);
  ASSERT_TRUE(inline_form.has_value());
  const std::vector<std::vector<int>> singletons{{3}, {1}, {2}};
  EXPECT_EQ(*inline_form, singletons);
}

TEST(ParseTimeline, CodeFormAndGarbage) {
  const auto& doc = timeset::testing::sample_doc("monkeypox");
  const std::string code =
      "        T1 = [self.event3]\n        T2 = [self.event2]\n        T3 = "
      "[self.event1, self.event4]";
  const auto parsed = timeset::parse_timeline(code, doc);
  ASSERT_TRUE(parsed.has_value());
  const std::vector<std::vector<int>> want{{3}, {2}, {1, 4}};
  EXPECT_EQ(*parsed, want);

  EXPECT_EQ(timeset::parse_timeline("no timeline here at all", doc), std::nullopt);
}

TEST(ParseTimeline, UnplacedEventsYieldNoRelations) {
  const auto& doc = timeset::testing::sample_doc("monkeypox");
  const auto parsed = timeset::parse_timeline("T1: [e3]diagnosed[/e3]", doc);
  ASSERT_TRUE(parsed.has_value());
  const std::vector<std::vector<int>> want{{3}};
  EXPECT_EQ(*parsed, want);
}

TEST(AssembleGraph, StrictMajorityWins) {
  const auto& doc = timeset::testing::sample_doc("bookstore");
  Joined joined;
  // Votes {BEFORE, BEFORE, COEX} on (went=1, bought=2).
  joined.add_pairwise_vote(doc.id, 1, 2, RelationLabel::Before);
  joined.add_pairwise_vote(doc.id, 1, 2, RelationLabel::Before);
  joined.add_pairwise_vote(doc.id, 1, 2, RelationLabel::Coex);
  const auto graph = timeset::assemble_graph(doc, joined.view(), 0);
  const auto* went = doc.graph.find_by_index(1);
  const auto* bought = doc.graph.find_by_index(2);
  EXPECT_TRUE(graph.has_edge(went->id, bought->id));
  EXPECT_TRUE(graph.coex_links().empty());
}

TEST(AssembleGraph, DirectionNormalization) {
  const auto& doc = timeset::testing::sample_doc("bookstore");
  Joined joined;
  // "(bought=2, went=1) is AFTER" is the same fact as "went before bought".
  joined.add_pairwise_vote(doc.id, 2, 1, RelationLabel::After);
  const auto graph = timeset::assemble_graph(doc, joined.view(), 0);
  EXPECT_TRUE(graph.has_edge(doc.graph.find_by_index(1)->id,
                             doc.graph.find_by_index(2)->id));
}

TEST(AssembleGraph, SeededTieBreakIsDeterministic) {
  const auto& doc = timeset::testing::sample_doc("bookstore");
  Joined joined;
  joined.add_pairwise_vote(doc.id, 1, 2, RelationLabel::Before);
  joined.add_pairwise_vote(doc.id, 1, 2, RelationLabel::After);
  const auto first = timeset::assemble_graph(doc, joined.view(), 1234);
  for (int round = 0; round < 5; ++round) {
    const auto again = timeset::assemble_graph(doc, joined.view(), 1234);
    EXPECT_EQ(again.edges(), first.edges());
    EXPECT_EQ(again.coex_links(), first.coex_links());
  }
  // Across many seeds both tied options appear.
  bool saw_before = false, saw_after = false;
  const auto* went = doc.graph.find_by_index(1);
  const auto* bought = doc.graph.find_by_index(2);
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const auto graph = timeset::assemble_graph(doc, joined.view(), seed);
    if (graph.has_edge(went->id, bought->id)) saw_before = true;
    if (graph.has_edge(bought->id, went->id)) saw_after = true;
  }
  EXPECT_TRUE(saw_before);
  EXPECT_TRUE(saw_after);
}

TEST(AssembleGraph, ZeroVotesMeansNoEdge) {
  const auto& doc = timeset::testing::sample_doc("bookstore");
  Joined joined;
  joined.add_pairwise_vote(doc.id, 1, 2, RelationLabel::None);  // parsed NONE
  const auto graph = timeset::assemble_graph(doc, joined.view(), 0);
  EXPECT_TRUE(graph.edges().empty());
  EXPECT_TRUE(graph.coex_links().empty());
}

TEST(AssembleGraph, TimelineLayersBecomeEdgesAndCoex) {
  const auto& doc = timeset::testing::sample_doc("bookstore");
  Joined joined;
  joined.add_timeline(doc.id, {{1}, {2, 3}});
  const auto graph = timeset::assemble_graph(doc, joined.view(), 0);
  const auto* went = doc.graph.find_by_index(1);
  const auto* bought = doc.graph.find_by_index(2);
  const auto* visited = doc.graph.find_by_index(3);
  EXPECT_TRUE(graph.has_edge(went->id, bought->id));
  EXPECT_TRUE(graph.has_edge(went->id, visited->id));
  EXPECT_EQ(graph.coex_links().count({std::min(bought->id, visited->id),
                                      std::max(bought->id, visited->id)}),
            1u);
}

TEST(AssembleGraph, MixedFormulationsRejected) {
  const auto& doc = timeset::testing::sample_doc("bookstore");
  Joined joined;
  joined.add_pairwise_vote(doc.id, 1, 2, RelationLabel::Before);
  joined.add_timeline(doc.id, {{1}, {2}});
  try {
    timeset::assemble_graph(doc, joined.view(), 0);
    FAIL() << "expected MixedFormulations";
  } catch (const timeset::TimesetError& e) {
    EXPECT_EQ(e.kind(), timeset::ErrorKind::MixedFormulations);
  }
}

namespace {

// Oracle round trip: generate -> gold answers as completions -> parse ->
// assemble, for one (doc, template) pair.
timeset::TimelineGraph oracle_roundtrip(const timeset::DocumentRecord& doc,
                                        const timeset::PromptTemplate& t) {
  GenerationOptions opts;
  const auto instances = timeset::generate_instances(doc, t, opts);
  std::vector<PredictionRecord> records;
  for (const auto& instance : instances) {
    records.push_back(timeset::parse_completion(instance, t, doc, instance.gold_answer));
  }
  std::vector<std::pair<const PromptInstance*, const PredictionRecord*>> joined;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    joined.emplace_back(&instances[i], &records[i]);
  }
  return timeset::assemble_graph(doc, joined, 7);
}

}  // namespace

TEST(OracleRoundTrip, NliPairwiseMrcRecoverTheGoldClosure) {
  for (const auto& doc : timeset::testing::sample_corpus()) {
    const auto gold_closure =
        timeset::transitive_closure(timeset::expand_coex(doc.graph));
    const std::vector<std::pair<Formulation, std::string>> routes{
        {Formulation::Nli, "nli_00"},
        {Formulation::Pairwise, "pw_01"},
        {Formulation::Mrc, "mrc_00"}};
    for (const auto& [formulation, id] : routes) {
      if (doc.graph.event_count() < 2 &&
          (formulation == Formulation::Nli || formulation == Formulation::Pairwise)) {
        continue;
      }
      const auto assembled = oracle_roundtrip(doc, tmpl(formulation, id));
      EXPECT_EQ(timeset::transitive_closure(assembled), gold_closure)
          << doc.id << " via " << id;
    }
  }
}

TEST(OracleRoundTrip, TimelineRecallsEveryGoldPair) {
  // Across the plain, chain-of-thought, and code prompt shapes.
  for (const auto* template_id : {"tl_00", "tl_cot_00", "tl_code_00"}) {
    for (const auto& doc : timeset::testing::sample_corpus()) {
      const auto gold_closure =
          timeset::transitive_closure(timeset::expand_coex(doc.graph));
      const auto assembled =
          oracle_roundtrip(doc, tmpl(Formulation::Timeline, template_id));
      const auto pred_closure = timeset::transitive_closure(assembled);
      for (const auto& pair : gold_closure.before_pairs) {
        EXPECT_TRUE(pred_closure.before_pairs.count(pair)) << doc.id << " " << template_id;
      }
      for (const auto& pair : gold_closure.coex_pairs) {
        EXPECT_TRUE(pred_closure.coex_pairs.count(pair)) << doc.id << " " << template_id;
      }
    }
  }
}

TEST(OracleRoundTrip, CotMrcRecoversTheGoldClosure) {
  for (const auto& doc : timeset::testing::sample_corpus()) {
    const auto gold_closure =
        timeset::transitive_closure(timeset::expand_coex(doc.graph));
    const auto assembled = oracle_roundtrip(doc, tmpl(Formulation::Mrc, "mrc_cot_00"));
    EXPECT_EQ(timeset::transitive_closure(assembled), gold_closure) << doc.id;
  }
}

TEST(PredictionJson, RoundTrip) {
  PredictionRecord record;
  record.instance_id = "doc|nli|nli_00|eid|d0|s0|0001";
  record.completion = "Yes";
  record.status = ParseStatus::Ok;
  record.payload.kind = AnswerPayload::Kind::Binary;
  record.payload.entail = true;
  const auto back = timeset::prediction_record_from_json(timeset::to_json_line(record));
  EXPECT_EQ(back.instance_id, record.instance_id);
  EXPECT_EQ(back.status, ParseStatus::Ok);
  EXPECT_EQ(back.payload, record.payload);

  PredictionRecord abstain;
  abstain.instance_id = "x";
  abstain.completion = "??";
  abstain.status = ParseStatus::Abstain;
  const auto abstain_back =
      timeset::prediction_record_from_json(timeset::to_json_line(abstain));
  EXPECT_EQ(abstain_back.status, ParseStatus::Abstain);
}
