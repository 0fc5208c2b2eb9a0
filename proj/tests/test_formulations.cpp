#include "timeset/formulations.hpp"

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "timeset/errors.hpp"
#include "timeset/interpret.hpp"

using timeset::AnswerPayload;
using timeset::Formulation;
using timeset::GenerationOptions;
using timeset::MarkerStyle;
using timeset::PromptInstance;
using timeset::RelationLabel;

namespace {

const timeset::PromptTemplate& tmpl(Formulation f, const std::string& id) {
  return timeset::testing::shipped_templates().get(f, id);
}

std::vector<const timeset::DocumentRecord*> dev_docs() {
  std::vector<const timeset::DocumentRecord*> out;
  for (const auto& doc : timeset::testing::sample_corpus()) {
    if (doc.split == "dev") out.push_back(&doc);
  }
  return out;
}

const PromptInstance* find_pair_instance(const std::vector<PromptInstance>& instances,
                                         int a, int b, RelationLabel rel) {
  for (const auto& instance : instances) {
    if (instance.query.a == a && instance.query.b == b && instance.query.relation == rel) {
      return &instance;
    }
  }
  return nullptr;
}

}  // namespace

TEST(TemplateAssets, TenPlainTemplatesPerFormulation) {
  const auto& templates = timeset::testing::shipped_templates();
  for (auto f : {Formulation::Nli, Formulation::Pairwise, Formulation::Mrc,
                 Formulation::Timeline}) {
    EXPECT_EQ(templates.select(f, timeset::TemplateFlavor::Plain).size(), 10u)
        << timeset::to_string(f);
  }
  // cot only for mrc/timeline, code only for timeline
  EXPECT_TRUE(templates.select(Formulation::Nli, timeset::TemplateFlavor::Cot).empty());
  EXPECT_TRUE(templates.select(Formulation::Pairwise, timeset::TemplateFlavor::Cot).empty());
  EXPECT_FALSE(templates.select(Formulation::Mrc, timeset::TemplateFlavor::Cot).empty());
  EXPECT_FALSE(templates.select(Formulation::Timeline, timeset::TemplateFlavor::Code).empty());
}

TEST(RenderTemplate, MissingSlotRejected) {
  try {
    timeset::render_template("Question: {question}\nAnswer: {target}", {{"target", "x"}});
    FAIL() << "expected MissingSlot";
  } catch (const timeset::TimesetError& e) {
    EXPECT_EQ(e.kind(), timeset::ErrorKind::MissingSlot);
  }
}

TEST(RenderTemplate, UnknownBraceTokensPassThrough) {
  const auto out = timeset::render_template("T[num] = {value_list} {target}",
                                            {{"target", "done"}});
  EXPECT_EQ(out, "T[num] = {value_list} done");
}

TEST(RenderTemplate, InsertedValuesAreNotRescanned) {
  const auto out =
      timeset::render_template("{context} {target}", {{"context", "{target}"}, {"target", "x"}});
  EXPECT_EQ(out, "{target} x");
}

TEST(InstanceCounts, FollowTheFormulas) {
  GenerationOptions opts;
  for (const auto& doc : timeset::testing::sample_corpus()) {
    const auto n = doc.graph.event_count();
    if (n >= 2) {
      EXPECT_EQ(timeset::generate_nli(doc, tmpl(Formulation::Nli, "nli_00"), opts).size(),
                n * (n - 1) * 3)
          << doc.id;
      EXPECT_EQ(
          timeset::generate_pairwise(doc, tmpl(Formulation::Pairwise, "pw_00"), opts).size(),
          n * (n - 1))
          << doc.id;
    }
    EXPECT_EQ(timeset::generate_mrc(doc, tmpl(Formulation::Mrc, "mrc_00"), opts).size(),
              3 * n)
        << doc.id;
    EXPECT_EQ(timeset::generate_instances(doc, tmpl(Formulation::Timeline, "tl_00"), opts)
                  .size(),
              1u)
        << doc.id;
  }
}

TEST(InstanceCounts, EveryOrderedPairCoveredExactlyOnceAndKTimes) {
  GenerationOptions opts;
  const auto& doc = timeset::testing::sample_doc("summit");
  const auto n = static_cast<int>(doc.graph.event_count());

  std::map<std::pair<int, int>, int> pairwise_hits;
  for (const auto& instance :
       timeset::generate_pairwise(doc, tmpl(Formulation::Pairwise, "pw_00"), opts)) {
    ++pairwise_hits[{instance.query.a, instance.query.b}];
  }
  std::map<std::pair<int, int>, int> nli_hits;
  for (const auto& instance :
       timeset::generate_nli(doc, tmpl(Formulation::Nli, "nli_00"), opts)) {
    ++nli_hits[{instance.query.a, instance.query.b}];
  }
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) {
      if (a == b) continue;
      EXPECT_EQ((pairwise_hits[{a, b}]), 1) << a << "," << b;
      EXPECT_EQ((nli_hits[{a, b}]), 3) << a << "," << b;
    }
  }
}

TEST(InstanceCounts, TooFewEventsForPairFormulations) {
  const auto& doc = timeset::testing::sample_doc("quake");
  GenerationOptions opts;
  try {
    timeset::generate_nli(doc, tmpl(Formulation::Nli, "nli_00"), opts);
    FAIL() << "expected TooFewEvents";
  } catch (const timeset::TimesetError& e) {
    EXPECT_EQ(e.kind(), timeset::ErrorKind::TooFewEvents);
  }
}

TEST(Nli, MonkeypoxInvestigatingAfterDeathIsEntailed) {
  const auto& doc = timeset::testing::sample_doc("monkeypox");
  GenerationOptions opts;
  const auto instances = timeset::generate_nli(doc, tmpl(Formulation::Nli, "nli_00"), opts);
  // death has index 2, investigating index 4.
  const auto* instance = find_pair_instance(instances, 4, 2, RelationLabel::After);
  ASSERT_NE(instance, nullptr);
  EXPECT_TRUE(instance->gold.entail);
  EXPECT_NE(instance->prompt.find(
                "[e2]investigating[/e2] started after [e1]death[/e1] started."),
            std::string::npos);
  EXPECT_EQ(instance->gold_answer, "Entailment");
}

TEST(Nli, BookstoreBoughtAfterWentRendersLikeTheTableRow) {
  const auto& doc = timeset::testing::sample_doc("bookstore");
  GenerationOptions opts;
  const auto instances = timeset::generate_nli(doc, tmpl(Formulation::Nli, "nli_01"), opts);
  // went=1, bought=2; statement "bought happened after went".
  const auto* instance = find_pair_instance(instances, 2, 1, RelationLabel::After);
  ASSERT_NE(instance, nullptr);
  EXPECT_TRUE(instance->gold.entail);
  EXPECT_EQ(instance->gold_answer, "Yes");
  EXPECT_NE(instance->prompt.find("happened after"), std::string::npos);
  EXPECT_NE(instance->prompt.find("Is this true?"), std::string::npos);
}

TEST(Nli, CoexRequiresClusterMembership) {
  const auto& doc = timeset::testing::sample_doc("monkeypox");
  GenerationOptions opts;
  const auto instances = timeset::generate_nli(doc, tmpl(Formulation::Nli, "nli_00"), opts);
  // identified(1) and investigating(4) share a cluster.
  EXPECT_TRUE(find_pair_instance(instances, 1, 4, RelationLabel::Coex)->gold.entail);
  // death(2) and investigating(4) are ordered, not coexistent.
  EXPECT_FALSE(find_pair_instance(instances, 2, 4, RelationLabel::Coex)->gold.entail);
}

TEST(Pairwise, GoldsComeFromPairwiseRelation) {
  const auto& doc = timeset::testing::sample_doc("monkeypox");
  GenerationOptions opts;
  const auto instances =
      timeset::generate_pairwise(doc, tmpl(Formulation::Pairwise, "pw_00"), opts);
  ASSERT_EQ(instances.size(), 12u);
  // (investigating=4, death=2) -> AFTER, per the worked example.
  const auto* after = find_pair_instance(instances, 4, 2, RelationLabel::None);
  ASSERT_NE(after, nullptr);
  EXPECT_EQ(after->gold.relation, RelationLabel::After);
  EXPECT_EQ(after->gold_answer, "AFTER");
  // Display indices follow textual order inside the instance.
  EXPECT_NE(after->prompt.find("[e2]investigating[/e2] and [e1]death[/e1]"),
            std::string::npos);
}

TEST(Pairwise, NoneMapsThroughTheTemplateVagueLabel) {
  const auto& doc = timeset::testing::sample_doc("doping");
  GenerationOptions opts;
  // retired(3) and ban(1) are incomparable.
  const auto under_lossy_template =
      timeset::generate_pairwise(doc, tmpl(Formulation::Pairwise, "pw_00"), opts);
  const auto* lossy = find_pair_instance(under_lossy_template, 3, 1, RelationLabel::None);
  ASSERT_NE(lossy, nullptr);
  EXPECT_EQ(lossy->gold.relation, RelationLabel::None);
  EXPECT_EQ(lossy->gold_answer, "VAGUE");

  const auto under_injective_template =
      timeset::generate_pairwise(doc, tmpl(Formulation::Pairwise, "pw_01"), opts);
  const auto* injective =
      find_pair_instance(under_injective_template, 3, 1, RelationLabel::None);
  ASSERT_NE(injective, nullptr);
  EXPECT_EQ(injective->gold_answer, "NONE");
}

TEST(Mrc, GoldAnswerSetsComeFromTheClosure) {
  const auto& doc = timeset::testing::sample_doc("monkeypox");
  GenerationOptions opts;
  const auto instances = timeset::generate_mrc(doc, tmpl(Formulation::Mrc, "mrc_00"), opts);
  ASSERT_EQ(instances.size(), 12u);
  // "Which events happened before identified(1)?" -> {death(2), diagnosed(3)}.
  const auto* before = find_pair_instance(instances, 1, 0, RelationLabel::Before);
  ASSERT_NE(before, nullptr);
  EXPECT_EQ(before->gold.events, (std::set<int>{2, 3}));
  EXPECT_EQ(before->gold_answer, "[e2]death[/e2], [e3]diagnosed[/e3]");
  // COEX question for identified -> investigating.
  const auto* coex = find_pair_instance(instances, 1, 0, RelationLabel::Coex);
  EXPECT_EQ(coex->gold.events, (std::set<int>{4}));
}

TEST(Mrc, DopingAfterTestedMatchesTheOverviewExample) {
  const auto& doc = timeset::testing::sample_doc("doping");
  GenerationOptions opts;
  const auto instances = timeset::generate_mrc(doc, tmpl(Formulation::Mrc, "mrc_01"), opts);
  // "What happened after tested(4)?" -> {ban(1), retired(3)}.
  const auto* after = find_pair_instance(instances, 4, 0, RelationLabel::After);
  ASSERT_NE(after, nullptr);
  EXPECT_EQ(after->gold.events, (std::set<int>{1, 3}));
  // Empty answer sets are legal: nothing happened before doping(2).
  const auto* before = find_pair_instance(instances, 2, 0, RelationLabel::Before);
  EXPECT_TRUE(before->gold.events.empty());
  EXPECT_EQ(before->gold_answer, "None");
}

TEST(Timeline, GoldSerializationUsesLayersAndBullets) {
  const auto& doc = timeset::testing::sample_doc("monkeypox");
  GenerationOptions opts;
  const auto instance =
      timeset::generate_timeline(doc, tmpl(Formulation::Timeline, "tl_00"), opts);
  const std::vector<std::vector<int>> layers{{3}, {2}, {1, 4}};
  EXPECT_EQ(instance.gold.layers, layers);
  EXPECT_EQ(instance.gold_answer,
            "T1:\n- [e3]diagnosed[/e3]\nT2:\n- [e2]death[/e2]\nT3:\n- "
            "[e1]identified[/e1]\n- [e4]investigating[/e4]");
}

TEST(Timeline, TotallyOrderedDocSerializesSingletons) {
  const auto& doc = timeset::testing::sample_doc("bookstore");
  GenerationOptions opts;
  const auto instance =
      timeset::generate_timeline(doc, tmpl(Formulation::Timeline, "tl_00"), opts);
  // visited(3) -> went(1) -> bought(2), singleton layers.
  const std::vector<std::vector<int>> layers{{3}, {1}, {2}};
  EXPECT_EQ(instance.gold.layers, layers);
}

TEST(Timeline, SingleEventDocHasOneLayer) {
  const auto& doc = timeset::testing::sample_doc("quake");
  GenerationOptions opts;
  const auto instance =
      timeset::generate_timeline(doc, tmpl(Formulation::Timeline, "tl_00"), opts);
  const std::vector<std::vector<int>> layers{{1}};
  EXPECT_EQ(instance.gold.layers, layers);
  EXPECT_EQ(instance.gold_answer, "T1:\n- [e1]struck[/e1]");
}

TEST(Timeline, CodeFlavorRendersClassSkeleton) {
  const auto& doc = timeset::testing::sample_doc("monkeypox");
  GenerationOptions opts;
  const auto instance =
      timeset::generate_timeline(doc, tmpl(Formulation::Timeline, "tl_code_00"), opts);
  EXPECT_NE(instance.prompt.find("class Timeline:"), std::string::npos);
  EXPECT_NE(instance.prompt.find("def __init__(self):"), std::string::npos);
  EXPECT_NE(instance.prompt.find("self.event1 = events[1] # [e1]identified[/e1]"),
            std::string::npos);
  EXPECT_EQ(instance.gold_answer,
            "        T1 = [self.event3]\n        T2 = [self.event2]\n        T3 = "
            "[self.event1, self.event4]");
}

TEST(CotRationale, OneSentencePerLink) {
  const auto& doc = timeset::testing::sample_doc("monkeypox");
  const auto rationale = timeset::generate_cot_rationale(doc, MarkerStyle::Eid);
  EXPECT_NE(rationale.find("[e2]death[/e2] started after [e3]diagnosed[/e3]."),
            std::string::npos);
  EXPECT_NE(rationale.find("[e1]identified[/e1] started around the same time, but the "
                           "temporal relationship with [e4]investigating[/e4] is not clear."),
            std::string::npos);
}

TEST(CotRationale, EdgelessGraphIsEmpty) {
  const auto& doc = timeset::testing::sample_doc("quake");
  EXPECT_EQ(timeset::generate_cot_rationale(doc, MarkerStyle::Eid), "");
}

TEST(Demonstrations, ZeroOneTwoShots) {
  const auto devs = dev_docs();
  EXPECT_TRUE(timeset::select_demonstrations(devs, 0, 1).empty());
  const auto one = timeset::select_demonstrations(devs, 1, 42);
  EXPECT_EQ(one.size(), 1u);
  EXPECT_EQ(timeset::select_demonstrations(devs, 1, 42), one);  // determinism
  const auto two = timeset::select_demonstrations(devs, 2, 42);
  EXPECT_EQ(two.size(), 2u);
  EXPECT_NE(two[0], two[1]);
}

TEST(Demonstrations, NeverTheQueryDocument) {
  const auto devs = dev_docs();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto picked = timeset::select_demonstrations(devs, 1, seed, "monkeypox");
    ASSERT_EQ(picked.size(), 1u);
    EXPECT_NE(picked[0], "monkeypox");
  }
}

TEST(Demonstrations, InsufficientDevDocs) {
  const auto devs = dev_docs();
  try {
    timeset::select_demonstrations(devs, 2, 1, "monkeypox");  // one candidate left
    FAIL() << "expected InsufficientDevDocs";
  } catch (const timeset::TimesetError& e) {
    EXPECT_EQ(e.kind(), timeset::ErrorKind::InsufficientDevDocs);
  }
}

TEST(RenderPrompt, DemosComeBeforeTheQueryAndCarryGold) {
  const auto& doc = timeset::testing::sample_doc("doping");
  GenerationOptions opts;
  opts.n_demos = 1;
  opts.seed = 5;
  const auto instance = timeset::generate_timeline(
      doc, tmpl(Formulation::Timeline, "tl_00"), opts, dev_docs());
  ASSERT_EQ(instance.demo_doc_ids.size(), 1u);
  // The demo block is a fully worked example: its timeline answer appears
  // before the query document's context.
  const auto demo_answer_pos = instance.prompt.find("T1:\n- ");
  const auto query_pos = instance.prompt.find("Boxer banned for two years");
  ASSERT_NE(demo_answer_pos, std::string::npos);
  ASSERT_NE(query_pos, std::string::npos);
  EXPECT_LT(demo_answer_pos, query_pos);
  // The query's own target is blank: the prompt ends right after the cue.
  EXPECT_EQ(instance.prompt.rfind("Now, create a timeline with the events:"),
            instance.prompt.size() - std::string("Now, create a timeline with the events:\n").size());
}

TEST(RenderPrompt, BudgetTenIsAlwaysExceeded) {
  const auto& doc = timeset::testing::sample_doc("bookstore");
  GenerationOptions opts;
  opts.budget = 10;
  try {
    timeset::generate_timeline(doc, tmpl(Formulation::Timeline, "tl_00"), opts);
    FAIL() << "expected BudgetExceeded";
  } catch (const timeset::TimesetError& e) {
    EXPECT_EQ(e.kind(), timeset::ErrorKind::BudgetExceeded);
  }
}

TEST(RenderPrompt, SkipOverBudgetDropsInstances) {
  const auto& doc = timeset::testing::sample_doc("bookstore");
  GenerationOptions opts;
  opts.budget = 10;
  opts.skip_over_budget = true;
  EXPECT_TRUE(
      timeset::generate_instances(doc, tmpl(Formulation::Timeline, "tl_00"), opts).empty());
}

TEST(Generation, PureFunctionOfInputs) {
  const auto& doc = timeset::testing::sample_doc("doping");
  GenerationOptions opts;
  opts.n_demos = 2;
  opts.seed = 99;
  const auto devs = dev_docs();
  const auto a = timeset::generate_nli(doc, tmpl(Formulation::Nli, "nli_03"), opts, devs);
  const auto b = timeset::generate_nli(doc, tmpl(Formulation::Nli, "nli_03"), opts, devs);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].prompt, b[i].prompt);
    EXPECT_EQ(a[i].instance_id, b[i].instance_id);
    EXPECT_EQ(a[i].demo_doc_ids, b[i].demo_doc_ids);
  }
}

TEST(Generation, GoldPayloadsAreMutuallyConsistent) {
  GenerationOptions opts;
  for (const auto& doc : timeset::testing::sample_corpus()) {
    if (doc.graph.event_count() < 2) continue;
    const auto expanded = timeset::expand_coex(doc.graph);

    const auto pairwise =
        timeset::generate_pairwise(doc, tmpl(Formulation::Pairwise, "pw_01"), opts);
    for (const auto& instance : pairwise) {
      const auto* ea = doc.graph.find_by_index(instance.query.a);
      const auto* eb = doc.graph.find_by_index(instance.query.b);
      EXPECT_EQ(instance.gold.relation,
                timeset::pairwise_relation(expanded, ea->id, eb->id))
          << doc.id;
    }

    // MRC gold answer sets, re-expressed as pairs, match pairwise golds.
    const auto mrc = timeset::generate_mrc(doc, tmpl(Formulation::Mrc, "mrc_00"), opts);
    for (const auto& instance : mrc) {
      const auto* anchor = doc.graph.find_by_index(instance.query.a);
      for (int answered : instance.gold.events) {
        const auto* other = doc.graph.find_by_index(answered);
        const auto relation = timeset::pairwise_relation(expanded, anchor->id, other->id);
        switch (instance.query.relation) {
          case RelationLabel::Before:
            EXPECT_EQ(relation, RelationLabel::After) << doc.id;
            break;
          case RelationLabel::After:
            EXPECT_EQ(relation, RelationLabel::Before) << doc.id;
            break;
          default:
            EXPECT_EQ(relation, RelationLabel::Coex) << doc.id;
        }
      }
    }
  }
}

TEST(InstanceJson, RoundTrip) {
  const auto& doc = timeset::testing::sample_doc("monkeypox");
  GenerationOptions opts;
  opts.n_demos = 1;
  opts.seed = 3;
  const auto instances =
      timeset::generate_nli(doc, tmpl(Formulation::Nli, "nli_00"), opts, dev_docs());
  for (const auto& instance : instances) {
    const auto line = timeset::to_json_line(instance);
    const auto back = timeset::prompt_instance_from_json(line);
    EXPECT_EQ(back.instance_id, instance.instance_id);
    EXPECT_EQ(back.prompt, instance.prompt);
    EXPECT_EQ(back.gold, instance.gold);
    EXPECT_EQ(back.query, instance.query);
    EXPECT_EQ(back.gold_answer, instance.gold_answer);
  }
}
