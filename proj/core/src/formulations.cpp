#include "timeset/formulations.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <optional>

#include "json.hpp"
#include "timeset/errors.hpp"
#include "timeset/rng.hpp"
#include "timeset/utf8.hpp"

namespace timeset {

std::size_t default_length_units(std::string_view text) {
  return (utf8::length(text) + 3) / 4;
}

std::vector<std::string> select_demonstrations(
    const std::vector<const DocumentRecord*>& dev_docs, int n_demos,
    std::uint64_t seed, const std::string& exclude_doc_id) {
  if (n_demos < 0 || n_demos > 2) {
    fail(ErrorKind::ConfigError, "n_demos must be 0, 1, or 2");
  }
  std::vector<const DocumentRecord*> pool;
  for (const auto* doc : dev_docs) {
    if (doc->id != exclude_doc_id) pool.push_back(doc);
  }
  if (static_cast<int>(pool.size()) < n_demos) {
    fail(ErrorKind::InsufficientDevDocs,
         "need " + std::to_string(n_demos) + " dev docs, have " +
             std::to_string(pool.size()));
  }
  std::sort(pool.begin(), pool.end(),
            [](const DocumentRecord* a, const DocumentRecord* b) { return a->id < b->id; });
  Rng rng(seed);
  std::vector<std::string> out;
  for (const auto idx : rng.sample_indices(pool.size(), static_cast<std::size_t>(n_demos))) {
    out.push_back(pool[idx]->id);
  }
  return out;
}

namespace {

// Per-document view shared by all of a document's instances.
struct DocView {
  const DocumentRecord* doc = nullptr;
  TimelineGraph expanded;
  ClosurePairSet closure;
  std::vector<const Event*> by_index;  // textual order

  explicit DocView(const DocumentRecord& d) : doc(&d) {
    expanded = expand_coex(d.graph);
    closure = transitive_closure(expanded);
    for (const auto& id : d.graph.event_ids()) by_index.push_back(&d.graph.event(id));
  }

  const Event& at(int index) const {
    for (const auto* ev : by_index) {
      if (ev->index == index) return *ev;
    }
    fail(ErrorKind::UnknownEvent, "index " + std::to_string(index));
  }

  int n() const { return static_cast<int>(by_index.size()); }
};

const std::array<RelationLabel, 3> kRelationOrder{
    RelationLabel::After, RelationLabel::Before, RelationLabel::Coex};

bool statement_entailed(const DocView& view, int a, int b, RelationLabel rel) {
  const auto& ea = view.at(a);
  const auto& eb = view.at(b);
  switch (rel) {
    case RelationLabel::After:  // "a started after b"
      return view.closure.before_pairs.count({eb.id, ea.id}) > 0;
    case RelationLabel::Before:  // "a started before b"
      return view.closure.before_pairs.count({ea.id, eb.id}) > 0;
    case RelationLabel::Coex:
      return view.closure.coex_pairs.count(
                 {std::min(ea.id, eb.id), std::max(ea.id, eb.id)}) > 0;
    default:
      return false;
  }
}

std::set<int> mrc_gold_answers(const DocView& view, int anchor, RelationLabel rel) {
  std::set<int> out;
  const auto& ax = view.at(anchor);
  for (const auto* ev : view.by_index) {
    if (ev->index == anchor) continue;
    const auto relation = [&] {
      switch (rel) {
        case RelationLabel::Before:  // events that happened before the anchor
          return pairwise_relation(view.expanded, ev->id, ax.id) == RelationLabel::Before;
        case RelationLabel::After:
          return pairwise_relation(view.expanded, ax.id, ev->id) == RelationLabel::Before;
        default:
          return pairwise_relation(view.expanded, ax.id, ev->id) == RelationLabel::Coex;
      }
    }();
    if (relation) out.insert(ev->index);
  }
  return out;
}

// Display index of an event among the marked subset (1-based textual rank).
int display_of(const std::vector<int>& subset_sorted, int index) {
  const auto it = std::find(subset_sorted.begin(), subset_sorted.end(), index);
  return static_cast<int>(it - subset_sorted.begin()) + 1;
}

std::string pair_context(const DocView& view, MarkerStyle style, int a, int b) {
  const auto& ea = view.at(a);
  const auto& eb = view.at(b);
  return render_markers(view.doc->text, view.doc->graph, style, {ea.id, eb.id}).text;
}

std::string full_context(const DocView& view, MarkerStyle style) {
  return render_markers(view.doc->text, view.doc->graph, style).text;
}

std::string events_bullets(const DocView& view, MarkerStyle style) {
  std::string out;
  for (const auto* ev : view.by_index) {
    if (!out.empty()) out += "\n";
    out += "- " + event_surface(*ev, ev->index, style);
  }
  return out;
}

std::string events_code_lines(const DocView& view, MarkerStyle style) {
  std::string out;
  for (const auto* ev : view.by_index) {
    if (!out.empty()) out += "\n";
    out += "        self.event" + std::to_string(ev->index) + " = events[" +
           std::to_string(ev->index) + "] # " + event_surface(*ev, ev->index, style);
  }
  return out;
}

std::string hypothesis_text(const DocView& view, const PromptTemplate& tmpl,
                            MarkerStyle style, int a, int b, RelationLabel rel) {
  const std::vector<int> subset = {std::min(a, b), std::max(a, b)};
  const auto& ea = view.at(a);
  const auto& eb = view.at(b);
  return render_template(tmpl.hypothesis.at(to_string(rel)),
                         {{"a", event_surface(ea, display_of(subset, a), style)},
                          {"b", event_surface(eb, display_of(subset, b), style)}});
}

std::string question_text(const DocView& view, const PromptTemplate& tmpl,
                          MarkerStyle style, int anchor, RelationLabel rel) {
  const auto& ev = view.at(anchor);
  return render_template(tmpl.questions.at(to_string(rel)),
                         {{"x", event_surface(ev, ev.index, style)}});
}

std::string mrc_answer_text(const DocView& view, const PromptTemplate& tmpl,
                            MarkerStyle style, const std::set<int>& answers) {
  if (answers.empty()) return tmpl.empty_answer;
  std::string out;
  for (int index : answers) {
    if (!out.empty()) out += ", ";
    out += event_surface(view.at(index), index, style);
  }
  return out;
}

}  // namespace

std::string generate_cot_rationale(const DocumentRecord& doc, MarkerStyle style) {
  const DocView view(doc);
  struct Item {
    int a, b;
    bool coex;
  };
  std::vector<Item> items;
  for (const auto& [x, y] : doc.graph.edges()) {
    items.push_back({doc.graph.event(x).index, doc.graph.event(y).index, false});
  }
  std::vector<Item> coex_items;
  for (const auto& [x, y] : doc.graph.coex_links()) {
    int ia = doc.graph.event(x).index;
    int ib = doc.graph.event(y).index;
    coex_items.push_back({std::min(ia, ib), std::max(ia, ib), true});
  }
  auto by_index = [](const Item& l, const Item& r) {
    if (l.a != r.a) return l.a < r.a;
    return l.b < r.b;
  };
  std::sort(items.begin(), items.end(), by_index);
  std::sort(coex_items.begin(), coex_items.end(), by_index);
  items.insert(items.end(), coex_items.begin(), coex_items.end());

  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += " ";
    const auto sa = event_surface(view.at(item.a), item.a, style);
    const auto sb = event_surface(view.at(item.b), item.b, style);
    if (item.coex) {
      out += sa + " started around the same time, but the temporal relationship with " +
             sb + " is not clear.";
    } else {
      // Edge a -> b means b started after a.
      out += sb + " started after " + sa + ".";
    }
  }
  return out;
}

std::vector<std::vector<int>> gold_layers(const DocumentRecord& doc) {
  std::vector<std::vector<int>> out;
  for (const auto& layer : layering(doc.graph)) {
    std::vector<int> indices;
    for (const auto& id : layer) indices.push_back(doc.graph.event(id).index);
    std::sort(indices.begin(), indices.end());
    out.push_back(std::move(indices));
  }
  return out;
}

std::string serialize_layers(const DocumentRecord& doc,
                             const std::vector<std::vector<int>>& layers,
                             MarkerStyle style, TemplateFlavor flavor) {
  const DocView view(doc);
  std::string out;
  int t = 1;
  for (const auto& layer : layers) {
    if (!out.empty()) out += "\n";
    if (flavor == TemplateFlavor::Code) {
      out += "        T" + std::to_string(t) + " = [";
      bool first = true;
      for (int index : layer) {
        if (!first) out += ", ";
        out += "self.event" + std::to_string(index);
        first = false;
      }
      out += "]";
    } else {
      out += "T" + std::to_string(t) + ":";
      for (int index : layer) {
        out += "\n- " + event_surface(view.at(index), index, style);
      }
    }
    ++t;
  }
  return out;
}

namespace {

struct QuerySlots {
  std::map<std::string, std::string> slots;  // without target
  std::string gold_answer;
  QueryPayload query;
  AnswerPayload gold;
};

QuerySlots build_query(const DocView& view, const PromptTemplate& tmpl,
                       MarkerStyle style, const QueryPayload& query) {
  QuerySlots out;
  out.query = query;
  switch (tmpl.formulation) {
    case Formulation::Nli: {
      out.slots["premise"] = pair_context(view, style, query.a, query.b);
      out.slots["hypothesis"] =
          hypothesis_text(view, tmpl, style, query.a, query.b, query.relation);
      const bool entail = statement_entailed(view, query.a, query.b, query.relation);
      out.gold.kind = AnswerPayload::Kind::Binary;
      out.gold.entail = entail;
      out.gold_answer = tmpl.answers.at(entail ? "ENTAILMENT" : "NOT_ENTAILMENT");
      break;
    }
    case Formulation::Pairwise: {
      out.slots["context"] = pair_context(view, style, query.a, query.b);
      const std::vector<int> subset = {std::min(query.a, query.b),
                                       std::max(query.a, query.b)};
      out.slots["arg1"] =
          event_surface(view.at(query.a), display_of(subset, query.a), style);
      out.slots["arg2"] =
          event_surface(view.at(query.b), display_of(subset, query.b), style);
      out.slots["choices"] = tmpl.choices_block();
      const auto relation =
          pairwise_relation(view.expanded, view.at(query.a).id, view.at(query.b).id);
      out.gold.kind = AnswerPayload::Kind::Relation;
      out.gold.relation = relation;
      out.gold_answer = tmpl.labels.at(to_string(relation));
      break;
    }
    case Formulation::Mrc: {
      out.slots["context"] = full_context(view, style);
      out.slots["question"] = question_text(view, tmpl, style, query.a, query.relation);
      out.slots["marker"] = marker_hint(style);
      if (tmpl.flavor == TemplateFlavor::Cot) {
        out.slots["events"] = events_bullets(view, style);
        out.slots["cot"] = generate_cot_rationale(*view.doc, style);
      }
      out.gold.kind = AnswerPayload::Kind::EventSet;
      out.gold.events = mrc_gold_answers(view, query.a, query.relation);
      out.gold_answer = mrc_answer_text(view, tmpl, style, out.gold.events);
      break;
    }
    case Formulation::Timeline: {
      out.slots["context"] = full_context(view, style);
      out.slots["events"] = tmpl.flavor == TemplateFlavor::Code
                                ? events_code_lines(view, style)
                                : events_bullets(view, style);
      if (tmpl.flavor == TemplateFlavor::Cot) {
        out.slots["cot"] = generate_cot_rationale(*view.doc, style);
      }
      out.gold.kind = AnswerPayload::Kind::Layers;
      out.gold.layers = gold_layers(*view.doc);
      out.gold_answer = serialize_layers(*view.doc, out.gold.layers, style, tmpl.flavor);
      break;
    }
  }
  return out;
}

std::string query_key(const QueryPayload& q) {
  switch (q.kind) {
    case QueryPayload::Kind::PairRelation:
      return "pr:" + std::to_string(q.a) + ":" + std::to_string(q.b) + ":" +
             to_string(q.relation);
    case QueryPayload::Kind::Pair:
      return "pw:" + std::to_string(q.a) + ":" + std::to_string(q.b);
    case QueryPayload::Kind::EventRelation:
      return "er:" + std::to_string(q.a) + ":" + to_string(q.relation);
    case QueryPayload::Kind::Document:
      return "doc";
  }
  return "doc";
}

// All query payloads a demo document could be asked, for demo sampling.
std::vector<QueryPayload> enumerate_queries(const DocView& view, Formulation f) {
  std::vector<QueryPayload> out;
  switch (f) {
    case Formulation::Nli:
      for (const auto* ea : view.by_index) {
        for (const auto* eb : view.by_index) {
          if (ea->index == eb->index) continue;
          for (auto rel : kRelationOrder) {
            out.push_back({QueryPayload::Kind::PairRelation, ea->index, eb->index, rel});
          }
        }
      }
      break;
    case Formulation::Pairwise:
      for (const auto* ea : view.by_index) {
        for (const auto* eb : view.by_index) {
          if (ea->index == eb->index) continue;
          out.push_back({QueryPayload::Kind::Pair, ea->index, eb->index,
                         RelationLabel::None});
        }
      }
      break;
    case Formulation::Mrc:
      for (const auto* ev : view.by_index) {
        for (auto rel : kRelationOrder) {
          out.push_back({QueryPayload::Kind::EventRelation, ev->index, 0, rel});
        }
      }
      break;
    case Formulation::Timeline:
      out.push_back({QueryPayload::Kind::Document, 0, 0, RelationLabel::None});
      break;
  }
  return out;
}

int min_events_for(Formulation f) {
  return (f == Formulation::Nli || f == Formulation::Pairwise) ? 2 : 1;
}

struct Generator {
  const DocumentRecord& doc;
  const PromptTemplate& tmpl;
  const GenerationOptions& opts;
  const std::vector<const DocumentRecord*>& dev_docs;
  DocView view;
  int counter = 0;

  Generator(const DocumentRecord& d, const PromptTemplate& t,
            const GenerationOptions& o, const std::vector<const DocumentRecord*>& dev)
      : doc(d), tmpl(t), opts(o), dev_docs(dev), view(d) {}

  std::optional<PromptInstance> make(const QueryPayload& query) {
    // Demo sampling is derived from (query, n_demos, seed), not the template,
    // so the same query sees the same demos across templates.
    const std::uint64_t instance_seed = fnv1a64_mix(
        opts.seed ^ 0x9e3779b97f4a7c15ull,
        doc.id + "|" + to_string(tmpl.formulation) + "|" + query_key(query) + "|" +
            std::to_string(opts.n_demos));

    std::vector<const DocumentRecord*> eligible;
    for (const auto* dev : dev_docs) {
      if (static_cast<int>(dev->graph.event_count()) >= min_events_for(tmpl.formulation)) {
        eligible.push_back(dev);
      }
    }
    const auto demo_ids =
        select_demonstrations(eligible, opts.n_demos, instance_seed, doc.id);

    Rng demo_rng(fnv1a64_mix(instance_seed, "demo-queries"));
    std::vector<std::string> blocks;
    for (const auto& demo_id : demo_ids) {
      const DocumentRecord* demo_doc = nullptr;
      for (const auto* dev : eligible) {
        if (dev->id == demo_id) demo_doc = dev;
      }
      const DocView demo_view(*demo_doc);
      const auto demo_queries = enumerate_queries(demo_view, tmpl.formulation);
      const auto& demo_query = demo_queries[demo_rng.below(demo_queries.size())];
      auto demo = build_query(demo_view, tmpl, opts.representation, demo_query);
      demo.slots["target"] = demo.gold_answer;
      blocks.push_back(render_template(tmpl.body, demo.slots));
    }

    auto built = build_query(view, tmpl, opts.representation, query);
    built.slots["target"] = "";
    blocks.push_back(render_template(tmpl.body, built.slots));

    std::string prompt;
    for (const auto& block : blocks) {
      if (!prompt.empty()) prompt += "\n\n";
      prompt += block;
    }

    if (opts.measure(prompt) > opts.budget) {
      if (opts.skip_over_budget) return std::nullopt;
      fail(ErrorKind::BudgetExceeded,
           doc.id + ": prompt of " + std::to_string(opts.measure(prompt)) +
               " units exceeds budget " + std::to_string(opts.budget));
    }

    PromptInstance instance;
    instance.doc_id = doc.id;
    instance.formulation = tmpl.formulation;
    instance.template_id = tmpl.id;
    instance.flavor = tmpl.flavor;
    instance.representation = opts.representation;
    instance.n_demos = opts.n_demos;
    instance.demo_doc_ids = demo_ids;
    instance.query = query;
    instance.prompt = std::move(prompt);
    instance.gold = built.gold;
    instance.gold_answer = built.gold_answer;
    instance.seed = opts.seed;
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "%04d", counter++);
    instance.instance_id = doc.id + "|" + to_string(tmpl.formulation) + "|" + tmpl.id +
                           "|" + to_string(opts.representation) + "|d" +
                           std::to_string(opts.n_demos) + "|s" +
                           std::to_string(opts.seed) + "|" + suffix;
    return instance;
  }
};

}  // namespace

std::vector<PromptInstance> generate_nli(const DocumentRecord& doc,
                                         const PromptTemplate& tmpl,
                                         const GenerationOptions& opts,
                                         const std::vector<const DocumentRecord*>& dev_docs) {
  if (tmpl.formulation != Formulation::Nli) {
    fail(ErrorKind::ConfigError, tmpl.id + " is not an NLI template");
  }
  if (doc.graph.event_count() < 2) {
    fail(ErrorKind::TooFewEvents, doc.id + " has fewer than 2 events");
  }
  Generator gen(doc, tmpl, opts, dev_docs);
  std::vector<PromptInstance> out;
  for (const auto& query : enumerate_queries(gen.view, Formulation::Nli)) {
    if (auto instance = gen.make(query)) out.push_back(std::move(*instance));
  }
  return out;
}

std::vector<PromptInstance> generate_pairwise(const DocumentRecord& doc,
                                              const PromptTemplate& tmpl,
                                              const GenerationOptions& opts,
                                              const std::vector<const DocumentRecord*>& dev_docs) {
  if (tmpl.formulation != Formulation::Pairwise) {
    fail(ErrorKind::ConfigError, tmpl.id + " is not a Pairwise template");
  }
  if (doc.graph.event_count() < 2) {
    fail(ErrorKind::TooFewEvents, doc.id + " has fewer than 2 events");
  }
  Generator gen(doc, tmpl, opts, dev_docs);
  std::vector<PromptInstance> out;
  for (const auto& query : enumerate_queries(gen.view, Formulation::Pairwise)) {
    if (auto instance = gen.make(query)) out.push_back(std::move(*instance));
  }
  return out;
}

std::vector<PromptInstance> generate_mrc(const DocumentRecord& doc,
                                         const PromptTemplate& tmpl,
                                         const GenerationOptions& opts,
                                         const std::vector<const DocumentRecord*>& dev_docs) {
  if (tmpl.formulation != Formulation::Mrc) {
    fail(ErrorKind::ConfigError, tmpl.id + " is not an MRC template");
  }
  Generator gen(doc, tmpl, opts, dev_docs);
  std::vector<PromptInstance> out;
  for (const auto& query : enumerate_queries(gen.view, Formulation::Mrc)) {
    if (auto instance = gen.make(query)) out.push_back(std::move(*instance));
  }
  return out;
}

PromptInstance generate_timeline(const DocumentRecord& doc,
                                 const PromptTemplate& tmpl,
                                 const GenerationOptions& opts,
                                 const std::vector<const DocumentRecord*>& dev_docs) {
  if (tmpl.formulation != Formulation::Timeline) {
    fail(ErrorKind::ConfigError, tmpl.id + " is not a Timeline template");
  }
  Generator gen(doc, tmpl, opts, dev_docs);
  auto instance =
      gen.make({QueryPayload::Kind::Document, 0, 0, RelationLabel::None});
  if (!instance) {
    fail(ErrorKind::BudgetExceeded, doc.id + ": timeline prompt exceeds budget");
  }
  return *instance;
}

std::vector<PromptInstance> generate_instances(
    const DocumentRecord& doc, const PromptTemplate& tmpl,
    const GenerationOptions& opts,
    const std::vector<const DocumentRecord*>& dev_docs) {
  switch (tmpl.formulation) {
    case Formulation::Nli: return generate_nli(doc, tmpl, opts, dev_docs);
    case Formulation::Pairwise: return generate_pairwise(doc, tmpl, opts, dev_docs);
    case Formulation::Mrc: return generate_mrc(doc, tmpl, opts, dev_docs);
    case Formulation::Timeline: {
      Generator gen(doc, tmpl, opts, dev_docs);
      std::vector<PromptInstance> out;
      if (auto instance =
              gen.make({QueryPayload::Kind::Document, 0, 0, RelationLabel::None})) {
        out.push_back(std::move(*instance));
      }
      return out;
    }
  }
  return {};
}

namespace {

const char* to_string(QueryPayload::Kind kind) {
  switch (kind) {
    case QueryPayload::Kind::PairRelation: return "pair_relation";
    case QueryPayload::Kind::Pair: return "pair";
    case QueryPayload::Kind::EventRelation: return "event_relation";
    case QueryPayload::Kind::Document: return "document";
  }
  return "document";
}

QueryPayload::Kind query_kind_from_string(const std::string& name) {
  if (name == "pair_relation") return QueryPayload::Kind::PairRelation;
  if (name == "pair") return QueryPayload::Kind::Pair;
  if (name == "event_relation") return QueryPayload::Kind::EventRelation;
  if (name == "document") return QueryPayload::Kind::Document;
  fail(ErrorKind::FormatError, "bad query kind: " + name);
}

const char* to_string(AnswerPayload::Kind kind) {
  switch (kind) {
    case AnswerPayload::Kind::Binary: return "binary";
    case AnswerPayload::Kind::Relation: return "relation";
    case AnswerPayload::Kind::EventSet: return "event_set";
    case AnswerPayload::Kind::Layers: return "layers";
  }
  return "binary";
}

AnswerPayload::Kind answer_kind_from_string(const std::string& name) {
  if (name == "binary") return AnswerPayload::Kind::Binary;
  if (name == "relation") return AnswerPayload::Kind::Relation;
  if (name == "event_set") return AnswerPayload::Kind::EventSet;
  if (name == "layers") return AnswerPayload::Kind::Layers;
  fail(ErrorKind::FormatError, "bad answer kind: " + name);
}

nlohmann::json answer_to_json(const AnswerPayload& payload) {
  nlohmann::json out;
  out["kind"] = to_string(payload.kind);
  switch (payload.kind) {
    case AnswerPayload::Kind::Binary: out["entail"] = payload.entail; break;
    case AnswerPayload::Kind::Relation:
      out["relation"] = timeset::to_string(payload.relation);
      break;
    case AnswerPayload::Kind::EventSet:
      out["events"] = payload.events;
      break;
    case AnswerPayload::Kind::Layers:
      out["layers"] = payload.layers;
      break;
  }
  return out;
}

AnswerPayload answer_from_json(const nlohmann::json& obj) {
  AnswerPayload payload;
  payload.kind = answer_kind_from_string(obj.at("kind").get<std::string>());
  switch (payload.kind) {
    case AnswerPayload::Kind::Binary:
      payload.entail = obj.at("entail").get<bool>();
      break;
    case AnswerPayload::Kind::Relation:
      payload.relation = relation_from_string(obj.at("relation").get<std::string>());
      break;
    case AnswerPayload::Kind::EventSet:
      payload.events = obj.at("events").get<std::set<int>>();
      break;
    case AnswerPayload::Kind::Layers:
      payload.layers = obj.at("layers").get<std::vector<std::vector<int>>>();
      break;
  }
  return payload;
}

}  // namespace

std::string to_json_line(const PromptInstance& instance) {
  nlohmann::json out;
  out["instance_id"] = instance.instance_id;
  out["doc_id"] = instance.doc_id;
  out["formulation"] = timeset::to_string(instance.formulation);
  out["template_id"] = instance.template_id;
  out["flavor"] = timeset::to_string(instance.flavor);
  out["representation"] = timeset::to_string(instance.representation);
  out["n_demos"] = instance.n_demos;
  out["demo_doc_ids"] = instance.demo_doc_ids;
  nlohmann::json query;
  query["kind"] = to_string(instance.query.kind);
  query["a"] = instance.query.a;
  query["b"] = instance.query.b;
  query["relation"] = timeset::to_string(instance.query.relation);
  out["query"] = query;
  out["prompt"] = instance.prompt;
  out["gold"] = answer_to_json(instance.gold);
  out["gold_answer"] = instance.gold_answer;
  out["seed"] = instance.seed;
  return out.dump();
}

PromptInstance prompt_instance_from_json(const std::string& line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::FormatError, std::string("bad instance json: ") + e.what());
  }
  PromptInstance instance;
  instance.instance_id = obj.at("instance_id").get<std::string>();
  instance.doc_id = obj.at("doc_id").get<std::string>();
  instance.formulation = formulation_from_string(obj.at("formulation").get<std::string>());
  instance.template_id = obj.at("template_id").get<std::string>();
  instance.flavor = flavor_from_string(obj.at("flavor").get<std::string>());
  instance.representation =
      marker_style_from_string(obj.at("representation").get<std::string>());
  instance.n_demos = obj.at("n_demos").get<int>();
  instance.demo_doc_ids = obj.at("demo_doc_ids").get<std::vector<std::string>>();
  const auto& query = obj.at("query");
  instance.query.kind = query_kind_from_string(query.at("kind").get<std::string>());
  instance.query.a = query.at("a").get<int>();
  instance.query.b = query.at("b").get<int>();
  instance.query.relation = relation_from_string(query.at("relation").get<std::string>());
  instance.prompt = obj.at("prompt").get<std::string>();
  instance.gold = answer_from_json(obj.at("gold"));
  instance.gold_answer = obj.at("gold_answer").get<std::string>();
  instance.seed = obj.at("seed").get<std::uint64_t>();
  return instance;
}

}  // namespace timeset
