#include "ap/graphmatch.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <set>

namespace ap {

std::string to_string(QuestionCategory c) {
  switch (c) {
    case QuestionCategory::YesNo: return "yes_no";
    case QuestionCategory::Count: return "number";
    case QuestionCategory::OtherWh: return "other";
  }
  return "?";
}

QuestionCategory question_category(const SemanticGraph& g) {
  if (g.speech_act == SpeechAct::YesNoQuestion) return QuestionCategory::YesNo;
  return g.count_focus ? QuestionCategory::Count : QuestionCategory::OtherWh;
}

bool is_numeric_answer(const std::string& answer) {
  static const std::set<std::string> kNumberWords = {
      "zero",    "one",     "two",      "three",    "four",   "five",    "six",
      "seven",   "eight",   "nine",     "ten",      "eleven", "twelve",  "thirteen",
      "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};
  if (answer.empty()) return false;
  bool digits = true;
  for (unsigned char c : answer) {
    if (c < '0' || c > '9') {
      digits = false;
      break;
    }
  }
  return digits || kNumberWords.count(answer) > 0;
}

namespace {

struct TreeInfo {
  std::vector<std::vector<int>> children;
  std::vector<int> parent;
  std::vector<Role> parent_role;
  std::vector<int> preorder;  // non-root nodes, parents before descendants
};

TreeInfo tree_info(const SemanticGraph& g) {
  TreeInfo info;
  std::size_t n = g.nodes.size();
  info.children.assign(n, {});
  info.parent.assign(n, -1);
  info.parent_role.assign(n, Role::Mod);
  for (const auto& e : g.edges) {
    info.children[e.from].push_back(e.to);
    info.parent[e.to] = e.from;
    info.parent_role[e.to] = e.role;
  }
  for (auto& c : info.children) std::sort(c.begin(), c.end());
  std::vector<int> stack = {g.root};
  while (!stack.empty()) {
    int node = stack.back();
    stack.pop_back();
    if (node != g.root) info.preorder.push_back(node);
    for (auto it = info.children[node].rbegin(); it != info.children[node].rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return info;
}

// Lift labels for one node: chain[k] is the label after lifting k+1 levels.
// The chain ends at ROOT; lifting past it changes nothing.
std::vector<std::string> lift_chain(const GraphNode& node, const Ontology& onto, int budget) {
  std::vector<std::string> chain;
  if (!onto.contains(node.onto_type)) {
    throw DataError("mutations: node type \"" + node.onto_type +
                    "\" missing from the ontology");
  }
  std::string cur = node.onto_type;
  for (int level = 1; level <= budget; ++level) {
    chain.push_back(cur);
    if (cur == kRootType) break;
    cur = onto.parent.at(cur);
  }
  return chain;
}

constexpr int kDeleted = -1;

}  // namespace

std::vector<MutatedGraph> mutations(const SemanticGraph& g, int budget, const Ontology& onto) {
  if (budget < 0) throw std::invalid_argument("mutations: budget must be >= 0");
  TreeInfo info = tree_info(g);

  std::vector<std::vector<std::string>> chains(g.nodes.size());
  for (int node : info.preorder) chains[node] = lift_chain(g.nodes[node], onto, budget);

  // canonical TYPED form -> (min cost, graph)
  std::map<std::string, std::pair<int, SemanticGraph>> variants;
  std::vector<int> decision(g.nodes.size(), 0);

  auto emit = [&]() {
    SemanticGraph mutated;
    mutated.speech_act = g.speech_act;
    mutated.count_focus = g.count_focus;
    std::vector<int> remap(g.nodes.size(), -1);
    int cost = 0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (static_cast<int>(i) != g.root && decision[i] == kDeleted) continue;
      remap[i] = static_cast<int>(mutated.nodes.size());
      GraphNode node = g.nodes[i];
      if (static_cast<int>(i) != g.root && decision[i] > 0) {
        node.lift_level = decision[i];
        node.lifted_type = chains[i][decision[i] - 1];
        cost += decision[i];
      }
      mutated.nodes.push_back(std::move(node));
    }
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (static_cast<int>(i) == g.root || decision[i] != kDeleted) continue;
      int parent = info.parent[i];
      if (parent >= 0 && decision[parent] != kDeleted) cost += 2;  // subtree root only
    }
    mutated.root = remap[g.root];
    for (const auto& e : g.edges) {
      if (remap[e.from] < 0 || remap[e.to] < 0) continue;
      mutated.edges.push_back({remap[e.from], remap[e.to], e.role});
    }
    std::string canon = canonical_form(mutated, CanonMode::Typed);
    auto it = variants.find(canon);
    if (it == variants.end()) {
      variants.emplace(canon, std::make_pair(cost, std::move(mutated)));
    } else if (cost < it->second.first) {
      it->second = std::make_pair(cost, std::move(mutated));
    }
  };

  // Decide nodes in pre-order so a deleted ancestor silences its subtree.
  auto enumerate = [&](auto&& self, std::size_t pos, int spent) -> void {
    if (pos == info.preorder.size()) {
      emit();
      return;
    }
    int node = info.preorder[pos];
    int parent = info.parent[node];
    bool under_deleted = parent != g.root && decision[parent] == kDeleted;
    if (under_deleted) {
      decision[node] = kDeleted;
      self(self, pos + 1, spent);
      decision[node] = 0;
      return;
    }
    decision[node] = 0;
    self(self, pos + 1, spent);
    for (int level = 1; level <= static_cast<int>(chains[node].size()); ++level) {
      if (spent + level > budget) break;
      decision[node] = level;
      self(self, pos + 1, spent + level);
    }
    bool deletable = info.parent_role[node] == Role::Location || info.parent_role[node] == Role::Mod;
    if (deletable && spent + 2 <= budget) {
      decision[node] = kDeleted;
      self(self, pos + 1, spent + 2);
    }
    decision[node] = 0;
  };
  enumerate(enumerate, 0, 0);

  std::vector<MutatedGraph> out;
  out.reserve(variants.size());
  for (auto& [canon, pair] : variants) {
    (void)canon;
    out.push_back({std::move(pair.second), pair.first});
  }
  std::sort(out.begin(), out.end(), [](const MutatedGraph& a, const MutatedGraph& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return canonical_form(a.graph, CanonMode::Typed) < canonical_form(b.graph, CanonMode::Typed);
  });
  return out;
}

SemIndex build_sem_index(const Corpus& corpus, const Parser& parser, int budget) {
  if (budget < 0) throw std::invalid_argument("build_sem_index: budget must be >= 0");
  SemIndex index;
  index.budget = budget;
  // form -> answer -> (frequency, min train cost)
  std::map<std::string, std::map<std::string, std::pair<int, int>>> count_agg;
  std::map<std::string, std::map<std::string, std::pair<int, int>>> wh_agg;
  for (const auto& inst : corpus.instances) {
    if (inst.split != Split::Train) continue;
    SemanticGraph g;
    try {
      g = parser.parse(inst.question);
    } catch (const ParseError&) {
      ++index.skipped;
      continue;
    }
    QuestionCategory cat = question_category(g);
    std::string answer = majority_answer(inst);
    if (cat == QuestionCategory::YesNo) {
      if (answer == "yes") ++index.yes_count;
      if (answer == "no") ++index.no_count;
      ++index.indexed;
      continue;
    }
    auto& agg = cat == QuestionCategory::Count ? count_agg : wh_agg;
    for (const auto& variant : mutations(g, budget, parser.ontology())) {
      std::string form = canonical_form(variant.graph, CanonMode::Typed);
      auto [it, inserted] = agg[form].emplace(answer, std::make_pair(1, variant.cost));
      if (!inserted) {
        it->second.first += 1;
        it->second.second = std::min(it->second.second, variant.cost);
      }
    }
    ++index.indexed;
  }
  auto flatten = [](const std::map<std::string, std::map<std::string, std::pair<int, int>>>& agg,
                    std::map<std::string, std::vector<SemBucketEntry>>& buckets) {
    for (const auto& [form, answers] : agg) {
      auto& bucket = buckets[form];
      for (const auto& [answer, fc] : answers) {
        bucket.push_back({answer, fc.first, fc.second});
      }
    }
  };
  flatten(count_agg, index.count_buckets);
  flatten(wh_agg, index.wh_buckets);
  return index;
}

namespace {

struct CandidateKey {
  int test_cost;
  int train_cost;
  int frequency;

  bool operator<(const CandidateKey& o) const {
    if (test_cost != o.test_cost) return test_cost < o.test_cost;
    if (train_cost != o.train_cost) return train_cost < o.train_cost;
    return frequency > o.frequency;
  }
};

}  // namespace

ProposalList propose_sem(const std::string& qid, const std::string& question,
                         const SemIndex& index, const Parser& parser, int test_budget) {
  SemanticGraph g = parser.parse(question);
  QuestionCategory cat = question_category(g);

  ProposalList list;
  list.qid = qid;
  list.source = Source::Sem;

  if (cat == QuestionCategory::YesNo) {
    double total = static_cast<double>(index.yes_count + index.no_count);
    double yes_score = total > 0 ? index.yes_count / total : 0.5;
    double no_score = total > 0 ? index.no_count / total : 0.5;
    // Prior frequency descending; "no" leads on a tie (answer ascending).
    if (index.yes_count > index.no_count) {
      list.entries = {{"yes", yes_score, Source::Sem}, {"no", no_score, Source::Sem}};
    } else {
      list.entries = {{"no", no_score, Source::Sem}, {"yes", yes_score, Source::Sem}};
    }
    return list;
  }

  const auto& buckets =
      cat == QuestionCategory::Count ? index.count_buckets : index.wh_buckets;
  std::map<std::string, CandidateKey> best;
  for (const auto& variant : mutations(g, test_budget, parser.ontology())) {
    auto it = buckets.find(canonical_form(variant.graph, CanonMode::Typed));
    if (it == buckets.end()) continue;
    for (const auto& entry : it->second) {
      if (cat == QuestionCategory::Count && !is_numeric_answer(entry.answer)) continue;
      CandidateKey key{variant.cost, entry.train_cost, entry.frequency};
      auto [bit, inserted] = best.emplace(entry.answer, key);
      if (!inserted && key < bit->second) bit->second = key;
    }
  }
  std::vector<std::pair<std::string, CandidateKey>> ranked(best.begin(), best.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second < b.second) return true;
    if (b.second < a.second) return false;
    return a.first < b.first;
  });
  for (const auto& [answer, key] : ranked) {
    double score = 1.0 / (1.0 + key.test_cost + key.train_cost);
    list.entries.push_back({answer, score, Source::Sem});
  }
  return list;
}

namespace {

constexpr char kSemMagic[] = "APSEMIDX1";

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_i64(std::ostream& out, std::int64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw DataError(path + ": truncated index file");
  }
  return v;
}
std::int64_t get_i64(std::istream& in, const std::string& path) {
  std::int64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw DataError(path + ": truncated index file");
  }
  return v;
}
std::uint64_t get_u64(std::istream& in, const std::string& path) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw DataError(path + ": truncated index file");
  }
  return v;
}
std::string get_string(std::istream& in, const std::string& path) {
  std::uint32_t len = get_u32(in, path);
  std::string s(len, '\0');
  if (len > 0 && !in.read(s.data(), len)) throw DataError(path + ": truncated index file");
  return s;
}

void put_buckets(std::ostream& out,
                 const std::map<std::string, std::vector<SemBucketEntry>>& buckets) {
  put_u64(out, buckets.size());
  for (const auto& [form, entries] : buckets) {
    put_string(out, form);
    put_u32(out, static_cast<std::uint32_t>(entries.size()));
    for (const auto& e : entries) {
      put_string(out, e.answer);
      put_u32(out, static_cast<std::uint32_t>(e.frequency));
      put_u32(out, static_cast<std::uint32_t>(e.train_cost));
    }
  }
}

void get_buckets(std::istream& in, const std::string& path,
                 std::map<std::string, std::vector<SemBucketEntry>>& buckets) {
  std::uint64_t count = get_u64(in, path);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string form = get_string(in, path);
    std::uint32_t n = get_u32(in, path);
    std::vector<SemBucketEntry> entries;
    entries.reserve(n);
    for (std::uint32_t j = 0; j < n; ++j) {
      SemBucketEntry e;
      e.answer = get_string(in, path);
      e.frequency = static_cast<int>(get_u32(in, path));
      e.train_cost = static_cast<int>(get_u32(in, path));
      entries.push_back(std::move(e));
    }
    buckets.emplace(std::move(form), std::move(entries));
  }
}

}  // namespace

void save_sem_index(const SemIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path);
  out.write(kSemMagic, sizeof(kSemMagic) - 1);
  put_u32(out, static_cast<std::uint32_t>(index.budget));
  put_i64(out, index.yes_count);
  put_i64(out, index.no_count);
  put_u64(out, index.indexed);
  put_u64(out, index.skipped);
  put_buckets(out, index.count_buckets);
  put_buckets(out, index.wh_buckets);
  if (!out) throw DataError("write failed: " + path);
}

SemIndex load_sem_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  char magic[sizeof(kSemMagic) - 1];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kSemMagic, sizeof magic) != 0) {
    throw DataError(path + ": not a sem index file");
  }
  SemIndex index;
  index.budget = static_cast<int>(get_u32(in, path));
  index.yes_count = get_i64(in, path);
  index.no_count = get_i64(in, path);
  index.indexed = get_u64(in, path);
  index.skipped = get_u64(in, path);
  get_buckets(in, path, index.count_buckets);
  get_buckets(in, path, index.wh_buckets);
  return index;
}

}  // namespace ap
