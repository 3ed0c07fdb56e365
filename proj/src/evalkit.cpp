#include "ap/evalkit.hpp"

#include <algorithm>
#include <set>

#include "ap/graphmatch.hpp"

namespace ap {

MatchMode match_mode_from_string(const std::string& s) {
  if (s == "majority") return MatchMode::Majority;
  if (s == "any") return MatchMode::Any;
  throw DataError("invalid mode: \"" + s + "\" (expected majority|any)");
}

std::string to_string(MatchMode mode) {
  return mode == MatchMode::Majority ? "majority" : "any";
}

EvalTriplet make_eval_triplet(const QaInstance& inst, ProposalList proposals) {
  EvalTriplet t;
  t.qid = inst.qid;
  for (const auto& a : inst.answers) t.gold.push_back(normalize_answer(a));
  t.majority = majority_answer(inst);
  for (auto& e : proposals.entries) e.answer = normalize_answer(e.answer);
  t.proposals = std::move(proposals);
  return t;
}

namespace {

// 1-based rank of the first correct proposal, or 0 on a miss.
int hit_rank(const EvalTriplet& t, MatchMode mode) {
  if (mode == MatchMode::Majority) {
    for (std::size_t i = 0; i < t.proposals.entries.size(); ++i) {
      if (t.proposals.entries[i].answer == t.majority) return static_cast<int>(i) + 1;
    }
    return 0;
  }
  std::set<std::string> gold(t.gold.begin(), t.gold.end());
  for (std::size_t i = 0; i < t.proposals.entries.size(); ++i) {
    if (gold.count(t.proposals.entries[i].answer)) return static_cast<int>(i) + 1;
  }
  return 0;
}

}  // namespace

double recall_at_n(const std::vector<EvalTriplet>& triplets, int n, MatchMode mode) {
  if (triplets.empty()) throw std::invalid_argument("recall_at_n: empty triplet list");
  if (n < 0) throw std::invalid_argument("recall_at_n: n must be >= 0");
  std::size_t hits = 0;
  for (const auto& t : triplets) {
    int rank = hit_rank(t, mode);
    if (rank > 0 && rank <= n) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(triplets.size());
}

std::map<int, int> rank_distribution(const std::vector<EvalTriplet>& triplets, MatchMode mode) {
  std::map<int, int> histogram;
  for (const auto& t : triplets) {
    int rank = hit_rank(t, mode);
    if (rank > 0) ++histogram[rank];
  }
  return histogram;
}

double vqa_accuracy(const std::string& predicted, const std::vector<std::string>& gold) {
  int matches = 0;
  for (const auto& g : gold) {
    if (g == predicted) ++matches;
  }
  return std::min(1.0, static_cast<double>(matches) / 3.0);
}

PerTypeReport per_type_report(const std::unordered_map<std::string, std::string>& predictions,
                              const Corpus& corpus, const Parser& parser, Split eval_split) {
  PerTypeReport report;
  std::map<std::string, double> sums;
  for (const auto& inst : corpus.instances) {
    if (inst.split != eval_split) continue;
    std::string group = "other";
    try {
      group = to_string(question_category(parser.parse(inst.question)));
    } catch (const ParseError&) {
    }
    double acc = 0.0;
    auto it = predictions.find(inst.qid);
    if (it == predictions.end()) {
      ++report.missing;
    } else {
      std::vector<std::string> gold;
      for (const auto& a : inst.answers) gold.push_back(normalize_answer(a));
      acc = vqa_accuracy(normalize_answer(it->second), gold);
    }
    sums[group] += acc;
    ++report.counts[group];
    sums["all"] += acc;
    ++report.counts["all"];
  }
  for (const auto& [group, count] : report.counts) {
    report.accuracy[group] = sums[group] / static_cast<double>(count);
  }
  return report;
}

}  // namespace ap
