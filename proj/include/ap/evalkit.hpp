#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "ap/corpus.hpp"
#include "ap/proposal.hpp"
#include "ap/semparse.hpp"

namespace ap {

enum class MatchMode { Majority, Any };

MatchMode match_mode_from_string(const std::string& s);
std::string to_string(MatchMode mode);

// One evaluated question: normalized gold answers, the majority among them,
// and its proposal list (answers normalized at construction).
struct EvalTriplet {
  std::string qid;
  std::vector<std::string> gold;  // 10 normalized answers
  std::string majority;
  ProposalList proposals;
};

EvalTriplet make_eval_triplet(const QaInstance& inst, ProposalList proposals);

// Fraction of triplets whose correct answer (the majority, or any gold
// answer) appears in the first n proposals.
double recall_at_n(const std::vector<EvalTriplet>& triplets, int n, MatchMode mode);

// 1-based rank of the first correct answer per triplet; misses are
// excluded.
std::map<int, int> rank_distribution(const std::vector<EvalTriplet>& triplets, MatchMode mode);

// min(matches / 3, 1) over the 10 gold answers.
double vqa_accuracy(const std::string& predicted, const std::vector<std::string>& gold);

struct PerTypeReport {
  std::map<std::string, double> accuracy;  // yes_no / number / other / all
  std::map<std::string, int> counts;
  int missing = 0;  // evaluated instances without a prediction (scored 0)
};

// Mean vqa_accuracy grouped by question category (unparseable questions
// count as "other"), plus the ungrouped mean under "all".
PerTypeReport per_type_report(const std::unordered_map<std::string, std::string>& predictions,
                              const Corpus& corpus, const Parser& parser, Split eval_split);

}  // namespace ap
