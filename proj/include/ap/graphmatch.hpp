#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ap/proposal.hpp"
#include "ap/semparse.hpp"

namespace ap {

enum class QuestionCategory { YesNo, Count, OtherWh };

std::string to_string(QuestionCategory c);

// YesNo for yes/no questions, Count for wh questions with a count-flavored
// focus, OtherWh for the rest.
QuestionCategory question_category(const SemanticGraph& g);

// Digits, or a number word zero..twenty.
bool is_numeric_answer(const std::string& answer);

struct MutatedGraph {
  SemanticGraph graph;
  int cost = 0;
};

// All graphs reachable with total mutation cost <= budget, nondecreasing in
// cost and canonical-form-sorted within equal cost; the unmutated graph
// comes first at cost 0. Mutations are node lifts (cost 1 per ontology
// level; level 1 is the node's own type) and deletions of LOCATION/MOD
// subtrees (cost 2). Variants are deduplicated by TYPED canonical form.
std::vector<MutatedGraph> mutations(const SemanticGraph& g, int budget, const Ontology& onto);

struct SemBucketEntry {
  std::string answer;
  int frequency = 0;   // number of contributing train questions
  int train_cost = 0;  // cheapest mutation cost among them

  bool operator==(const SemBucketEntry&) const = default;
};

// TYPED canonical form -> answers, partitioned by question category. Every
// train graph is indexed under its own form and under every mutated variant
// within the build budget. Yes/no questions only contribute prior counts.
struct SemIndex {
  int budget = 0;
  std::map<std::string, std::vector<SemBucketEntry>> count_buckets;
  std::map<std::string, std::vector<SemBucketEntry>> wh_buckets;
  std::int64_t yes_count = 0;
  std::int64_t no_count = 0;
  std::uint64_t indexed = 0;
  std::uint64_t skipped = 0;  // unparseable train questions
};

SemIndex build_sem_index(const Corpus& corpus, const Parser& parser, int budget);

// Stage 1: yes/no questions short-circuit to {yes, no} ordered by the
// train-split prior. Stage 2: test-graph mutations are matched against the
// same-category buckets; answers rank by (test cost asc, train cost asc,
// frequency desc, answer asc) with best-rank dedup. Count questions keep
// only numeric answers. Throws ParseError on unparseable questions.
ProposalList propose_sem(const std::string& qid, const std::string& question,
                         const SemIndex& index, const Parser& parser, int test_budget);

// Binary cache; round-trips losslessly.
void save_sem_index(const SemIndex& index, const std::string& path);
SemIndex load_sem_index(const std::string& path);

}  // namespace ap
