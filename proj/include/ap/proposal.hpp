#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ap/corpus.hpp"
#include "ap/textsim.hpp"

namespace ap {

enum class Source { W2v, Sem, Agg, Bleu };

std::string to_string(Source s);
Source source_from_string(const std::string& s);

struct ProposalEntry {
  std::string answer;  // normalized
  double score = 0.0;
  Source source = Source::W2v;

  bool operator==(const ProposalEntry&) const = default;
};

// Ranked, deduplicated answers for one question; rank 1 first.
struct ProposalList {
  std::string qid;
  Source source = Source::W2v;
  std::vector<ProposalEntry> entries;
  std::optional<int> cutoff;

  bool operator==(const ProposalList&) const = default;
};

enum class W2vAggregation { MajorityAnswer, AllAnswers };

// Retrieves the k most similar train questions; each neighbor contributes
// answers weighted by its cosine score (its majority answer by default, all
// 10 answers in AllAnswers mode, which needs the corpus for the lookup).
// Answers rank by total weight descending, ties ascending.
ProposalList propose_w2v(const std::string& qid, const std::string& question,
                         const W2vIndex& index, const EmbeddingTable& table,
                         std::size_t k_neighbors,
                         W2vAggregation mode = W2vAggregation::MajorityAnswer,
                         const Corpus* corpus = nullptr);

// Same aggregation with BLEU similarity against the train-split questions
// (each train question is scored as a hypothesis against the query).
ProposalList propose_bleu(const std::string& qid, const std::string& question,
                          const Corpus& corpus, int max_n, std::size_t k_neighbors);

// a1, b1, a2, b2, ...; the longer remainder is appended; duplicate answers
// keep their earliest merged position. Source becomes Agg, scores carry over
// from the contributing entry.
ProposalList alternate_merge(const ProposalList& a, const ProposalList& b);

// First min(n, size) entries; records the cutoff (the min of repeated
// truncations).
ProposalList truncate(const ProposalList& p, int n);

// JSONL: {"qid", "source", "proposals": [{"rank", "answer", "score"}]}.
std::string proposals_to_jsonl(const std::vector<ProposalList>& lists);
std::vector<ProposalList> proposals_from_jsonl(const std::string& text,
                                               const std::string& origin);
void save_proposals(const std::vector<ProposalList>& lists, const std::string& path);
std::vector<ProposalList> load_proposals(const std::string& path);

}  // namespace ap
