#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ap/classifier.hpp"
#include "ap/evalkit.hpp"
#include "ap/graphmatch.hpp"
#include "ap/proposal.hpp"

#include "json.hpp"

namespace ap {

enum class ProposalModel { W2v, Sem, W2vSem, Bleu };
enum class Selector { TopRank, Classifier };
enum class CandidateSource { Proposals, ProvidedChoices };

ProposalModel proposal_model_from_string(const std::string& s);
std::string to_string(ProposalModel m);
Selector selector_from_string(const std::string& s);
std::string to_string(Selector s);
CandidateSource candidate_source_from_string(const std::string& s);
std::string to_string(CandidateSource s);

struct PipelineConfig {
  ProposalModel model = ProposalModel::W2vSem;
  int cutoff = 100;
  Selector selector = Selector::TopRank;
  CandidateSource candidate_source = CandidateSource::Proposals;
  std::size_t k_neighbors = 200;
  int test_budget = 3;
  int bleu_max_n = 4;
  W2vAggregation w2v_mode = W2vAggregation::MajorityAnswer;
  bool merge_w2v_first = true;
};

// Non-owning views of whatever the run has loaded; propose/answer validate
// that the pieces they need are present.
struct PipelineContext {
  const Corpus* corpus = nullptr;
  const EmbeddingTable* embeddings = nullptr;
  const FeatureTable* features = nullptr;
  const W2vIndex* w2v = nullptr;
  const SemIndex* sem = nullptr;
  const Parser* parser = nullptr;
  const MlpModel* model = nullptr;
};

// Dispatches to the configured proposer and truncates to the cutoff.
// SEM (and the SEM half of W2V_SEM) falls back to the W2V list (an empty
// list, respectively) on unparseable questions.
ProposalList propose(const std::string& qid, const std::string& question,
                     const PipelineConfig& cfg, const PipelineContext& ctx);

struct AnswerResult {
  std::string answer;
  std::optional<double> probability;
};

// TOP_RANK takes the head of the candidate list; CLASSIFIER scores every
// candidate with the model. Candidates come from propose() or from the
// instance's provided choices.
AnswerResult answer_question(const QaInstance& inst, const PipelineConfig& cfg,
                             const PipelineContext& ctx);

// Candidate list from an instance's multiple-choice list (normalized,
// dedup-keep-first). Throws DataError when choices are absent.
ProposalList choices_to_list(const QaInstance& inst);

struct PredictionRecord {
  std::string qid;
  std::string answer;
  std::optional<double> probability;
  std::string selector;
};

std::string predictions_to_jsonl(const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> predictions_from_jsonl(const std::string& text,
                                                     const std::string& origin);

struct ChoiceSwapConfig {
  CandidateSource train_source = CandidateSource::ProvidedChoices;
  CandidateSource test_source = CandidateSource::ProvidedChoices;
  MlpConfig clf;
  Split eval_split = Split::Val;
  std::optional<int> truncate_candidates;  // applied to proposal-list candidates
};

// Trains the triplet classifier with negatives drawn from train_source,
// evaluates on eval_split with candidates from test_source, and reports
// per-type accuracy. proposals must cover the qids of any side using them.
// Artifacts (model, predictions, report) are written under artifacts_dir
// when it is non-empty.
nlohmann::json run_choice_swap(const ChoiceSwapConfig& cfg, const PipelineContext& ctx,
                               const std::unordered_map<std::string, ProposalList>& proposals,
                               const std::string& artifacts_dir);

}  // namespace ap
