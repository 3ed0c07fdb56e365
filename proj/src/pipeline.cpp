#include "ap/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

namespace ap {

using nlohmann::json;

ProposalModel proposal_model_from_string(const std::string& s) {
  if (s == "w2v") return ProposalModel::W2v;
  if (s == "sem") return ProposalModel::Sem;
  if (s == "w2v+sem") return ProposalModel::W2vSem;
  if (s == "bleu") return ProposalModel::Bleu;
  throw DataError("invalid proposal model: \"" + s + "\" (expected w2v|sem|w2v+sem|bleu)");
}

std::string to_string(ProposalModel m) {
  switch (m) {
    case ProposalModel::W2v: return "w2v";
    case ProposalModel::Sem: return "sem";
    case ProposalModel::W2vSem: return "w2v+sem";
    case ProposalModel::Bleu: return "bleu";
  }
  return "?";
}

Selector selector_from_string(const std::string& s) {
  if (s == "toprank") return Selector::TopRank;
  if (s == "classifier") return Selector::Classifier;
  throw DataError("invalid selector: \"" + s + "\" (expected toprank|classifier)");
}

std::string to_string(Selector s) {
  return s == Selector::TopRank ? "toprank" : "classifier";
}

CandidateSource candidate_source_from_string(const std::string& s) {
  if (s == "proposals") return CandidateSource::Proposals;
  if (s == "choices") return CandidateSource::ProvidedChoices;
  throw DataError("invalid candidate source: \"" + s + "\" (expected proposals|choices)");
}

std::string to_string(CandidateSource s) {
  return s == CandidateSource::Proposals ? "proposals" : "choices";
}

namespace {

void require(const void* ptr, const char* what) {
  if (!ptr) throw std::invalid_argument(std::string("pipeline: ") + what + " not configured");
}

ProposalList propose_untruncated(const std::string& qid, const std::string& question,
                                 const PipelineConfig& cfg, const PipelineContext& ctx) {
  auto w2v_list = [&]() {
    require(ctx.w2v, "w2v index");
    require(ctx.embeddings, "embeddings");
    const Corpus* corpus = cfg.w2v_mode == W2vAggregation::AllAnswers ? ctx.corpus : nullptr;
    return propose_w2v(qid, question, *ctx.w2v, *ctx.embeddings, cfg.k_neighbors,
                       cfg.w2v_mode, corpus);
  };
  auto sem_list = [&]() {
    require(ctx.sem, "sem index");
    require(ctx.parser, "parser");
    return propose_sem(qid, question, *ctx.sem, *ctx.parser, cfg.test_budget);
  };
  switch (cfg.model) {
    case ProposalModel::W2v:
      return w2v_list();
    case ProposalModel::Sem:
      try {
        return sem_list();
      } catch (const ParseError&) {
        return w2v_list();
      }
    case ProposalModel::W2vSem: {
      ProposalList sem;
      sem.qid = qid;
      sem.source = Source::Sem;
      try {
        sem = sem_list();
      } catch (const ParseError&) {
      }
      ProposalList w2v = w2v_list();
      return cfg.merge_w2v_first ? alternate_merge(w2v, sem) : alternate_merge(sem, w2v);
    }
    case ProposalModel::Bleu:
      require(ctx.corpus, "corpus");
      return propose_bleu(qid, question, *ctx.corpus, cfg.bleu_max_n, cfg.k_neighbors);
  }
  throw std::invalid_argument("pipeline: unknown proposal model");
}

}  // namespace

ProposalList propose(const std::string& qid, const std::string& question,
                     const PipelineConfig& cfg, const PipelineContext& ctx) {
  return truncate(propose_untruncated(qid, question, cfg, ctx), cfg.cutoff);
}

ProposalList choices_to_list(const QaInstance& inst) {
  if (inst.choices.empty()) {
    throw DataError("MISSING_CHOICES: instance \"" + inst.qid + "\" has no choices");
  }
  ProposalList list;
  list.qid = inst.qid;
  list.source = Source::Agg;
  std::set<std::string> seen;
  for (const auto& c : inst.choices) {
    std::string normalized = normalize_answer(c);
    if (!seen.insert(normalized).second) continue;
    list.entries.push_back({normalized, 0.0, Source::Agg});
  }
  return list;
}

AnswerResult answer_question(const QaInstance& inst, const PipelineConfig& cfg,
                             const PipelineContext& ctx) {
  ProposalList candidates = cfg.candidate_source == CandidateSource::ProvidedChoices
                                ? choices_to_list(inst)
                                : propose(inst.qid, inst.question, cfg, ctx);
  if (cfg.selector == Selector::TopRank) {
    return {answer_toprank(candidates), std::nullopt};
  }
  require(ctx.model, "classifier model");
  require(ctx.embeddings, "embeddings");
  require(ctx.features, "image features");
  Prediction p =
      predict_answer(*ctx.model, inst.question, inst.image_id, candidates, *ctx.embeddings,
                     *ctx.features);
  return {p.answer, p.probability};
}

std::string predictions_to_jsonl(const std::vector<PredictionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json rec;
    rec["qid"] = r.qid;
    rec["answer"] = r.answer;
    if (r.probability) rec["probability"] = *r.probability;
    rec["selector"] = r.selector;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::vector<PredictionRecord> predictions_from_jsonl(const std::string& text,
                                                     const std::string& origin) {
  std::vector<PredictionRecord> records;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::string where = origin + ":" + std::to_string(lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(where + ": invalid JSON: " + e.what());
    }
    PredictionRecord r;
    try {
      r.qid = rec.at("qid").get<std::string>();
      r.answer = rec.at("answer").get<std::string>();
      r.selector = rec.value("selector", std::string("?"));
      if (rec.contains("probability")) r.probability = rec["probability"].get<double>();
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

ProposalList candidate_list(const QaInstance& inst, CandidateSource source,
                            const std::unordered_map<std::string, ProposalList>& proposals,
                            std::optional<int> truncate_to) {
  if (source == CandidateSource::ProvidedChoices) return choices_to_list(inst);
  auto it = proposals.find(inst.qid);
  ProposalList list;
  if (it != proposals.end()) list = it->second;
  list.qid = inst.qid;
  if (truncate_to) list = truncate(list, *truncate_to);
  return list;
}

}  // namespace

json run_choice_swap(const ChoiceSwapConfig& cfg, const PipelineContext& ctx,
                     const std::unordered_map<std::string, ProposalList>& proposals,
                     const std::string& artifacts_dir) {
  require(ctx.corpus, "corpus");
  require(ctx.embeddings, "embeddings");
  require(ctx.features, "image features");
  require(ctx.parser, "parser");
  const Corpus& corpus = *ctx.corpus;

  // Instances lacking choices are a hard error when either side uses them.
  if (cfg.train_source == CandidateSource::ProvidedChoices ||
      cfg.test_source == CandidateSource::ProvidedChoices) {
    std::vector<std::string> missing;
    for (const auto& inst : corpus.instances) {
      bool needed = (inst.split == Split::Train &&
                     cfg.train_source == CandidateSource::ProvidedChoices) ||
                    (inst.split == cfg.eval_split &&
                     cfg.test_source == CandidateSource::ProvidedChoices);
      if (needed && inst.choices.empty()) missing.push_back(inst.qid);
    }
    if (!missing.empty()) {
      std::string qids = join(missing, ", ");
      throw DataError("choice-swap: instances without choices: " + qids);
    }
  }

  // Training candidates per train instance.
  std::unordered_map<std::string, ProposalList> train_candidates;
  for (const auto& inst : corpus.instances) {
    if (inst.split != Split::Train) continue;
    train_candidates.emplace(
        inst.qid, candidate_list(inst, cfg.train_source, proposals, cfg.truncate_candidates));
  }
  TrainResult trained =
      train_classifier(corpus, train_candidates, *ctx.embeddings, *ctx.features, cfg.clf);

  // Evaluation with test-source candidates.
  std::unordered_map<std::string, std::string> predictions;
  std::vector<PredictionRecord> records;
  int empty_candidates = 0;
  for (const auto& inst : corpus.instances) {
    if (inst.split != cfg.eval_split) continue;
    ProposalList candidates =
        candidate_list(inst, cfg.test_source, proposals, cfg.truncate_candidates);
    if (candidates.entries.empty()) {
      ++empty_candidates;  // scored 0 via the missing-prediction rule
      continue;
    }
    Prediction p = predict_answer(trained.model, inst.question, inst.image_id, candidates,
                                  *ctx.embeddings, *ctx.features);
    predictions.emplace(inst.qid, p.answer);
    records.push_back({inst.qid, p.answer, p.probability, "classifier"});
  }
  PerTypeReport per_type =
      per_type_report(predictions, corpus, *ctx.parser, cfg.eval_split);

  json report;
  report["experiment"] = "choice-swap";
  report["train_source"] = to_string(cfg.train_source);
  report["test_source"] = to_string(cfg.test_source);
  report["eval_split"] = to_string(cfg.eval_split);
  report["seed"] = cfg.clf.seed;
  report["empty_candidate_instances"] = empty_candidates;
  report["missing_predictions"] = per_type.missing;
  json acc;
  for (const auto& [group, value] : per_type.accuracy) acc[group] = value;
  report["per_type"] = std::move(acc);
  json counts;
  for (const auto& [group, value] : per_type.counts) counts[group] = value;
  report["counts"] = std::move(counts);
  json losses = json::array();
  for (const auto& entry : trained.log) {
    losses.push_back({{"epoch", entry.epoch}, {"loss", entry.mean_loss}});
  }
  report["train_log"] = std::move(losses);

  if (!artifacts_dir.empty()) {
    std::filesystem::create_directories(artifacts_dir);
    std::string tag =
        to_string(cfg.train_source) + "-" + to_string(cfg.test_source);
    save_model(trained.model, artifacts_dir + "/model-" + tag + ".txt");
    write_file(artifacts_dir + "/predictions-" + tag + ".jsonl",
               predictions_to_jsonl(records));
    write_file(artifacts_dir + "/report-" + tag + ".json", report.dump(2) + "\n");
  }
  return report;
}

}  // namespace ap
