#include "ap/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "ap/classifier.hpp"
#include "ap/corpus.hpp"
#include "ap/evalkit.hpp"
#include "ap/graphmatch.hpp"
#include "ap/pipeline.hpp"
#include "ap/proposal.hpp"
#include "ap/synth.hpp"
#include "ap/textsim.hpp"
#include "ap/util.hpp"

namespace ap::cli {

using nlohmann::json;

namespace {

bool log_enabled() {
  const char* env = std::getenv("AP_LOG");
  if (!env) return true;
  std::string v = env;
  return v != "off" && v != "quiet" && v != "0";
}

void emit_run_log(const std::string& command, std::uint64_t seed, int threads,
                  const std::string& config_str) {
  if (!log_enabled()) return;
  json line;
  line["event"] = "run";
  line["command"] = command;
  line["seed"] = seed;
  line["threads"] = threads;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a(config_str)));
  line["config_hash"] = hash;
  line["config"] = config_str;
  std::cerr << line.dump() << "\n";
}

void emit_output(const json& report, const std::string& out_path) {
  std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) write_file(out_path, text);
}

std::unordered_map<std::string, ProposalList> proposals_by_qid(const std::string& path) {
  std::unordered_map<std::string, ProposalList> map;
  for (auto& list : load_proposals(path)) {
    std::string qid = list.qid;
    if (!map.emplace(qid, std::move(list)).second) {
      throw DataError(path + ": duplicate proposals for qid \"" + qid + "\"");
    }
  }
  return map;
}

std::optional<Split> parse_split_filter(const std::string& s) {
  if (s == "all") return std::nullopt;
  return split_from_string(s);
}

std::vector<EvalTriplet> join_triplets(const Corpus& corpus,
                                       const std::vector<ProposalList>& lists) {
  std::vector<EvalTriplet> triplets;
  triplets.reserve(lists.size());
  for (const auto& list : lists) {
    const QaInstance* inst = corpus.find(list.qid);
    if (!inst) throw DataError("proposals qid \"" + list.qid + "\" missing from corpus");
    triplets.push_back(make_eval_triplet(*inst, list));
  }
  return triplets;
}

struct ClassifierFlags {
  MlpConfig cfg;

  void attach(CLI::App* cmd) {
    cmd->add_option("--hidden", cfg.hidden, "Hidden units per layer");
    cmd->add_option("--layers", cfg.layers, "Number of hidden layers");
    cmd->add_option("--dropout", cfg.dropout, "Dropout rate after the first hidden layer");
    cmd->add_option("--lr", cfg.lr, "SGD learning rate");
    cmd->add_option("--epochs", cfg.epochs, "Training epochs");
    cmd->add_option("--batch", cfg.batch, "Batch size");
    cmd->add_option("--negatives", cfg.negatives, "Negatives sampled per instance");
    cmd->add_option("--seed", cfg.seed, "Random seed");
  }
};

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Answer proposal engine: retrieval and graph-matching answer "
               "proposers, ranked-list evaluation, and a triplet classifier for "
               "open-ended VQA"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file");

  std::function<int()> action;
  std::string command;
  std::uint64_t log_seed = 0;
  int threads = 1;

  // ---- ingest ------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("ingest", "Validate a questions file and rewrite it");
    auto questions = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--questions,--corpus", *questions, "Questions JSONL")->required();
    cmd->add_option("--out", *out, "Validated output JSONL")->required();
    cmd->callback([&, questions, out] {
      command = "ingest";
      action = [questions, out] {
        Corpus corpus = load_corpus(*questions);
        save_corpus(corpus, *out);
        json stats;
        stats["instances"] = corpus.size();
        std::map<std::string, int> by_split;
        for (const auto& inst : corpus.instances) ++by_split[to_string(inst.split)];
        stats["by_split"] = by_split;
        stats["out"] = *out;
        std::cout << stats.dump(2) << "\n";
        return 0;
      };
    });
  }

  // ---- index -------------------------------------------------------------
  {
    auto* index = app.add_subcommand("index", "Build retrieval indices");
    index->require_subcommand(1);
    {
      auto* cmd = index->add_subcommand("w2v", "Embedding index over train questions");
      auto questions = std::make_shared<std::string>();
      auto embeddings = std::make_shared<std::string>();
      auto out = std::make_shared<std::string>();
      cmd->add_option("--questions,--corpus", *questions, "Questions JSONL")->required();
      cmd->add_option("--embeddings", *embeddings, "Embedding table")->required();
      cmd->add_option("--out", *out, "Index file")->required();
      cmd->add_option("--threads", threads, "Worker threads");
      cmd->callback([&, questions, embeddings, out] {
        command = "index w2v";
        action = [&, questions, embeddings, out] {
          Corpus corpus = load_corpus(*questions);
          EmbeddingTable table = load_embeddings(*embeddings);
          W2vIndex idx = build_w2v_index(corpus, table, threads);
          save_w2v_index(idx, *out);
          json stats;
          stats["entries"] = idx.entries.size();
          stats["dim"] = idx.dim;
          stats["out"] = *out;
          std::cout << stats.dump(2) << "\n";
          return 0;
        };
      });
    }
    {
      auto* cmd = index->add_subcommand("sem", "Graph-match index over train questions");
      auto questions = std::make_shared<std::string>();
      auto ontology = std::make_shared<std::string>();
      auto lexicon = std::make_shared<std::string>();
      auto out = std::make_shared<std::string>();
      auto budget = std::make_shared<int>(3);
      cmd->add_option("--questions,--corpus", *questions, "Questions JSONL")->required();
      cmd->add_option("--ontology", *ontology, "Ontology TSV")->required();
      cmd->add_option("--lexicon", *lexicon, "Lexicon TSV")->required();
      cmd->add_option("--index-budget", *budget, "Train-side mutation budget");
      cmd->add_option("--out", *out, "Index file")->required();
      cmd->callback([&, questions, ontology, lexicon, out, budget] {
        command = "index sem";
        action = [questions, ontology, lexicon, out, budget] {
          Corpus corpus = load_corpus(*questions);
          Parser parser(load_lexicon(*lexicon), load_ontology(*ontology));
          SemIndex idx = build_sem_index(corpus, parser, *budget);
          save_sem_index(idx, *out);
          json stats;
          stats["indexed"] = idx.indexed;
          stats["skipped"] = idx.skipped;
          stats["budget"] = idx.budget;
          stats["wh_buckets"] = idx.wh_buckets.size();
          stats["count_buckets"] = idx.count_buckets.size();
          stats["out"] = *out;
          std::cout << stats.dump(2) << "\n";
          return 0;
        };
      });
    }
  }

  // ---- propose -----------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("propose", "Generate answer proposal lists");
    auto questions = std::make_shared<std::string>();
    auto split = std::make_shared<std::string>("val");
    auto model = std::make_shared<std::string>("w2v+sem");
    auto w2v_index = std::make_shared<std::string>();
    auto sem_index = std::make_shared<std::string>();
    auto embeddings = std::make_shared<std::string>();
    auto ontology = std::make_shared<std::string>();
    auto lexicon = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto k = std::make_shared<std::size_t>(200);
    auto test_budget = std::make_shared<int>(3);
    auto cutoff = std::make_shared<int>(100);
    auto bleu_n = std::make_shared<int>(4);
    auto w2v_mode = std::make_shared<std::string>("majority");
    cmd->add_option("--questions,--corpus", *questions, "Questions JSONL")->required();
    cmd->add_option("--split", *split, "Split to propose for (train|val|test|all)");
    cmd->add_option("--model", *model, "Proposal model (w2v|sem|w2v+sem|bleu)");
    cmd->add_option("--w2v-index", *w2v_index, "W2V index file");
    cmd->add_option("--sem-index", *sem_index, "Sem index file");
    cmd->add_option("--embeddings", *embeddings, "Embedding table");
    cmd->add_option("--ontology", *ontology, "Ontology TSV");
    cmd->add_option("--lexicon", *lexicon, "Lexicon TSV");
    cmd->add_option("--k-neighbors", *k, "Neighbors to retrieve");
    cmd->add_option("--test-budget", *test_budget, "Test-side mutation budget");
    cmd->add_option("--cutoff", *cutoff, "Proposal list cutoff");
    cmd->add_option("--bleu-max-n", *bleu_n, "Max n-gram order for the BLEU model");
    cmd->add_option("--w2v-mode", *w2v_mode, "Neighbor aggregation (majority|all-answers)");
    cmd->add_option("--threads", threads, "Worker threads");
    cmd->add_option("--out", *out, "Proposals JSONL")->required();
    cmd->callback([&, questions, split, model, w2v_index, sem_index, embeddings, ontology,
                   lexicon, out, k, test_budget, cutoff, bleu_n, w2v_mode] {
      command = "propose";
      action = [&, questions, split, model, w2v_index, sem_index, embeddings, ontology,
                lexicon, out, k, test_budget, cutoff, bleu_n, w2v_mode] {
        Corpus corpus = load_corpus(*questions);
        PipelineConfig cfg;
        cfg.model = proposal_model_from_string(*model);
        cfg.cutoff = *cutoff;
        cfg.k_neighbors = *k;
        cfg.test_budget = *test_budget;
        cfg.bleu_max_n = *bleu_n;
        if (*w2v_mode == "majority") {
          cfg.w2v_mode = W2vAggregation::MajorityAnswer;
        } else if (*w2v_mode == "all-answers") {
          cfg.w2v_mode = W2vAggregation::AllAnswers;
        } else {
          throw DataError("invalid --w2v-mode: \"" + *w2v_mode + "\"");
        }

        PipelineContext ctx;
        ctx.corpus = &corpus;
        EmbeddingTable emb;
        W2vIndex w2v;
        SemIndex sem;
        std::optional<Parser> parser;
        bool need_w2v = cfg.model == ProposalModel::W2v || cfg.model == ProposalModel::Sem ||
                        cfg.model == ProposalModel::W2vSem;
        bool need_sem = cfg.model == ProposalModel::Sem || cfg.model == ProposalModel::W2vSem;
        if (need_w2v) {
          if (embeddings->empty() || w2v_index->empty()) {
            throw DataError("model \"" + *model + "\" needs --embeddings and --w2v-index");
          }
          emb = load_embeddings(*embeddings);
          w2v = load_w2v_index(*w2v_index);
          ctx.embeddings = &emb;
          ctx.w2v = &w2v;
        }
        if (need_sem) {
          if (sem_index->empty() || ontology->empty() || lexicon->empty()) {
            throw DataError("model \"" + *model +
                            "\" needs --sem-index, --ontology and --lexicon");
          }
          sem = load_sem_index(*sem_index);
          parser.emplace(load_lexicon(*lexicon), load_ontology(*ontology));
          ctx.sem = &sem;
          ctx.parser = &*parser;
        }

        std::optional<Split> filter = parse_split_filter(*split);
        std::vector<const QaInstance*> targets;
        for (const auto& inst : corpus.instances) {
          if (!filter || inst.split == *filter) targets.push_back(&inst);
        }
        std::vector<ProposalList> lists(targets.size());
        parallel_for(targets.size(), threads, [&](std::size_t i) {
          lists[i] = propose(targets[i]->qid, targets[i]->question, cfg, ctx);
        });
        save_proposals(lists, *out);
        json stats;
        stats["questions"] = lists.size();
        stats["model"] = *model;
        stats["cutoff"] = *cutoff;
        stats["out"] = *out;
        std::cout << stats.dump(2) << "\n";
        return 0;
      };
    });
  }

  // ---- eval --------------------------------------------------------------
  {
    auto* eval = app.add_subcommand("eval", "Evaluate proposals or predictions");
    eval->require_subcommand(1);
    {
      auto* cmd = eval->add_subcommand("recall", "Recall@N over proposal lists");
      auto proposals = std::make_shared<std::string>();
      auto questions = std::make_shared<std::string>();
      auto mode = std::make_shared<std::string>("majority");
      auto cutoffs = std::make_shared<std::vector<int>>(std::vector<int>{1, 5, 10, 100});
      auto out = std::make_shared<std::string>();
      cmd->add_option("--proposals", *proposals, "Proposals JSONL")->required();
      cmd->add_option("--questions,--corpus", *questions, "Questions JSONL")->required();
      cmd->add_option("--mode", *mode, "Correctness (majority|any)");
      cmd->add_option("--cutoffs", *cutoffs, "Cutoff values")->delimiter(',');
      cmd->add_option("--out", *out, "Also write the report here");
      cmd->callback([&, proposals, questions, mode, cutoffs, out] {
        command = "eval recall";
        action = [proposals, questions, mode, cutoffs, out] {
          Corpus corpus = load_corpus(*questions);
          auto triplets = join_triplets(corpus, load_proposals(*proposals));
          MatchMode m = match_mode_from_string(*mode);
          json report;
          report["mode"] = *mode;
          report["M"] = triplets.size();
          json recall;
          for (int n : *cutoffs) recall[std::to_string(n)] = recall_at_n(triplets, n, m);
          report["recall_at"] = std::move(recall);
          emit_output(report, *out);
          return 0;
        };
      });
    }
    {
      auto* cmd = eval->add_subcommand("rankdist", "Hit-rank distribution");
      auto proposals = std::make_shared<std::string>();
      auto questions = std::make_shared<std::string>();
      auto mode = std::make_shared<std::string>("majority");
      auto out = std::make_shared<std::string>();
      cmd->add_option("--proposals", *proposals, "Proposals JSONL")->required();
      cmd->add_option("--questions,--corpus", *questions, "Questions JSONL")->required();
      cmd->add_option("--mode", *mode, "Correctness (majority|any)");
      cmd->add_option("--out", *out, "Also write the report here");
      cmd->callback([&, proposals, questions, mode, out] {
        command = "eval rankdist";
        action = [proposals, questions, mode, out] {
          Corpus corpus = load_corpus(*questions);
          auto triplets = join_triplets(corpus, load_proposals(*proposals));
          MatchMode m = match_mode_from_string(*mode);
          auto histogram = rank_distribution(triplets, m);
          json report;
          report["mode"] = *mode;
          report["M"] = triplets.size();
          int hits = 0;
          json hist;
          for (const auto& [rank, count] : histogram) {
            hist[std::to_string(rank)] = count;
            hits += count;
          }
          report["hits"] = hits;
          report["rank_histogram"] = std::move(hist);
          emit_output(report, *out);
          return 0;
        };
      });
    }
    {
      auto* cmd = eval->add_subcommand("vqa", "Per-type VQA accuracy of predictions");
      auto predictions = std::make_shared<std::string>();
      auto questions = std::make_shared<std::string>();
      auto ontology = std::make_shared<std::string>();
      auto lexicon = std::make_shared<std::string>();
      auto split = std::make_shared<std::string>("val");
      auto out = std::make_shared<std::string>();
      cmd->add_option("--predictions", *predictions, "Predictions JSONL")->required();
      cmd->add_option("--questions,--corpus", *questions, "Questions JSONL")->required();
      cmd->add_option("--ontology", *ontology, "Ontology TSV")->required();
      cmd->add_option("--lexicon", *lexicon, "Lexicon TSV")->required();
      cmd->add_option("--split", *split, "Split to evaluate");
      cmd->add_option("--out", *out, "Also write the report here");
      cmd->callback([&, predictions, questions, ontology, lexicon, split, out] {
        command = "eval vqa";
        action = [predictions, questions, ontology, lexicon, split, out] {
          Corpus corpus = load_corpus(*questions);
          Parser parser(load_lexicon(*lexicon), load_ontology(*ontology));
          std::unordered_map<std::string, std::string> preds;
          for (const auto& r :
               predictions_from_jsonl(read_file(*predictions), *predictions)) {
            preds[r.qid] = r.answer;
          }
          PerTypeReport report =
              per_type_report(preds, corpus, parser, split_from_string(*split));
          json doc;
          doc["split"] = *split;
          doc["M"] = report.counts.count("all") ? report.counts.at("all") : 0;
          doc["missing"] = report.missing;
          json acc;
          for (const auto& [group, value] : report.accuracy) acc[group] = value;
          doc["per_type"] = std::move(acc);
          json counts;
          for (const auto& [group, value] : report.counts) counts[group] = value;
          doc["counts"] = std::move(counts);
          emit_output(doc, *out);
          return 0;
        };
      });
    }
  }

  // ---- train-classifier ----------------------------------------------------
  {
    auto* cmd = app.add_subcommand("train-classifier", "Train the triplet classifier");
    auto questions = std::make_shared<std::string>();
    auto proposals = std::make_shared<std::string>();
    auto embeddings = std::make_shared<std::string>();
    auto features = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto flags = std::make_shared<ClassifierFlags>();
    cmd->add_option("--questions,--corpus", *questions, "Questions JSONL")->required();
    cmd->add_option("--proposals", *proposals, "Proposals JSONL (negative source)")->required();
    cmd->add_option("--embeddings", *embeddings, "Embedding table")->required();
    cmd->add_option("--image-features", *features, "Image feature table")->required();
    flags->attach(cmd);
    cmd->add_option("--out", *out, "Model file")->required();
    cmd->callback([&, questions, proposals, embeddings, features, out, flags] {
      command = "train-classifier";
      log_seed = flags->cfg.seed;
      action = [questions, proposals, embeddings, features, out, flags] {
        Corpus corpus = load_corpus(*questions);
        auto props = proposals_by_qid(*proposals);
        EmbeddingTable emb = load_embeddings(*embeddings);
        FeatureTable feats = load_image_features(*features);
        TrainResult result = train_classifier(corpus, props, emb, feats, flags->cfg);
        save_model(result.model, *out);
        json doc;
        json log = json::array();
        for (const auto& entry : result.log) {
          log.push_back({{"epoch", entry.epoch}, {"loss", entry.mean_loss}});
        }
        doc["train_log"] = std::move(log);
        doc["out"] = *out;
        std::cout << doc.dump(2) << "\n";
        return 0;
      };
    });
  }

  // ---- answer --------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("answer", "Answer questions end to end");
    auto questions = std::make_shared<std::string>();
    auto split = std::make_shared<std::string>("val");
    auto selector = std::make_shared<std::string>("toprank");
    auto candidates = std::make_shared<std::string>("proposals");
    auto model = std::make_shared<std::string>("w2v+sem");
    auto w2v_index = std::make_shared<std::string>();
    auto sem_index = std::make_shared<std::string>();
    auto embeddings = std::make_shared<std::string>();
    auto features = std::make_shared<std::string>();
    auto ontology = std::make_shared<std::string>();
    auto lexicon = std::make_shared<std::string>();
    auto classifier = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto k = std::make_shared<std::size_t>(200);
    auto test_budget = std::make_shared<int>(3);
    auto cutoff = std::make_shared<int>(100);
    cmd->add_option("--questions,--corpus", *questions, "Questions JSONL")->required();
    cmd->add_option("--split", *split, "Split to answer (train|val|test|all)");
    cmd->add_option("--selector", *selector, "Answer selector (toprank|classifier)");
    cmd->add_option("--candidates", *candidates, "Candidate source (proposals|choices)");
    cmd->add_option("--model", *model, "Proposal model (w2v|sem|w2v+sem|bleu)");
    cmd->add_option("--w2v-index", *w2v_index, "W2V index file");
    cmd->add_option("--sem-index", *sem_index, "Sem index file");
    cmd->add_option("--embeddings", *embeddings, "Embedding table");
    cmd->add_option("--image-features", *features, "Image feature table");
    cmd->add_option("--ontology", *ontology, "Ontology TSV");
    cmd->add_option("--lexicon", *lexicon, "Lexicon TSV");
    cmd->add_option("--classifier", *classifier, "Trained model file");
    cmd->add_option("--k-neighbors", *k, "Neighbors to retrieve");
    cmd->add_option("--test-budget", *test_budget, "Test-side mutation budget");
    cmd->add_option("--cutoff", *cutoff, "Proposal list cutoff");
    cmd->add_option("--threads", threads, "Worker threads");
    cmd->add_option("--out", *out, "Predictions JSONL")->required();
    cmd->callback([&, questions, split, selector, candidates, model, w2v_index, sem_index,
                   embeddings, features, ontology, lexicon, classifier, out, k, test_budget,
                   cutoff] {
      command = "answer";
      action = [&, questions, split, selector, candidates, model, w2v_index, sem_index,
                embeddings, features, ontology, lexicon, classifier, out, k, test_budget,
                cutoff] {
        Corpus corpus = load_corpus(*questions);
        PipelineConfig cfg;
        cfg.model = proposal_model_from_string(*model);
        cfg.selector = selector_from_string(*selector);
        cfg.candidate_source = candidate_source_from_string(*candidates);
        cfg.cutoff = *cutoff;
        cfg.k_neighbors = *k;
        cfg.test_budget = *test_budget;

        PipelineContext ctx;
        ctx.corpus = &corpus;
        EmbeddingTable emb;
        FeatureTable feats;
        W2vIndex w2v;
        SemIndex sem;
        std::optional<Parser> parser;
        MlpModel mlp;
        if (!embeddings->empty()) {
          emb = load_embeddings(*embeddings);
          ctx.embeddings = &emb;
        }
        if (!features->empty()) {
          feats = load_image_features(*features);
          ctx.features = &feats;
        }
        if (!w2v_index->empty()) {
          w2v = load_w2v_index(*w2v_index);
          ctx.w2v = &w2v;
        }
        if (!sem_index->empty()) {
          sem = load_sem_index(*sem_index);
          ctx.sem = &sem;
        }
        if (!ontology->empty() && !lexicon->empty()) {
          parser.emplace(load_lexicon(*lexicon), load_ontology(*ontology));
          ctx.parser = &*parser;
        }
        if (cfg.selector == Selector::Classifier) {
          if (classifier->empty()) throw DataError("--selector classifier needs --classifier");
          mlp = load_model(*classifier);
          ctx.model = &mlp;
        }

        std::optional<Split> filter = parse_split_filter(*split);
        std::vector<const QaInstance*> targets;
        for (const auto& inst : corpus.instances) {
          if (!filter || inst.split == *filter) targets.push_back(&inst);
        }
        std::vector<PredictionRecord> records(targets.size());
        parallel_for(targets.size(), threads, [&](std::size_t i) {
          AnswerResult res = answer_question(*targets[i], cfg, ctx);
          records[i] = {targets[i]->qid, res.answer, res.probability, *selector};
        });
        write_file(*out, predictions_to_jsonl(records));
        json stats;
        stats["questions"] = records.size();
        stats["selector"] = *selector;
        stats["out"] = *out;
        std::cout << stats.dump(2) << "\n";
        return 0;
      };
    });
  }

  // ---- gradcheck -----------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
    auto dims = std::make_shared<std::vector<std::size_t>>();
    auto trials = std::make_shared<int>(20);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto epsilon = std::make_shared<double>(1e-5);
    auto tol = std::make_shared<double>(1e-4);
    cmd->add_option("--dims", *dims, "Layer dims incl. input and output (e.g. 4,3,3,1)")
        ->delimiter(',');
    cmd->add_option("--trials", *trials, "Number of random networks");
    cmd->add_option("--seed", *seed, "Random seed");
    cmd->add_option("--epsilon", *epsilon, "Central-difference step");
    cmd->add_option("--tol", *tol, "Pass threshold on the max relative error");
    cmd->callback([&, dims, trials, seed, epsilon, tol] {
      command = "gradcheck";
      log_seed = *seed;
      action = [dims, trials, seed, epsilon, tol] {
        Rng rng(*seed);
        double worst = 0.0;
        for (int t = 0; t < *trials; ++t) {
          std::vector<std::size_t> d = *dims;
          if (d.empty()) {
            d.push_back(2 + rng.below(7));
            std::uint64_t hidden_layers = 1 + rng.below(3);
            for (std::uint64_t l = 0; l < hidden_layers; ++l) d.push_back(2 + rng.below(7));
            d.push_back(1);
          }
          worst = std::max(worst, gradient_check_random(d, rng.next_u64(), *epsilon));
        }
        bool pass = worst < *tol;
        json doc;
        doc["trials"] = *trials;
        doc["max_rel_error"] = worst;
        doc["tol"] = *tol;
        doc["pass"] = pass;
        std::cout << doc.dump(2) << "\n";
        return pass ? 0 : 2;
      };
    });
  }

  // ---- experiment choice-swap -----------------------------------------------
  {
    auto* experiment = app.add_subcommand("experiment", "Training/evaluation experiments");
    experiment->require_subcommand(1);
    auto* cmd = experiment->add_subcommand(
        "choice-swap", "Train and evaluate the classifier with swapped candidate lists");
    auto questions = std::make_shared<std::string>();
    auto proposals = std::make_shared<std::string>();
    auto embeddings = std::make_shared<std::string>();
    auto features = std::make_shared<std::string>();
    auto ontology = std::make_shared<std::string>();
    auto lexicon = std::make_shared<std::string>();
    auto train_source = std::make_shared<std::string>("choices");
    auto test_source = std::make_shared<std::string>("choices");
    auto eval_split = std::make_shared<std::string>("val");
    auto swap_truncate = std::make_shared<int>(0);
    auto out_dir = std::make_shared<std::string>();
    auto flags = std::make_shared<ClassifierFlags>();
    cmd->add_option("--questions,--corpus", *questions, "Questions JSONL")->required();
    cmd->add_option("--proposals", *proposals, "Pre-generated proposals JSONL")->required();
    cmd->add_option("--embeddings", *embeddings, "Embedding table")->required();
    cmd->add_option("--image-features", *features, "Image feature table")->required();
    cmd->add_option("--ontology", *ontology, "Ontology TSV")->required();
    cmd->add_option("--lexicon", *lexicon, "Lexicon TSV")->required();
    cmd->add_option("--train-source", *train_source, "Training candidates (choices|proposals)");
    cmd->add_option("--test-source", *test_source, "Evaluation candidates (choices|proposals)");
    cmd->add_option("--eval-split", *eval_split, "Split to evaluate");
    cmd->add_option("--swap-truncate", *swap_truncate,
                    "Truncate proposal candidate lists to N (0 = no truncation)");
    cmd->add_option("--out-dir", *out_dir, "Artifact directory")->required();
    flags->attach(cmd);
    cmd->callback([&, questions, proposals, embeddings, features, ontology, lexicon,
                   train_source, test_source, eval_split, swap_truncate, out_dir, flags] {
      command = "experiment choice-swap";
      log_seed = flags->cfg.seed;
      action = [questions, proposals, embeddings, features, ontology, lexicon, train_source,
                test_source, eval_split, swap_truncate, out_dir, flags] {
        Corpus corpus = load_corpus(*questions);
        EmbeddingTable emb = load_embeddings(*embeddings);
        FeatureTable feats = load_image_features(*features);
        Parser parser(load_lexicon(*lexicon), load_ontology(*ontology));
        auto props = proposals_by_qid(*proposals);

        PipelineContext ctx;
        ctx.corpus = &corpus;
        ctx.embeddings = &emb;
        ctx.features = &feats;
        ctx.parser = &parser;

        ChoiceSwapConfig cfg;
        cfg.train_source = candidate_source_from_string(*train_source);
        cfg.test_source = candidate_source_from_string(*test_source);
        cfg.eval_split = split_from_string(*eval_split);
        cfg.clf = flags->cfg;
        if (*swap_truncate > 0) cfg.truncate_candidates = *swap_truncate;

        json report = run_choice_swap(cfg, ctx, props, *out_dir);
        std::cout << report.dump(2) << "\n";
        return 0;
      };
    });
  }

  // ---- synth-corpus ----------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("synth-corpus",
                                   "Emit the deterministic templated synthetic dataset");
    auto out_dir = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(7);
    auto train = std::make_shared<int>(500);
    auto val = std::make_shared<int>(100);
    cmd->add_option("--out-dir", *out_dir, "Output directory")->required();
    cmd->add_option("--seed", *seed, "Random seed");
    cmd->add_option("--train", *train, "Train instances");
    cmd->add_option("--val", *val, "Val instances");
    cmd->callback([&, out_dir, seed, train, val] {
      command = "synth-corpus";
      log_seed = *seed;
      action = [out_dir, seed, train, val] {
        SynthConfig cfg;
        cfg.seed = *seed;
        cfg.train = *train;
        cfg.val = *val;
        write_synth_corpus(*out_dir, cfg);
        json doc;
        doc["out_dir"] = *out_dir;
        doc["seed"] = *seed;
        doc["train"] = *train;
        doc["val"] = *val;
        doc["files"] = {"questions.jsonl", "embeddings.txt", "image_features.txt",
                        "ontology.tsv", "lexicon.tsv"};
        std::cout << doc.dump(2) << "\n";
        return 0;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    emit_run_log(command, log_seed, threads, app.config_to_str(true, false));
    return action ? action() : 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace ap::cli
