#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ap/classifier.hpp"
#include "ap/corpus.hpp"
#include "ap/evalkit.hpp"
#include "ap/graphmatch.hpp"
#include "ap/pipeline.hpp"
#include "ap/proposal.hpp"
#include "ap/semparse.hpp"
#include "ap/synth.hpp"
#include "ap/textsim.hpp"

namespace py = pybind11;

namespace {

ap::QaInstance instance_from_answers(const std::vector<std::string>& answers) {
  ap::QaInstance inst;
  inst.answers = answers;
  return inst;
}

std::vector<std::pair<std::string, double>> entries_as_pairs(const ap::ProposalList& list) {
  std::vector<std::pair<std::string, double>> out;
  out.reserve(list.entries.size());
  for (const auto& e : list.entries) out.emplace_back(e.answer, e.score);
  return out;
}

ap::EvalTriplet triplet_from_python(const std::vector<std::string>& gold,
                                    const std::vector<std::string>& proposals) {
  ap::QaInstance inst;
  inst.answers = gold;
  ap::ProposalList list;
  for (const auto& a : proposals) list.entries.push_back({a, 0.0, ap::Source::Agg});
  ap::EvalTriplet t;
  t.qid = "";
  for (const auto& a : gold) t.gold.push_back(ap::normalize_answer(a));
  t.majority = ap::majority_answer(inst);
  for (auto& e : list.entries) e.answer = ap::normalize_answer(e.answer);
  t.proposals = std::move(list);
  return t;
}

std::vector<ap::EvalTriplet> triplets_from_python(
    const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& raw) {
  std::vector<ap::EvalTriplet> triplets;
  triplets.reserve(raw.size());
  for (const auto& [gold, proposals] : raw) {
    triplets.push_back(triplet_from_python(gold, proposals));
  }
  return triplets;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Answer proposal engine: retrieval and graph-matching answer proposers, "
            "ranked-list evaluation, and a triplet classifier for open-ended VQA.";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ap::DataError>(m, "DataError");
  py::register_exception<ap::ParseError>(m, "QuestionParseError");

  // ---- corpus ----
  py::class_<ap::QaInstance>(m, "QaInstance")
      .def_readonly("qid", &ap::QaInstance::qid)
      .def_readonly("image_id", &ap::QaInstance::image_id)
      .def_readonly("question", &ap::QaInstance::question)
      .def_readonly("answers", &ap::QaInstance::answers)
      .def_readonly("choices", &ap::QaInstance::choices)
      .def_property_readonly("split",
                             [](const ap::QaInstance& i) { return ap::to_string(i.split); });

  py::class_<ap::Corpus>(m, "Corpus")
      .def("__len__", &ap::Corpus::size)
      .def("qids",
           [](const ap::Corpus& c) {
             std::vector<std::string> out;
             for (const auto& inst : c.instances) out.push_back(inst.qid);
             return out;
           })
      .def(
          "instance",
          [](const ap::Corpus& c, const std::string& qid) {
            const ap::QaInstance* inst = c.find(qid);
            if (!inst) throw ap::DataError("unknown qid \"" + qid + "\"");
            return *inst;
          },
          py::arg("qid"));

  m.def("load_corpus", &ap::load_corpus, py::arg("path"));
  m.def("normalize_answer", &ap::normalize_answer, py::arg("raw"));
  m.def(
      "majority_answer",
      [](const std::vector<std::string>& answers) {
        return ap::majority_answer(instance_from_answers(answers));
      },
      py::arg("answers"));

  py::class_<ap::EmbeddingTable>(m, "EmbeddingTable")
      .def_readonly("dim", &ap::EmbeddingTable::dim)
      .def("__len__", [](const ap::EmbeddingTable& t) { return t.vectors.size(); })
      .def("__contains__",
           [](const ap::EmbeddingTable& t, const std::string& tok) {
             return t.find(tok) != nullptr;
           })
      .def(
          "vector",
          [](const ap::EmbeddingTable& t, const std::string& tok) {
            const auto* v = t.find(tok);
            if (!v) throw ap::DataError("unknown token \"" + tok + "\"");
            return *v;
          },
          py::arg("token"));

  py::class_<ap::FeatureTable>(m, "FeatureTable")
      .def_readonly("dim", &ap::FeatureTable::dim)
      .def("__len__", [](const ap::FeatureTable& t) { return t.vectors.size(); })
      .def(
          "vector",
          [](const ap::FeatureTable& t, const std::string& id) { return t.at(id); },
          py::arg("image_id"));

  m.def("load_embeddings", &ap::load_embeddings, py::arg("path"));
  m.def("load_image_features", &ap::load_image_features, py::arg("path"));

  // ---- textsim ----
  m.def("tokenize", &ap::tokenize, py::arg("text"));
  m.def(
      "sentence_vector",
      [](const std::string& text, const ap::EmbeddingTable& table) {
        auto sv = ap::sentence_vector(text, table);
        return std::make_pair(sv.values, sv.known_tokens);
      },
      py::arg("text"), py::arg("table"));
  m.def(
      "cosine",
      [](const std::vector<double>& u, const std::vector<double>& v) {
        return ap::cosine(u, v);
      },
      py::arg("u"), py::arg("v"));
  m.def("bleu", &ap::bleu, py::arg("hypothesis"), py::arg("reference"), py::arg("max_n") = 4);

  py::class_<ap::W2vIndex>(m, "W2vIndex")
      .def_readonly("dim", &ap::W2vIndex::dim)
      .def("__len__", [](const ap::W2vIndex& i) { return i.entries.size(); })
      .def("save", &ap::save_w2v_index, py::arg("path"));
  m.def("build_w2v_index", &ap::build_w2v_index, py::arg("corpus"), py::arg("table"),
        py::arg("threads") = 1);
  m.def("load_w2v_index", &ap::load_w2v_index, py::arg("path"));
  m.def(
      "topk_similar",
      [](const std::string& question, const ap::W2vIndex& index,
         const ap::EmbeddingTable& table, std::size_t k) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& s : ap::topk_similar(question, index, table, k)) {
          out.emplace_back(s.qid, s.score);
        }
        return out;
      },
      py::arg("question"), py::arg("index"), py::arg("table"), py::arg("k"));

  // ---- semparse ----
  py::class_<ap::Ontology>(m, "Ontology");
  py::class_<ap::Lexicon>(m, "Lexicon");
  m.def("load_ontology", &ap::load_ontology, py::arg("path"));
  m.def("load_lexicon", &ap::load_lexicon, py::arg("path"));
  m.def("ancestor", &ap::ancestor, py::arg("type"), py::arg("levels"), py::arg("ontology"));

  py::class_<ap::Parser>(m, "Parser")
      .def(py::init<ap::Lexicon, ap::Ontology>(), py::arg("lexicon"), py::arg("ontology"))
      .def(
          "canonical_form",
          [](const ap::Parser& p, const std::string& question, const std::string& mode) {
            auto g = p.parse(question);
            return ap::canonical_form(
                g, mode == "typed" ? ap::CanonMode::Typed : ap::CanonMode::Surface);
          },
          py::arg("question"), py::arg("mode") = "surface")
      .def(
          "speech_act",
          [](const ap::Parser& p, const std::string& question) {
            return ap::to_string(ap::speech_act(p.parse(question)));
          },
          py::arg("question"))
      .def(
          "question_category",
          [](const ap::Parser& p, const std::string& question) {
            return ap::to_string(ap::question_category(p.parse(question)));
          },
          py::arg("question"));

  // ---- proposals ----
  py::class_<ap::ProposalList>(m, "ProposalList")
      .def_readonly("qid", &ap::ProposalList::qid)
      .def_property_readonly("source",
                             [](const ap::ProposalList& l) { return ap::to_string(l.source); })
      .def("__len__", [](const ap::ProposalList& l) { return l.entries.size(); })
      .def("answers",
           [](const ap::ProposalList& l) {
             std::vector<std::string> out;
             for (const auto& e : l.entries) out.push_back(e.answer);
             return out;
           })
      .def("entries", &entries_as_pairs);

  m.def("propose_w2v",
        [](const std::string& qid, const std::string& question, const ap::W2vIndex& index,
           const ap::EmbeddingTable& table, std::size_t k) {
          return ap::propose_w2v(qid, question, index, table, k);
        },
        py::arg("qid"), py::arg("question"), py::arg("index"), py::arg("table"),
        py::arg("k_neighbors") = 200);
  m.def("propose_bleu", &ap::propose_bleu, py::arg("qid"), py::arg("question"),
        py::arg("corpus"), py::arg("max_n") = 4, py::arg("k_neighbors") = 200);
  m.def("alternate_merge", &ap::alternate_merge, py::arg("a"), py::arg("b"));
  m.def("truncate", &ap::truncate, py::arg("list"), py::arg("n"));

  // ---- graph matching ----
  py::class_<ap::SemIndex>(m, "SemIndex")
      .def_readonly("budget", &ap::SemIndex::budget)
      .def_readonly("indexed", &ap::SemIndex::indexed)
      .def_readonly("skipped", &ap::SemIndex::skipped)
      .def("save", &ap::save_sem_index, py::arg("path"));
  m.def("build_sem_index", &ap::build_sem_index, py::arg("corpus"), py::arg("parser"),
        py::arg("budget") = 3);
  m.def("load_sem_index", &ap::load_sem_index, py::arg("path"));
  m.def("propose_sem", &ap::propose_sem, py::arg("qid"), py::arg("question"),
        py::arg("index"), py::arg("parser"), py::arg("test_budget") = 3);

  // ---- classifier ----
  py::class_<ap::MlpModel>(m, "MlpModel")
      .def_static("zeros", &ap::MlpModel::zeros, py::arg("dims"), py::arg("dropout") = 0.0,
                  py::arg("seed") = 0)
      .def_static("random_init", &ap::MlpModel::random_init, py::arg("dims"),
                  py::arg("dropout") = 0.0, py::arg("seed") = 0)
      .def_readonly("layer_dims", &ap::MlpModel::layer_dims)
      .def(
          "forward",
          [](const ap::MlpModel& m_, const std::vector<double>& x) {
            return ap::forward(m_, x);
          },
          py::arg("x"))
      .def("save", &ap::save_model, py::arg("path"));
  m.def("load_model", &ap::load_model, py::arg("path"));
  m.def("gradient_check", &ap::gradient_check, py::arg("model"), py::arg("x"), py::arg("y"),
        py::arg("epsilon") = 1e-5);
  m.def("gradient_check_random", &ap::gradient_check_random, py::arg("dims"), py::arg("seed"),
        py::arg("epsilon") = 1e-5);
  m.def(
      "train_on_rows",
      [](ap::MlpModel model, const std::vector<std::vector<double>>& xs,
         const std::vector<double>& ys, double lr, int epochs, int batch,
         std::uint64_t seed) {
        if (xs.size() != ys.size()) {
          throw std::invalid_argument("train_on_rows: xs and ys differ in length");
        }
        std::vector<ap::TripletRow> rows;
        rows.reserve(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) rows.push_back({xs[i], ys[i]});
        ap::MlpConfig cfg;
        cfg.lr = lr;
        cfg.epochs = epochs;
        cfg.batch = batch;
        cfg.seed = seed;
        auto result = ap::train_rows(std::move(model), std::move(rows), cfg);
        std::vector<std::pair<int, double>> log;
        for (const auto& e : result.log) log.emplace_back(e.epoch, e.mean_loss);
        return std::make_pair(std::move(result.model), std::move(log));
      },
      py::arg("model"), py::arg("xs"), py::arg("ys"), py::arg("lr") = 0.01,
      py::arg("epochs") = 10, py::arg("batch") = 32, py::arg("seed") = 1);
  m.def("featurize_triplet", &ap::featurize_triplet, py::arg("question"), py::arg("answer"),
        py::arg("image_id"), py::arg("embeddings"), py::arg("features"));
  m.def("answer_toprank", &ap::answer_toprank, py::arg("candidates"));

  // ---- evaluation ----
  m.def(
      "recall_at_n",
      [](const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& raw,
         int n, const std::string& mode) {
        return ap::recall_at_n(triplets_from_python(raw), n,
                               ap::match_mode_from_string(mode));
      },
      py::arg("triplets"), py::arg("n"), py::arg("mode") = "majority",
      "triplets: list of (gold_answers, proposal_answers) pairs");
  m.def(
      "rank_distribution",
      [](const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& raw,
         const std::string& mode) {
        std::map<int, int> hist =
            ap::rank_distribution(triplets_from_python(raw), ap::match_mode_from_string(mode));
        return hist;
      },
      py::arg("triplets"), py::arg("mode") = "majority");
  m.def("vqa_accuracy", &ap::vqa_accuracy, py::arg("predicted"), py::arg("gold"));

  // ---- synthetic corpus ----
  m.def(
      "write_synth_corpus",
      [](const std::string& out_dir, std::uint64_t seed, int train, int val) {
        ap::SynthConfig cfg;
        cfg.seed = seed;
        cfg.train = train;
        cfg.val = val;
        ap::write_synth_corpus(out_dir, cfg);
      },
      py::arg("out_dir"), py::arg("seed") = 7, py::arg("train") = 500, py::arg("val") = 100);
}
