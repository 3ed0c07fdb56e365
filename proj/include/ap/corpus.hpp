#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "ap/util.hpp"

namespace ap {

enum class Split { Train, Val, Test };

Split split_from_string(const std::string& s);
std::string to_string(Split s);

// One question with its 10 human answers, an optional multiple-choice list,
// and a split label.
struct QaInstance {
  std::string qid;
  std::string image_id;
  std::string question;
  std::vector<std::string> answers;  // exactly 10
  std::vector<std::string> choices;  // empty when absent; >= 2 entries when present
  Split split = Split::Train;

  bool operator==(const QaInstance&) const = default;
};

struct Corpus {
  std::vector<QaInstance> instances;
  std::unordered_map<std::string, std::size_t> by_qid;

  const QaInstance* find(const std::string& qid) const;
  std::size_t size() const { return instances.size(); }

  bool operator==(const Corpus& o) const { return instances == o.instances; }
};

// Loads line-delimited JSON records. Errors name the offending line and
// field; duplicate qids name both lines.
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);
std::string corpus_to_jsonl(const Corpus& corpus);
Corpus corpus_from_jsonl(const std::string& text, const std::string& origin);

// Lowercase, ASCII punctuation dropped (digits kept), whitespace collapsed,
// leading articles (a/an/the) dropped. Idempotent.
std::string normalize_answer(const std::string& raw);

// Most frequent normalized answer; ties go to the lexicographically
// smallest.
std::string majority_answer(const QaInstance& inst);

// token -> D-dim vector. Tokens are lowercased on load; duplicate rows
// (after folding) are an error.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  const std::vector<double>* find(const std::string& token) const;
};

// image id -> D-dim vector. Ids are case-sensitive.
struct FeatureTable {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  // Throws DataError on an unknown image id.
  const std::vector<double>& at(const std::string& image_id) const;
};

// Row format: key then dim whitespace-separated decimal floats. An optional
// first line with exactly two integer fields is a "count dim" header and is
// validated against the data.
EmbeddingTable load_embeddings(const std::string& path);
FeatureTable load_image_features(const std::string& path);

}  // namespace ap
