#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ap/corpus.hpp"

namespace ap {

// Lowercases and splits on runs of non-alphanumeric ASCII.
std::vector<std::string> tokenize(const std::string& text);

// Mean of the embeddings of in-vocabulary tokens. Out-of-vocabulary tokens
// are skipped and do not count in the denominator; an all-unknown sentence
// yields the zero vector with known_tokens = 0.
struct SentenceVector {
  std::vector<double> values;
  std::size_t known_tokens = 0;

  bool operator==(const SentenceVector&) const = default;
};

SentenceVector sentence_vector(const std::string& text, const EmbeddingTable& table);

// dot(u,v) / (|u||v|); 0 when either norm is zero. Throws
// std::invalid_argument on a length mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

// Geometric mean of clipped n-gram precisions for n = 1..max_n, times the
// brevity penalty exp(1 - r/c) when the hypothesis is shorter than the
// reference. No smoothing: any zero precision zeroes the score.
double bleu(const std::string& hypothesis, const std::string& reference, int max_n);

struct W2vEntry {
  std::string qid;
  SentenceVector vec;
  std::string majority;  // normalized majority answer

  bool operator==(const W2vEntry&) const = default;
};

// One entry per train-split instance.
struct W2vIndex {
  std::size_t dim = 0;
  std::vector<W2vEntry> entries;
};

W2vIndex build_w2v_index(const Corpus& corpus, const EmbeddingTable& table, int threads = 1);

struct ScoredQid {
  std::string qid;
  double score;
};

// The k entries with the highest cosine to the query, descending; ties
// break toward the ascending qid. k clamps to the index size.
std::vector<ScoredQid> topk_similar_vec(std::span<const double> query, const W2vIndex& index,
                                        std::size_t k);
std::vector<ScoredQid> topk_similar(const std::string& question, const W2vIndex& index,
                                    const EmbeddingTable& table, std::size_t k);

// Binary cache; round-trips losslessly.
void save_w2v_index(const W2vIndex& index, const std::string& path);
W2vIndex load_w2v_index(const std::string& path);

}  // namespace ap
