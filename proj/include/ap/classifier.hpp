#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ap/corpus.hpp"
#include "ap/proposal.hpp"

namespace ap {

struct MlpConfig {
  int hidden = 256;  // paper scale is 8192; desk-scale default
  int layers = 3;
  double dropout = 0.5;
  double lr = 0.01;
  int epochs = 10;
  int batch = 32;
  int negatives = 3;
  std::uint64_t seed = 1;
};

// Fully connected net: affine + ReLU per hidden layer, inverted dropout
// after the first hidden layer in train mode, sigmoid output.
struct MlpModel {
  std::vector<std::size_t> layer_dims;       // [input, hidden..., 1]
  std::vector<std::vector<double>> weights;  // per layer, row-major out x in
  std::vector<std::vector<double>> biases;
  double dropout_rate = 0.0;
  std::uint64_t rng_seed = 0;

  static MlpModel zeros(std::vector<std::size_t> dims, double dropout, std::uint64_t seed);
  static MlpModel random_init(std::vector<std::size_t> dims, double dropout,
                              std::uint64_t seed);

  bool operator==(const MlpModel&) const = default;
};

// [question embedding | image features | answer embedding].
std::vector<double> featurize_triplet(const std::string& question, const std::string& answer,
                                      const std::string& image_id, const EmbeddingTable& emb,
                                      const FeatureTable& feats);

// Eval-mode probability in (0, 1); deterministic.
double forward(const MlpModel& m, std::span<const double> x);

struct TripletRow {
  std::vector<double> x;
  double y = 0.0;  // label in {0, 1}
};

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

// Mean logistic loss over the batch with probabilities clamped to
// [1e-7, 1-1e-7], and exact backpropagation gradients using the same
// dropout masks as the forward pass. rng drives the dropout masks and is
// required in train mode when dropout_rate > 0. grads may be null when only
// the loss is wanted.
double loss_and_grads(const MlpModel& m, const std::vector<TripletRow>& batch,
                      bool train_mode, Rng* rng, Gradients* grads);

// Max over parameters of |analytic - central difference| relative error.
// Dropout is ignored (eval-mode forward).
double gradient_check(const MlpModel& m, const std::vector<double>& x, double y,
                      double epsilon);

// Gradient check on a random network and input; inputs are resampled until
// every hidden pre-activation stays away from the ReLU kink.
double gradient_check_random(const std::vector<std::size_t>& dims, std::uint64_t seed,
                             double epsilon);

struct TrainLogEntry {
  int epoch = 0;
  double mean_loss = 0.0;
};

struct TrainResult {
  MlpModel model;
  std::vector<TrainLogEntry> log;
};

// Plain SGD with a fixed learning rate. Shuffling and dropout masks are
// driven solely by cfg.seed; equal (config, seed, rows) trains bit-identical
// parameters.
TrainResult train_rows(MlpModel model, std::vector<TripletRow> rows, const MlpConfig& cfg);

// One positive row per train instance (question, image, majority answer)
// plus up to `negatives` rows from the top of its proposal list, skipping
// answers among the 10 gold ones. Corpus order.
std::vector<TripletRow> build_training_rows(
    const Corpus& corpus, const std::unordered_map<std::string, ProposalList>& proposals,
    const EmbeddingTable& emb, const FeatureTable& feats, int negatives);

// build_training_rows + train_rows over a fresh randomly initialized model.
TrainResult train_classifier(const Corpus& corpus,
                             const std::unordered_map<std::string, ProposalList>& proposals,
                             const EmbeddingTable& emb, const FeatureTable& feats,
                             const MlpConfig& cfg);

struct Prediction {
  std::string answer;
  double probability = 0.0;
};

// Argmax-probability candidate; ties keep the earlier proposal rank.
// Throws DataError when candidates are empty.
Prediction predict_answer(const MlpModel& m, const std::string& question,
                          const std::string& image_id, const ProposalList& candidates,
                          const EmbeddingTable& emb, const FeatureTable& feats);

// The rank-1 answer. Throws DataError when the list is empty.
std::string answer_toprank(const ProposalList& candidates);

// Text format: header (version, dims, dropout, seed) then parameters as
// shortest round-trip decimals; reload is bit-exact.
void save_model(const MlpModel& m, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace ap
