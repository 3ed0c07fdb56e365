#include "ap/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ap/textsim.hpp"

namespace ap {

namespace {

constexpr double kProbClamp = 1e-7;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_dims(const std::vector<std::size_t>& dims) {
  if (dims.size() < 2) throw std::invalid_argument("MlpModel: need at least two layer dims");
  if (dims.back() != 1) throw std::invalid_argument("MlpModel: output dim must be 1");
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("MlpModel: zero layer dim");
  }
}

}  // namespace

MlpModel MlpModel::zeros(std::vector<std::size_t> dims, double dropout, std::uint64_t seed) {
  check_dims(dims);
  MlpModel m;
  m.layer_dims = std::move(dims);
  m.dropout_rate = dropout;
  m.rng_seed = seed;
  for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
    m.weights.emplace_back(m.layer_dims[l + 1] * m.layer_dims[l], 0.0);
    m.biases.emplace_back(m.layer_dims[l + 1], 0.0);
  }
  return m;
}

MlpModel MlpModel::random_init(std::vector<std::size_t> dims, double dropout,
                               std::uint64_t seed) {
  MlpModel m = zeros(std::move(dims), dropout, seed);
  Rng rng(seed);
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    double fan_in = static_cast<double>(m.layer_dims[l]);
    double fan_out = static_cast<double>(m.layer_dims[l + 1]);
    double r = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& w : m.weights[l]) w = rng.uniform(-r, r);
  }
  return m;
}

std::vector<double> featurize_triplet(const std::string& question, const std::string& answer,
                                      const std::string& image_id, const EmbeddingTable& emb,
                                      const FeatureTable& feats) {
  auto q = sentence_vector(question, emb);
  const auto& img = feats.at(image_id);
  auto a = sentence_vector(answer, emb);
  std::vector<double> x;
  x.reserve(q.values.size() + img.size() + a.values.size());
  x.insert(x.end(), q.values.begin(), q.values.end());
  x.insert(x.end(), img.begin(), img.end());
  x.insert(x.end(), a.values.begin(), a.values.end());
  return x;
}

namespace {

struct ForwardTrace {
  // activations[0] is the input; activations[l+1] the output of layer l
  // (post-ReLU and dropout for hidden layers, sigmoid for the last).
  std::vector<std::vector<double>> activations;
  std::vector<std::vector<double>> pre_activations;
  std::vector<double> dropout_scale;  // per unit of hidden layer 1; empty if unused
};

double forward_impl(const MlpModel& m, std::span<const double> x, bool train_mode, Rng* rng,
                    ForwardTrace* trace) {
  if (x.size() != m.layer_dims.front()) {
    throw std::invalid_argument("forward: input has dim " + std::to_string(x.size()) +
                                ", expected " + std::to_string(m.layer_dims.front()));
  }
  std::vector<double> cur(x.begin(), x.end());
  if (trace) trace->activations.push_back(cur);
  std::size_t n_layers = m.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    std::size_t in_dim = m.layer_dims[l];
    std::size_t out_dim = m.layer_dims[l + 1];
    std::vector<double> z(out_dim);
    const auto& w = m.weights[l];
    const auto& b = m.biases[l];
    for (std::size_t o = 0; o < out_dim; ++o) {
      double acc = b[o];
      const double* row = w.data() + o * in_dim;
      for (std::size_t i = 0; i < in_dim; ++i) acc += row[i] * cur[i];
      z[o] = acc;
    }
    if (trace) trace->pre_activations.push_back(z);
    bool last = l + 1 == n_layers;
    if (last) {
      cur.assign(1, sigmoid(z[0]));
    } else {
      for (double& v : z) v = v > 0.0 ? v : 0.0;
      if (l == 0 && train_mode && m.dropout_rate > 0.0) {
        if (!rng) throw std::invalid_argument("forward: dropout in train mode needs an rng");
        double keep = 1.0 - m.dropout_rate;
        std::vector<double> scale(out_dim, 0.0);
        for (std::size_t o = 0; o < out_dim; ++o) {
          if (rng->uniform() < keep) scale[o] = 1.0 / keep;
          z[o] *= scale[o];
        }
        if (trace) trace->dropout_scale = std::move(scale);
      }
      cur = std::move(z);
    }
    if (trace) trace->activations.push_back(cur);
  }
  return cur[0];
}

double row_loss(double p, double y) {
  double clamped = std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
  return -(y * std::log(clamped) + (1.0 - y) * std::log(1.0 - clamped));
}

}  // namespace

double forward(const MlpModel& m, std::span<const double> x) {
  return forward_impl(m, x, /*train_mode=*/false, nullptr, nullptr);
}

double loss_and_grads(const MlpModel& m, const std::vector<TripletRow>& batch,
                      bool train_mode, Rng* rng, Gradients* grads) {
  if (batch.empty()) throw std::invalid_argument("loss_and_grads: empty batch");
  if (grads) {
    grads->weights.clear();
    grads->biases.clear();
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      grads->weights.emplace_back(m.weights[l].size(), 0.0);
      grads->biases.emplace_back(m.biases[l].size(), 0.0);
    }
  }
  double total_loss = 0.0;
  std::size_t n_layers = m.weights.size();
  for (const auto& row : batch) {
    ForwardTrace trace;
    double p = forward_impl(m, row.x, train_mode, rng, &trace);
    total_loss += row_loss(p, row.y);
    if (!grads) continue;
    // dL/dz for the sigmoid output under logistic loss; the clamp only
    // guards the log.
    std::vector<double> delta(1, p - row.y);
    for (std::size_t l = n_layers; l-- > 0;) {
      std::size_t in_dim = m.layer_dims[l];
      std::size_t out_dim = m.layer_dims[l + 1];
      const auto& input = trace.activations[l];
      auto& gw = grads->weights[l];
      auto& gb = grads->biases[l];
      for (std::size_t o = 0; o < out_dim; ++o) {
        gb[o] += delta[o];
        double* grow = gw.data() + o * in_dim;
        for (std::size_t i = 0; i < in_dim; ++i) grow[i] += delta[o] * input[i];
      }
      if (l == 0) break;
      const auto& w = m.weights[l];
      std::vector<double> prev(in_dim, 0.0);
      for (std::size_t o = 0; o < out_dim; ++o) {
        for (std::size_t i = 0; i < in_dim; ++i) prev[i] += w[o * in_dim + i] * delta[o];
      }
      const auto& pre = trace.pre_activations[l - 1];
      for (std::size_t i = 0; i < in_dim; ++i) {
        prev[i] *= pre[i] > 0.0 ? 1.0 : 0.0;
        if (l == 1 && !trace.dropout_scale.empty()) prev[i] *= trace.dropout_scale[i];
      }
      delta = std::move(prev);
    }
  }
  double inv = 1.0 / static_cast<double>(batch.size());
  if (grads) {
    for (auto& layer : grads->weights) {
      for (double& g : layer) g *= inv;
    }
    for (auto& layer : grads->biases) {
      for (double& g : layer) g *= inv;
    }
  }
  return total_loss * inv;
}

double gradient_check(const MlpModel& m, const std::vector<double>& x, double y,
                      double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("gradient_check: epsilon must be > 0");
  std::vector<TripletRow> batch = {{x, y}};
  Gradients analytic;
  loss_and_grads(m, batch, /*train_mode=*/false, nullptr, &analytic);
  MlpModel probe = m;
  double max_rel = 0.0;
  auto check_param = [&](double& param, double grad) {
    double saved = param;
    param = saved + epsilon;
    double up = loss_and_grads(probe, batch, false, nullptr, nullptr);
    param = saved - epsilon;
    double down = loss_and_grads(probe, batch, false, nullptr, nullptr);
    param = saved;
    double numeric = (up - down) / (2.0 * epsilon);
    double rel = std::fabs(grad - numeric) /
                 std::max({std::fabs(grad), std::fabs(numeric), 1e-12});
    max_rel = std::max(max_rel, rel);
  };
  for (std::size_t l = 0; l < probe.weights.size(); ++l) {
    for (std::size_t i = 0; i < probe.weights[l].size(); ++i) {
      check_param(probe.weights[l][i], analytic.weights[l][i]);
    }
    for (std::size_t i = 0; i < probe.biases[l].size(); ++i) {
      check_param(probe.biases[l][i], analytic.biases[l][i]);
    }
  }
  return max_rel;
}

double gradient_check_random(const std::vector<std::size_t>& dims, std::uint64_t seed,
                             double epsilon) {
  MlpModel m = MlpModel::random_init(dims, /*dropout=*/0.0, seed);
  Rng rng(seed ^ 0x6772616463686b31ull);
  std::vector<double> x(dims.front());
  double y = 0.0;
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    y = rng.uniform() < 0.5 ? 0.0 : 1.0;
    ForwardTrace trace;
    forward_impl(m, x, false, nullptr, &trace);
    bool near_kink = false;
    for (std::size_t l = 0; l + 1 < trace.pre_activations.size(); ++l) {
      for (double z : trace.pre_activations[l]) {
        if (std::fabs(z) < 1e-3) near_kink = true;
      }
    }
    if (!near_kink) break;
  }
  return gradient_check(m, x, y, epsilon);
}

TrainResult train_rows(MlpModel model, std::vector<TripletRow> rows, const MlpConfig& cfg) {
  if (rows.empty()) throw DataError("train: no trainable rows");
  if (cfg.batch < 1) throw std::invalid_argument("train: batch must be >= 1");
  if (cfg.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  TrainResult result;
  // Separate stream from weight init so the two never alias.
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      std::size_t end = std::min(order.size(), start + cfg.batch);
      std::vector<TripletRow> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(rows[order[i]]);
      Gradients grads;
      double loss = loss_and_grads(model, batch, /*train_mode=*/true, &rng, &grads);
      loss_sum += loss * static_cast<double>(batch.size());
      for (std::size_t l = 0; l < model.weights.size(); ++l) {
        for (std::size_t i = 0; i < model.weights[l].size(); ++i) {
          model.weights[l][i] -= cfg.lr * grads.weights[l][i];
        }
        for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
          model.biases[l][i] -= cfg.lr * grads.biases[l][i];
        }
      }
    }
    result.log.push_back({epoch, loss_sum / static_cast<double>(rows.size())});
  }
  result.model = std::move(model);
  return result;
}

std::vector<TripletRow> build_training_rows(
    const Corpus& corpus, const std::unordered_map<std::string, ProposalList>& proposals,
    const EmbeddingTable& emb, const FeatureTable& feats, int negatives) {
  std::vector<TripletRow> rows;
  for (const auto& inst : corpus.instances) {
    if (inst.split != Split::Train) continue;
    std::string positive = majority_answer(inst);
    rows.push_back({featurize_triplet(inst.question, positive, inst.image_id, emb, feats), 1.0});
    auto it = proposals.find(inst.qid);
    if (it == proposals.end()) continue;
    std::set<std::string> gold;
    for (const auto& a : inst.answers) gold.insert(normalize_answer(a));
    int taken = 0;
    for (const auto& entry : it->second.entries) {
      if (taken >= negatives) break;
      if (gold.count(normalize_answer(entry.answer))) continue;
      rows.push_back(
          {featurize_triplet(inst.question, entry.answer, inst.image_id, emb, feats), 0.0});
      ++taken;
    }
  }
  return rows;
}

TrainResult train_classifier(const Corpus& corpus,
                             const std::unordered_map<std::string, ProposalList>& proposals,
                             const EmbeddingTable& emb, const FeatureTable& feats,
                             const MlpConfig& cfg) {
  std::vector<TripletRow> rows = build_training_rows(corpus, proposals, emb, feats, cfg.negatives);
  if (rows.empty()) throw DataError("train: no trainable rows");
  std::vector<std::size_t> dims;
  dims.push_back(rows.front().x.size());
  for (int l = 0; l < cfg.layers; ++l) dims.push_back(static_cast<std::size_t>(cfg.hidden));
  dims.push_back(1);
  MlpModel model = MlpModel::random_init(std::move(dims), cfg.dropout, cfg.seed);
  return train_rows(std::move(model), std::move(rows), cfg);
}

Prediction predict_answer(const MlpModel& m, const std::string& question,
                          const std::string& image_id, const ProposalList& candidates,
                          const EmbeddingTable& emb, const FeatureTable& feats) {
  if (candidates.entries.empty()) {
    throw DataError("no candidates for qid \"" + candidates.qid + "\"");
  }
  Prediction best;
  bool first = true;
  for (const auto& entry : candidates.entries) {
    auto x = featurize_triplet(question, entry.answer, image_id, emb, feats);
    double p = forward(m, x);
    if (first || p > best.probability) {
      best = {entry.answer, p};
      first = false;
    }
  }
  return best;
}

std::string answer_toprank(const ProposalList& candidates) {
  if (candidates.entries.empty()) {
    throw DataError("no candidates for qid \"" + candidates.qid + "\"");
  }
  return candidates.entries.front().answer;
}

void save_model(const MlpModel& m, const std::string& path) {
  std::ostringstream out;
  out << "APMLP 1\n";
  out << "dims";
  for (std::size_t d : m.layer_dims) out << ' ' << d;
  out << '\n';
  out << "dropout " << format_double(m.dropout_rate) << '\n';
  out << "seed " << m.rng_seed << '\n';
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    out << "layer " << l << '\n';
    out << "W";
    for (double w : m.weights[l]) out << ' ' << format_double(w);
    out << '\n';
    out << "b";
    for (double b : m.biases[l]) out << ' ' << format_double(b);
    out << '\n';
  }
  write_file(path, out.str());
}

MlpModel load_model(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw DataError(path + ": truncated model file (" + what + ")");
    return split_ws(line);
  };
  auto header = next_line("header");
  if (header.size() != 2 || header[0] != "APMLP" || header[1] != "1") {
    throw DataError(path + ": not a model file");
  }
  auto dims_fields = next_line("dims");
  if (dims_fields.size() < 3 || dims_fields[0] != "dims") {
    throw DataError(path + ": bad dims line");
  }
  std::vector<std::size_t> dims;
  for (std::size_t i = 1; i < dims_fields.size(); ++i) dims.push_back(std::stoull(dims_fields[i]));
  auto dropout_fields = next_line("dropout");
  if (dropout_fields.size() != 2 || dropout_fields[0] != "dropout") {
    throw DataError(path + ": bad dropout line");
  }
  auto seed_fields = next_line("seed");
  if (seed_fields.size() != 2 || seed_fields[0] != "seed") {
    throw DataError(path + ": bad seed line");
  }
  MlpModel m = MlpModel::zeros(dims, std::stod(dropout_fields[1]),
                               std::stoull(seed_fields[1]));
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    auto layer_fields = next_line("layer");
    if (layer_fields.size() != 2 || layer_fields[0] != "layer" ||
        std::stoull(layer_fields[1]) != l) {
      throw DataError(path + ": bad layer header at layer " + std::to_string(l));
    }
    auto w_fields = next_line("weights");
    if (w_fields.empty() || w_fields[0] != "W" || w_fields.size() - 1 != m.weights[l].size()) {
      throw DataError(path + ": bad weight row at layer " + std::to_string(l));
    }
    for (std::size_t i = 0; i < m.weights[l].size(); ++i) {
      m.weights[l][i] = std::stod(w_fields[i + 1]);
    }
    auto b_fields = next_line("biases");
    if (b_fields.empty() || b_fields[0] != "b" || b_fields.size() - 1 != m.biases[l].size()) {
      throw DataError(path + ": bad bias row at layer " + std::to_string(l));
    }
    for (std::size_t i = 0; i < m.biases[l].size(); ++i) {
      m.biases[l][i] = std::stod(b_fields[i + 1]);
    }
  }
  return m;
}

}  // namespace ap
