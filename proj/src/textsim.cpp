#include "ap/textsim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace ap {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (c < 0x80 && std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

SentenceVector sentence_vector(const std::string& text, const EmbeddingTable& table) {
  SentenceVector sv;
  sv.values.assign(table.dim, 0.0);
  for (const auto& tok : tokenize(text)) {
    const auto* vec = table.find(tok);
    if (!vec) continue;
    for (std::size_t i = 0; i < table.dim; ++i) sv.values[i] += (*vec)[i];
    ++sv.known_tokens;
  }
  if (sv.known_tokens > 0) {
    for (double& v : sv.values) v /= static_cast<double>(sv.known_tokens);
  }
  return sv;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("cosine: length mismatch (" + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()) + ")");
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

namespace {

// n-grams joined with an unprintable separator; counts keyed by the joined
// string.
std::map<std::string, int> ngram_counts(const std::vector<std::string>& toks, int n) {
  std::map<std::string, int> counts;
  if (static_cast<int>(toks.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key;
    for (int j = 0; j < n; ++j) {
      if (j > 0) key.push_back('\x1f');
      key += toks[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

double bleu(const std::string& hypothesis, const std::string& reference, int max_n) {
  if (max_n < 1) throw std::invalid_argument("bleu: max_n must be >= 1");
  auto hyp = tokenize(hypothesis);
  auto ref = tokenize(reference);
  if (hyp.empty()) return 0.0;
  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    auto hyp_counts = ngram_counts(hyp, n);
    if (hyp_counts.empty()) return 0.0;
    auto ref_counts = ngram_counts(ref, n);
    long clipped = 0;
    long total = 0;
    for (const auto& [gram, count] : hyp_counts) {
      total += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) clipped += std::min(count, it->second);
    }
    if (clipped == 0) return 0.0;
    log_sum += std::log(static_cast<double>(clipped) / static_cast<double>(total));
  }
  double c = static_cast<double>(hyp.size());
  double r = static_cast<double>(ref.size());
  double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return bp * std::exp(log_sum / max_n);
}

W2vIndex build_w2v_index(const Corpus& corpus, const EmbeddingTable& table, int threads) {
  std::vector<std::size_t> train_rows;
  for (std::size_t i = 0; i < corpus.instances.size(); ++i) {
    if (corpus.instances[i].split == Split::Train) train_rows.push_back(i);
  }
  W2vIndex index;
  index.dim = table.dim;
  index.entries.resize(train_rows.size());
  parallel_for(train_rows.size(), threads, [&](std::size_t i) {
    const auto& inst = corpus.instances[train_rows[i]];
    index.entries[i] =
        W2vEntry{inst.qid, sentence_vector(inst.question, table), majority_answer(inst)};
  });
  return index;
}

std::vector<ScoredQid> topk_similar_vec(std::span<const double> query, const W2vIndex& index,
                                        std::size_t k) {
  if (k < 1) throw std::invalid_argument("topk_similar: k must be >= 1");
  std::vector<ScoredQid> scored;
  scored.reserve(index.entries.size());
  for (const auto& entry : index.entries) {
    scored.push_back({entry.qid, cosine(query, entry.vec.values)});
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredQid& a, const ScoredQid& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.qid < b.qid;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

std::vector<ScoredQid> topk_similar(const std::string& question, const W2vIndex& index,
                                    const EmbeddingTable& table, std::size_t k) {
  auto sv = sentence_vector(question, table);
  return topk_similar_vec(sv.values, index, k);
}

namespace {

constexpr char kW2vMagic[] = "APW2VIDX1";

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw DataError(path + ": truncated index file");
  }
  return v;
}
std::uint64_t get_u64(std::istream& in, const std::string& path) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw DataError(path + ": truncated index file");
  }
  return v;
}
std::string get_string(std::istream& in, const std::string& path) {
  std::uint32_t len = get_u32(in, path);
  std::string s(len, '\0');
  if (len > 0 && !in.read(s.data(), len)) throw DataError(path + ": truncated index file");
  return s;
}

}  // namespace

void save_w2v_index(const W2vIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path);
  out.write(kW2vMagic, sizeof(kW2vMagic) - 1);
  put_u64(out, index.dim);
  put_u64(out, index.entries.size());
  for (const auto& entry : index.entries) {
    put_string(out, entry.qid);
    put_string(out, entry.majority);
    put_u64(out, entry.vec.known_tokens);
    out.write(reinterpret_cast<const char*>(entry.vec.values.data()),
              static_cast<std::streamsize>(entry.vec.values.size() * sizeof(double)));
  }
  if (!out) throw DataError("write failed: " + path);
}

W2vIndex load_w2v_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  char magic[sizeof(kW2vMagic) - 1];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kW2vMagic, sizeof magic) != 0) {
    throw DataError(path + ": not a w2v index file");
  }
  W2vIndex index;
  index.dim = get_u64(in, path);
  std::uint64_t count = get_u64(in, path);
  index.entries.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    W2vEntry entry;
    entry.qid = get_string(in, path);
    entry.majority = get_string(in, path);
    entry.vec.known_tokens = get_u64(in, path);
    entry.vec.values.resize(index.dim);
    if (index.dim > 0 &&
        !in.read(reinterpret_cast<char*>(entry.vec.values.data()),
                 static_cast<std::streamsize>(index.dim * sizeof(double)))) {
      throw DataError(path + ": truncated index file");
    }
    index.entries.push_back(std::move(entry));
  }
  return index;
}

}  // namespace ap
