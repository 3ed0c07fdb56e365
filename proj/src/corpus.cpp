#include "ap/corpus.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"

namespace ap {

using nlohmann::json;

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw DataError("invalid split value: \"" + s + "\" (expected train|val|test)");
}

std::string to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

const QaInstance* Corpus::find(const std::string& qid) const {
  auto it = by_qid.find(qid);
  if (it == by_qid.end()) return nullptr;
  return &instances[it->second];
}

namespace {

std::string require_string(const json& rec, const char* field, const std::string& where) {
  auto it = rec.find(field);
  if (it == rec.end() || !it->is_string()) {
    throw DataError(where + ": missing or non-string field \"" + field + "\"");
  }
  return it->get<std::string>();
}

QaInstance parse_record(const json& rec, const std::string& where) {
  if (!rec.is_object()) throw DataError(where + ": record is not a JSON object");
  QaInstance inst;
  inst.qid = require_string(rec, "qid", where);
  inst.image_id = require_string(rec, "image_id", where);
  inst.question = require_string(rec, "question", where);
  if (trim(inst.question).empty()) {
    throw DataError(where + ": field \"question\" is empty");
  }

  auto ans = rec.find("answers");
  if (ans == rec.end() || !ans->is_array()) {
    throw DataError(where + ": missing or non-array field \"answers\"");
  }
  if (ans->size() != 10) {
    throw DataError(where + ": answers must have length 10 (got " +
                    std::to_string(ans->size()) + ")");
  }
  for (const auto& a : *ans) {
    if (!a.is_string()) throw DataError(where + ": non-string entry in \"answers\"");
    inst.answers.push_back(a.get<std::string>());
  }

  auto ch = rec.find("choices");
  if (ch != rec.end() && !ch->is_null()) {
    if (!ch->is_array()) throw DataError(where + ": field \"choices\" is not an array");
    if (ch->size() < 2) {
      throw DataError(where + ": choices must have at least 2 entries (got " +
                      std::to_string(ch->size()) + ")");
    }
    for (const auto& c : *ch) {
      if (!c.is_string()) throw DataError(where + ": non-string entry in \"choices\"");
      inst.choices.push_back(c.get<std::string>());
    }
  }

  try {
    inst.split = split_from_string(require_string(rec, "split", where));
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  }
  return inst;
}

}  // namespace

Corpus corpus_from_jsonl(const std::string& text, const std::string& origin) {
  Corpus corpus;
  std::unordered_map<std::string, std::size_t> first_line;
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
    QaInstance inst = parse_record(rec, where);
    auto it = first_line.find(inst.qid);
    if (it != first_line.end()) {
      throw DataError(where + ": duplicate qid \"" + inst.qid + "\" (first seen at " +
                      origin + ":" + std::to_string(it->second) + ")");
    }
    first_line.emplace(inst.qid, lineno);
    corpus.by_qid.emplace(inst.qid, corpus.instances.size());
    corpus.instances.push_back(std::move(inst));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  return corpus_from_jsonl(read_file(path), path);
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& inst : corpus.instances) {
    json rec;
    rec["qid"] = inst.qid;
    rec["image_id"] = inst.image_id;
    rec["question"] = inst.question;
    rec["answers"] = inst.answers;
    if (!inst.choices.empty()) rec["choices"] = inst.choices;
    rec["split"] = to_string(inst.split);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  write_file(path, corpus_to_jsonl(corpus));
}

std::string normalize_answer(const std::string& raw) {
  std::string cleaned;
  cleaned.reserve(raw.size());
  for (unsigned char c : raw) {
    if (c >= 'A' && c <= 'Z') {
      cleaned.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (c < 0x80 && std::ispunct(c)) {
      continue;
    } else {
      cleaned.push_back(static_cast<char>(c));
    }
  }
  auto words = split_ws(cleaned);
  std::size_t start = 0;
  while (start < words.size() &&
         (words[start] == "a" || words[start] == "an" || words[start] == "the")) {
    ++start;
  }
  return join(std::vector<std::string>(words.begin() + start, words.end()), " ");
}

std::string majority_answer(const QaInstance& inst) {
  std::map<std::string, int> counts;
  for (const auto& a : inst.answers) ++counts[normalize_answer(a)];
  std::string best;
  int best_count = -1;
  for (const auto& [answer, count] : counts) {
    if (count > best_count) {
      best = answer;
      best_count = count;
    }
  }
  return best;
}

const std::vector<double>* EmbeddingTable::find(const std::string& token) const {
  auto it = vectors.find(token);
  return it == vectors.end() ? nullptr : &it->second;
}

const std::vector<double>& FeatureTable::at(const std::string& image_id) const {
  auto it = vectors.find(image_id);
  if (it == vectors.end()) throw DataError("unknown image id \"" + image_id + "\"");
  return it->second;
}

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (unsigned char c : s) {
    if (!std::isdigit(c)) return false;
  }
  return true;
}

struct VectorTable {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
};

VectorTable load_vector_table(const std::string& path, bool fold_keys, const char* key_kind) {
  VectorTable table;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  bool saw_data = false;
  std::size_t declared_count = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    std::string where = path + ":" + std::to_string(lineno);
    if (!saw_data && !have_header && fields.size() == 2 && all_digits(fields[0]) &&
        all_digits(fields[1])) {
      declared_count = std::stoull(fields[0]);
      table.dim = std::stoull(fields[1]);
      have_header = true;
      continue;
    }
    if (fields.size() < 2) {
      throw DataError(where + ": row needs a " + std::string(key_kind) +
                      " and at least one value");
    }
    std::string key = fold_keys ? lower_ascii(fields[0]) : fields[0];
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(fields[i], &used);
        if (used != fields[i].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw DataError(where + ": invalid float \"" + fields[i] + "\"");
      }
      if (!std::isfinite(v)) {
        throw DataError(where + ": non-finite value \"" + fields[i] + "\"");
      }
      values.push_back(v);
    }
    if (!saw_data && !have_header) {
      table.dim = values.size();
    }
    if (values.size() != table.dim) {
      throw DataError(where + ": expected " + std::to_string(table.dim) +
                      " values, got " + std::to_string(values.size()));
    }
    saw_data = true;
    auto [it, inserted] = table.vectors.emplace(std::move(key), std::move(values));
    if (!inserted) {
      throw DataError(where + ": duplicate " + std::string(key_kind) + " \"" + it->first +
                      "\"");
    }
  }
  if (have_header && declared_count != table.vectors.size()) {
    throw DataError(path + ": header declares " + std::to_string(declared_count) +
                    " rows, file has " + std::to_string(table.vectors.size()));
  }
  return table;
}

}  // namespace

EmbeddingTable load_embeddings(const std::string& path) {
  auto t = load_vector_table(path, /*fold_keys=*/true, "token");
  EmbeddingTable table;
  table.dim = t.dim;
  table.vectors = std::move(t.vectors);
  return table;
}

FeatureTable load_image_features(const std::string& path) {
  auto t = load_vector_table(path, /*fold_keys=*/false, "image id");
  FeatureTable table;
  table.dim = t.dim;
  table.vectors = std::move(t.vectors);
  return table;
}

}  // namespace ap
