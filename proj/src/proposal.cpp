#include "ap/proposal.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ap {

using nlohmann::json;

std::string to_string(Source s) {
  switch (s) {
    case Source::W2v: return "W2V";
    case Source::Sem: return "SEM";
    case Source::Agg: return "AGG";
    case Source::Bleu: return "BLEU";
  }
  return "?";
}

Source source_from_string(const std::string& s) {
  if (s == "W2V") return Source::W2v;
  if (s == "SEM") return Source::Sem;
  if (s == "AGG") return Source::Agg;
  if (s == "BLEU") return Source::Bleu;
  throw DataError("invalid proposal source: \"" + s + "\"");
}

namespace {

// Weighted-vote aggregation shared by the w2v and bleu proposers.
ProposalList aggregate_neighbors(const std::string& qid, Source source,
                                 const std::vector<std::pair<std::string, double>>& votes) {
  std::map<std::string, double> scores;
  for (const auto& [answer, weight] : votes) scores[answer] += weight;
  std::vector<ProposalEntry> entries;
  entries.reserve(scores.size());
  for (const auto& [answer, score] : scores) entries.push_back({answer, score, source});
  std::sort(entries.begin(), entries.end(), [](const ProposalEntry& a, const ProposalEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.answer < b.answer;
  });
  ProposalList list;
  list.qid = qid;
  list.source = source;
  list.entries = std::move(entries);
  return list;
}

}  // namespace

ProposalList propose_w2v(const std::string& qid, const std::string& question,
                         const W2vIndex& index, const EmbeddingTable& table,
                         std::size_t k_neighbors, W2vAggregation mode, const Corpus* corpus) {
  ProposalList empty;
  empty.qid = qid;
  empty.source = Source::W2v;
  if (index.entries.empty()) return empty;
  if (mode == W2vAggregation::AllAnswers && corpus == nullptr) {
    throw std::invalid_argument("propose_w2v: AllAnswers mode needs the corpus");
  }
  auto neighbors = topk_similar(question, index, table, k_neighbors);
  std::unordered_map<std::string, const W2vEntry*> by_qid;
  for (const auto& e : index.entries) by_qid.emplace(e.qid, &e);
  std::vector<std::pair<std::string, double>> votes;
  for (const auto& [nqid, score] : neighbors) {
    if (mode == W2vAggregation::MajorityAnswer) {
      votes.emplace_back(by_qid.at(nqid)->majority, score);
    } else {
      const QaInstance* inst = corpus->find(nqid);
      if (!inst) throw DataError("propose_w2v: qid \"" + nqid + "\" missing from corpus");
      for (const auto& a : inst->answers) votes.emplace_back(normalize_answer(a), score);
    }
  }
  return aggregate_neighbors(qid, Source::W2v, votes);
}

ProposalList propose_bleu(const std::string& qid, const std::string& question,
                          const Corpus& corpus, int max_n, std::size_t k_neighbors) {
  if (k_neighbors < 1) throw std::invalid_argument("propose_bleu: k_neighbors must be >= 1");
  struct Scored {
    const QaInstance* inst;
    double score;
  };
  std::vector<Scored> scored;
  for (const auto& inst : corpus.instances) {
    if (inst.split != Split::Train) continue;
    scored.push_back({&inst, bleu(inst.question, question, max_n)});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.inst->qid < b.inst->qid;
  });
  if (scored.size() > k_neighbors) scored.resize(k_neighbors);
  std::vector<std::pair<std::string, double>> votes;
  for (const auto& s : scored) votes.emplace_back(majority_answer(*s.inst), s.score);
  return aggregate_neighbors(qid, Source::Bleu, votes);
}

ProposalList alternate_merge(const ProposalList& a, const ProposalList& b) {
  if (a.qid != b.qid) {
    throw std::invalid_argument("alternate_merge: qid mismatch (\"" + a.qid + "\" vs \"" +
                                b.qid + "\")");
  }
  ProposalList out;
  out.qid = a.qid;
  out.source = Source::Agg;
  std::set<std::string> seen;
  auto push = [&](const ProposalEntry& e) {
    if (!seen.insert(e.answer).second) return;
    out.entries.push_back({e.answer, e.score, Source::Agg});
  };
  std::size_t n = std::max(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i < a.entries.size()) push(a.entries[i]);
    if (i < b.entries.size()) push(b.entries[i]);
  }
  return out;
}

ProposalList truncate(const ProposalList& p, int n) {
  if (n < 0) throw std::invalid_argument("truncate: n must be >= 0");
  ProposalList out = p;
  if (out.entries.size() > static_cast<std::size_t>(n)) out.entries.resize(n);
  out.cutoff = p.cutoff ? std::min(*p.cutoff, n) : n;
  return out;
}

std::string proposals_to_jsonl(const std::vector<ProposalList>& lists) {
  std::string out;
  for (const auto& list : lists) {
    json rec;
    rec["qid"] = list.qid;
    rec["source"] = to_string(list.source);
    json props = json::array();
    int rank = 1;
    for (const auto& e : list.entries) {
      props.push_back({{"rank", rank++}, {"answer", e.answer}, {"score", e.score}});
    }
    rec["proposals"] = std::move(props);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::vector<ProposalList> proposals_from_jsonl(const std::string& text,
                                               const std::string& origin) {
  std::vector<ProposalList> lists;
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
    ProposalList list;
    try {
      list.qid = rec.at("qid").get<std::string>();
      list.source = source_from_string(rec.at("source").get<std::string>());
      struct Item {
        int rank;
        ProposalEntry entry;
      };
      std::vector<Item> items;
      for (const auto& p : rec.at("proposals")) {
        Item item;
        item.rank = p.at("rank").get<int>();
        item.entry.answer = p.at("answer").get<std::string>();
        item.entry.score = p.at("score").get<double>();
        item.entry.source = list.source;
        items.push_back(std::move(item));
      }
      std::stable_sort(items.begin(), items.end(),
                       [](const Item& a, const Item& b) { return a.rank < b.rank; });
      for (auto& item : items) list.entries.push_back(std::move(item.entry));
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    lists.push_back(std::move(list));
  }
  return lists;
}

void save_proposals(const std::vector<ProposalList>& lists, const std::string& path) {
  write_file(path, proposals_to_jsonl(lists));
}

std::vector<ProposalList> load_proposals(const std::string& path) {
  return proposals_from_jsonl(read_file(path), path);
}

}  // namespace ap
