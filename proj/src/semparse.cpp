#include "ap/semparse.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "ap/textsim.hpp"

namespace ap {

namespace {

const std::set<std::string> kWhWords = {"what", "where", "who",  "why",
                                        "how",  "which", "when", "whose"};

const std::set<std::string> kLocativePreps = {"in",     "on",     "at",    "under", "near",
                                              "behind", "beside", "above", "below", "by"};

}  // namespace

Ontology load_ontology(const std::string& path) {
  Ontology onto;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::string where = path + ":" + std::to_string(lineno);
    auto fields = split_char(line, '\t');
    if (fields.size() != 2) {
      throw DataError(where + ": expected \"child<TAB>parent\"");
    }
    std::string child = trim(fields[0]);
    std::string par = trim(fields[1]);
    if (child.empty() || par.empty()) throw DataError(where + ": empty type name");
    if (child == kRootType) {
      throw DataError(where + ": ROOT may only appear as a parent");
    }
    if (!onto.parent.emplace(child, par).second) {
      throw DataError(where + ": duplicate type \"" + child + "\"");
    }
  }
  if (onto.parent.find(kUnknownType) == onto.parent.end()) {
    onto.parent.emplace(kUnknownType, kRootType);
  }
  // Every parent must resolve, and every chain must reach ROOT.
  for (const auto& [child, par] : onto.parent) {
    if (par != kRootType && onto.parent.find(par) == onto.parent.end()) {
      throw DataError("ontology: unresolved parent \"" + par + "\" of \"" + child + "\"");
    }
  }
  for (const auto& [start, unused] : onto.parent) {
    (void)unused;
    std::set<std::string> seen;
    std::string cur = start;
    while (cur != kRootType) {
      if (!seen.insert(cur).second) {
        throw DataError("ontology: cycle through \"" + cur + "\"");
      }
      cur = onto.parent.at(cur);
    }
  }
  return onto;
}

std::string ontology_to_text(const Ontology& onto) {
  std::map<std::string, std::string> sorted(onto.parent.begin(), onto.parent.end());
  std::string out;
  for (const auto& [child, par] : sorted) {
    out += child;
    out += '\t';
    out += par;
    out += '\n';
  }
  return out;
}

std::string ancestor(const std::string& type, int levels, const Ontology& onto) {
  if (levels < 1) throw std::invalid_argument("ancestor: levels must be >= 1");
  if (!onto.contains(type)) throw DataError("ancestor: unknown type \"" + type + "\"");
  std::string cur = type;
  for (int i = 0; i < levels && cur != kRootType; ++i) {
    cur = onto.parent.at(cur);
  }
  return cur;
}

Pos pos_from_string(const std::string& s) {
  if (s == "VERB") return Pos::Verb;
  if (s == "NOUN") return Pos::Noun;
  if (s == "ADJ") return Pos::Adj;
  if (s == "PRON") return Pos::Pron;
  if (s == "PREP") return Pos::Prep;
  if (s == "DET") return Pos::Det;
  if (s == "AUX") return Pos::Aux;
  if (s == "WH") return Pos::Wh;
  if (s == "OTHER") return Pos::Other;
  throw DataError("invalid part of speech: \"" + s + "\"");
}

std::string to_string(Pos pos) {
  switch (pos) {
    case Pos::Verb: return "VERB";
    case Pos::Noun: return "NOUN";
    case Pos::Adj: return "ADJ";
    case Pos::Pron: return "PRON";
    case Pos::Prep: return "PREP";
    case Pos::Det: return "DET";
    case Pos::Aux: return "AUX";
    case Pos::Wh: return "WH";
    case Pos::Other: return "OTHER";
  }
  return "?";
}

Lexicon load_lexicon(const std::string& path) {
  Lexicon lex;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::string where = path + ":" + std::to_string(lineno);
    auto fields = split_char(line, '\t');
    if (fields.size() != 3) {
      throw DataError(where + ": expected \"word<TAB>pos<TAB>onto_type\"");
    }
    std::string word = lower_ascii(trim(fields[0]));
    if (word.empty()) throw DataError(where + ": empty word");
    LexEntry entry;
    try {
      entry.pos = pos_from_string(trim(fields[1]));
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    entry.onto_type = trim(fields[2]);
    if (entry.onto_type.empty()) throw DataError(where + ": empty onto_type");
    if (!lex.entries.emplace(word, entry).second) {
      throw DataError(where + ": duplicate word \"" + word + "\"");
    }
  }
  return lex;
}

std::string lexicon_to_text(const Lexicon& lex) {
  std::map<std::string, LexEntry> sorted(lex.entries.begin(), lex.entries.end());
  std::string out;
  for (const auto& [word, entry] : sorted) {
    out += word;
    out += '\t';
    out += to_string(entry.pos);
    out += '\t';
    out += entry.onto_type;
    out += '\n';
  }
  return out;
}

void validate_lexicon(const Lexicon& lex, const Ontology& onto) {
  for (const auto& [word, entry] : lex.entries) {
    if (!onto.contains(entry.onto_type)) {
      throw DataError("lexicon: word \"" + word + "\" has type \"" + entry.onto_type +
                      "\" missing from the ontology");
    }
  }
}

std::string to_string(SpeechAct act) {
  return act == SpeechAct::WhQuestion ? "WH_QUESTION" : "YESNO_QUESTION";
}

std::string to_string(Role role) {
  switch (role) {
    case Role::Content: return "CONTENT";
    case Role::Focus: return "FOCUS";
    case Role::Agent: return "AGENT";
    case Role::Affected: return "AFFECTED";
    case Role::Location: return "LOCATION";
    case Role::Mod: return "MOD";
  }
  return "?";
}

SpeechAct speech_act(const SemanticGraph& g) { return g.speech_act; }

namespace {

std::string node_label(const SemanticGraph& g, int id, CanonMode mode) {
  const GraphNode& node = g.nodes[id];
  if (id == g.root) return to_string(g.speech_act);
  if (mode == CanonMode::Typed && node.lift_level > 0) return node.lifted_type;
  return node.surface;
}

std::string canon_node(const SemanticGraph& g, int id, CanonMode mode) {
  std::vector<std::string> children;
  for (const auto& e : g.edges) {
    if (e.from != id) continue;
    children.push_back(to_string(e.role) + ":" + canon_node(g, e.to, mode));
  }
  std::sort(children.begin(), children.end());
  std::string out = node_label(g, id, mode);
  if (!children.empty()) {
    out += "(";
    out += join(children, ",");
    out += ")";
  }
  return out;
}

}  // namespace

std::string canonical_form(const SemanticGraph& g, CanonMode mode) {
  return canon_node(g, g.root, mode);
}

Parser::Parser(Lexicon lex, Ontology onto) : lex_(std::move(lex)), onto_(std::move(onto)) {
  validate_lexicon(lex_, onto_);
}

namespace {

struct Token {
  std::string word;
  Pos pos;
  std::string type;
};

}  // namespace

SemanticGraph Parser::parse(const std::string& question) const {
  auto words = tokenize(question);
  if (words.empty()) throw ParseError("empty question");

  std::vector<Token> toks;
  toks.reserve(words.size());
  for (const auto& w : words) {
    if (const LexEntry* entry = lex_.find(w)) {
      toks.push_back({w, entry->pos, entry->onto_type});
    } else {
      toks.push_back({w, Pos::Noun, kUnknownType});
    }
  }

  SemanticGraph g;
  std::size_t wh_end = 0;  // tokens [0, wh_end) form the wh unit
  if (kWhWords.count(toks[0].word)) {
    g.speech_act = SpeechAct::WhQuestion;
    wh_end = 1;
    if (toks[0].word == "how" && toks.size() > 1 &&
        (toks[1].word == "many" || toks[1].word == "much")) {
      wh_end = 2;
      g.count_focus = true;
    }
  } else if (toks[0].pos == Pos::Aux) {
    g.speech_act = SpeechAct::YesNoQuestion;
  } else {
    throw ParseError("unsupported speech act: question must start with a wh word or an auxiliary (got \"" +
                     toks[0].word + "\")");
  }

  g.nodes.push_back({to_string(g.speech_act), kSpeechActType, 0, ""});
  g.root = 0;

  // Content: first non-auxiliary verb; else the head noun (last noun of the
  // first noun run); else the first pronoun.
  int content_idx = -1;
  bool content_is_verb = false;
  for (std::size_t i = wh_end; i < toks.size(); ++i) {
    if (toks[i].pos == Pos::Verb) {
      content_idx = static_cast<int>(i);
      content_is_verb = true;
      break;
    }
  }
  if (content_idx < 0) {
    for (std::size_t i = wh_end; i < toks.size(); ++i) {
      if (toks[i].pos != Pos::Noun) continue;
      std::size_t j = i;
      while (j + 1 < toks.size() && toks[j + 1].pos == Pos::Noun) ++j;
      content_idx = static_cast<int>(j);
      break;
    }
  }
  if (content_idx < 0) {
    for (std::size_t i = wh_end; i < toks.size(); ++i) {
      if (toks[i].pos == Pos::Pron) {
        content_idx = static_cast<int>(i);
        break;
      }
    }
  }
  if (content_idx < 0) throw ParseError("no content word in question");

  std::vector<int> node_of(toks.size(), -1);
  auto add_node = [&](std::size_t tok_idx) {
    node_of[tok_idx] = static_cast<int>(g.nodes.size());
    g.nodes.push_back({toks[tok_idx].word, toks[tok_idx].type, 0, ""});
    return node_of[tok_idx];
  };

  int content_node = add_node(static_cast<std::size_t>(content_idx));
  g.edges.push_back({g.root, content_node, Role::Content});

  if (g.speech_act == SpeechAct::WhQuestion) {
    std::string unit = toks[0].word;
    for (std::size_t i = 1; i < wh_end; ++i) unit += " " + toks[i].word;
    int focus_node = static_cast<int>(g.nodes.size());
    g.nodes.push_back({unit, toks[0].type, 0, ""});
    g.edges.push_back({g.root, focus_node, Role::Focus});
  }

  // Remaining nouns and pronouns attach to the content node.
  for (std::size_t i = wh_end; i < toks.size(); ++i) {
    if (static_cast<int>(i) == content_idx) continue;
    if (toks[i].pos != Pos::Noun && toks[i].pos != Pos::Pron) continue;
    // Scan left over determiners/adjectives to the introducing token.
    int j = static_cast<int>(i) - 1;
    while (j >= static_cast<int>(wh_end) &&
           (toks[j].pos == Pos::Det || toks[j].pos == Pos::Adj)) {
      --j;
    }
    Role role = Role::Mod;
    if (j >= static_cast<int>(wh_end) && toks[j].pos == Pos::Prep) {
      bool locative = false;
      int k = j;
      while (k >= static_cast<int>(wh_end) && toks[k].pos == Pos::Prep) {
        if (kLocativePreps.count(toks[k].word)) locative = true;
        --k;
      }
      role = locative ? Role::Location : Role::Mod;
    } else if (content_is_verb && static_cast<int>(i) < content_idx) {
      role = Role::Agent;
    } else if (content_is_verb && j == content_idx) {
      role = Role::Affected;
    }
    int node = add_node(i);
    g.edges.push_back({content_node, node, role});
  }

  // Adjectives modify the nearest following noun node, else the nearest
  // preceding one, else the content node.
  for (std::size_t i = wh_end; i < toks.size(); ++i) {
    if (toks[i].pos != Pos::Adj) continue;
    int target = -1;
    for (std::size_t k = i + 1; k < toks.size(); ++k) {
      if (toks[k].pos == Pos::Noun && node_of[k] >= 0) {
        target = node_of[k];
        break;
      }
    }
    if (target < 0) {
      for (int k = static_cast<int>(i) - 1; k >= static_cast<int>(wh_end); --k) {
        if (toks[k].pos == Pos::Noun && node_of[k] >= 0) {
          target = node_of[k];
          break;
        }
      }
    }
    if (target < 0) target = content_node;
    int node = add_node(i);
    g.edges.push_back({target, node, Role::Mod});
  }

  return g;
}

}  // namespace ap
