#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ap/util.hpp"

namespace ap {

inline constexpr const char* kRootType = "ROOT";
inline constexpr const char* kUnknownType = "UNKNOWN";
inline constexpr const char* kSpeechActType = "SPEECHACT";

// Is-a hierarchy over ontology type names. Every chain terminates at ROOT.
// UNKNOWN (the type of out-of-lexicon words) is always present with parent
// ROOT.
struct Ontology {
  std::unordered_map<std::string, std::string> parent;  // type -> parent; ROOT has no row

  bool contains(const std::string& type) const {
    return type == kRootType || parent.count(type) > 0;
  }
};

// File: one "child<TAB>parent" line per type; ROOT only appears as a
// parent. Cycles and unresolved parents are errors.
Ontology load_ontology(const std::string& path);
std::string ontology_to_text(const Ontology& onto);

// Follows parent links `levels` times, clamping at ROOT.
std::string ancestor(const std::string& type, int levels, const Ontology& onto);

enum class Pos { Verb, Noun, Adj, Pron, Prep, Det, Aux, Wh, Other };

Pos pos_from_string(const std::string& s);
std::string to_string(Pos pos);

struct LexEntry {
  Pos pos = Pos::Other;
  std::string onto_type;
};

struct Lexicon {
  std::unordered_map<std::string, LexEntry> entries;

  const LexEntry* find(const std::string& word) const {
    auto it = entries.find(word);
    return it == entries.end() ? nullptr : &it->second;
  }
};

// File: one "word<TAB>pos<TAB>onto_type" line per word.
Lexicon load_lexicon(const std::string& path);
std::string lexicon_to_text(const Lexicon& lex);

// Throws DataError if any lexicon type is missing from the ontology.
void validate_lexicon(const Lexicon& lex, const Ontology& onto);

enum class SpeechAct { WhQuestion, YesNoQuestion };
enum class Role { Content, Focus, Agent, Affected, Location, Mod };

std::string to_string(SpeechAct act);
std::string to_string(Role role);

struct GraphNode {
  std::string surface;     // surface word, or the wh unit ("how many")
  std::string onto_type;   // lexicon type, UNKNOWN, or SPEECHACT for the root
  int lift_level = 0;      // 0 = surface label; k > 0 = lifted k levels
  std::string lifted_type; // label when lift_level > 0

  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  int from = 0;
  int to = 0;
  Role role = Role::Mod;

  bool operator==(const GraphEdge&) const = default;
};

// Speech-act-rooted question parse. Edges form a tree rooted at node
// `root`. A WH question root has exactly one CONTENT and one FOCUS edge; a
// yes/no question root has exactly one CONTENT edge and no FOCUS edge.
struct SemanticGraph {
  SpeechAct speech_act = SpeechAct::WhQuestion;
  bool count_focus = false;  // "how many" / "how much"
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  int root = 0;
};

SpeechAct speech_act(const SemanticGraph& g);

enum class CanonMode { Surface, Typed };

// Deterministic order-independent serialization: depth-first from the root
// with child edges sorted by (role name, child form). In TYPED mode a
// lifted node emits its lifted type, otherwise its surface word. Two graphs
// match iff their canonical forms are equal strings.
std::string canonical_form(const SemanticGraph& g, CanonMode mode);

// Rule parser producing the speech-act/CONTENT/FOCUS graph shape.
//
//   speech act  first token in the wh set -> WH question ("how many"/"how
//               much" form a single count-flavored focus unit); first token
//               an AUX -> yes/no question; anything else is unsupported.
//   content     first non-auxiliary verb, else the last noun of the first
//               noun run, else the first pronoun.
//   arguments   every remaining noun/pronoun attaches to the content node:
//               LOCATION when the nearest preceding preposition run (over
//               determiners/adjectives) contains a locative preposition,
//               MOD for other preposition runs, AGENT before a content
//               verb, AFFECTED directly after it, MOD otherwise.
//   adjectives  attach via MOD to the nearest following noun node, else the
//               nearest preceding one, else the content node.
//
// Out-of-lexicon words are treated as nouns with type UNKNOWN.
class Parser {
 public:
  Parser(Lexicon lex, Ontology onto);

  SemanticGraph parse(const std::string& question) const;  // throws ParseError

  const Ontology& ontology() const { return onto_; }
  const Lexicon& lexicon() const { return lex_; }

 private:
  Lexicon lex_;
  Ontology onto_;
};

}  // namespace ap
