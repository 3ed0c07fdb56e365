#include "ap/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "ap/textsim.hpp"

namespace ap {

namespace {

enum class FrameKind { Wh, Count, YesNo };

struct FrameDef {
  const char* name;
  FrameKind kind;
  std::vector<std::string> templates;
  std::map<std::string, std::vector<std::string>> slots;
  std::vector<std::string> answers;  // three for wh/count; ignored for yes/no
};

const std::vector<FrameDef>& frames() {
  static const std::vector<FrameDef> defs = {
      {"parked",
       FrameKind::Wh,
       {"what is {v} near the {f}", "what is {v} by the {f}",
        "what is {v} near the {f} in the {loc}"},
       {{"v", {"parked", "stationed"}},
        {"f", {"tree", "bush", "flower", "hedge"}},
        {"loc", {"yard", "street"}}},
       {"car", "bus", "truck"}},
      {"eating",
       FrameKind::Wh,
       {"what is {p} {v}", "what is {p} {v} in the {room}"},
       {{"p", {"he", "she"}},
        {"v", {"eating", "devouring", "munching"}},
        {"room", {"kitchen", "garage"}}},
       {"apple", "pizza", "sandwich"}},
      {"drinking",
       FrameKind::Wh,
       {"what is {p} {v} from the {c}", "what is {p} {v}"},
       {{"p", {"he", "she"}},
        {"v", {"drinking", "sipping"}},
        {"c", {"cup", "glass", "bottle"}}},
       {"water", "juice", "coffee"}},
      {"holding",
       FrameKind::Wh,
       {"what is the {per} {v}"},
       {{"per", {"man", "woman", "boy", "girl"}}, {"v", {"holding", "carrying", "gripping"}}},
       {"phone", "bag", "umbrella"}},
      {"riding",
       FrameKind::Wh,
       {"what is the {per} {v}"},
       {{"per", {"man", "woman", "rider"}}, {"v", {"riding", "driving"}}},
       {"horse", "scooter", "motorcycle"}},
      {"wearing",
       FrameKind::Wh,
       {"what is {p} {v}"},
       {{"p", {"he", "she"}}, {"v", {"wearing", "sporting"}}},
       {"hat", "coat", "scarf"}},
      {"chasing",
       FrameKind::Wh,
       {"what is the {a} {v}"},
       {{"a", {"dog", "cat"}}, {"v", {"chasing", "pursuing"}}},
       {"cat", "bird", "squirrel"}},
      {"growing",
       FrameKind::Wh,
       {"what is {v} in the {g}"},
       {{"v", {"growing", "sprouting"}}, {"g", {"yard", "field", "park"}}},
       {"grass", "flowers", "tree"}},
      {"resting",
       FrameKind::Wh,
       {"what is {v} on the {t}"},
       {{"v", {"resting", "sitting"}}, {"t", {"table", "bench", "sofa"}}},
       {"cup", "bowl", "plate"}},
      {"where_animal",
       FrameKind::Wh,
       {"where is the {s}"},
       {{"s", {"dog", "cat", "bird", "horse"}}},
       {"park", "yard", "street"}},
      {"where_parked",
       FrameKind::Wh,
       {"where is the {veh} {v}"},
       {{"veh", {"car", "bus", "truck"}}, {"v", {"parked", "stationed"}}},
       {"garage", "street", "driveway"}},
      {"who_driving",
       FrameKind::Wh,
       {"who is {v} the {veh}"},
       {{"v", {"driving", "riding"}}, {"veh", {"car", "bus", "truck"}}},
       {"man", "woman", "girl"}},
      {"color",
       FrameKind::Wh,
       {"what color is the {o}"},
       {{"o", {"hat", "coat", "scarf"}}},
       {"red", "blue", "white"}},
      {"putting",
       FrameKind::Wh,
       {"what is the {per} {v} in the {c}"},
       {{"per", {"man", "woman"}}, {"v", {"putting", "placing"}}, {"c", {"basket", "bowl"}}},
       {"apple", "toy", "book"}},
      {"on_tree",
       FrameKind::Wh,
       {"what is on the {tr}"},
       {{"tr", {"tree", "bush"}}},
       {"bird", "kite", "leaves"}},
      {"count_animals",
       FrameKind::Count,
       {"how many {pl} are there"},
       {{"pl", {"dogs", "cats", "birds"}}},
       {"2", "3", "4"}},
      {"count_people",
       FrameKind::Count,
       {"how many {pp} are in the {room}"},
       {{"pp", {"people", "children"}}, {"room", {"hallway", "bathroom"}}},
       {"1", "2", "5"}},
      {"count_food",
       FrameKind::Count,
       {"how many {fr} are on the {t}"},
       {{"fr", {"apples", "bananas"}}, {"t", {"table", "bench"}}},
       {"2", "4", "6"}},
      {"yn_color",
       FrameKind::YesNo,
       {"is the {s} {adj}"},
       {{"s", {"dog", "cat", "car", "hat"}}, {"adj", {"black", "white", "red"}}},
       {}},
      {"yn_activity",
       FrameKind::YesNo,
       {"is {p} {v}"},
       {{"p", {"he", "she"}}, {"v", {"running", "sleeping"}}},
       {}},
      {"yn_group",
       FrameKind::YesNo,
       {"are the {pl} {v}"},
       {{"pl", {"sheep", "cows"}}, {"v", {"sleeping", "napping"}}},
       {}},
      {"yn_location",
       FrameKind::YesNo,
       {"is the {veh} in the {room}"},
       {{"veh", {"car", "bike"}}, {"room", {"garage", "street"}}},
       {}},
  };
  return defs;
}

const char* kOntologyRows[][2] = {
    {"PHYS_OBJ", "ROOT"},    {"VEHICLE", "PHYS_OBJ"},  {"ANIMAL", "PHYS_OBJ"},
    {"FOOD", "PHYS_OBJ"},    {"PLANT", "PHYS_OBJ"},    {"FURNITURE", "PHYS_OBJ"},
    {"CONTAINER", "PHYS_OBJ"}, {"DEVICE", "PHYS_OBJ"}, {"CLOTHING", "PHYS_OBJ"},
    {"LIQUID", "PHYS_OBJ"},  {"TOOL", "PHYS_OBJ"},     {"PERSON", "ROOT"},
    {"PLACE", "ROOT"},       {"ROOM", "PLACE"},        {"OUTDOOR", "PLACE"},
    {"ATTR", "ROOT"},        {"COLOR_ATTR", "ATTR"},   {"SIZE_ATTR", "ATTR"},
    {"ACTION", "ROOT"},      {"CONSUME_ACT", "ACTION"}, {"EAT", "CONSUME_ACT"},
    {"DEVOUR", "CONSUME_ACT"}, {"MUNCH", "CONSUME_ACT"}, {"DRINK_ACT", "ACTION"},
    {"DRINK", "DRINK_ACT"},  {"SIP", "DRINK_ACT"},     {"PLACE_ACT", "ACTION"},
    {"PARK_ACT", "PLACE_ACT"}, {"STATION_ACT", "PLACE_ACT"}, {"SUPPORT_ACT", "ACTION"},
    {"REST_ACT", "SUPPORT_ACT"}, {"SIT_ACT", "SUPPORT_ACT"}, {"HOLD_GROUP", "ACTION"},
    {"HOLD_ACT", "HOLD_GROUP"}, {"CARRY_ACT", "HOLD_GROUP"}, {"GRIP_ACT", "HOLD_GROUP"},
    {"MOVE_ACT", "ACTION"},  {"RIDE_ACT", "MOVE_ACT"}, {"DRIVE_ACT", "MOVE_ACT"},
    {"RUN_ACT", "MOVE_ACT"}, {"WEAR_GROUP", "ACTION"}, {"WEAR_ACT", "WEAR_GROUP"},
    {"SPORT_ACT", "WEAR_GROUP"}, {"CHASE_GROUP", "ACTION"}, {"CHASE_ACT", "CHASE_GROUP"},
    {"PURSUE_ACT", "CHASE_GROUP"}, {"GROW_GROUP", "ACTION"}, {"GROW_ACT", "GROW_GROUP"},
    {"SPROUT_ACT", "GROW_GROUP"}, {"PUT_GROUP", "ACTION"}, {"PUT_ACT", "PUT_GROUP"},
    {"PLACE_V_ACT", "PUT_GROUP"}, {"SLEEP_GROUP", "ACTION"}, {"SLEEP_ACT", "SLEEP_GROUP"},
    {"NAP_ACT", "SLEEP_GROUP"}, {"WEATHER_ACT", "ACTION"}, {"RAIN_ACT", "WEATHER_ACT"},
    {"QUERY", "ROOT"},       {"FUNC", "ROOT"},        {"ANIMAL_GROUP", "ANIMAL"},
    {"PERSON_GROUP", "PERSON"}, {"FOOD_GROUP", "FOOD"},
};

struct LexRow {
  const char* word;
  const char* pos;
  const char* type;
};

const LexRow kLexiconRows[] = {
    // wh and function words
    {"what", "WH", "QUERY"},     {"where", "WH", "QUERY"},   {"who", "WH", "QUERY"},
    {"how", "WH", "QUERY"},      {"which", "WH", "QUERY"},   {"many", "OTHER", "QUERY"},
    {"much", "OTHER", "QUERY"},  {"is", "AUX", "FUNC"},      {"are", "AUX", "FUNC"},
    {"was", "AUX", "FUNC"},      {"were", "AUX", "FUNC"},    {"do", "AUX", "FUNC"},
    {"does", "AUX", "FUNC"},     {"did", "AUX", "FUNC"},     {"has", "AUX", "FUNC"},
    {"have", "AUX", "FUNC"},     {"can", "AUX", "FUNC"},     {"the", "DET", "FUNC"},
    {"a", "DET", "FUNC"},        {"an", "DET", "FUNC"},      {"in", "PREP", "FUNC"},
    {"on", "PREP", "FUNC"},      {"at", "PREP", "FUNC"},     {"near", "PREP", "FUNC"},
    {"by", "PREP", "FUNC"},      {"under", "PREP", "FUNC"},  {"behind", "PREP", "FUNC"},
    {"beside", "PREP", "FUNC"},  {"above", "PREP", "FUNC"},  {"below", "PREP", "FUNC"},
    {"front", "PREP", "FUNC"},   {"of", "PREP", "FUNC"},     {"from", "PREP", "FUNC"},
    {"with", "PREP", "FUNC"},    {"to", "PREP", "FUNC"},     {"there", "OTHER", "FUNC"},
    {"he", "PRON", "PERSON"},    {"she", "PRON", "PERSON"},  {"it", "PRON", "PHYS_OBJ"},
    {"they", "PRON", "PERSON"},
    // verbs
    {"parked", "VERB", "PARK_ACT"},     {"stationed", "VERB", "STATION_ACT"},
    {"eating", "VERB", "EAT"},          {"devouring", "VERB", "DEVOUR"},
    {"munching", "VERB", "MUNCH"},      {"drinking", "VERB", "DRINK"},
    {"sipping", "VERB", "SIP"},         {"holding", "VERB", "HOLD_ACT"},
    {"carrying", "VERB", "CARRY_ACT"},  {"gripping", "VERB", "GRIP_ACT"},
    {"riding", "VERB", "RIDE_ACT"},     {"driving", "VERB", "DRIVE_ACT"},
    {"running", "VERB", "RUN_ACT"},     {"wearing", "VERB", "WEAR_ACT"},
    {"sporting", "VERB", "SPORT_ACT"},  {"chasing", "VERB", "CHASE_ACT"},
    {"pursuing", "VERB", "PURSUE_ACT"}, {"growing", "VERB", "GROW_ACT"},
    {"sprouting", "VERB", "SPROUT_ACT"}, {"resting", "VERB", "REST_ACT"},
    {"sitting", "VERB", "SIT_ACT"},     {"putting", "VERB", "PUT_ACT"},
    {"placing", "VERB", "PLACE_V_ACT"}, {"sleeping", "VERB", "SLEEP_ACT"},
    {"napping", "VERB", "NAP_ACT"},     {"raining", "VERB", "RAIN_ACT"},
    // nouns
    {"car", "NOUN", "VEHICLE"},     {"bus", "NOUN", "VEHICLE"},
    {"bike", "NOUN", "VEHICLE"},    {"truck", "NOUN", "VEHICLE"},
    {"scooter", "NOUN", "VEHICLE"}, {"motorcycle", "NOUN", "VEHICLE"},
    {"dog", "NOUN", "ANIMAL"},      {"cat", "NOUN", "ANIMAL"},
    {"bird", "NOUN", "ANIMAL"},     {"horse", "NOUN", "ANIMAL"},
    {"sheep", "NOUN", "ANIMAL"},    {"cow", "NOUN", "ANIMAL"},
    {"cows", "NOUN", "ANIMAL"},
    {"squirrel", "NOUN", "ANIMAL"}, {"dogs", "NOUN", "ANIMAL_GROUP"},
    {"cats", "NOUN", "ANIMAL_GROUP"}, {"birds", "NOUN", "ANIMAL_GROUP"},
    {"apple", "NOUN", "FOOD"},      {"banana", "NOUN", "FOOD"},
    {"pizza", "NOUN", "FOOD"},      {"sandwich", "NOUN", "FOOD"},
    {"salad", "NOUN", "FOOD"},      {"cake", "NOUN", "FOOD"},
    {"apples", "NOUN", "FOOD_GROUP"}, {"bananas", "NOUN", "FOOD_GROUP"},
    {"tree", "NOUN", "PLANT"},      {"bush", "NOUN", "PLANT"},
    {"flower", "NOUN", "PLANT"},    {"hedge", "NOUN", "PLANT"},
    {"grass", "NOUN", "PLANT"},     {"flowers", "NOUN", "PLANT"},
    {"leaves", "NOUN", "PLANT"},    {"table", "NOUN", "FURNITURE"},
    {"chair", "NOUN", "FURNITURE"}, {"bench", "NOUN", "FURNITURE"},
    {"sofa", "NOUN", "FURNITURE"},  {"cup", "NOUN", "CONTAINER"},
    {"glass", "NOUN", "CONTAINER"}, {"bottle", "NOUN", "CONTAINER"},
    {"bowl", "NOUN", "CONTAINER"},  {"basket", "NOUN", "CONTAINER"},
    {"plate", "NOUN", "CONTAINER"}, {"bag", "NOUN", "CONTAINER"},
    {"phone", "NOUN", "DEVICE"},    {"laptop", "NOUN", "DEVICE"},
    {"camera", "NOUN", "DEVICE"},   {"clock", "NOUN", "DEVICE"},
    {"hat", "NOUN", "CLOTHING"},    {"coat", "NOUN", "CLOTHING"},
    {"scarf", "NOUN", "CLOTHING"},  {"glove", "NOUN", "CLOTHING"},
    {"water", "NOUN", "LIQUID"},    {"juice", "NOUN", "LIQUID"},
    {"coffee", "NOUN", "LIQUID"},   {"tea", "NOUN", "LIQUID"},
    {"hammer", "NOUN", "TOOL"},     {"ladder", "NOUN", "TOOL"},
    {"broom", "NOUN", "TOOL"},      {"umbrella", "NOUN", "TOOL"},
    {"man", "NOUN", "PERSON"},      {"woman", "NOUN", "PERSON"},
    {"boy", "NOUN", "PERSON"},      {"girl", "NOUN", "PERSON"},
    {"rider", "NOUN", "PERSON"},    {"driver", "NOUN", "PERSON"},
    {"people", "NOUN", "PERSON_GROUP"}, {"children", "NOUN", "PERSON_GROUP"},
    {"kitchen", "NOUN", "ROOM"},    {"bathroom", "NOUN", "ROOM"},
    {"garage", "NOUN", "ROOM"},     {"hallway", "NOUN", "ROOM"},
    {"park", "NOUN", "OUTDOOR"},    {"street", "NOUN", "OUTDOOR"},
    {"yard", "NOUN", "OUTDOOR"},    {"beach", "NOUN", "OUTDOOR"},
    {"field", "NOUN", "OUTDOOR"},   {"driveway", "NOUN", "OUTDOOR"},
    {"color", "NOUN", "ATTR"},      {"toy", "NOUN", "PHYS_OBJ"},
    {"book", "NOUN", "PHYS_OBJ"},   {"kite", "NOUN", "PHYS_OBJ"},
    // adjectives
    {"black", "ADJ", "COLOR_ATTR"}, {"white", "ADJ", "COLOR_ATTR"},
    {"red", "ADJ", "COLOR_ATTR"},   {"blue", "ADJ", "COLOR_ATTR"},
    {"green", "ADJ", "COLOR_ATTR"}, {"brown", "ADJ", "COLOR_ATTR"},
    {"big", "ADJ", "SIZE_ATTR"},    {"small", "ADJ", "SIZE_ATTR"},
    {"tall", "ADJ", "SIZE_ATTR"},
};

Ontology make_ontology() {
  Ontology onto;
  for (const auto& row : kOntologyRows) onto.parent.emplace(row[0], row[1]);
  onto.parent.emplace(kUnknownType, kRootType);
  return onto;
}

Lexicon make_lexicon() {
  Lexicon lex;
  for (const auto& row : kLexiconRows) {
    lex.entries.emplace(row.word, LexEntry{pos_from_string(row.pos), row.type});
  }
  return lex;
}

std::string render(const std::string& templ, const std::map<std::string, std::string>& fill) {
  std::string out;
  std::size_t i = 0;
  while (i < templ.size()) {
    if (templ[i] == '{') {
      std::size_t close = templ.find('}', i);
      out += fill.at(templ.substr(i + 1, close - i - 1));
      i = close + 1;
    } else {
      out.push_back(templ[i++]);
    }
  }
  return out;
}

std::string render_question(const FrameDef& frame, Rng& rng) {
  const std::string& templ = frame.templates[rng.below(frame.templates.size())];
  std::map<std::string, std::string> fill;
  for (const auto& [slot, words] : frame.slots) {
    fill[slot] = words[rng.below(words.size())];
  }
  std::string q = render(templ, fill);
  q[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(q[0])));
  return q + "?";
}

std::vector<double> unit_gaussian(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm > 0) {
    for (double& x : v) x /= norm;
  }
  return v;
}

}  // namespace

SynthBundle build_synth(const SynthConfig& cfg) {
  SynthBundle bundle;
  bundle.ontology = make_ontology();
  bundle.lexicon = make_lexicon();
  const auto& defs = frames();
  for (const auto& f : defs) {
    bundle.frame_answers.push_back(
        f.kind == FrameKind::YesNo ? std::vector<std::string>{"yes", "no"} : f.answers);
  }

  // Vocabulary: lexicon words plus digit answers. Words embed near a shared
  // direction per ontology family (verbs use their parent type so synonym
  // sets correlate, the way trained embeddings would), plus per-word noise.
  // Function words are scaled down so sentence averages are dominated by
  // content words.
  std::set<std::string> vocab;
  for (const auto& [word, entry] : bundle.lexicon.entries) {
    (void)entry;
    vocab.insert(word);
  }
  for (const char* d : {"1", "2", "3", "4", "5", "6", "7", "8", "9"}) vocab.insert(d);
  vocab.insert("yes");
  vocab.insert("no");
  Rng emb_rng(cfg.seed ^ 0x7061727365656431ull);
  bundle.embeddings.dim = cfg.embedding_dim;
  for (const auto& word : vocab) {
    const LexEntry* entry = bundle.lexicon.find(word);
    std::vector<double> v;
    if (entry) {
      std::string family = entry->pos == Pos::Verb
                               ? ancestor(entry->onto_type, 1, bundle.ontology)
                               : entry->onto_type;
      Rng fam_rng(cfg.seed ^ fnv1a("family:" + family));
      v = unit_gaussian(fam_rng, cfg.embedding_dim);
      auto noise = unit_gaussian(emb_rng, cfg.embedding_dim);
      double norm = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] += 0.35 * noise[i];
        norm += v[i] * v[i];
      }
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
    } else {
      v = unit_gaussian(emb_rng, cfg.embedding_dim);
    }
    bool function_word =
        entry && (entry->pos == Pos::Aux || entry->pos == Pos::Det || entry->pos == Pos::Prep ||
                  entry->pos == Pos::Wh || entry->pos == Pos::Other);
    if (function_word) {
      for (double& x : v) x *= 0.02;
    }
    bundle.embeddings.vectors.emplace(word, std::move(v));
  }

  // Answer direction vectors for image features.
  std::set<std::string> all_answers;
  for (const auto& answers : bundle.frame_answers) {
    for (const auto& a : answers) all_answers.insert(a);
  }
  std::map<std::string, std::vector<double>> answer_dir;
  for (const auto& a : all_answers) {
    Rng dir_rng(cfg.seed ^ fnv1a(a));
    answer_dir.emplace(a, unit_gaussian(dir_rng, cfg.image_dim));
  }
  std::vector<std::string> answer_pool(all_answers.begin(), all_answers.end());

  Rng rng(cfg.seed ^ 0x636f72707573ull);
  bundle.features.dim = cfg.image_dim;
  int total = cfg.train + cfg.val;
  for (int i = 0; i < total; ++i) {
    int f = static_cast<int>(rng.below(defs.size()));
    const FrameDef& frame = defs[f];
    const auto& answers = bundle.frame_answers[f];

    QaInstance inst;
    char qid[16];
    std::snprintf(qid, sizeof qid, "q%05d", i);
    inst.qid = qid;
    inst.image_id = std::string("img_") + qid;
    inst.question = render_question(frame, rng);
    inst.split = i < cfg.train ? Split::Train : Split::Val;

    std::string gold;
    if (frame.kind == FrameKind::YesNo) {
      gold = rng.below(10) < 7 ? "yes" : "no";
      std::string other = gold == "yes" ? "no" : "yes";
      inst.answers.assign(8, gold);
      inst.answers.insert(inst.answers.end(), 2, other);
    } else {
      std::uint64_t roll = rng.below(10);
      std::size_t gi = roll < 8 ? 0 : (roll == 8 ? 1 : 2);
      gold = answers[gi];
      inst.answers.assign(8, gold);
      inst.answers.push_back(answers[(gi + 1) % answers.size()]);
      inst.answers.push_back(answers[(gi + 2) % answers.size()]);
    }

    // Choices: the frame's own answers plus three outside distractors.
    std::set<std::string> chosen(answers.begin(), answers.end());
    std::vector<std::string> choices(answers.begin(), answers.end());
    while (choices.size() < answers.size() + 3) {
      const std::string& cand = answer_pool[rng.below(answer_pool.size())];
      if (chosen.insert(cand).second) choices.push_back(cand);
    }
    rng.shuffle(choices);
    inst.choices = std::move(choices);

    // Image feature: the gold answer's direction plus noise.
    std::vector<double> feat = answer_dir.at(gold);
    for (double& x : feat) x += 0.3 * rng.normal();
    double norm = 0.0;
    for (double x : feat) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : feat) x /= norm;
    bundle.features.vectors.emplace(inst.image_id, std::move(feat));

    bundle.frame_of_instance.push_back(f);
    bundle.corpus.by_qid.emplace(inst.qid, bundle.corpus.instances.size());
    bundle.corpus.instances.push_back(std::move(inst));
  }
  return bundle;
}

void write_synth_corpus(const std::string& out_dir, const SynthConfig& cfg) {
  SynthBundle bundle = build_synth(cfg);
  std::filesystem::create_directories(out_dir);
  auto path = [&](const char* name) { return out_dir + "/" + name; };

  save_corpus(bundle.corpus, path("questions.jsonl"));
  write_file(path("ontology.tsv"), ontology_to_text(bundle.ontology));
  write_file(path("lexicon.tsv"), lexicon_to_text(bundle.lexicon));

  std::map<std::string, std::vector<double>> sorted_emb(bundle.embeddings.vectors.begin(),
                                                        bundle.embeddings.vectors.end());
  std::ostringstream emb;
  emb << sorted_emb.size() << ' ' << bundle.embeddings.dim << '\n';
  for (const auto& [token, vec] : sorted_emb) {
    emb << token;
    for (double v : vec) emb << ' ' << format_double(v);
    emb << '\n';
  }
  write_file(path("embeddings.txt"), emb.str());

  std::ostringstream feats;
  for (const auto& inst : bundle.corpus.instances) {
    feats << inst.image_id;
    for (double v : bundle.features.vectors.at(inst.image_id)) {
      feats << ' ' << format_double(v);
    }
    feats << '\n';
  }
  write_file(path("image_features.txt"), feats.str());
}

std::vector<std::string> synth_yesno_questions(int n, std::uint64_t seed) {
  const auto& defs = frames();
  std::vector<const FrameDef*> yesno;
  for (const auto& f : defs) {
    if (f.kind == FrameKind::YesNo) yesno.push_back(&f);
  }
  Rng rng(seed ^ 0x7965736e6full);
  std::vector<std::string> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    out.push_back(render_question(*yesno[rng.below(yesno.size())], rng));
  }
  return out;
}

}  // namespace ap
