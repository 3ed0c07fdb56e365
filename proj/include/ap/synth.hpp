#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ap/corpus.hpp"
#include "ap/semparse.hpp"

namespace ap {

struct SynthConfig {
  std::uint64_t seed = 7;
  int train = 500;
  int val = 100;
  std::size_t embedding_dim = 48;
  std::size_t image_dim = 32;
};

// Templated QA world: each frame pairs paraphrase question templates
// (synonym verbs with a shared ontology ancestor, filler nouns with a
// shared type, optional droppable location phrases) with a skewed answer
// distribution. Everything is derived from the seed.
struct SynthBundle {
  Corpus corpus;
  EmbeddingTable embeddings;
  FeatureTable features;
  Lexicon lexicon;
  Ontology ontology;
  // Per corpus instance: which frame produced it and that frame's answer
  // inventory ({yes, no} for yes/no frames).
  std::vector<int> frame_of_instance;
  std::vector<std::vector<std::string>> frame_answers;
};

SynthBundle build_synth(const SynthConfig& cfg);

// Writes questions.jsonl, embeddings.txt, image_features.txt, ontology.tsv
// and lexicon.tsv under out_dir; byte-identical for equal configs.
void write_synth_corpus(const std::string& out_dir, const SynthConfig& cfg);

// Yes/no questions drawn from the same grammar.
std::vector<std::string> synth_yesno_questions(int n, std::uint64_t seed);

}  // namespace ap
