#include "doctest.h"

#include <set>

#include "ap/corpus.hpp"
#include "test_util.hpp"

using namespace ap;
using test_util::TempDir;

namespace {

std::string record(const std::string& qid, const std::string& question,
                   const std::string& answer, const std::string& split = "train",
                   int n_answers = 10) {
  std::string answers;
  for (int i = 0; i < n_answers; ++i) {
    if (i) answers += ",";
    answers += "\"" + answer + "\"";
  }
  return "{\"qid\":\"" + qid + "\",\"image_id\":\"img1\",\"question\":\"" + question +
         "\",\"answers\":[" + answers + "],\"split\":\"" + split + "\"}";
}

}  // namespace

TEST_CASE("load_corpus accepts valid records and indexes qids") {
  TempDir dir;
  auto path = dir.write("q.jsonl", record("q1", "What is this?", "cat") + "\n" +
                                       record("q2", "Is it red?", "yes", "val") + "\n");
  Corpus corpus = load_corpus(path);
  CHECK(corpus.size() == 2);
  REQUIRE(corpus.find("q1") != nullptr);
  REQUIRE(corpus.find("q2") != nullptr);
  CHECK(corpus.find("q1")->question == "What is this?");
  CHECK(corpus.find("q2")->split == Split::Val);
  CHECK(corpus.find("missing") == nullptr);
}

TEST_CASE("load_corpus rejects an answers list that is not length 10") {
  TempDir dir;
  auto path = dir.write("q.jsonl", record("q1", "What?", "cat") + "\n" +
                                       record("q2", "What?", "dog", "train", 9) + "\n");
  CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("answers must have length 10"),
                       DataError);
  try {
    load_corpus(path);
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("load_corpus rejects duplicate qids naming both lines") {
  TempDir dir;
  auto path =
      dir.write("q.jsonl", record("q1", "A?", "x") + "\n" + record("q1", "B?", "y") + "\n");
  try {
    load_corpus(path);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    std::string msg = e.what();
    CHECK(msg.find("duplicate qid") != std::string::npos);
    CHECK(msg.find(":2") != std::string::npos);
    CHECK(msg.find(":1") != std::string::npos);
  }
}

TEST_CASE("load_corpus rejects malformed records with line numbers") {
  TempDir dir;
  SUBCASE("invalid json") {
    auto path = dir.write("q.jsonl", record("q1", "A?", "x") + "\n{not json\n");
    CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains(":2"), DataError);
  }
  SUBCASE("empty question") {
    auto path = dir.write("q.jsonl", record("q1", "   ", "x") + "\n");
    CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("question"), DataError);
  }
  SUBCASE("bad split") {
    auto path = dir.write("q.jsonl", record("q1", "A?", "x", "dev") + "\n");
    CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("split"), DataError);
  }
  SUBCASE("choices with fewer than 2 entries") {
    auto path = dir.write(
        "q.jsonl",
        "{\"qid\":\"q1\",\"image_id\":\"i\",\"question\":\"A?\",\"answers\":[\"x\",\"x\","
        "\"x\",\"x\",\"x\",\"x\",\"x\",\"x\",\"x\",\"x\"],\"choices\":[\"x\"],\"split\":"
        "\"train\"}\n");
    CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("choices"), DataError);
  }
}

TEST_CASE("corpus round-trips through the JSONL schema") {
  TempDir dir;
  Corpus corpus;
  QaInstance inst = test_util::make_instance("q1", "What is parked?", "car", Split::Train);
  inst.choices = {"car", "bike", "bus"};
  test_util::add_instance(corpus, inst);
  test_util::add_instance(corpus,
                          test_util::make_instance("q2", "Is it red?", "yes", Split::Test));
  auto path = dir.file("out.jsonl");
  save_corpus(corpus, path);
  Corpus reloaded = load_corpus(path);
  CHECK(reloaded == corpus);
}

TEST_CASE("normalize_answer applies the documented rule set") {
  CHECK(normalize_answer("A Car.") == "car");
  CHECK(normalize_answer("  YES ") == "yes");
  CHECK(normalize_answer("the fire hydrant") == "fire hydrant");
  CHECK(normalize_answer("") == "");
  CHECK(normalize_answer("3 o'clock") == "3 oclock");
  CHECK(normalize_answer("  two   words ") == "two words");
}

TEST_CASE("normalize_answer is idempotent") {
  std::vector<std::string> fixtures = {"A Car.", "the the cat", "a a a", "an   apple!",
                                       "THE",    "the a an",    "42",    "!!!",
                                       "a"};
  for (const auto& s : fixtures) {
    CAPTURE(s);
    CHECK(normalize_answer(normalize_answer(s)) == normalize_answer(s));
  }
  Rng rng(11);
  const std::string pieces[] = {"a", "an", "the", "cat", "Dog!", "2", "  ", "x-y"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    std::uint64_t len = rng.below(6);
    for (std::uint64_t i = 0; i < len; ++i) {
      s += pieces[rng.below(std::size(pieces))];
      s += ' ';
    }
    CAPTURE(s);
    CHECK(normalize_answer(normalize_answer(s)) == normalize_answer(s));
  }
}

TEST_CASE("majority_answer picks the mode with lexicographic ties") {
  QaInstance inst;
  SUBCASE("clear mode") {
    inst.answers = {"cat", "cat", "cat", "cat", "cat", "cat", "dog", "dog", "dog", "dog"};
    CHECK(majority_answer(inst) == "cat");
  }
  SUBCASE("5-5 tie goes to the lexicographically smaller") {
    inst.answers = {"b", "b", "b", "b", "b", "a", "a", "a", "a", "a"};
    CHECK(majority_answer(inst) == "a");
  }
  SUBCASE("all distinct goes to the smallest") {
    inst.answers = {"j", "i", "h", "g", "f", "e", "d", "c", "b", "a"};
    CHECK(majority_answer(inst) == "a");
  }
  SUBCASE("counting happens on normalized answers") {
    inst.answers = {"A Cat", "cat!", "CAT", "dog", "dog", "dog", "x", "y", "z", "w"};
    CHECK(majority_answer(inst) == "cat");
  }
}

TEST_CASE("majority_answer output is a member of the normalized answers") {
  Rng rng(23);
  const std::string pool[] = {"a", "b", "c", "dog", "cat"};
  for (int trial = 0; trial < 200; ++trial) {
    QaInstance inst;
    for (int i = 0; i < 10; ++i) inst.answers.push_back(pool[rng.below(std::size(pool))]);
    std::string majority = majority_answer(inst);
    std::set<std::string> normalized;
    for (const auto& a : inst.answers) normalized.insert(normalize_answer(a));
    CHECK(normalized.count(majority) == 1);
  }
}

TEST_CASE("load_embeddings parses rows and validates them") {
  TempDir dir;
  SUBCASE("two rows, dim 2") {
    EmbeddingTable t = load_embeddings(dir.write("e.txt", "a 1 0\nb 0 1\n"));
    CHECK(t.dim == 2);
    CHECK(t.vectors.size() == 2);
    REQUIRE(t.find("a") != nullptr);
    CHECK((*t.find("a"))[0] == 1.0);
  }
  SUBCASE("tokens fold to lowercase") {
    EmbeddingTable t = load_embeddings(dir.write("e.txt", "Cat 1 0\n"));
    CHECK(t.find("cat") != nullptr);
  }
  SUBCASE("dimension mismatch names the line") {
    CHECK_THROWS_WITH_AS(load_embeddings(dir.write("e.txt", "a 1 0 3\nb 0 1\n")),
                         doctest::Contains(":2"), DataError);
  }
  SUBCASE("duplicate token names the token") {
    CHECK_THROWS_WITH_AS(load_embeddings(dir.write("e.txt", "a 1 0\na 0 1\n")),
                         doctest::Contains("duplicate token \"a\""), DataError);
  }
  SUBCASE("non-finite value rejected") {
    CHECK_THROWS_WITH_AS(load_embeddings(dir.write("e.txt", "a 1 nan\n")),
                         doctest::Contains("non-finite"), DataError);
  }
  SUBCASE("count dim header accepted and validated") {
    EmbeddingTable t = load_embeddings(dir.write("e.txt", "2 3\na 1 0 0\nb 0 1 0\n"));
    CHECK(t.dim == 3);
    CHECK(t.vectors.size() == 2);
    CHECK_THROWS_AS(load_embeddings(dir.write("bad.txt", "3 2\na 1 0\n")), DataError);
    CHECK_THROWS_AS(load_embeddings(dir.write("bad2.txt", "1 3\na 1 0\n")), DataError);
  }
}

TEST_CASE("load_image_features mirrors the embedding format") {
  TempDir dir;
  FeatureTable t = load_image_features(dir.write("f.txt", "img1 0.5 0.5\n"));
  CHECK(t.dim == 2);
  CHECK(t.at("img1")[1] == 0.5);
  CHECK_THROWS_WITH_AS(t.at("nope"), doctest::Contains("unknown image id"), DataError);

  FeatureTable empty = load_image_features(dir.write("empty.txt", ""));
  CHECK(empty.dim == 0);
  CHECK(empty.vectors.empty());
  CHECK_THROWS_AS(empty.at("img1"), DataError);
}
