#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "fairmap/errors.hpp"
#include "fairmap/fairness.hpp"
#include "fairmap/ingest.hpp"
#include "support.hpp"

using namespace fairmap;

namespace {

// Reference values from tests/oracles/direction_oracle.py over the bundled
// fixtures (plain-Python one-pass componentwise sums).
constexpr double kNormalizedRawNorm = 2.546340290480355;
constexpr double kNormalizedDirection[] = {0.5802898156146908,  0.29881009981736956, 0.6377848841114525,
                                           -0.3422765322049518, 0.1327992768672924,  -0.0689298280263855,
                                           0.1554886143709414,  -0.05907446922721532};
constexpr double kNormalizedScores[] = {0.10117006997931442, 0.1768531022760204,  0.2903801838512626,
                                        -0.3177270158433005, -0.04361817215495992, -0.321044741648813,
                                        0.004396614971097161, -0.38629011161117616, -0.11824034921067209,
                                        0.2966456214630095};
constexpr double kRawNorm = 7.216771081212407;
constexpr double kRawDirection[] = {0.7037080550915469,   0.17289406636378057, 0.5848616967399639,
                                    -0.28683607034919484, 0.13271932670977699, -0.0298291354482308,
                                    0.1773991747825155,   -0.024286111898540266};
constexpr double kRawScores[] = {0.10922436922001431, 0.21309141353152353, 0.3448294251087381,
                                 -0.41246077675246284, 0.07617061905554809, -0.3015391381773428,
                                 -0.14570028099966792, -0.3913618811898946, -0.13972879765716162,
                                 0.3302616438395278};

std::vector<ConceptPair> orthonormal_pairs() {
  std::vector<ConceptPair> pairs;
  for (std::size_t i = 0; i < 5; ++i) {
    std::vector<double> pos(10, 0.0), neg(10, 0.0);
    pos[2 * i] = 1.0;
    neg[2 * i + 1] = 1.0;
    pairs.push_back({"c" + std::to_string(i), "pos" + std::to_string(i), "neg" + std::to_string(i), Vector(pos),
                     Vector(neg)});
  }
  return pairs;
}

std::vector<ConceptPair> random_pairs(std::mt19937_64& rng, std::size_t count, std::size_t dim) {
  std::vector<ConceptPair> pairs;
  for (std::size_t i = 0; i < count; ++i)
    pairs.push_back({"c" + std::to_string(i), "p" + std::to_string(i), "n" + std::to_string(i),
                     Vector(testing::gaussian(rng, dim)), Vector(testing::gaussian(rng, dim))});
  return pairs;
}

}  // namespace

TEST_CASE("default concept table is verbatim") {
  auto table = default_concept_table();
  REQUIRE(table.size() == 5);
  CHECK(table[0].name == "responsibility");
  CHECK(table[0].positive_text == "it was very respondible");
  CHECK(table[0].negative_text == "it was very irresponsible");
  CHECK(table[3].name == "reward");
  CHECK(table[3].positive_text == "was free to and rewarded");
  CHECK(table[3].negative_text == "was sent to prison and punished");
  std::vector<std::string> names;
  std::set<std::string> texts;
  for (const auto& p : table) {
    names.push_back(p.name);
    texts.insert(p.positive_text);
    texts.insert(p.negative_text);
    CHECK_FALSE(p.resolved());
  }
  CHECK(names == std::vector<std::string>{"responsibility", "joy", "societal-benefit", "reward", "benefit"});
  CHECK(texts.size() == 10);

  auto corrected = default_concept_table(ConceptTable::kCorrected);
  CHECK(corrected[0].positive_text == "it was very responsible");
  CHECK(corrected[1].positive_text == table[1].positive_text);
}

TEST_CASE("orthonormal concepts give the analytic direction") {
  for (bool normalize : {true, false}) {
    auto fd = build_fairness_direction(orthonormal_pairs(), normalize);
    CHECK(std::abs(fd.raw_norm - std::sqrt(10.0)) <= 1e-12);
    for (std::size_t k = 0; k < 10; ++k)
      CHECK(std::abs(fd.direction[k] - (k % 2 == 0 ? 1.0 : -1.0) / std::sqrt(10.0)) <= 1e-12);
    REQUIRE(fd.provenance.size() == 10);
    CHECK(fd.provenance[0] == ProvenanceEntry{"c0", 1, "pos0"});
    CHECK(fd.provenance[1] == ProvenanceEntry{"c0", -1, "neg0"});
    CHECK(fd.normalize_concepts == normalize);
  }
}

TEST_CASE("direction construction errors") {
  std::vector<ConceptPair> same{{"x", "a", "b", Vector{1, 2}, Vector{1, 2}}};
  CHECK_THROWS_AS(build_fairness_direction(same), DegenerateDirectionError);
  CHECK_THROWS_AS(build_fairness_direction(std::vector<ConceptPair>{}), EmptyInputError);
  std::vector<ConceptPair> unresolved{{"x", "a", "b", Vector{1, 2}, std::nullopt}};
  CHECK_THROWS_AS(build_fairness_direction(unresolved), InvalidArgumentError);
  std::vector<ConceptPair> ragged{{"x", "a", "b", Vector{1, 2}, Vector{1, 2, 3}}};
  CHECK_THROWS_AS(build_fairness_direction(ragged), DimensionError);
  std::vector<ConceptPair> zero{{"x", "a", "b", Vector{0, 0}, Vector{1, 2}}};
  CHECK_THROWS_AS(build_fairness_direction(zero, true), DegenerateVectorError);
  CHECK_NOTHROW(build_fairness_direction(zero, false));
}

TEST_CASE("fixture direction matches the independent summation") {
  auto cloud = load_precomputed(testing::data_dir() / "concept_embeddings.txt");
  auto pairs = resolve_concepts(default_concept_table(), cloud);
  auto points = load_precomputed(testing::data_dir() / "ten_points.txt");
  REQUIRE(points.size() == 10);
  struct Case {
    bool normalize;
    double raw_norm;
    const double* direction;
    const double* scores;
  };
  for (auto c : {Case{true, kNormalizedRawNorm, kNormalizedDirection, kNormalizedScores},
                 Case{false, kRawNorm, kRawDirection, kRawScores}}) {
    auto fd = build_fairness_direction(pairs, c.normalize);
    CHECK(std::abs(fd.raw_norm - c.raw_norm) <= 1e-9);
    REQUIRE(fd.direction.dim() == 8);
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(fd.direction[k] - c.direction[k]) <= 1e-9);
    CHECK(std::abs(norm(fd.direction) - 1.0) <= 1e-9);
    auto scores = score_corpus(points, fd);
    for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(scores.values()[i] - c.scores[i]) <= 1e-12);
  }
}

TEST_CASE("missing concept sentence is named") {
  auto cloud = load_precomputed(testing::data_dir() / "concept_embeddings.txt");
  try {
    resolve_concepts(default_concept_table(ConceptTable::kCorrected), cloud);
    FAIL("expected UnknownRecordError");
  } catch (const UnknownRecordError& e) {
    CHECK(std::string(e.what()).find("it was very responsible") != std::string::npos);
  }
}

TEST_CASE("swapping polarity negates the direction exactly") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    auto pairs = random_pairs(rng, 1 + trial % 7, 3 + trial % 20);
    auto swapped = pairs;
    for (auto& p : swapped) {
      std::swap(p.positive_text, p.negative_text);
      std::swap(p.positive_vec, p.negative_vec);
    }
    for (bool normalize : {true, false}) {
      auto a = build_fairness_direction(pairs, normalize), b = build_fairness_direction(swapped, normalize);
      CHECK(b.direction == -a.direction);
      CHECK(a.raw_norm == b.raw_norm);
    }
  }
}

TEST_CASE("pair order does not change the direction") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    auto pairs = random_pairs(rng, 2 + trial % 6, 4 + trial % 30);
    auto shuffled = pairs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto a = build_fairness_direction(pairs), b = build_fairness_direction(shuffled);
    for (std::size_t k = 0; k < a.direction.dim(); ++k) CHECK(std::abs(a.direction[k] - b.direction[k]) <= 1e-12);
  }
}

TEST_CASE("scores are bounded and flip with the direction") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 2 + trial % 16;
    auto fd = build_fairness_direction(random_pairs(rng, 3, dim));
    auto flipped = fd;
    flipped.direction = -fd.direction;
    Vector e(testing::gaussian(rng, dim));
    const double s = fairness_score(e, fd);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
    CHECK(fairness_score(e, flipped) == -s);
  }
  auto fd = build_fairness_direction(orthonormal_pairs());
  CHECK(fairness_score(fd.direction, fd) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fairness_score(-fd.direction, fd) == doctest::Approx(-1.0).epsilon(1e-15));
  std::vector<double> orth(10, 0.0);
  orth[0] = orth[1] = 1.0;
  CHECK(std::abs(fairness_score(Vector(orth), fd)) <= 1e-15);
}

TEST_CASE("score_corpus equals project_lens") {
  auto fd = build_fairness_direction(orthonormal_pairs());
  auto cloud = PointCloud::from_records(10, {{"a", fd.direction}, {"b", -fd.direction}});
  auto scores = score_corpus(cloud, fd);
  CHECK(scores.at("a") == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(scores.at("b") == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(scores == project_lens(cloud, fd.direction));
  CHECK(score_corpus(PointCloud(10), fd).empty());
}

TEST_CASE("concept table file round trip") {
  auto table = default_concept_table();
  auto text = format_concept_table(table);
  auto back = parse_concept_table(text);
  REQUIRE(back.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(back[i].name == table[i].name);
    CHECK(back[i].positive_text == table[i].positive_text);
    CHECK(back[i].negative_text == table[i].negative_text);
  }
  auto one = parse_concept_table("\n{\"name\":\"x\",\"positive_text\":\"good\",\"negative_text\":\"bad\"}\n\n");
  CHECK(one.size() == 1);
  CHECK_THROWS_AS(parse_concept_table("{\"name\":\"x\",\"positive_text\":\"same\",\"negative_text\":\"same\"}"),
                  ParseError);
  try {
    parse_concept_table("{\"name\":\"x\",\"positive_text\":\"a\",\"negative_text\":\"b\"}\nnot json\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("direction file round trip") {
  std::mt19937_64 rng(404);
  auto fd = build_fairness_direction(random_pairs(rng, 3, 6), false);
  auto back = parse_direction(format_direction(fd));
  CHECK(back.direction == fd.direction);
  CHECK(back.raw_norm == fd.raw_norm);
  CHECK(back.provenance == fd.provenance);
  CHECK(back.normalize_concepts == false);
  CHECK_THROWS_AS(parse_direction("{\"format\":\"fairmap.direction/1\",\"dim\":2,\"direction\":[1,1],"
                                  "\"raw_norm\":1,\"normalize_concepts\":true,\"provenance\":[]}"),
                  ParseError);
  CHECK_THROWS_AS(parse_direction("[]"), ParseError);
}
