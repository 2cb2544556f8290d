#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "scirel/strategies.hpp"

using namespace scirel;
namespace st = scirel::strategies;
namespace tp = scirel::textproc;

namespace {

const EntityMention kFirst{"A", EntityType::Material, 0, 1, "a"};
const EntityMention kSecond{"B", EntityType::Material, 10, 11, "b"};

// candidate with the gold annotation "hypo_id Hyponym-of hyper_id"; text order
// is always kFirst then kSecond
tp::Candidate hyponym_candidate(bool hyponym_first_in_text) {
  tp::Candidate cand;
  cand.doc_id = "d";
  cand.arg1 = kFirst;
  cand.arg2 = kSecond;
  cand.gold = RelationLabel::HyponymOf;
  cand.gold_reversed = !hyponym_first_in_text;
  return cand;
}

tp::Candidate synonym_candidate() {
  tp::Candidate cand;
  cand.doc_id = "d";
  cand.arg1 = kFirst;
  cand.arg2 = kSecond;
  cand.gold = RelationLabel::SynonymOf;
  return cand;
}

tp::Candidate none_candidate() {
  tp::Candidate cand;
  cand.doc_id = "d";
  cand.arg1 = kFirst;
  cand.arg2 = kSecond;
  return cand;
}

struct Expect {
  std::string arg1;
  std::string arg2;
  RelationLabel label;
};

void check_expansion(const tp::Candidate& cand, st::OrderingStrategy strategy,
                     const std::vector<Expect>& expected) {
  auto pairs = st::expand_training(cand, strategy);
  REQUIRE(pairs.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(pairs[i].arg1.id == expected[i].arg1);
    CHECK(pairs[i].arg2.id == expected[i].arg2);
    CHECK(pairs[i].label == expected[i].label);
    CHECK(pairs[i].text_order == (pairs[i].arg1.start < pairs[i].arg2.start));
  }
}

}  // namespace

// The ordering-strategy table, hyponym block. Annotation: X Hyponym-of Y.
// Column 1: hyponym X appears first in the text; column 2: hypernym first.
TEST_CASE("hyponym expansion under every strategy and text order") {
  using S = st::OrderingStrategy;
  const auto hypo = RelationLabel::HyponymOf;
  const auto hyper = RelationLabel::HypernymOf;
  const auto none = RelationLabel::None;

  // text ... X ... Y ...  (gold: A=X=kFirst is the hyponym)
  check_expansion(hyponym_candidate(true), S::CorrectOrder, {{"A", "B", hypo}});
  check_expansion(hyponym_candidate(true), S::CorrectOrderNegSampling,
                  {{"A", "B", hypo}, {"B", "A", none}});
  check_expansion(hyponym_candidate(true), S::FixedOrder, {{"A", "B", hypo}});
  check_expansion(hyponym_candidate(true), S::AnyOrder,
                  {{"A", "B", hypo}, {"B", "A", hyper}});

  // text ... Y ... X ...  (gold hyponym X=kSecond appears second)
  check_expansion(hyponym_candidate(false), S::CorrectOrder, {{"B", "A", hypo}});
  check_expansion(hyponym_candidate(false), S::CorrectOrderNegSampling,
                  {{"B", "A", hypo}, {"A", "B", none}});
  check_expansion(hyponym_candidate(false), S::FixedOrder, {{"A", "B", hyper}});
  check_expansion(hyponym_candidate(false), S::AnyOrder,
                  {{"A", "B", hyper}, {"B", "A", hypo}});
}

TEST_CASE("synonym expansion under every strategy") {
  using S = st::OrderingStrategy;
  const auto syn = RelationLabel::SynonymOf;
  auto cand = synonym_candidate();
  check_expansion(cand, S::CorrectOrder, {{"A", "B", syn}});
  check_expansion(cand, S::CorrectOrderNegSampling, {{"A", "B", syn}, {"B", "A", syn}});
  check_expansion(cand, S::FixedOrder, {{"A", "B", syn}});
  check_expansion(cand, S::AnyOrder, {{"A", "B", syn}, {"B", "A", syn}});
}

TEST_CASE("a gold None candidate yields one text-order pair everywhere") {
  using S = st::OrderingStrategy;
  for (auto strategy : {S::CorrectOrder, S::CorrectOrderNegSampling, S::FixedOrder, S::AnyOrder})
    check_expansion(none_candidate(), strategy, {{"A", "B", RelationLabel::None}});
}

TEST_CASE("label inventories per strategy and scope") {
  using S = st::OrderingStrategy;
  CHECK(st::LabelInventory::make(S::CorrectOrder).size() == 3);
  CHECK(st::LabelInventory::make(S::CorrectOrderNegSampling).size() == 3);
  CHECK(st::LabelInventory::make(S::FixedOrder).size() == 4);
  CHECK(st::LabelInventory::make(S::AnyOrder).size() == 4);
  auto inv = st::LabelInventory::make(S::FixedOrder);
  CHECK(inv.id(RelationLabel::None) == 0);
  CHECK(inv.label(inv.id(RelationLabel::HypernymOf)) == RelationLabel::HypernymOf);
  CHECK_THROWS_AS(st::LabelInventory::make(S::CorrectOrder).id(RelationLabel::HypernymOf),
                  std::invalid_argument);

  auto hypo_only = st::LabelInventory::make(S::FixedOrder, st::LabelScope::Hyponym);
  CHECK(hypo_only.labels == std::vector<RelationLabel>{RelationLabel::None,
                                                       RelationLabel::HyponymOf,
                                                       RelationLabel::HypernymOf});
  auto syn_only = st::LabelInventory::make(S::AnyOrder, st::LabelScope::Synonym);
  CHECK(syn_only.labels ==
        std::vector<RelationLabel>{RelationLabel::None, RelationLabel::SynonymOf});
}

namespace {

std::vector<tp::Example> examples_with_counts(const st::LabelInventory& inventory,
                                              const std::vector<long>& counts) {
  std::vector<tp::Example> out;
  for (std::size_t label = 0; label < counts.size(); ++label) {
    for (long i = 0; i < counts[label]; ++i) {
      tp::Example ex;
      ex.label_id = static_cast<int>(label);
      ex.doc_id = std::to_string(label) + "_" + std::to_string(i);
      out.push_back(ex);
    }
  }
  (void)inventory;
  return out;
}

std::vector<long> count_labels(const std::vector<tp::Example>& examples, std::size_t classes) {
  std::vector<long> counts(classes, 0);
  for (const auto& ex : examples) ++counts.at(static_cast<std::size_t>(ex.label_id));
  return counts;
}

}  // namespace

TEST_CASE("upsample duplicates each positive class to the requested ratio") {
  auto inv = st::LabelInventory::make(st::OrderingStrategy::CorrectOrder);

  SUBCASE("10 positives vs 100 None at ratio 3") {
    auto examples = examples_with_counts(inv, {100, 0, 10});
    Warnings warnings;
    auto up = st::upsample(examples, 3.0, inv, &warnings);
    auto counts = count_labels(up, 3);
    CHECK(counts[0] == 100);              // never touches None
    CHECK(counts[2] == 10 * 30);          // ceil(3*100/10) = 30
    CHECK(warnings.size() == 1);          // the empty synonym class
  }
  SUBCASE("class already satisfying the ratio is unchanged") {
    auto examples = examples_with_counts(inv, {10, 40, 35});
    auto up = st::upsample(examples, 3.0, inv, nullptr);
    CHECK(count_labels(up, 3) == std::vector<long>{10, 40, 35 * 1});
  }
  SUBCASE("duplication factors on the published class sizes") {
    auto examples = examples_with_counts(inv, {5355, 253, 420});
    auto up = st::upsample(examples, 0.5, inv, nullptr);
    auto counts = count_labels(up, 3);
    CHECK(counts[1] == 253 * 11);  // ceil(0.5*5355/253) = 11
    CHECK(counts[2] == 420 * 7);   // ceil(0.5*5355/420) = 7
  }
  SUBCASE("ratio must be positive") {
    CHECK_THROWS_AS(st::upsample({}, 0.0, inv, nullptr), std::invalid_argument);
  }
}

TEST_CASE("upsample reaches the ratio bound on random counts") {
  std::mt19937_64 rng(31);
  auto inv = st::LabelInventory::make(st::OrderingStrategy::FixedOrder);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<long> none(1, 200);
    std::uniform_int_distribution<long> pos(0, 40);
    std::uniform_real_distribution<double> ratio_dist(0.2, 4.0);
    std::vector<long> counts{none(rng), pos(rng), pos(rng), pos(rng)};
    double ratio = ratio_dist(rng);
    auto up = st::upsample(examples_with_counts(inv, counts), ratio, inv, nullptr);
    auto after = count_labels(up, 4);
    CHECK(after[0] == counts[0]);
    for (std::size_t c = 1; c < 4; ++c) {
      if (counts[c] == 0) {
        CHECK(after[c] == 0);
        continue;
      }
      CHECK(static_cast<double>(after[c]) / static_cast<double>(counts[0]) >=
            ratio - 1e-12);
      long k = after[c] / counts[c];
      CHECK(after[c] == counts[c] * k);  // uniform duplication
      CHECK(k == static_cast<long>(std::ceil(ratio * static_cast<double>(counts[0]) /
                                             static_cast<double>(counts[c]))));
    }
  }
}

namespace {

st::Prediction make_prediction(const std::string& a1, const std::string& a2,
                               RelationLabel label, double prob, bool text_order) {
  st::LabeledPair pair;
  pair.doc_id = "d";
  pair.arg1 = {a1, EntityType::Material, text_order ? 0u : 10u, text_order ? 1u : 11u, a1};
  pair.arg2 = {a2, EntityType::Material, text_order ? 10u : 0u, text_order ? 11u : 1u, a2};
  pair.label = label;
  pair.text_order = text_order;
  return {pair, prob};
}

}  // namespace

TEST_CASE("decode rewrites Hypernym-of and keeps positives over None") {
  SUBCASE("hypernym rewrite") {
    auto decoded = st::decode({make_prediction("B", "A", RelationLabel::HypernymOf, 0.9, true)},
                              st::EvalStrategy::FixedOrder);
    REQUIRE(decoded.size() == 1);
    CHECK(decoded[0].label == RelationLabel::HyponymOf);
    CHECK(decoded[0].arg1 == "A");
    CHECK(decoded[0].arg2 == "B");
    CHECK(decoded[0].prob == doctest::Approx(0.9));
  }
  SUBCASE("conflicting directions resolve by probability") {
    auto decoded = st::decode({make_prediction("A", "B", RelationLabel::HyponymOf, 0.6, true),
                               make_prediction("B", "A", RelationLabel::HyponymOf, 0.7, false)},
                              st::EvalStrategy::AnyOrder);
    REQUIRE(decoded.size() == 1);
    CHECK(decoded[0].label == RelationLabel::HyponymOf);
    CHECK(decoded[0].arg1 == "B");
    CHECK(decoded[0].arg2 == "A");
    CHECK(decoded[0].prob == doctest::Approx(0.7));
  }
  SUBCASE("None from both orderings emits nothing") {
    auto decoded = st::decode({make_prediction("A", "B", RelationLabel::None, 0.9, true),
                               make_prediction("B", "A", RelationLabel::None, 0.9, false)},
                              st::EvalStrategy::AnyOrder);
    CHECK(decoded.empty());
  }
  SUBCASE("a positive beats None regardless of probability") {
    // the reversed-presentation query found a synonym at low confidence
    auto decoded = st::decode({make_prediction("A", "B", RelationLabel::None, 0.99, true),
                               make_prediction("B", "A", RelationLabel::SynonymOf, 0.2, false)},
                              st::EvalStrategy::AnyOrder);
    REQUIRE(decoded.size() == 1);
    CHECK(decoded[0].label == RelationLabel::SynonymOf);
    // canonicalized back to text order, where A precedes B
    CHECK(decoded[0].arg1 == "A");
    CHECK(decoded[0].arg2 == "B");
  }
}

TEST_CASE("decoding already-canonical predictions is idempotent") {
  std::vector<st::Prediction> predictions = {
      make_prediction("A", "B", RelationLabel::HyponymOf, 0.8, true),
      make_prediction("C", "D", RelationLabel::SynonymOf, 0.6, true),
  };
  auto once = st::decode(predictions, st::EvalStrategy::AnyOrder);
  std::vector<st::Prediction> again;
  for (const auto& rel : once) {
    again.push_back(make_prediction(rel.arg1, rel.arg2, rel.label, rel.prob, true));
  }
  auto twice = st::decode(again, st::EvalStrategy::AnyOrder);
  CHECK(twice == once);
}

TEST_CASE("decode recovers the gold relations from any training expansion") {
  using S = st::OrderingStrategy;
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 400; ++trial) {
    std::uniform_int_distribution<int> pick(0, 3);
    auto strategy = static_cast<S>(pick(rng));
    int gold_kind = pick(rng);  // 0 none, 1 synonym, 2/3 hyponym fwd/rev

    tp::Candidate cand = none_candidate();
    if (gold_kind == 1) cand = synonym_candidate();
    if (gold_kind >= 2) cand = hyponym_candidate(gold_kind == 2);

    std::vector<st::Prediction> predictions;
    for (const auto& pair : st::expand_training(cand, strategy))
      predictions.push_back({pair, 1.0});
    auto decoded = st::decode(predictions, st::EvalStrategy::AnyOrder);

    if (gold_kind == 0) {
      CHECK(decoded.empty());
    } else {
      REQUIRE(decoded.size() == 1);
      if (gold_kind == 1) {
        CHECK(decoded[0].label == RelationLabel::SynonymOf);
      } else {
        CHECK(decoded[0].label == RelationLabel::HyponymOf);
        CHECK(decoded[0].arg1 == (gold_kind == 2 ? "A" : "B"));
        CHECK(decoded[0].arg2 == (gold_kind == 2 ? "B" : "A"));
      }
    }
  }
}

TEST_CASE("strategy names round-trip") {
  using S = st::OrderingStrategy;
  for (auto s : {S::CorrectOrder, S::CorrectOrderNegSampling, S::FixedOrder, S::AnyOrder})
    CHECK(st::parse_strategy(st::strategy_name(s)) == s);
  CHECK_THROWS_AS(st::parse_strategy("bogus"), std::invalid_argument);
  CHECK(st::parse_eval_strategy("any_order") == st::EvalStrategy::AnyOrder);
  CHECK(st::parse_label_scope("hyponym") == st::LabelScope::Hyponym);
}
