#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "scirel/eval.hpp"

using namespace scirel;
namespace ev = scirel::eval;
namespace st = scirel::strategies;

namespace {

st::RelationPrediction rel(const std::string& doc, const std::string& a1,
                           const std::string& a2, RelationLabel label) {
  return {doc, a1, a2, label, 1.0};
}

// independent quadratic-time matcher used as the scoring oracle
ev::ScoreReport brute_force_score(std::vector<st::RelationPrediction> pred,
                                  std::vector<st::RelationPrediction> gold) {
  auto same = [](const st::RelationPrediction& x, const st::RelationPrediction& y) {
    if (x.doc_id != y.doc_id || x.label != y.label) return false;
    if (x.arg1 == y.arg1 && x.arg2 == y.arg2) return true;
    if (x.label == RelationLabel::SynonymOf && x.arg1 == y.arg2 && x.arg2 == y.arg1)
      return true;
    return false;
  };
  auto dedup = [&](std::vector<st::RelationPrediction> list) {
    std::vector<st::RelationPrediction> out;
    for (const auto& r : list) {
      bool seen = false;
      for (const auto& kept : out)
        if (same(r, kept)) seen = true;
      if (!seen) out.push_back(r);
    }
    return out;
  };
  pred = dedup(pred);
  gold = dedup(gold);

  ev::ScoreReport report;
  std::vector<bool> gold_matched(gold.size(), false);
  for (const auto& p : pred) {
    auto& bucket = p.label == RelationLabel::SynonymOf ? report.synonym : report.hyponym;
    bool matched = false;
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (!gold_matched[g] && same(p, gold[g])) {
        gold_matched[g] = true;
        matched = true;
        break;
      }
    }
    matched ? ++bucket.tp : ++bucket.fp;
  }
  for (std::size_t g = 0; g < gold.size(); ++g) {
    if (gold_matched[g]) continue;
    auto& bucket =
        gold[g].label == RelationLabel::SynonymOf ? report.synonym : report.hyponym;
    ++bucket.fn;
  }
  report.micro.tp = report.synonym.tp + report.hyponym.tp;
  report.micro.fp = report.synonym.fp + report.hyponym.fp;
  report.micro.fn = report.synonym.fn + report.hyponym.fn;
  return report;
}

std::vector<st::RelationPrediction> random_relations(std::mt19937_64& rng, int max_size) {
  std::uniform_int_distribution<int> size_dist(0, max_size);
  std::uniform_int_distribution<int> doc_dist(0, 2), ent_dist(1, 6), label_dist(0, 1);
  std::vector<st::RelationPrediction> out;
  int n = size_dist(rng);
  for (int i = 0; i < n; ++i) {
    int a = ent_dist(rng);
    int b = ent_dist(rng);
    if (a == b) continue;
    out.push_back(rel("doc" + std::to_string(doc_dist(rng)), "T" + std::to_string(a),
                      "T" + std::to_string(b),
                      label_dist(rng) ? RelationLabel::SynonymOf
                                      : RelationLabel::HyponymOf));
  }
  return out;
}

}  // namespace

TEST_CASE("perfect prediction scores ones") {
  std::vector<st::RelationPrediction> gold{rel("d", "A", "B", RelationLabel::SynonymOf)};
  auto report = ev::score(gold, gold);
  CHECK(report.synonym.precision == 1.0);
  CHECK(report.synonym.recall == 1.0);
  CHECK(report.synonym.f1 == 1.0);
  CHECK(report.micro.f1 == 1.0);
  CHECK(report.hyponym.f1 == 0.0);  // no hyponym relations at all: 0/0 -> 0
}

TEST_CASE("hyponym direction matters") {
  auto report = ev::score({rel("d", "A", "B", RelationLabel::HyponymOf)},
                          {rel("d", "B", "A", RelationLabel::HyponymOf)});
  CHECK(report.hyponym.tp == 0);
  CHECK(report.hyponym.fp == 1);
  CHECK(report.hyponym.fn == 1);
  CHECK(report.hyponym.f1 == 0.0);
}

TEST_CASE("synonym matching is symmetric") {
  auto report = ev::score({rel("d", "B", "A", RelationLabel::SynonymOf)},
                          {rel("d", "A", "B", RelationLabel::SynonymOf)});
  CHECK(report.synonym.tp == 1);
  CHECK(report.synonym.fp == 0);
  CHECK(report.synonym.fn == 0);
}

TEST_CASE("relations only match within the same document") {
  auto report = ev::score({rel("d1", "A", "B", RelationLabel::SynonymOf)},
                          {rel("d2", "A", "B", RelationLabel::SynonymOf)});
  CHECK(report.synonym.tp == 0);
  CHECK(report.synonym.fp == 1);
  CHECK(report.synonym.fn == 1);
}

TEST_CASE("empty sets give all zeros") {
  auto report = ev::score({}, {});
  CHECK(report.micro.precision == 0.0);
  CHECK(report.micro.recall == 0.0);
  CHECK(report.micro.f1 == 0.0);
}

TEST_CASE("non-canonical input is rejected") {
  CHECK_THROWS_AS(ev::score({rel("d", "A", "B", RelationLabel::HypernymOf)}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ev::score({}, {rel("d", "A", "B", RelationLabel::None)}),
                  std::invalid_argument);
}

TEST_CASE("a non-empty prediction set scores ones against itself") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    auto set = random_relations(rng, 30);
    if (set.empty()) continue;
    auto report = ev::score(set, set);
    CHECK(report.micro.precision == 1.0);
    CHECK(report.micro.recall == 1.0);
    CHECK(report.micro.f1 == 1.0);
    CHECK(report.micro.fp == 0);
    CHECK(report.micro.fn == 0);
  }
}

TEST_CASE("micro counts equal the sums of per-class counts") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    auto pred = random_relations(rng, 30);
    auto gold = random_relations(rng, 30);
    auto report = ev::score(pred, gold);
    CHECK(report.micro.tp == report.synonym.tp + report.hyponym.tp);
    CHECK(report.micro.fp == report.synonym.fp + report.hyponym.fp);
    CHECK(report.micro.fn == report.synonym.fn + report.hyponym.fn);
  }
}

TEST_CASE("score equals the brute-force matcher on random sets") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 300; ++trial) {
    auto pred = random_relations(rng, 40);
    auto gold = random_relations(rng, 40);
    auto fast = ev::score(pred, gold);
    auto slow = brute_force_score(pred, gold);
    for (auto [f, s] : {std::pair{&fast.synonym, &slow.synonym},
                        std::pair{&fast.hyponym, &slow.hyponym},
                        std::pair{&fast.micro, &slow.micro}}) {
      CHECK(f->tp == s->tp);
      CHECK(f->fp == s->fp);
      CHECK(f->fn == s->fn);
    }
  }
}

TEST_CASE("gold_relations flattens documents") {
  Document doc;
  doc.id = "d";
  doc.gold.push_back({RelationLabel::SynonymOf, "T1", "T2"});
  doc.gold.push_back({RelationLabel::HyponymOf, "T3", "T4"});
  auto gold = ev::gold_relations({doc});
  REQUIRE(gold.size() == 2);
  CHECK(gold[0].doc_id == "d");
  CHECK(gold[1].label == RelationLabel::HyponymOf);
}

TEST_CASE("report_csv layout") {
  auto report = ev::score({rel("d", "A", "B", RelationLabel::SynonymOf)},
                          {rel("d", "A", "B", RelationLabel::SynonymOf)});
  auto csv = ev::report_csv(report);
  CHECK(csv.find("class,precision,recall,f1\n") == 0);
  CHECK(csv.find("Synonym-of,1,1,1\n") != std::string::npos);
  CHECK(csv.find("micro,") != std::string::npos);
}
