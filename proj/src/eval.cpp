#include "scirel/eval.hpp"

#include <iomanip>
#include <set>
#include <sstream>
#include <tuple>

namespace scirel::eval {

namespace {

using Key = std::tuple<std::string, RelationLabel, std::string, std::string>;

Key canonical_key(const strategies::RelationPrediction& rel) {
  if (rel.label == RelationLabel::SynonymOf) {
    // symmetric: order-normalize the argument ids
    auto lo = std::min(rel.arg1, rel.arg2);
    auto hi = std::max(rel.arg1, rel.arg2);
    return {rel.doc_id, rel.label, lo, hi};
  }
  return {rel.doc_id, rel.label, rel.arg1, rel.arg2};
}

std::set<Key> key_set(const std::vector<strategies::RelationPrediction>& relations,
                      const char* which) {
  std::set<Key> keys;
  for (const auto& rel : relations) {
    if (rel.label != RelationLabel::SynonymOf && rel.label != RelationLabel::HyponymOf)
      throw std::invalid_argument(std::string("non-canonical ") + which + " relation: " +
                                  std::string(label_name(rel.label)));
    keys.insert(canonical_key(rel));
  }
  return keys;
}

void finish(ClassScore& score) {
  score.precision =
      score.tp + score.fp == 0 ? 0.0 : static_cast<double>(score.tp) / (score.tp + score.fp);
  score.recall =
      score.tp + score.fn == 0 ? 0.0 : static_cast<double>(score.tp) / (score.tp + score.fn);
  score.f1 = score.precision + score.recall == 0.0
                 ? 0.0
                 : 2.0 * score.precision * score.recall / (score.precision + score.recall);
}

}  // namespace

ScoreReport score(const std::vector<strategies::RelationPrediction>& pred,
                  const std::vector<strategies::RelationPrediction>& gold) {
  auto pred_keys = key_set(pred, "predicted");
  auto gold_keys = key_set(gold, "gold");

  ScoreReport report;
  auto bucket = [&](const Key& key) -> ClassScore& {
    return std::get<1>(key) == RelationLabel::SynonymOf ? report.synonym : report.hyponym;
  };
  for (const auto& key : pred_keys) {
    if (gold_keys.count(key))
      ++bucket(key).tp;
    else
      ++bucket(key).fp;
  }
  for (const auto& key : gold_keys) {
    if (!pred_keys.count(key)) ++bucket(key).fn;
  }

  report.micro.tp = report.synonym.tp + report.hyponym.tp;
  report.micro.fp = report.synonym.fp + report.hyponym.fp;
  report.micro.fn = report.synonym.fn + report.hyponym.fn;
  finish(report.synonym);
  finish(report.hyponym);
  finish(report.micro);
  return report;
}

std::vector<strategies::RelationPrediction> gold_relations(const std::vector<Document>& docs) {
  std::vector<strategies::RelationPrediction> out;
  for (const auto& doc : docs) {
    for (const auto& rel : doc.gold)
      out.push_back({doc.id, rel.arg1, rel.arg2, rel.label, 1.0});
  }
  return out;
}

std::string report_csv(const ScoreReport& report) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "class,precision,recall,f1\n";
  auto row = [&](const char* name, const ClassScore& s) {
    out << name << ',' << s.precision << ',' << s.recall << ',' << s.f1 << '\n';
  };
  row("Synonym-of", report.synonym);
  row("Hyponym-of", report.hyponym);
  row("micro", report.micro);
  return out.str();
}

}  // namespace scirel::eval
