#include "scirel/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace scirel::strategies {

std::string_view strategy_name(OrderingStrategy s) {
  switch (s) {
    case OrderingStrategy::CorrectOrder: return "correct_order";
    case OrderingStrategy::CorrectOrderNegSampling: return "correct_order_neg_sampling";
    case OrderingStrategy::FixedOrder: return "fixed_order";
    case OrderingStrategy::AnyOrder: return "any_order";
  }
  throw std::logic_error("bad OrderingStrategy");
}

OrderingStrategy parse_strategy(std::string_view name) {
  if (name == "correct_order") return OrderingStrategy::CorrectOrder;
  if (name == "correct_order_neg_sampling") return OrderingStrategy::CorrectOrderNegSampling;
  if (name == "fixed_order") return OrderingStrategy::FixedOrder;
  if (name == "any_order") return OrderingStrategy::AnyOrder;
  throw std::invalid_argument("unknown ordering strategy: " + std::string(name));
}

std::string_view eval_strategy_name(EvalStrategy s) {
  return s == EvalStrategy::FixedOrder ? "fixed_order" : "any_order";
}

EvalStrategy parse_eval_strategy(std::string_view name) {
  if (name == "fixed_order") return EvalStrategy::FixedOrder;
  if (name == "any_order") return EvalStrategy::AnyOrder;
  throw std::invalid_argument("unknown evaluation strategy: " + std::string(name));
}

std::string_view label_scope_name(LabelScope s) {
  switch (s) {
    case LabelScope::All: return "all";
    case LabelScope::Hyponym: return "hyponym";
    case LabelScope::Synonym: return "synonym";
  }
  throw std::logic_error("bad LabelScope");
}

LabelScope parse_label_scope(std::string_view name) {
  if (name == "all") return LabelScope::All;
  if (name == "hyponym") return LabelScope::Hyponym;
  if (name == "synonym") return LabelScope::Synonym;
  throw std::invalid_argument("unknown label scope: " + std::string(name));
}

LabelInventory LabelInventory::make(OrderingStrategy strategy, LabelScope scope) {
  bool reversed = strategy == OrderingStrategy::FixedOrder ||
                  strategy == OrderingStrategy::AnyOrder;
  LabelInventory inv;
  inv.labels.push_back(RelationLabel::None);
  if (scope != LabelScope::Hyponym) inv.labels.push_back(RelationLabel::SynonymOf);
  if (scope != LabelScope::Synonym) {
    inv.labels.push_back(RelationLabel::HyponymOf);
    if (reversed) inv.labels.push_back(RelationLabel::HypernymOf);
  }
  return inv;
}

int LabelInventory::id(RelationLabel label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  throw std::invalid_argument(std::string("label outside inventory: ") +
                              std::string(label_name(label)));
}

RelationLabel LabelInventory::label(int id) const {
  return labels.at(static_cast<std::size_t>(id));
}

std::vector<LabeledPair> expand_training(const textproc::Candidate& candidate,
                                         OrderingStrategy strategy) {
  const std::string& doc = candidate.doc_id;
  const EntityMention& first = candidate.arg1;   // earlier in text
  const EntityMention& second = candidate.arg2;  // later in text

  auto pair = [&](const EntityMention& a1, const EntityMention& a2, RelationLabel label) {
    return LabeledPair{doc, a1, a2, label, &a1 == &first};
  };

  if (candidate.gold == RelationLabel::None)
    return {pair(first, second, RelationLabel::None)};

  if (candidate.gold == RelationLabel::SynonymOf) {
    switch (strategy) {
      case OrderingStrategy::CorrectOrder:
      case OrderingStrategy::FixedOrder:
        return {pair(first, second, RelationLabel::SynonymOf)};
      case OrderingStrategy::CorrectOrderNegSampling:
      case OrderingStrategy::AnyOrder:
        return {pair(first, second, RelationLabel::SynonymOf),
                pair(second, first, RelationLabel::SynonymOf)};
    }
  }

  // gold Hyponym-of: hypo is the hyponym mention, hyper the hypernym
  const EntityMention& hypo = candidate.gold_reversed ? second : first;
  const EntityMention& hyper = candidate.gold_reversed ? first : second;
  switch (strategy) {
    case OrderingStrategy::CorrectOrder:
      return {pair(hypo, hyper, RelationLabel::HyponymOf)};
    case OrderingStrategy::CorrectOrderNegSampling:
      return {pair(hypo, hyper, RelationLabel::HyponymOf),
              pair(hyper, hypo, RelationLabel::None)};
    case OrderingStrategy::FixedOrder:
      if (candidate.gold_reversed)
        return {pair(first, second, RelationLabel::HypernymOf)};
      return {pair(first, second, RelationLabel::HyponymOf)};
    case OrderingStrategy::AnyOrder:
      if (candidate.gold_reversed)
        return {pair(first, second, RelationLabel::HypernymOf),
                pair(second, first, RelationLabel::HyponymOf)};
      return {pair(first, second, RelationLabel::HyponymOf),
              pair(second, first, RelationLabel::HypernymOf)};
  }
  throw std::logic_error("bad OrderingStrategy");
}

std::vector<textproc::Example> upsample(const std::vector<textproc::Example>& examples,
                                        double ratio, const LabelInventory& inventory,
                                        Warnings* warnings) {
  if (ratio <= 0) throw std::invalid_argument("upsampling ratio must be positive");

  std::vector<long> counts(inventory.labels.size(), 0);
  for (const auto& example : examples)
    ++counts.at(static_cast<std::size_t>(example.label_id));
  long none = counts[0];

  std::vector<long> factor(inventory.labels.size(), 1);
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      warn(warnings, std::string("no examples for class ") +
                         std::string(label_name(inventory.labels[c])) +
                         "; skipped by upsampling");
      continue;
    }
    factor[c] = std::max<long>(
        1, static_cast<long>(std::ceil(ratio * static_cast<double>(none) /
                                       static_cast<double>(counts[c]))));
  }

  std::vector<textproc::Example> out;
  for (const auto& example : examples) {
    long k = factor.at(static_cast<std::size_t>(example.label_id));
    for (long i = 0; i < k; ++i) out.push_back(example);
  }
  return out;
}

namespace {

struct Canonical {
  RelationLabel label = RelationLabel::None;
  std::string arg1;
  std::string arg2;
  double prob = 0.0;
};

// Hypernym-of(x, y) is Hyponym-of(y, x); Synonym-of normalizes to text order.
Canonical canonicalize(const Prediction& prediction) {
  const LabeledPair& pair = prediction.pair;
  Canonical out;
  out.prob = prediction.prob;
  switch (pair.label) {
    case RelationLabel::None:
      out.label = RelationLabel::None;
      break;
    case RelationLabel::HyponymOf:
      out.label = RelationLabel::HyponymOf;
      out.arg1 = pair.arg1.id;
      out.arg2 = pair.arg2.id;
      break;
    case RelationLabel::HypernymOf:
      out.label = RelationLabel::HyponymOf;
      out.arg1 = pair.arg2.id;
      out.arg2 = pair.arg1.id;
      break;
    case RelationLabel::SynonymOf:
      out.label = RelationLabel::SynonymOf;
      out.arg1 = pair.text_order ? pair.arg1.id : pair.arg2.id;
      out.arg2 = pair.text_order ? pair.arg2.id : pair.arg1.id;
      break;
  }
  return out;
}

}  // namespace

std::vector<RelationPrediction> decode(const std::vector<Prediction>& predictions,
                                       EvalStrategy eval_strategy) {
  (void)eval_strategy;  // the merge rule below covers one or two orderings per pair
  std::map<std::tuple<std::string, std::string, std::string>, Canonical> best;
  for (const auto& prediction : predictions) {
    const LabeledPair& pair = prediction.pair;
    auto lo = std::min(pair.arg1.id, pair.arg2.id);
    auto hi = std::max(pair.arg1.id, pair.arg2.id);
    auto key = std::make_tuple(pair.doc_id, lo, hi);
    Canonical canonical = canonicalize(prediction);

    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(key, canonical);
      continue;
    }
    Canonical& current = it->second;
    if (current.label == RelationLabel::None) {
      // a positive prediction beats None regardless of probability
      if (canonical.label != RelationLabel::None) current = canonical;
    } else if (canonical.label != RelationLabel::None && canonical.prob > current.prob) {
      current = canonical;
    }
  }

  std::vector<RelationPrediction> out;
  for (const auto& [key, canonical] : best) {
    if (canonical.label == RelationLabel::None) continue;
    out.push_back({std::get<0>(key), canonical.arg1, canonical.arg2, canonical.label,
                   canonical.prob});
  }
  return out;
}

}  // namespace scirel::strategies
