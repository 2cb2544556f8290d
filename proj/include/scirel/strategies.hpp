#ifndef SCIREL_STRATEGIES_HPP
#define SCIREL_STRATEGIES_HPP

#include <string>
#include <string_view>
#include <vector>

#include "scirel/textproc.hpp"
#include "scirel/types.hpp"

namespace scirel::strategies {

enum class OrderingStrategy {
  CorrectOrder,
  CorrectOrderNegSampling,
  FixedOrder,
  AnyOrder,
};

enum class EvalStrategy { FixedOrder, AnyOrder };

// Restricts the label inventory for binary classifiers.
enum class LabelScope { All, Hyponym, Synonym };

std::string_view strategy_name(OrderingStrategy s);
OrderingStrategy parse_strategy(std::string_view name);
std::string_view eval_strategy_name(EvalStrategy s);
EvalStrategy parse_eval_strategy(std::string_view name);
std::string_view label_scope_name(LabelScope s);
LabelScope parse_label_scope(std::string_view name);

// Ordered relation class inventory; None is always id 0. Hypernym-of is
// present only for strategies that train on reversed orderings.
struct LabelInventory {
  std::vector<RelationLabel> labels;

  static LabelInventory make(OrderingStrategy strategy, LabelScope scope = LabelScope::All);
  int id(RelationLabel label) const;        // throws on labels outside the inventory
  RelationLabel label(int id) const;
  int size() const { return static_cast<int>(labels.size()); }
  bool operator==(const LabelInventory&) const = default;
};

// A training/query example at the pair level. Argument order is the order the
// model sees; the label always reads "arg1 LABEL arg2", with
// Hypernym-of(x, y) equivalent to Hyponym-of(y, x). `text_order` is true when
// arg1 precedes arg2 in the text.
struct LabeledPair {
  std::string doc_id;
  EntityMention arg1;
  EntityMention arg2;
  RelationLabel label = RelationLabel::None;
  bool text_order = true;

  bool operator==(const LabeledPair&) const = default;
};

// Expands one annotated candidate into training pairs per the ordering
// strategy. A gold None candidate yields one text-order pair under every
// strategy.
std::vector<LabeledPair> expand_training(const textproc::Candidate& candidate,
                                         OrderingStrategy strategy);

// Duplicates every example of each positive class k times,
// k = max(1, ceil(ratio * |None| / |class|)), so count/|None| >= ratio.
// Pure duplication in deterministic order; never deletes. A positive class
// with zero examples is skipped with a warning.
std::vector<textproc::Example> upsample(const std::vector<textproc::Example>& examples,
                                        double ratio, const LabelInventory& inventory,
                                        Warnings* warnings = nullptr);

// Canonical relation: label is Synonym-of (args normalized to text order) or
// Hyponym-of (arg1 = hyponym).
struct RelationPrediction {
  std::string doc_id;
  std::string arg1;
  std::string arg2;
  RelationLabel label = RelationLabel::None;
  double prob = 1.0;

  bool operator==(const RelationPrediction&) const = default;
};

struct Prediction {
  LabeledPair pair;  // pair.label is the predicted class
  double prob = 0.0;
};

// Rewrites Hypernym-of(x, y) to Hyponym-of(y, x), normalizes Synonym-of to
// text order, and merges the orderings of each pair: a positive prediction
// beats None, conflicting positives resolve by max probability, and a pair is
// dropped only if every queried ordering says None.
std::vector<RelationPrediction> decode(const std::vector<Prediction>& predictions,
                                       EvalStrategy eval_strategy);

}  // namespace scirel::strategies

#endif  // SCIREL_STRATEGIES_HPP
