#ifndef SCIREL_EVAL_HPP
#define SCIREL_EVAL_HPP

#include <string>
#include <vector>

#include "scirel/strategies.hpp"

namespace scirel::eval {

struct ClassScore {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double precision = 0.0;  // tp/(tp+fp), 0/0 -> 0
  double recall = 0.0;     // tp/(tp+fn), 0/0 -> 0
  double f1 = 0.0;         // harmonic mean, 0/0 -> 0
};

struct ScoreReport {
  ClassScore synonym;
  ClassScore hyponym;
  ClassScore micro;  // counts summed over the two positive classes
};

// Scores canonical prediction/gold sets. A match is same document, same label,
// same ordered pair for Hyponym-of / unordered pair for Synonym-of. None is
// never scored; Hypernym-of input (non-canonical) throws.
ScoreReport score(const std::vector<strategies::RelationPrediction>& pred,
                  const std::vector<strategies::RelationPrediction>& gold);

// Canonical gold relations of a document set, for scoring.
std::vector<strategies::RelationPrediction> gold_relations(const std::vector<Document>& docs);

// CSV "class,precision,recall,f1" with Synonym-of, Hyponym-of and micro rows.
std::string report_csv(const ScoreReport& report);

}  // namespace scirel::eval

#endif  // SCIREL_EVAL_HPP
