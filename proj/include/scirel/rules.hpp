#ifndef SCIREL_RULES_HPP
#define SCIREL_RULES_HPP

#include <string>
#include <string_view>
#include <vector>

#include "scirel/tokens.hpp"
#include "scirel/types.hpp"

namespace scirel::rules {

// True iff `short_form` is an initialism of the content words of `long_words`:
// at least two characters, mostly uppercase, and its letters match in order
// the initial letters of the non-function words. A trailing lowercase 's'
// may match a plural long form.
bool is_abbreviation(const std::vector<std::string>& long_words, std::string_view short_form);

// Per-pair prediction state the rules operate on. e1 precedes e2 in the text;
// for Hyponym-of, `hypo_first` says the hyponym is e1.
struct PairState {
  EntityMention e1;
  EntityMention e2;
  RelationLabel label = RelationLabel::None;
  bool hypo_first = true;
  double prob = 0.0;

  bool operator==(const PairState&) const = default;
};

enum class RulePattern { None, AbbrevParen, EnumParen, ParenLeft, Slash };

// Applies the postprocessing rules to all pairs of one sentence, overriding
// model predictions on structural matches:
//   A ( B )        with is_abbreviation(A, B)  -> Synonym-of(A, B)
//   A ( B, C, .. ) with some Hyponym-of(X, A)  -> Hyponym-of for every listed entity
//   ( A ) B                                    -> None
//   A / B                                      -> None
// Pairs matching no pattern are left untouched. Deterministic and idempotent.
void apply_rules(const std::vector<Token>& sentence_tokens, std::vector<PairState>& pairs);

// Structural pattern match for a single pair (precedence AbbrevParen >
// EnumParen > ParenLeft > Slash); exposed for tests.
RulePattern match_pattern(const std::vector<Token>& sentence_tokens,
                          const EntityMention& e1, const EntityMention& e2);

}  // namespace scirel::rules

#endif  // SCIREL_RULES_HPP
