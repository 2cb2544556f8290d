#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "scirel/rules.hpp"
#include "scirel/textproc.hpp"

using namespace scirel;
namespace ru = scirel::rules;
namespace tp = scirel::textproc;

TEST_CASE("is_abbreviation") {
  CHECK(ru::is_abbreviation({"transmission", "electron", "microscopy"}, "TEM"));
  CHECK_FALSE(ru::is_abbreviation({"gold"}, "gold"));
  CHECK_FALSE(ru::is_abbreviation({"polymerase", "chain", "reaction"}, "PCRX"));
  CHECK(ru::is_abbreviation({"polymerase", "chain", "reaction"}, "PCR"));

  SUBCASE("function words are skippable") {
    CHECK(ru::is_abbreviation({"University", "of", "Materials"}, "UM"));
    CHECK(ru::is_abbreviation({"density", "of", "the", "states"}, "DOS"));
  }
  SUBCASE("plural short forms match plural long forms") {
    CHECK(ru::is_abbreviation({"transmission", "electron", "microscopes"}, "TEMs"));
    CHECK_FALSE(ru::is_abbreviation({"transmission", "electron", "microscopy"}, "TEMs"));
  }
  SUBCASE("shape requirements") {
    CHECK_FALSE(ru::is_abbreviation({"transmission", "electron", "microscopy"}, "tem"));
    CHECK_FALSE(ru::is_abbreviation({"tiny"}, "T"));
    CHECK_FALSE(ru::is_abbreviation({"alpha", "beta"}, "ABX"));
    CHECK_FALSE(ru::is_abbreviation({}, "AB"));
  }
}

namespace {

struct Sentence {
  std::string text;
  std::vector<Token> tokens;
  std::vector<EntityMention> entities;

  const EntityMention& entity(const std::string& id) const {
    for (const auto& e : entities)
      if (e.id == id) return e;
    throw std::out_of_range(id);
  }
};

Sentence make_sentence(const std::string& text,
                       const std::vector<std::pair<std::string, std::string>>& mentions) {
  Sentence s;
  s.text = text;
  std::vector<std::size_t> breaks;
  for (const auto& [id, surface] : mentions) {
    std::size_t start = text.find(surface);
    REQUIRE(start != std::string::npos);
    s.entities.push_back(
        {id, EntityType::Material, start, start + surface.size(), surface});
    breaks.push_back(start);
    breaks.push_back(start + surface.size());
  }
  std::sort(breaks.begin(), breaks.end());
  s.tokens = tp::tokenize(text, {0, text.size()}, breaks);
  return s;
}

ru::PairState pair_of(const Sentence& s, const std::string& a, const std::string& b,
                      RelationLabel label = RelationLabel::None, bool hypo_first = true,
                      double prob = 0.5) {
  ru::PairState state;
  state.e1 = s.entity(a);
  state.e2 = s.entity(b);
  state.label = label;
  state.hypo_first = hypo_first;
  state.prob = prob;
  return state;
}

}  // namespace

TEST_CASE("abbreviation in parentheses forces Synonym-of, overriding the model") {
  auto s = make_sentence("transmission electron microscopy (TEM) was used",
                         {{"T1", "transmission electron microscopy"}, {"T2", "TEM"}});
  SUBCASE("from None") {
    std::vector<ru::PairState> pairs{pair_of(s, "T1", "T2")};
    ru::apply_rules(s.tokens, pairs);
    CHECK(pairs[0].label == RelationLabel::SynonymOf);
    CHECK(pairs[0].prob == 1.0);
  }
  SUBCASE("overrides a contrary prediction") {
    std::vector<ru::PairState> pairs{
        pair_of(s, "T1", "T2", RelationLabel::HyponymOf, false, 0.99)};
    ru::apply_rules(s.tokens, pairs);
    CHECK(pairs[0].label == RelationLabel::SynonymOf);
  }
  SUBCASE("no synonym when the parenthesized form is not an abbreviation") {
    auto other = make_sentence("the oxide layer (rust) grew",
                               {{"T1", "oxide layer"}, {"T2", "rust"}});
    std::vector<ru::PairState> pairs{pair_of(other, "T1", "T2")};
    ru::apply_rules(other.tokens, pairs);
    CHECK(pairs[0].label == RelationLabel::None);
  }
}

TEST_CASE("parenthesized enumeration propagates Hyponym-of") {
  auto s = make_sentence("high purity standard metals (Sn, Pb, Zn, Al, Ag, Ni)",
                         {{"T1", "high purity standard metals"},
                          {"T2", "Sn"},
                          {"T3", "Pb"},
                          {"T4", "Zn"},
                          {"T5", "Al"},
                          {"T6", "Ag"},
                          {"T7", "Ni"}});
  auto listed = {"T2", "T3", "T4", "T5", "T6", "T7"};

  SUBCASE("one detected hyponym pulls in the whole list") {
    std::vector<ru::PairState> pairs;
    // the model only found Hyponym-of(Sn, metals)
    pairs.push_back(pair_of(s, "T1", "T2", RelationLabel::HyponymOf, false, 0.8));
    for (const char* id : {"T3", "T4", "T5", "T6", "T7"})
      pairs.push_back(pair_of(s, "T1", id));
    // a listed-listed pair stays whatever it was
    pairs.push_back(pair_of(s, "T2", "T3"));

    ru::apply_rules(s.tokens, pairs);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(pairs[i].label == RelationLabel::HyponymOf);
      CHECK_FALSE(pairs[i].hypo_first);  // each listed entity is the hyponym
    }
    CHECK(pairs[6].label == RelationLabel::None);
  }
  SUBCASE("no propagation without a detected hyponym") {
    std::vector<ru::PairState> pairs;
    for (const char* id : listed) pairs.push_back(pair_of(s, "T1", id));
    auto before = pairs;
    ru::apply_rules(s.tokens, pairs);
    CHECK(pairs == before);
  }
  SUBCASE("a synonym prediction toward the head does not trigger propagation") {
    std::vector<ru::PairState> pairs;
    pairs.push_back(pair_of(s, "T1", "T2", RelationLabel::SynonymOf, true, 0.9));
    for (const char* id : {"T3", "T4", "T5", "T6", "T7"})
      pairs.push_back(pair_of(s, "T1", id));
    auto before = pairs;
    ru::apply_rules(s.tokens, pairs);
    CHECK(pairs == before);
  }
}

TEST_CASE("entity in parentheses before another entity forces None") {
  auto s = make_sentence("(TEMs), scanning electron microscopes",
                         {{"T1", "TEMs"}, {"T2", "scanning electron microscopes"}});
  std::vector<ru::PairState> pairs{
      pair_of(s, "T1", "T2", RelationLabel::SynonymOf, true, 0.95)};
  ru::apply_rules(s.tokens, pairs);
  CHECK(pairs[0].label == RelationLabel::None);
}

TEST_CASE("slash-adjacent entities force None") {
  auto s = make_sentence("DOTMA/DOPE", {{"T1", "DOTMA"}, {"T2", "DOPE"}});
  std::vector<ru::PairState> pairs{
      pair_of(s, "T1", "T2", RelationLabel::SynonymOf, true, 0.9)};
  ru::apply_rules(s.tokens, pairs);
  CHECK(pairs[0].label == RelationLabel::None);
  CHECK(ru::match_pattern(s.tokens, s.entity("T1"), s.entity("T2")) ==
        ru::RulePattern::Slash);
}

TEST_CASE("rules are idempotent and leave unmatched pairs bit-identical") {
  auto s = make_sentence(
      "transmission electron microscopy (TEM) resolved DOTMA/DOPE near copper and iron",
      {{"T1", "transmission electron microscopy"},
       {"T2", "TEM"},
       {"T3", "DOTMA"},
       {"T4", "DOPE"},
       {"T5", "copper"},
       {"T6", "iron"}});
  std::vector<ru::PairState> pairs{
      pair_of(s, "T1", "T2"),
      pair_of(s, "T3", "T4", RelationLabel::SynonymOf, true, 0.7),
      pair_of(s, "T5", "T6", RelationLabel::HyponymOf, true, 0.42),
  };
  auto untouched = pairs[2];
  ru::apply_rules(s.tokens, pairs);
  CHECK(pairs[0].label == RelationLabel::SynonymOf);
  CHECK(pairs[1].label == RelationLabel::None);
  CHECK(pairs[2] == untouched);

  auto once = pairs;
  ru::apply_rules(s.tokens, pairs);
  CHECK(pairs == once);
}

TEST_CASE("match_pattern precedence") {
  auto s = make_sentence("alpha beta (AB) more", {{"T1", "alpha beta"}, {"T2", "AB"}});
  CHECK(ru::match_pattern(s.tokens, s.entity("T1"), s.entity("T2")) ==
        ru::RulePattern::AbbrevParen);
  auto plain = make_sentence("alpha near beta", {{"T1", "alpha"}, {"T2", "beta"}});
  CHECK(ru::match_pattern(plain.tokens, plain.entity("T1"), plain.entity("T2")) ==
        ru::RulePattern::None);
}
