#include "scirel/rules.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <unordered_set>

namespace scirel::rules {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

const std::unordered_set<std::string>& function_words() {
  static const std::unordered_set<std::string> words = {"of", "the", "and", "for", "in", "a"};
  return words;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower(c);
  return out;
}

// Every content word must contribute its initial, in order; function words
// may contribute theirs or be skipped ("density of states" -> DOS or DS).
bool initials_match(const std::vector<std::string>& words, std::size_t w,
                    std::string_view letters, std::size_t l) {
  if (w == words.size()) return l == letters.size();
  const std::string& word = words[w];
  if (word.empty() || !is_alpha(word[0]))
    return initials_match(words, w + 1, letters, l);
  bool consumed = l < letters.size() && lower(letters[l]) == lower(word[0]) &&
                  initials_match(words, w + 1, letters, l + 1);
  if (consumed) return true;
  return function_words().count(to_lower(word)) && initials_match(words, w + 1, letters, l);
}

bool alphabetic_words(const std::vector<std::string>& words) {
  return std::any_of(words.begin(), words.end(),
                     [](const std::string& w) { return !w.empty() && is_alpha(w[0]); });
}

}  // namespace

bool is_abbreviation(const std::vector<std::string>& long_words, std::string_view short_form) {
  std::string letters;
  std::size_t upper = 0;
  for (char c : short_form) {
    if (!is_alpha(c)) continue;
    letters.push_back(c);
    if (is_upper(c)) ++upper;
  }
  if (letters.size() < 2) return false;
  if (2 * upper <= letters.size()) return false;  // mostly uppercase
  if (!alphabetic_words(long_words)) return false;

  if (initials_match(long_words, 0, letters, 0)) return true;

  // trailing lowercase 's' may match a plural long form
  if (letters.back() == 's' && letters.size() > 2) {
    const std::string& last = long_words.back();
    if (!last.empty() && lower(last.back()) == 's')
      return initials_match(long_words, 0,
                            std::string_view(letters).substr(0, letters.size() - 1), 0);
  }
  return false;
}

namespace {

struct TokenRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

std::optional<TokenRange> entity_tokens(const std::vector<Token>& tokens,
                                        const EntityMention& entity) {
  TokenRange range;
  bool found = false;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (tokens[t].span().overlaps({entity.start, entity.end})) {
      if (!found) range.first = t;
      range.last = t;
      found = true;
    }
  }
  if (!found) return std::nullopt;
  return range;
}

bool token_is(const std::vector<Token>& tokens, std::size_t index, std::string_view surface) {
  return index < tokens.size() && tokens[index].surface == surface;
}

std::vector<std::string> entity_words(const std::vector<Token>& tokens, TokenRange range) {
  std::vector<std::string> words;
  for (std::size_t t = range.first; t <= range.last; ++t) words.push_back(tokens[t].surface);
  return words;
}

// "A ( B )": e2 alone inside parentheses immediately after e1
bool match_abbrev_paren(const std::vector<Token>& tokens, TokenRange r1, TokenRange r2) {
  return token_is(tokens, r1.last + 1, "(") && r2.first == r1.last + 2 &&
         token_is(tokens, r2.last + 1, ")");
}

// "( A ) B": e1 alone inside parentheses, e2 following (one separator allowed,
// as in "(TEMs), scanning electron microscopes")
bool match_paren_left(const std::vector<Token>& tokens, TokenRange r1, TokenRange r2) {
  if (r1.first == 0 || !token_is(tokens, r1.first - 1, "(")) return false;
  if (!token_is(tokens, r1.last + 1, ")")) return false;
  std::size_t next = r1.last + 2;
  if (next < tokens.size() && (tokens[next].surface == "," || tokens[next].surface == ";"))
    ++next;
  return r2.first == next;
}

// "A / B": entities adjacent across a slash token
bool match_slash(const std::vector<Token>& tokens, TokenRange r1, TokenRange r2) {
  return token_is(tokens, r1.last + 1, "/") && r2.first == r1.last + 2;
}

// An enumeration "( E1 , E2 , ... )" opening right after e1; returns the
// listed entity ranges keyed by first token. Needs at least two entities.
struct Enumeration {
  std::vector<std::size_t> first_tokens;
};

std::optional<Enumeration> find_enumeration(const std::vector<Token>& tokens, TokenRange head,
                                            const std::map<std::size_t, TokenRange>& by_first) {
  std::size_t open = head.last + 1;
  if (!token_is(tokens, open, "(")) return std::nullopt;
  Enumeration en;
  std::size_t at = open + 1;
  while (true) {
    auto it = by_first.find(at);
    if (it == by_first.end()) return std::nullopt;
    en.first_tokens.push_back(at);
    at = it->second.last + 1;
    if (token_is(tokens, at, ")")) break;
    if (!token_is(tokens, at, ",")) return std::nullopt;
    ++at;
  }
  if (en.first_tokens.size() < 2) return std::nullopt;
  return en;
}

}  // namespace

RulePattern match_pattern(const std::vector<Token>& sentence_tokens, const EntityMention& e1,
                          const EntityMention& e2) {
  auto r1 = entity_tokens(sentence_tokens, e1);
  auto r2 = entity_tokens(sentence_tokens, e2);
  if (!r1 || !r2) return RulePattern::None;
  if (match_abbrev_paren(sentence_tokens, *r1, *r2)) return RulePattern::AbbrevParen;
  // EnumParen is detected over whole enumerations in apply_rules
  if (match_paren_left(sentence_tokens, *r1, *r2)) return RulePattern::ParenLeft;
  if (match_slash(sentence_tokens, *r1, *r2)) return RulePattern::Slash;
  return RulePattern::None;
}

void apply_rules(const std::vector<Token>& sentence_tokens, std::vector<PairState>& pairs) {
  // entity token ranges, keyed by id and by first token
  std::map<std::string, TokenRange> ranges;
  std::map<std::size_t, TokenRange> by_first;
  for (const auto& pair : pairs) {
    for (const EntityMention* entity : {&pair.e1, &pair.e2}) {
      if (ranges.count(entity->id)) continue;
      if (auto r = entity_tokens(sentence_tokens, *entity)) {
        ranges.emplace(entity->id, *r);
        by_first.emplace(r->first, *r);
      }
    }
  }

  std::vector<bool> claimed(pairs.size(), false);

  // ABBREV_PAREN first (highest precedence)
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    PairState& pair = pairs[i];
    auto r1 = ranges.find(pair.e1.id);
    auto r2 = ranges.find(pair.e2.id);
    if (r1 == ranges.end() || r2 == ranges.end()) continue;
    if (!match_abbrev_paren(sentence_tokens, r1->second, r2->second)) continue;
    claimed[i] = true;
    if (is_abbreviation(entity_words(sentence_tokens, r1->second), pair.e2.surface)) {
      pair.label = RelationLabel::SynonymOf;
      pair.prob = 1.0;
    }
  }

  // ENUM_PAREN: propagate Hyponym-of over "A ( B, C, ..., D )"
  for (const auto& [head_id, head_range] : ranges) {
    auto enumeration = find_enumeration(sentence_tokens, head_range, by_first);
    if (!enumeration) continue;
    std::unordered_set<std::string> listed;
    for (std::size_t first : enumeration->first_tokens) {
      for (const auto& [id, range] : ranges)
        if (range.first == first) listed.insert(id);
    }
    if (listed.size() < 2) continue;

    std::vector<std::size_t> affected;  // pairs (A=e1, listed=e2)
    bool any_hyponym = false;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (claimed[i]) continue;
      if (pairs[i].e1.id == head_id && listed.count(pairs[i].e2.id)) {
        affected.push_back(i);
        // a predicted Hyponym-of(listed, A): hyponym is the later mention
        if (pairs[i].label == RelationLabel::HyponymOf && !pairs[i].hypo_first)
          any_hyponym = true;
      }
    }
    if (!any_hyponym) continue;
    for (std::size_t i : affected) {
      pairs[i].label = RelationLabel::HyponymOf;
      pairs[i].hypo_first = false;  // every listed entity is a hyponym of A
      pairs[i].prob = 1.0;
      claimed[i] = true;
    }
  }

  // the two forced-None patterns
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (claimed[i]) continue;
    PairState& pair = pairs[i];
    auto r1 = ranges.find(pair.e1.id);
    auto r2 = ranges.find(pair.e2.id);
    if (r1 == ranges.end() || r2 == ranges.end()) continue;
    if (match_paren_left(sentence_tokens, r1->second, r2->second) ||
        match_slash(sentence_tokens, r1->second, r2->second)) {
      pair.label = RelationLabel::None;
      pair.prob = 1.0;
      claimed[i] = true;
    }
  }
}

}  // namespace scirel::rules
