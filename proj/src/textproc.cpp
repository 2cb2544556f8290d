#include "scirel/textproc.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace scirel::textproc {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }

// non-ASCII bytes count as word characters so UTF-8 sequences stay together
bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || (c & 0x80) != 0;
}

const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> abbrevs = {
      "e.g.", "i.e.",  "cf.",   "vs.",  "etc.",  "fig.",  "figs.", "eq.",
      "eqs.", "ref.",  "refs.", "sec.", "secs.", "no.",   "nos.",  "al.",
      "dr.",  "prof.", "ca.",   "approx.", "resp.", "inc.", "ltd.", "st.",
  };
  return abbrevs;
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// The maximal run of letters and dots ending at the period, e.g. "Fig." or
// "i.e.". Single letters before a dot (initials) also count as abbreviations.
bool guarded_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0) {
    char c = text[begin - 1];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '.')
      --begin;
    else
      break;
  }
  if (begin == dot) return false;  // nothing alphabetic before the dot
  std::string candidate = ascii_lower(text.substr(begin, dot - begin + 1));
  if (abbreviations().count(candidate)) return true;
  // a single letter followed by the dot, as in initials
  std::size_t letters = 0;
  for (char c : candidate)
    if (c != '.') ++letters;
  return letters == 1 && candidate.size() == 2;
}

}  // namespace

std::vector<Span> split_sentences(std::string_view text) {
  std::vector<Span> spans;
  std::size_t n = text.size();
  std::size_t start = 0;
  while (start < n && is_space(text[start])) ++start;
  if (start == n) return spans;

  int paren_depth = 0;
  int bracket_depth = 0;
  auto flush = [&](std::size_t end) {
    while (end > start && is_space(text[end - 1])) --end;
    if (end > start) spans.push_back({start, end});
  };

  for (std::size_t i = start; i < n; ++i) {
    char c = text[i];
    if (c == '(') ++paren_depth;
    if (c == ')') paren_depth = std::max(0, paren_depth - 1);
    if (c == '[') ++bracket_depth;
    if (c == ']') bracket_depth = std::max(0, bracket_depth - 1);
    if (c != '.' && c != '!' && c != '?') continue;
    if (paren_depth > 0 || bracket_depth > 0) continue;
    if (i + 1 >= n || !is_space(text[i + 1])) continue;
    std::size_t next = i + 1;
    while (next < n && is_space(text[next])) ++next;
    if (next == n || !(is_upper(text[next]) || is_digit(text[next]))) continue;
    if (c == '.' && guarded_abbreviation(text, i)) continue;
    flush(i + 1);
    start = next;
  }
  flush(n);
  return spans;
}

std::vector<Token> tokenize(std::string_view text, Span span,
                            const std::vector<std::size_t>& hard_breaks) {
  std::vector<Token> tokens;
  std::size_t i = span.start;
  const std::size_t end = std::min<std::size_t>(span.end, text.size());
  auto next_break = [&](std::size_t from, std::size_t until) {
    auto it = std::upper_bound(hard_breaks.begin(), hard_breaks.end(), from);
    return (it != hard_breaks.end() && *it < until) ? *it : until;
  };
  while (i < end) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t tok_start = i;
    if (is_word_char(text[i])) {
      while (i < end && is_word_char(text[i])) ++i;
      // split word runs at entity boundaries
      std::size_t run_end = i;
      std::size_t piece = tok_start;
      while (piece < run_end) {
        std::size_t cut = next_break(piece, run_end);
        tokens.push_back({std::string(text.substr(piece, cut - piece)), piece, cut, {}});
        piece = cut;
      }
    } else {
      ++i;
      tokens.push_back({std::string(text.substr(tok_start, 1)), tok_start, tok_start + 1, {}});
    }
  }
  return tokens;
}

namespace {

bool digits_only(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), is_digit);
}

bool overlaps_any(const Token& token, const std::vector<Span>& spans) {
  return std::any_of(spans.begin(), spans.end(),
                     [&](const Span& s) { return token.span().overlaps(s); });
}

}  // namespace

std::vector<Token> delete_references(std::vector<Token> tokens,
                                     const std::vector<Span>& protected_spans) {
  std::vector<bool> drop(tokens.size(), false);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].surface != "[") continue;
    std::size_t close = i + 1;
    bool interior_ok = true;
    bool has_digits = false;
    while (close < tokens.size() && tokens[close].surface != "]") {
      const std::string& s = tokens[close].surface;
      if (digits_only(s))
        has_digits = true;
      else if (s != "," && s != "-")
        interior_ok = false;
      if (s == "[") {  // nested bracket breaks the pattern
        interior_ok = false;
        break;
      }
      ++close;
    }
    if (close >= tokens.size() || !interior_ok || !has_digits) continue;
    bool protected_run = false;
    for (std::size_t k = i; k <= close; ++k)
      if (overlaps_any(tokens[k], protected_spans)) protected_run = true;
    if (protected_run) continue;
    for (std::size_t k = i; k <= close; ++k) drop[k] = true;
    i = close;
  }
  std::vector<Token> kept;
  kept.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(tokens[i]));
  return kept;
}

std::vector<Candidate> generate_candidates(const Document& doc,
                                           const std::vector<Span>& sentences,
                                           Warnings* warnings) {
  // entity -> sentence by start-offset containment
  std::vector<std::vector<const EntityMention*>> by_sentence(sentences.size());
  for (const auto& entity : doc.entities) {
    std::size_t assigned = sentences.size();
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      if (sentences[s].contains(entity.start)) {
        assigned = s;
        break;
      }
    }
    if (assigned == sentences.size()) {
      // starts in whitespace between spans; fall back to any overlap
      for (std::size_t s = 0; s < sentences.size(); ++s) {
        if (sentences[s].overlaps({entity.start, entity.end})) {
          assigned = s;
          break;
        }
      }
    }
    if (assigned == sentences.size()) {
      warn(warnings, doc.id + ": entity " + entity.id + " outside all sentences, skipped");
      continue;
    }
    if (entity.end > sentences[assigned].end)
      warn(warnings, doc.id + ": entity " + entity.id +
                         " spans a sentence boundary; assigned to the sentence containing "
                         "its start");
    by_sentence[assigned].push_back(&entity);
  }

  std::vector<Candidate> candidates;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    auto group = by_sentence[s];
    std::sort(group.begin(), group.end(), [](const EntityMention* a, const EntityMention* b) {
      return std::tie(a->start, a->end, a->id) < std::tie(b->start, b->end, b->id);
    });
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        if (group[i]->etype != group[j]->etype) continue;
        Candidate cand;
        cand.doc_id = doc.id;
        cand.arg1 = *group[i];
        cand.arg2 = *group[j];
        cand.sentence = s;
        for (const auto& rel : doc.gold) {
          bool forward = rel.arg1 == cand.arg1.id && rel.arg2 == cand.arg2.id;
          bool backward = rel.arg1 == cand.arg2.id && rel.arg2 == cand.arg1.id;
          if (!forward && !backward) continue;
          cand.gold = rel.label;
          cand.gold_reversed = rel.label == RelationLabel::HyponymOf && backward;
          break;
        }
        candidates.push_back(std::move(cand));
      }
    }
  }
  return candidates;
}

namespace {

// token indices overlapping an entity span; contiguous because tokens are
// ordered and non-overlapping
std::pair<std::size_t, std::size_t> entity_token_range(const std::vector<Token>& tokens,
                                                       const EntityMention& entity) {
  std::size_t first = tokens.size();
  std::size_t last = tokens.size();
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (tokens[t].span().overlaps({entity.start, entity.end})) {
      if (first == tokens.size()) first = t;
      last = t;
    }
  }
  if (first == tokens.size())
    throw std::invalid_argument("entity " + entity.id + " has no tokens in the window");
  return {first, last};
}

int token_distance(std::size_t t, std::pair<std::size_t, std::size_t> range) {
  if (t >= range.first && t <= range.second) return 0;
  if (t < range.first) return -static_cast<int>(range.first - t);
  return static_cast<int>(t - range.second);
}

}  // namespace

Example cut_and_featurize(const std::vector<Token>& tokens, const EntityMention& arg1,
                          const EntityMention& arg2, int label_id,
                          const embeddings::FeatureVocabs& vocabs, const Toggles& toggles) {
  auto range1 = entity_token_range(tokens, arg1);
  auto range2 = entity_token_range(tokens, arg2);

  std::size_t lo = 0;
  std::size_t hi = tokens.size() - 1;
  if (toggles.sentence_cutting) {
    lo = std::min(range1.first, range2.first);
    hi = std::max(range1.second, range2.second);
  }
  if (lo > hi) throw std::invalid_argument("empty token window after cutting");

  auto shift = [lo](std::pair<std::size_t, std::size_t> r) {
    return std::pair<std::size_t, std::size_t>{r.first - lo, r.second - lo};
  };
  range1 = shift(range1);
  range2 = shift(range2);

  Example example;
  example.label_id = label_id;
  example.arg1_id = arg1.id;
  example.arg2_id = arg2.id;
  example.text_order = std::tie(arg1.start, arg1.end) <= std::tie(arg2.start, arg2.end);

  const std::size_t n = hi - lo + 1;
  example.tokens.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Token& token = tokens[lo + t];
    int d1 = token_distance(t, range1);
    int d2 = token_distance(t, range2);
    TokenFeatures feats;
    feats.word = vocabs.word_id(token.surface);
    feats.relpos1 = vocabs.relpos_id(d1);
    feats.relpos2 = vocabs.relpos_id(d2);
    if (t >= range1.first && t <= range1.second)
      feats.etype = vocabs.etype_id(arg1.etype);
    else if (t >= range2.first && t <= range2.second)
      feats.etype = vocabs.etype_id(arg2.etype);
    else
      feats.etype = vocabs.etype_outside_id();
    feats.pos = vocabs.pos_id(token.pos);
    example.tokens.push_back(feats);
    example.relpos1_raw.push_back(d1);
    example.relpos2_raw.push_back(d2);
  }
  return example;
}

// --- POS tagging -----------------------------------------------------------

namespace {

const std::unordered_map<std::string, std::string>& closed_class() {
  static const std::unordered_map<std::string, std::string> lexicon = {
      {"the", "DT"},   {"a", "DT"},     {"an", "DT"},    {"this", "DT"},  {"these", "DT"},
      {"that", "DT"},  {"those", "DT"}, {"each", "DT"},  {"some", "DT"},  {"any", "DT"},
      {"of", "IN"},    {"in", "IN"},    {"on", "IN"},    {"for", "IN"},   {"with", "IN"},
      {"by", "IN"},    {"to", "TO"},    {"from", "IN"},  {"at", "IN"},    {"as", "IN"},
      {"into", "IN"},  {"between", "IN"}, {"under", "IN"}, {"over", "IN"}, {"during", "IN"},
      {"and", "CC"},   {"or", "CC"},    {"but", "CC"},   {"nor", "CC"},
      {"is", "VBZ"},   {"are", "VBP"},  {"was", "VBD"},  {"were", "VBD"}, {"be", "VB"},
      {"been", "VBN"}, {"being", "VBG"}, {"has", "VBZ"}, {"have", "VBP"}, {"had", "VBD"},
      {"can", "MD"},   {"could", "MD"}, {"may", "MD"},   {"will", "MD"},  {"would", "MD"},
      {"should", "MD"}, {"must", "MD"},
      {"it", "PRP"},   {"its", "PRP$"}, {"we", "PRP"},   {"our", "PRP$"}, {"they", "PRP"},
      {"their", "PRP$"}, {"he", "PRP"}, {"she", "PRP"},  {"i", "PRP"},    {"you", "PRP"},
      {"not", "RB"},   {"also", "RB"},  {"very", "RB"},  {"more", "RBR"}, {"most", "RBS"},
      {"which", "WDT"}, {"who", "WP"},  {"when", "WRB"}, {"where", "WRB"}, {"how", "WRB"},
  };
  return lexicon;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string suffix_tag(const std::string& lower, const std::string& surface) {
  if (ends_with(lower, "ly")) return "RB";
  if (ends_with(lower, "ing") && lower.size() > 4) return "VBG";
  if (ends_with(lower, "ed") && lower.size() > 3) return "VBD";
  if (ends_with(lower, "tion") || ends_with(lower, "sion") || ends_with(lower, "ment") ||
      ends_with(lower, "ness") || ends_with(lower, "ity") || ends_with(lower, "ism"))
    return "NN";
  if (ends_with(lower, "ive") || ends_with(lower, "ous") || ends_with(lower, "ical") ||
      ends_with(lower, "able") || ends_with(lower, "ary") || ends_with(lower, "ic") ||
      ends_with(lower, "al"))
    return "JJ";
  if (ends_with(lower, "ize") || ends_with(lower, "ise")) return "VB";
  if (ends_with(lower, "s") && !ends_with(lower, "ss") && lower.size() > 3) return "NNS";
  if (is_upper(surface[0])) return "NNP";
  return "NN";
}

}  // namespace

void tag_pos_fallback(std::vector<Token>& tokens) {
  for (auto& token : tokens) {
    const std::string& s = token.surface;
    if (s.empty()) continue;
    if (s.size() == 1 && !is_word_char(s[0])) {
      token.pos = s;  // punctuation tags itself
      continue;
    }
    bool numeric = std::all_of(s.begin(), s.end(), [](char c) {
      return is_digit(c) || c == '.' || c == ',';
    });
    if (numeric && std::any_of(s.begin(), s.end(), is_digit)) {
      token.pos = "CD";
      continue;
    }
    std::string lower = ascii_lower(s);
    auto it = closed_class().find(lower);
    token.pos = it != closed_class().end() ? it->second : suffix_tag(lower, s);
  }
}

PosFile load_pos_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open POS file " + path.string());
  PosFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      std::size_t tab = line.find('\t', pos);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    if (fields.size() != 4)
      throw ParseError("POS file needs doc_id<TAB>index<TAB>surface<TAB>tag", line_no);
    auto& entries = file[fields[0]];
    std::size_t index = 0;
    if (!std::all_of(fields[1].begin(), fields[1].end(), is_digit) ||
        (index = std::stoull(fields[1])) != entries.size())
      throw ParseError("non-contiguous token index " + fields[1] + " for " + fields[0],
                       line_no);
    entries.emplace_back(fields[2], fields[3]);
  }
  return file;
}

PreprocessedDoc preprocess(const Document& doc, const Toggles& toggles, const PosFile* pos,
                           Warnings* warnings) {
  PreprocessedDoc out;
  out.sentences = split_sentences(doc.text);

  std::vector<std::size_t> breaks;
  for (const auto& entity : doc.entities) {
    breaks.push_back(entity.start);
    breaks.push_back(entity.end);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  out.tokens.reserve(out.sentences.size());
  for (const auto& span : out.sentences)
    out.tokens.push_back(tokenize(doc.text, span, breaks));

  const std::vector<std::pair<std::string, std::string>>* tagged = nullptr;
  if (pos) {
    auto it = pos->find(doc.id);
    if (it != pos->end()) tagged = &it->second;
  }
  if (tagged) {
    std::size_t flat = 0;
    for (auto& sentence : out.tokens) {
      for (auto& token : sentence) {
        if (flat >= tagged->size())
          throw std::runtime_error(doc.id + ": POS file has fewer tokens than the document");
        const auto& [surface, tag] = (*tagged)[flat];
        if (surface != token.surface)
          throw std::runtime_error(doc.id + ": POS file surface mismatch at token " +
                                   std::to_string(flat) + ": \"" + surface + "\" vs \"" +
                                   token.surface + "\"");
        token.pos = tag;
        ++flat;
      }
    }
    if (flat != tagged->size())
      throw std::runtime_error(doc.id + ": POS file has more tokens than the document");
  } else {
    for (auto& sentence : out.tokens) tag_pos_fallback(sentence);
  }

  if (toggles.bracket_deletion) {
    std::vector<Span> entity_spans;
    entity_spans.reserve(doc.entities.size());
    for (const auto& entity : doc.entities)
      entity_spans.push_back({entity.start, entity.end});
    for (auto& sentence : out.tokens)
      sentence = delete_references(std::move(sentence), entity_spans);
  }

  out.candidates = generate_candidates(doc, out.sentences, warnings);
  return out;
}

}  // namespace scirel::textproc
