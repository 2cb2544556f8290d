#ifndef SCIREL_TEXTPROC_HPP
#define SCIREL_TEXTPROC_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scirel/embeddings.hpp"
#include "scirel/tokens.hpp"
#include "scirel/types.hpp"

namespace scirel::textproc {

// Sentence boundaries after {. ! ?} followed by whitespace and an
// uppercase/digit start, guarded by an abbreviation list and by open
// parentheses/brackets. Spans cover all non-whitespace text.
std::vector<Span> split_sentences(std::string_view text);

// Maximal alphanumeric runs are tokens, every other non-space character is a
// single-character token. `hard_breaks` (entity boundaries) split runs so
// tokens never straddle a mention edge.
std::vector<Token> tokenize(std::string_view text, Span span,
                            const std::vector<std::size_t>& hard_breaks = {});

// Removes maximal "[ ... ]" runs whose interior is only digit runs, commas
// and hyphens (at least one digit run). Runs overlapping a protected span
// (an entity) are kept.
std::vector<Token> delete_references(std::vector<Token> tokens,
                                     const std::vector<Span>& protected_spans = {});

// A candidate pair: two same-type entities in one sentence, arg1 before arg2
// in the text. `gold` is None, Synonym-of, or Hyponym-of; for Hyponym-of,
// `gold_reversed` means the hyponym is arg2 (the later mention).
struct Candidate {
  std::string doc_id;
  EntityMention arg1;
  EntityMention arg2;
  RelationLabel gold = RelationLabel::None;
  bool gold_reversed = false;
  std::size_t sentence = 0;
};

std::vector<Candidate> generate_candidates(const Document& doc,
                                           const std::vector<Span>& sentences,
                                           Warnings* warnings = nullptr);

struct Toggles {
  bool bracket_deletion = true;
  bool sentence_cutting = true;

  bool operator==(const Toggles&) const = default;
};

struct TokenFeatures {
  int word = 0;
  int relpos1 = 0;
  int relpos2 = 0;
  int etype = 0;
  int pos = 0;

  bool operator==(const TokenFeatures&) const = default;
};

struct Example {
  std::vector<TokenFeatures> tokens;
  int label_id = 0;
  // provenance
  std::string doc_id;
  std::string arg1_id;
  std::string arg2_id;
  bool text_order = true;  // presentation order equals text order

  // raw relpos values (unclipped ids are not recoverable from the vocab),
  // kept for invariant checks in tests
  std::vector<int> relpos1_raw;
  std::vector<int> relpos2_raw;
};

// Cuts the token window to [first token of the earlier entity, last token of
// the later entity] when sentence_cutting is on, then featurizes. arg1/arg2
// are in presentation order (arg1 may be the later mention in the text).
Example cut_and_featurize(const std::vector<Token>& tokens,
                          const EntityMention& arg1, const EntityMention& arg2,
                          int label_id, const embeddings::FeatureVocabs& vocabs,
                          const Toggles& toggles);

// --- POS tagging ---------------------------------------------------------

// Rule-based fallback tagger: closed-class lexicon plus suffix rules. The
// downstream model treats tags as opaque categories.
void tag_pos_fallback(std::vector<Token>& tokens);

// Pre-tagged input, one token per line: doc_id<TAB>token_index<TAB>surface<TAB>tag.
// Indices run over the document's tokens in reading order before reference
// deletion.
using PosFile = std::map<std::string, std::vector<std::pair<std::string, std::string>>>;

PosFile load_pos_file(const std::filesystem::path& path);

// --- document pipeline ---------------------------------------------------

struct PreprocessedDoc {
  std::vector<Span> sentences;
  std::vector<std::vector<Token>> tokens;  // per sentence, after optional reference deletion
  std::vector<Candidate> candidates;
};

// split -> tokenize at entity boundaries -> POS (file or fallback) ->
// optional reference deletion -> candidate pairs.
PreprocessedDoc preprocess(const Document& doc, const Toggles& toggles,
                           const PosFile* pos = nullptr, Warnings* warnings = nullptr);

}  // namespace scirel::textproc

#endif  // SCIREL_TEXTPROC_HPP
