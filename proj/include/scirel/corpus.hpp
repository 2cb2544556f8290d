#ifndef SCIREL_CORPUS_HPP
#define SCIREL_CORPUS_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "scirel/textproc.hpp"
#include "scirel/types.hpp"

namespace scirel::corpus {

// Parses standoff annotations against their raw text. Entity lines
// "Tk<TAB>Type start end<TAB>surface", directed relations
// "Rk<TAB>Label Arg1:Ti Arg2:Tj", and equivalence lines
// "*<TAB>Synonym-of Ti Tj [Tk ...]" (expanded to all unordered pairs).
// Unknown record types are skipped with a warning; malformed lines, offsets
// out of bounds, surface mismatches and dangling entity ids raise ParseError.
Document parse_brat(std::string_view text_content, std::string_view ann_content,
                    std::string doc_id = {}, Warnings* warnings = nullptr);

// Entity and relation lines for a Document; Synonym-of pairs are written as
// R records so the output reparses to an identical Document.
std::string to_standoff(const Document& doc);

// Reads all paired <id>.txt / <id>.ann files in a directory, sorted by id.
std::vector<Document> load_directory(const std::filesystem::path& dir,
                                     Warnings* warnings = nullptr);

struct DatasetStats {
  long hyponym = 0;
  long synonym = 0;
  long none = 0;
  // gold relations not represented by any candidate pair (e.g. cross-sentence);
  // they are included in the class counts above
  long uncovered_gold = 0;

  long total() const { return hyponym + synonym + none; }
};

DatasetStats dataset_stats(const std::vector<Document>& docs,
                           const std::vector<textproc::Candidate>& candidates,
                           Warnings* warnings = nullptr);

// CSV with header "class,count" and rows Hyponym-of, Synonym-of, None, total.
std::string stats_csv(const DatasetStats& stats);

}  // namespace scirel::corpus

#endif  // SCIREL_CORPUS_HPP
