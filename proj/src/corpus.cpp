#include "scirel/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace scirel::corpus {

namespace {

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < content.size()) lines.push_back(content.substr(pos));
      break;
    }
    lines.push_back(content.substr(pos, nl - pos));
    pos = nl + 1;
  }
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find(sep, pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
    if (i > start) parts.push_back(text.substr(start, i - start));
  }
  return parts;
}

bool parse_size(std::string_view field, std::size_t& out) {
  if (field.empty()) return false;
  std::size_t value = 0;
  for (char c : field) {
    if (c < '0' || c > '9') return false;
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  out = value;
  return true;
}

std::string normalize_ws(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == '\n' || c == '\t' || c == '\r') c = ' ';
  }
  return out;
}

void parse_entity_line(std::string_view text, const std::vector<std::string_view>& fields,
                       std::size_t line_no, Document& doc) {
  if (fields.size() < 3) throw ParseError("entity record needs 3 tab-separated fields", line_no);
  auto middle = split_ws(fields[1]);
  if (middle.size() != 3) throw ParseError("expected 'Type start end'", line_no);

  EntityMention entity;
  entity.id = std::string(fields[0]);
  try {
    entity.etype = parse_etype(middle[0]);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line_no);
  }
  if (!parse_size(middle[1], entity.start) || !parse_size(middle[2], entity.end))
    throw ParseError("non-numeric offsets", line_no);
  if (entity.start >= entity.end || entity.end > text.size())
    throw ParseError("offsets out of text bounds: " + std::string(middle[1]) + " " +
                         std::string(middle[2]),
                     line_no);
  // the surface is everything after the second tab, tabs included
  entity.surface = std::string(fields[2]);
  for (std::size_t f = 3; f < fields.size(); ++f)
    entity.surface += "\t" + std::string(fields[f]);

  std::string_view slice = text.substr(entity.start, entity.end - entity.start);
  if (slice != entity.surface && normalize_ws(slice) != normalize_ws(entity.surface))
    throw ParseError("surface mismatch for " + entity.id + ": text has \"" +
                         std::string(slice) + "\"",
                     line_no);
  if (doc.find_entity(entity.id))
    throw ParseError("duplicate entity id " + entity.id, line_no);
  doc.entities.push_back(std::move(entity));
}

struct PendingRelation {
  GoldRelation relation;
  std::size_t line_no;
};

void parse_relation_line(const std::vector<std::string_view>& fields, std::size_t line_no,
                         std::vector<PendingRelation>& pending) {
  if (fields.size() < 2) throw ParseError("relation record needs 2 tab-separated fields", line_no);
  auto parts = split_ws(fields[1]);
  if (parts.size() != 3) throw ParseError("expected 'Label Arg1:Ti Arg2:Tj'", line_no);

  GoldRelation rel;
  try {
    rel.label = parse_label(parts[0]);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line_no);
  }
  if (rel.label != RelationLabel::SynonymOf && rel.label != RelationLabel::HyponymOf)
    throw ParseError("unsupported relation label " + std::string(parts[0]), line_no);
  for (int i = 1; i <= 2; ++i) {
    std::string_view part = parts[static_cast<std::size_t>(i)];
    std::string prefix = "Arg" + std::to_string(i) + ":";
    if (!part.starts_with(prefix) || part.size() == prefix.size())
      throw ParseError("expected Arg" + std::to_string(i) + ":<id>", line_no);
    (i == 1 ? rel.arg1 : rel.arg2) = std::string(part.substr(prefix.size()));
  }
  if (rel.arg1 == rel.arg2) throw ParseError("relation arguments must differ", line_no);
  pending.push_back({std::move(rel), line_no});
}

void parse_equiv_line(const std::vector<std::string_view>& fields, std::size_t line_no,
                      std::vector<PendingRelation>& pending) {
  if (fields.size() < 2) throw ParseError("equivalence record needs 2 tab-separated fields", line_no);
  auto parts = split_ws(fields[1]);
  if (parts.size() < 3 || parts[0] != "Synonym-of")
    throw ParseError("expected 'Synonym-of Ti Tj [Tk ...]'", line_no);
  // n entities -> all n(n-1)/2 unordered pairs
  for (std::size_t i = 1; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      if (parts[i] == parts[j])
        throw ParseError("repeated entity id in equivalence set", line_no);
      GoldRelation rel{RelationLabel::SynonymOf, std::string(parts[i]), std::string(parts[j])};
      pending.push_back({std::move(rel), line_no});
    }
  }
}

}  // namespace

Document parse_brat(std::string_view text_content, std::string_view ann_content,
                    std::string doc_id, Warnings* warnings) {
  Document doc;
  doc.id = std::move(doc_id);
  doc.text = std::string(text_content);

  std::vector<PendingRelation> pending;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(ann_content)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_fields(line, '\t');
    std::string_view id = fields[0];
    if (id.empty()) throw ParseError("empty record id", line_no);
    switch (id[0]) {
      case 'T':
        parse_entity_line(doc.text, fields, line_no, doc);
        break;
      case 'R':
        parse_relation_line(fields, line_no, pending);
        break;
      case '*':
        parse_equiv_line(fields, line_no, pending);
        break;
      default:
        warn(warnings, doc.id + ": skipping unknown record type '" + std::string(id) +
                           "' at line " + std::to_string(line_no));
        break;
    }
  }

  for (auto& [rel, rel_line] : pending) {
    const EntityMention* a = doc.find_entity(rel.arg1);
    const EntityMention* b = doc.find_entity(rel.arg2);
    if (!a || !b)
      throw ParseError("relation references missing entity id " + (a ? rel.arg2 : rel.arg1),
                       rel_line);
    if (a->etype != b->etype)
      warn(warnings, doc.id + ": relation " + rel.arg1 + "-" + rel.arg2 +
                         " joins different entity types (line " + std::to_string(rel_line) + ")");
    doc.gold.push_back(std::move(rel));
  }
  return doc;
}

std::string to_standoff(const Document& doc) {
  std::ostringstream out;
  for (const auto& entity : doc.entities) {
    out << entity.id << '\t' << etype_name(entity.etype) << ' ' << entity.start << ' '
        << entity.end << '\t' << entity.surface << '\n';
  }
  std::size_t rid = 0;
  for (const auto& rel : doc.gold) {
    out << 'R' << ++rid << '\t' << label_name(rel.label) << " Arg1:" << rel.arg1
        << " Arg2:" << rel.arg2 << '\n';
  }
  return out.str();
}

std::vector<Document> load_directory(const std::filesystem::path& dir, Warnings* warnings) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw std::runtime_error("not a directory: " + dir.string());

  std::vector<fs::path> txt_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      txt_files.push_back(entry.path());
  }
  std::sort(txt_files.begin(), txt_files.end());

  std::vector<Document> docs;
  docs.reserve(txt_files.size());
  for (const auto& txt : txt_files) {
    fs::path ann = txt;
    ann.replace_extension(".ann");
    if (!fs::exists(ann)) {
      warn(warnings, "no .ann file for " + txt.string() + ", skipping");
      continue;
    }
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      if (!in) throw std::runtime_error("cannot open " + p.string());
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    try {
      docs.push_back(parse_brat(slurp(txt), slurp(ann), txt.stem().string(), warnings));
    } catch (const ParseError& e) {
      throw std::runtime_error(ann.string() + ": " + e.what());
    }
  }
  return docs;
}

DatasetStats dataset_stats(const std::vector<Document>& docs,
                           const std::vector<textproc::Candidate>& candidates,
                           Warnings* warnings) {
  DatasetStats stats;
  std::set<std::tuple<std::string, std::string, std::string>> covered;
  for (const auto& cand : candidates) {
    switch (cand.gold) {
      case RelationLabel::HyponymOf: ++stats.hyponym; break;
      case RelationLabel::SynonymOf: ++stats.synonym; break;
      default: ++stats.none; break;
    }
    auto lo = std::min(cand.arg1.id, cand.arg2.id);
    auto hi = std::max(cand.arg1.id, cand.arg2.id);
    covered.insert({cand.doc_id, lo, hi});
  }

  // gold relations no candidate covers (e.g. cross-sentence) still count
  // toward their class
  for (const auto& doc : docs) {
    for (const auto& rel : doc.gold) {
      auto lo = std::min(rel.arg1, rel.arg2);
      auto hi = std::max(rel.arg1, rel.arg2);
      if (covered.count({doc.id, lo, hi})) continue;
      ++stats.uncovered_gold;
      if (rel.label == RelationLabel::HyponymOf)
        ++stats.hyponym;
      else
        ++stats.synonym;
    }
  }
  if (stats.uncovered_gold > 0)
    warn(warnings, std::to_string(stats.uncovered_gold) +
                       " gold relation(s) not covered by any candidate pair; counted in "
                       "class totals but absent from candidates");
  return stats;
}

std::string stats_csv(const DatasetStats& stats) {
  std::ostringstream out;
  out << "class,count\n";
  out << "Hyponym-of," << stats.hyponym << '\n';
  out << "Synonym-of," << stats.synonym << '\n';
  out << "None," << stats.none << '\n';
  out << "total," << stats.total() << '\n';
  return out.str();
}

}  // namespace scirel::corpus
