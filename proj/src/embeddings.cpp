#include "scirel/embeddings.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

namespace scirel::embeddings {

namespace {
constexpr std::string_view kPadSymbol = "<pad>";
constexpr std::string_view kUnkSymbol = "<unk>";
}  // namespace

Vocab Vocab::open() {
  Vocab v;
  v.has_unk_ = true;
  v.add(kPadSymbol);
  v.add(kUnkSymbol);
  return v;
}

Vocab Vocab::closed() {
  Vocab v;
  v.add(kPadSymbol);
  return v;
}

int Vocab::add(std::string_view symbol) {
  auto it = index_.find(std::string(symbol));
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(symbols_.size());
  symbols_.emplace_back(symbol);
  index_.emplace(symbols_.back(), id);
  return id;
}

int Vocab::id(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it != index_.end()) return it->second;
  if (has_unk_) return kUnk;
  throw std::out_of_range("symbol not in closed vocabulary: " + std::string(symbol));
}

bool Vocab::contains(std::string_view symbol) const {
  return index_.count(std::string(symbol)) > 0;
}

const std::string& Vocab::symbol(int id) const {
  return symbols_.at(static_cast<std::size_t>(id));
}

Vocab Vocab::from_symbols(std::vector<std::string> symbols, bool has_unk) {
  Vocab v;
  v.has_unk_ = has_unk;
  v.symbols_ = std::move(symbols);
  for (std::size_t i = 0; i < v.symbols_.size(); ++i)
    v.index_.emplace(v.symbols_[i], static_cast<int>(i));
  return v;
}

std::string lowercase(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

EmbeddingTable random_table(std::size_t rows, std::size_t dim, std::mt19937_64& rng) {
  EmbeddingTable table{rows, dim, std::vector<double>(rows * dim, 0.0)};
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  for (std::size_t r = 1; r < rows; ++r) {  // PAD row stays zero
    double* row = table.row(r);
    for (std::size_t j = 0; j < dim; ++j) row[j] = dist(rng);
  }
  return table;
}

GloveLoad load_glove(const std::filesystem::path& path, std::size_t dim, const Vocab& vocab,
                     std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings file " + path.string());

  std::vector<std::vector<double>> found(vocab.size());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t space = line.find(' ');
    if (space == std::string::npos || space == 0)
      throw ParseError("expected 'word v1 ... v_dim'", line_no);
    std::string_view word(line.data(), space);

    // arity check is cheap for all lines; full parsing only for vocab hits
    std::size_t values = 0;
    bool in_field = false;
    for (std::size_t i = space + 1; i < line.size(); ++i) {
      bool ws = line[i] == ' ';
      if (!ws && !in_field) ++values;
      in_field = !ws;
    }
    if (values != dim)
      throw ParseError("expected " + std::to_string(dim) + " values, found " +
                           std::to_string(values),
                       line_no);

    if (!vocab.contains(word)) continue;
    int id = vocab.id(word);
    if (id == Vocab::kPad || id == Vocab::kUnk) continue;
    std::vector<double> vec;
    vec.reserve(dim);
    const char* p = line.data() + space + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double value = 0.0;
      auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc())
        throw ParseError("bad number in vector for '" + std::string(word) + "'", line_no);
      vec.push_back(value);
      p = next;
    }
    found[static_cast<std::size_t>(id)] = std::move(vec);
  }

  GloveLoad out;
  out.table = EmbeddingTable{vocab.size(), dim, std::vector<double>(vocab.size() * dim, 0.0)};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  std::size_t hits = 0;
  // fill in id order so the result depends only on the seed, not file order
  for (std::size_t r = 1; r < vocab.size(); ++r) {
    double* row = out.table.row(r);
    if (!found[r].empty()) {
      std::copy(found[r].begin(), found[r].end(), row);
      ++hits;
    } else {
      for (std::size_t j = 0; j < dim; ++j) row[j] = dist(rng);
    }
  }
  std::size_t open_words = vocab.size() > 2 ? vocab.size() - 2 : 0;
  out.coverage = open_words ? static_cast<double>(hits) / static_cast<double>(open_words) : 0.0;
  return out;
}

int FeatureVocabs::relpos_id(int distance) const {
  int clipped = std::clamp(distance, -max_relpos, max_relpos);
  return 1 + clipped + max_relpos;  // 0 is PAD
}

int FeatureVocabs::etype_id(EntityType e) const { return etype.id(etype_name(e)); }

int FeatureVocabs::etype_outside_id() const { return etype.id("O"); }

int FeatureVocabs::word_id(std::string_view surface) const {
  return word.id(lowercase(surface));
}

int FeatureVocabs::pos_id(std::string_view tag) const { return pos.id(tag); }

FeatureVocabs empty_vocabs(int max_relpos) {
  FeatureVocabs vocabs;
  vocabs.max_relpos = max_relpos;
  vocabs.etype.add("O");
  vocabs.etype.add("Process");
  vocabs.etype.add("Task");
  vocabs.etype.add("Material");
  for (int d = -max_relpos; d <= max_relpos; ++d)
    vocabs.relpos.add(std::to_string(d));
  return vocabs;
}

FeatureVocabs build_vocabs(const std::vector<std::vector<Token>>& train_sentences,
                           int max_relpos) {
  FeatureVocabs vocabs = empty_vocabs(max_relpos);
  for (const auto& sentence : train_sentences) {
    for (const auto& token : sentence) {
      vocabs.word.add(lowercase(token.surface));
      if (!token.pos.empty()) vocabs.pos.add(token.pos);
    }
  }
  return vocabs;
}

}  // namespace scirel::embeddings
