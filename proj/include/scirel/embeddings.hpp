#ifndef SCIREL_EMBEDDINGS_HPP
#define SCIREL_EMBEDDINGS_HPP

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scirel/tokens.hpp"
#include "scirel/types.hpp"

namespace scirel::embeddings {

// Symbol table with dense ids. Id 0 is always PAD; open vocabularies also
// reserve id 1 for UNK, closed ones (fixed inventories) do not.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  static Vocab open();
  static Vocab closed();

  // Inserts the symbol if absent and returns its id.
  int add(std::string_view symbol);
  // Returns the symbol's id, UNK for unknown symbols in open vocabularies.
  // Throws std::out_of_range for unknown symbols in closed ones.
  int id(std::string_view symbol) const;
  bool contains(std::string_view symbol) const;
  const std::string& symbol(int id) const;
  std::size_t size() const { return symbols_.size(); }
  bool has_unk() const { return has_unk_; }
  const std::vector<std::string>& symbols() const { return symbols_; }

  // Rebuilds a vocab from a serialized symbol list (checkpoint loading).
  static Vocab from_symbols(std::vector<std::string> symbols, bool has_unk);

  bool operator==(const Vocab& other) const {
    return symbols_ == other.symbols_ && has_unk_ == other.has_unk_;
  }

 private:
  Vocab() = default;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
  bool has_unk_ = false;
};

struct EmbeddingTable {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> data;  // row-major

  double* row(std::size_t r) { return data.data() + r * dim; }
  const double* row(std::size_t r) const { return data.data() + r * dim; }
};

// Uniform init in [-0.05, 0.05]; the PAD row stays all-zero.
EmbeddingTable random_table(std::size_t rows, std::size_t dim, std::mt19937_64& rng);

struct GloveLoad {
  EmbeddingTable table;
  double coverage = 0.0;  // fraction of non-reserved vocab words found in the file
};

// Reads GloVe text vectors ("word v1 ... v_dim") for the given vocab. Words
// missing from the file (and UNK) are initialized uniformly in [-0.05, 0.05]
// from the seeded RNG; the fill order follows vocab ids so two loads with the
// same seed produce identical tables.
GloveLoad load_glove(const std::filesystem::path& path, std::size_t dim,
                     const Vocab& vocab, std::uint64_t seed);

struct FeatureVocabs {
  Vocab word = Vocab::open();
  Vocab pos = Vocab::open();
  Vocab etype = Vocab::open();
  Vocab relpos = Vocab::closed();
  int max_relpos = 50;

  // Clips to [-max_relpos, max_relpos] and maps to the closed relpos vocab.
  int relpos_id(int distance) const;
  int etype_id(EntityType etype) const;
  int etype_outside_id() const;
  int word_id(std::string_view surface) const;  // lowercases before lookup
  int pos_id(std::string_view tag) const;
};

// Word vocab from lowercased training tokens, POS vocab from observed tags,
// etype vocab fixed to {O, Process, Task, Material}, relpos vocab closed over
// {-max_relpos .. max_relpos}.
FeatureVocabs build_vocabs(const std::vector<std::vector<Token>>& train_sentences,
                           int max_relpos = 50);

// Fixed-inventory vocabs only (no training data); word/pos stay PAD+UNK.
FeatureVocabs empty_vocabs(int max_relpos = 50);

std::string lowercase(std::string_view text);

}  // namespace scirel::embeddings

#endif  // SCIREL_EMBEDDINGS_HPP
