#ifndef SCIREL_TEST_HELPERS_HPP
#define SCIREL_TEST_HELPERS_HPP

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scirel/corpus.hpp"
#include "scirel/types.hpp"

namespace scirel::test {

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("scirel_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A small corpus with lexical cues per relation class: "kind" sentences carry
// a Hyponym-of pair, "called" sentences a Synonym-of pair, "near" sentences a
// None pair. Entity surfaces vary per document.
inline std::vector<Document> synthetic_corpus(int n_docs) {
  std::vector<Document> docs;
  for (int i = 0; i < n_docs; ++i) {
    Document doc;
    doc.id = "doc" + std::to_string(i);
    std::string a = "alpha" + std::to_string(i);
    std::string b = "beta" + std::to_string(i);
    int pattern = i % 3;
    if (pattern == 0) {
      doc.text = a + " is a kind of " + b + " material.";
      doc.gold.push_back({RelationLabel::HyponymOf, "T1", "T2"});
    } else if (pattern == 1) {
      doc.text = a + " is also called " + b + " here.";
      doc.gold.push_back({RelationLabel::SynonymOf, "T1", "T2"});
    } else {
      doc.text = a + " was measured near " + b + " today.";
    }
    std::size_t a_start = 0;
    std::size_t b_start = doc.text.find(b);
    doc.entities.push_back(
        {"T1", EntityType::Material, a_start, a_start + a.size(), a});
    doc.entities.push_back(
        {"T2", EntityType::Material, b_start, b_start + b.size(), b});
    docs.push_back(std::move(doc));
  }
  return docs;
}

// Random standoff documents for round-trip and statistics properties.
inline Document random_document(std::mt19937_64& rng, int doc_index) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  Document doc;
  doc.id = "rand" + std::to_string(doc_index);

  int n_words = pick(6, 20);
  std::ostringstream text;
  std::vector<std::pair<std::size_t, std::size_t>> word_spans;
  for (int w = 0; w < n_words; ++w) {
    if (w) text << ' ';
    std::size_t start = static_cast<std::size_t>(text.tellp());
    int len = pick(2, 6);
    for (int c = 0; c < len; ++c) text << static_cast<char>('a' + pick(0, 25));
    word_spans.emplace_back(start, start + static_cast<std::size_t>(len));
  }
  text << '.';
  doc.text = text.str();

  int n_entities = pick(0, std::min(5, n_words));
  const EntityType etypes[] = {EntityType::Process, EntityType::Task, EntityType::Material};
  for (int e = 0; e < n_entities; ++e) {
    auto [start, end] = word_spans[static_cast<std::size_t>(pick(0, n_words - 1))];
    EntityMention entity;
    entity.id = "T" + std::to_string(e + 1);
    entity.etype = etypes[pick(0, 2)];
    entity.start = start;
    entity.end = end;
    entity.surface = doc.text.substr(start, end - start);
    doc.entities.push_back(std::move(entity));
  }
  if (doc.entities.size() >= 2 && pick(0, 1)) {
    int i = pick(0, static_cast<int>(doc.entities.size()) - 1);
    int j = pick(0, static_cast<int>(doc.entities.size()) - 1);
    if (i != j && doc.entities[i].etype == doc.entities[j].etype) {
      RelationLabel label = pick(0, 1) ? RelationLabel::SynonymOf : RelationLabel::HyponymOf;
      doc.gold.push_back({label, doc.entities[i].id, doc.entities[j].id});
    }
  }
  return doc;
}

}  // namespace scirel::test

#endif  // SCIREL_TEST_HELPERS_HPP
