#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "scirel/embeddings.hpp"
#include "scirel/textproc.hpp"

using namespace scirel;
namespace em = scirel::embeddings;

TEST_CASE("open vocab reserves PAD and UNK") {
  auto vocab = em::Vocab::open();
  CHECK(vocab.size() == 2);
  CHECK(vocab.symbol(em::Vocab::kPad) == "<pad>");
  CHECK(vocab.symbol(em::Vocab::kUnk) == "<unk>");
  CHECK(vocab.add("the") == 2);
  CHECK(vocab.add("the") == 2);
  CHECK(vocab.id("the") == 2);
  CHECK(vocab.id("never-seen") == em::Vocab::kUnk);
}

TEST_CASE("closed vocab rejects unknown symbols") {
  auto vocab = em::Vocab::closed();
  vocab.add("0");
  CHECK(vocab.id("0") == 1);
  CHECK_THROWS_AS(vocab.id("7"), std::out_of_range);
}

TEST_CASE("fixed vocab sizes") {
  auto vocabs = em::empty_vocabs(50);
  CHECK(vocabs.relpos.size() == 2 * 50 + 1 + 1);  // PAD only, no UNK
  CHECK(vocabs.etype.size() == 4 + 2);            // O/Process/Task/Material + PAD/UNK
  CHECK(vocabs.relpos_id(0) == 51);
  CHECK(vocabs.relpos_id(-50) == 1);
  CHECK(vocabs.relpos_id(50) == 101);
  CHECK(vocabs.relpos_id(-1000) == 1);   // clipped
  CHECK(vocabs.relpos_id(1000) == 101);  // clipped
}

TEST_CASE("build_vocabs lowercases words and collects tags") {
  std::string text = "The THE the";
  auto tokens = scirel::textproc::tokenize(text, {0, text.size()});
  scirel::textproc::tag_pos_fallback(tokens);
  auto vocabs = em::build_vocabs({tokens});
  CHECK(vocabs.word.size() == 3);  // PAD, UNK, "the"
  CHECK(vocabs.word_id("THE") == 2);
  CHECK(vocabs.pos.id("DT") >= 2);
}

TEST_CASE("load_glove copies file rows and seeds the rest") {
  auto dir = test::temp_dir("glove");
  test::write_file(dir / "vectors.txt",
                   "the 0.25 -0.5 1.0\n"
                   "unrelated 9 9 9\n");
  auto vocab = em::Vocab::open();
  vocab.add("the");
  vocab.add("missing");

  auto loaded = em::load_glove(dir / "vectors.txt", 3, vocab, 42);
  CHECK(loaded.table.rows == 4);
  CHECK(loaded.table.dim == 3);
  CHECK(loaded.coverage == doctest::Approx(0.5));

  const double* pad = loaded.table.row(0);
  for (int j = 0; j < 3; ++j) CHECK(pad[j] == 0.0);

  const double* the = loaded.table.row(2);
  CHECK(the[0] == doctest::Approx(0.25));
  CHECK(the[1] == doctest::Approx(-0.5));
  CHECK(the[2] == doctest::Approx(1.0));

  for (std::size_t r : {std::size_t{1}, std::size_t{3}}) {  // UNK + missing word
    const double* row = loaded.table.row(r);
    for (int j = 0; j < 3; ++j) {
      CHECK(row[j] >= -0.05);
      CHECK(row[j] <= 0.05);
    }
  }

  SUBCASE("deterministic given the seed") {
    auto again = em::load_glove(dir / "vectors.txt", 3, vocab, 42);
    CHECK(again.table.data == loaded.table.data);
    auto other_seed = em::load_glove(dir / "vectors.txt", 3, vocab, 43);
    CHECK(other_seed.table.data != loaded.table.data);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("load_glove validates line arity") {
  auto dir = test::temp_dir("glove_bad");
  test::write_file(dir / "bad.txt", "the 0.25 -0.5 1.0\nbroken 1 2\n");
  auto vocab = em::Vocab::open();
  vocab.add("the");
  CHECK_THROWS_WITH_AS(em::load_glove(dir / "bad.txt", 3, vocab, 1),
                       doctest::Contains("line 2"), ParseError);
  // a dim mismatch with the config is the same error on line 1
  CHECK_THROWS_WITH_AS(em::load_glove(dir / "bad.txt", 5, vocab, 1),
                       doctest::Contains("line 1"), ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("empty vocab beyond reserved gives a (2, dim) table") {
  auto dir = test::temp_dir("glove_empty");
  test::write_file(dir / "v.txt", "the 1 2\n");
  auto vocab = em::Vocab::open();
  auto loaded = em::load_glove(dir / "v.txt", 2, vocab, 7);
  CHECK(loaded.table.rows == 2);
  CHECK(loaded.table.dim == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("random_table keeps the PAD row zero") {
  std::mt19937_64 rng(5);
  auto table = em::random_table(4, 3, rng);
  for (int j = 0; j < 3; ++j) CHECK(table.row(0)[j] == 0.0);
  bool any_nonzero = false;
  for (std::size_t r = 1; r < 4; ++r)
    for (int j = 0; j < 3; ++j)
      if (table.row(r)[j] != 0.0) any_nonzero = true;
  CHECK(any_nonzero);
}

TEST_CASE("vocab round-trips through symbol lists") {
  auto vocab = em::Vocab::open();
  vocab.add("alpha");
  vocab.add("beta");
  auto rebuilt = em::Vocab::from_symbols(vocab.symbols(), true);
  CHECK(rebuilt == vocab);
  CHECK(rebuilt.id("beta") == vocab.id("beta"));
}
