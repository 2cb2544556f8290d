#ifndef SCIREL_MODEL_HPP
#define SCIREL_MODEL_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scirel/embeddings.hpp"
#include "scirel/eval.hpp"
#include "scirel/nn.hpp"
#include "scirel/strategies.hpp"
#include "scirel/textproc.hpp"
#include "scirel/types.hpp"

namespace scirel::model {

struct Hyperparams {
  int word_dim = 100;
  int feat_dim = 10;
  int filter_height = 5;
  int n_filters = 200;
  double p_drop = 0.5;
  double upsample_ratio = 3.0;
  int minibatch = 16;
  int patience = 10;
  double lr = 0.1;
  int max_epochs = 100;
  std::uint64_t seed = 1;
  int relpos_clip = 50;

  // feature channels: word, relative positions, entity type, POS tag
  bool use_word = true;
  bool use_relpos = true;
  bool use_etype = true;
  bool use_pos = true;

  textproc::Toggles toggles;
  strategies::OrderingStrategy strategy = strategies::OrderingStrategy::FixedOrder;
  strategies::EvalStrategy eval_strategy = strategies::EvalStrategy::FixedOrder;
  strategies::LabelScope label_scope = strategies::LabelScope::All;

  int input_dim() const {
    return (use_word ? word_dim : 0) +
           feat_dim * ((use_relpos ? 2 : 0) + (use_etype ? 1 : 0) + (use_pos ? 1 : 0));
  }
  bool operator==(const Hyperparams&) const = default;
};

// Flat JSON, every field by name.
std::string to_config_json(const Hyperparams& hp);
Hyperparams hyperparams_from_json(const std::string& json_text);

struct TrainHistory {
  std::vector<double> train_loss;  // mean example loss per epoch
  std::vector<double> dev_f1;      // micro-F1 over positive classes per epoch
  std::size_t best_epoch = 0;      // argmax dev_f1, earliest on ties
};

std::string history_csv(const TrainHistory& history);

// The CNN: embedding channels, one convolution with ReLU, max-over-time
// pooling, dropout, and a softmax output layer.
class Cnn {
 public:
  Cnn() = default;
  Cnn(const Hyperparams& hp, embeddings::FeatureVocabs vocabs,
      strategies::LabelInventory inventory,
      const std::optional<std::filesystem::path>& glove = std::nullopt,
      Warnings* warnings = nullptr);

  // Forward pass with dropout off.
  std::vector<double> predict_probs(const textproc::Example& example) const;

  // Forward/backward for one example; adds gradients (scaled by `scale`) into
  // `grads` and returns the example loss. `drop_mask` empty means no dropout.
  double accumulate_gradients(const textproc::Example& example,
                              const std::vector<double>& drop_mask,
                              nn::ParamStore& grads, double scale = 1.0) const;

  nn::Checkpoint to_checkpoint() const;
  static Cnn from_checkpoint(const nn::Checkpoint& ckpt);

  const Hyperparams& hp() const { return hp_; }
  const embeddings::FeatureVocabs& vocabs() const { return vocabs_; }
  const strategies::LabelInventory& inventory() const { return inventory_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }
  double glove_coverage() const { return glove_coverage_; }

  // number of forward passes issued so far (diagnostics/tests)
  std::uint64_t forward_count() const { return forward_count_; }

 private:
  struct ForwardState;
  ForwardState forward(const textproc::Example& example,
                       const std::vector<double>& drop_mask) const;
  std::vector<const nn::Array*> enabled_tables() const;
  std::vector<std::vector<int>> channel_ids(const textproc::Example& example) const;

  Hyperparams hp_;
  embeddings::FeatureVocabs vocabs_;
  strategies::LabelInventory inventory_;
  nn::ParamStore params_;
  double glove_coverage_ = 0.0;
  mutable std::uint64_t forward_count_ = 0;
};

struct TrainResult {
  Cnn model;
  TrainHistory history;
};

// preprocess -> expand_training -> featurize -> upsample -> seeded minibatch
// SGD with early stopping on dev micro-F1 (patience epochs without
// improvement). Returns the parameters of the best epoch.
TrainResult train(const std::vector<Document>& train_docs,
                  const std::vector<Document>& dev_docs, const Hyperparams& hp,
                  const std::optional<std::filesystem::path>& glove = std::nullopt,
                  const textproc::PosFile* pos = nullptr, Warnings* warnings = nullptr);

struct PairPrediction {
  // class probabilities per queried ordering (1 for fixed-order evaluation,
  // 2 for any-order)
  std::vector<std::vector<double>> probs;
  std::optional<strategies::RelationPrediction> relation;
};

// Queries one candidate pair under the evaluation strategy and decodes.
PairPrediction predict_pair(const Cnn& model, const std::vector<Token>& sentence_tokens,
                            const textproc::Candidate& candidate,
                            strategies::EvalStrategy eval_strategy);

// Full-document prediction: candidate pairs, CNN queries, decoding, and
// (optionally) the postprocessing rules.
std::vector<strategies::RelationPrediction> predict_document(
    const Cnn& model, const Document& doc, const textproc::PosFile* pos = nullptr,
    bool use_rules = true, Warnings* warnings = nullptr);

// Scores model predictions over a document set against its gold relations.
eval::ScoreReport evaluate_docs(const Cnn& model, const std::vector<Document>& docs,
                                const textproc::PosFile* pos = nullptr,
                                bool use_rules = false, Warnings* warnings = nullptr);

struct AblationRow {
  std::string config;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Feature channels added one at a time (w, w+rp, w+rp+et, w+rp+et+pos), the
// full model with rules, and each preprocessing toggle disabled in turn.
std::vector<AblationRow> ablate(const std::vector<Document>& train_docs,
                                const std::vector<Document>& dev_docs,
                                const Hyperparams& base,
                                const std::optional<std::filesystem::path>& glove = std::nullopt,
                                const textproc::PosFile* pos = nullptr,
                                Warnings* warnings = nullptr);

std::string ablation_csv(const std::vector<AblationRow>& rows);

// Finite-difference check of the full model's analytic gradients on one
// example (dropout off).
nn::GradCheckReport grad_check_model(Cnn& model, const textproc::Example& example,
                                     double eps, std::size_t coords_per_array = 200);

// Builds a random small configuration (seeded) and checks it end to end.
nn::GradCheckReport grad_check_random_config(std::uint64_t seed, double eps);

void save_model(const std::filesystem::path& path, const Cnn& model);
Cnn load_model(const std::filesystem::path& path);

}  // namespace scirel::model

#endif  // SCIREL_MODEL_HPP
