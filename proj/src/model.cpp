#include "scirel/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "scirel/rules.hpp"
#include "json.hpp"

namespace scirel::model {

using nlohmann::json;
namespace tp = scirel::textproc;
namespace st = scirel::strategies;

// --- hyperparameter config ---------------------------------------------------

std::string to_config_json(const Hyperparams& hp) {
  json j;
  j["word_dim"] = hp.word_dim;
  j["feat_dim"] = hp.feat_dim;
  j["filter_height"] = hp.filter_height;
  j["n_filters"] = hp.n_filters;
  j["p_drop"] = hp.p_drop;
  j["upsample_ratio"] = hp.upsample_ratio;
  j["minibatch"] = hp.minibatch;
  j["patience"] = hp.patience;
  j["lr"] = hp.lr;
  j["max_epochs"] = hp.max_epochs;
  j["seed"] = hp.seed;
  j["relpos_clip"] = hp.relpos_clip;
  json mask = json::array();
  if (hp.use_word) mask.push_back("w");
  if (hp.use_relpos) mask.push_back("rp");
  if (hp.use_etype) mask.push_back("et");
  if (hp.use_pos) mask.push_back("pos");
  j["feature_mask"] = mask;
  j["bracket_deletion"] = hp.toggles.bracket_deletion;
  j["sentence_cutting"] = hp.toggles.sentence_cutting;
  j["strategy"] = std::string(st::strategy_name(hp.strategy));
  j["eval_strategy"] = std::string(st::eval_strategy_name(hp.eval_strategy));
  j["label_scope"] = std::string(st::label_scope_name(hp.label_scope));
  return j.dump(2) + "\n";
}

Hyperparams hyperparams_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  Hyperparams hp;
  hp.word_dim = j.value("word_dim", hp.word_dim);
  hp.feat_dim = j.value("feat_dim", hp.feat_dim);
  hp.filter_height = j.value("filter_height", hp.filter_height);
  hp.n_filters = j.value("n_filters", hp.n_filters);
  hp.p_drop = j.value("p_drop", hp.p_drop);
  hp.upsample_ratio = j.value("upsample_ratio", hp.upsample_ratio);
  hp.minibatch = j.value("minibatch", hp.minibatch);
  hp.patience = j.value("patience", hp.patience);
  hp.lr = j.value("lr", hp.lr);
  hp.max_epochs = j.value("max_epochs", hp.max_epochs);
  hp.seed = j.value("seed", hp.seed);
  hp.relpos_clip = j.value("relpos_clip", hp.relpos_clip);
  if (j.contains("feature_mask")) {
    hp.use_word = hp.use_relpos = hp.use_etype = hp.use_pos = false;
    for (const auto& item : j["feature_mask"]) {
      std::string channel = item.get<std::string>();
      if (channel == "w")
        hp.use_word = true;
      else if (channel == "rp")
        hp.use_relpos = true;
      else if (channel == "et")
        hp.use_etype = true;
      else if (channel == "pos")
        hp.use_pos = true;
      else
        throw std::invalid_argument("unknown feature channel: " + channel);
    }
  }
  hp.toggles.bracket_deletion = j.value("bracket_deletion", hp.toggles.bracket_deletion);
  hp.toggles.sentence_cutting = j.value("sentence_cutting", hp.toggles.sentence_cutting);
  if (j.contains("strategy")) hp.strategy = st::parse_strategy(j["strategy"].get<std::string>());
  if (j.contains("eval_strategy"))
    hp.eval_strategy = st::parse_eval_strategy(j["eval_strategy"].get<std::string>());
  if (j.contains("label_scope"))
    hp.label_scope = st::parse_label_scope(j["label_scope"].get<std::string>());

  if (hp.word_dim <= 0 || hp.feat_dim <= 0 || hp.filter_height <= 0 || hp.n_filters <= 0 ||
      hp.minibatch <= 0 || hp.patience <= 0 || hp.max_epochs <= 0 || hp.relpos_clip <= 0)
    throw std::invalid_argument("hyperparameter dimensions must be positive");
  return hp;
}

std::string history_csv(const TrainHistory& history) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "epoch,train_loss,dev_micro_f1,is_best\n";
  for (std::size_t e = 0; e < history.train_loss.size(); ++e) {
    out << e << ',' << history.train_loss[e] << ',' << history.dev_f1[e] << ','
        << (e == history.best_epoch ? 1 : 0) << '\n';
  }
  return out.str();
}

// --- the CNN -----------------------------------------------------------------

namespace {

constexpr std::uint64_t kTrainSeedSalt = 0x9e3779b97f4a7c15ull;

nn::Array uniform_array(std::vector<std::size_t> shape, std::mt19937_64& rng) {
  nn::Array a = nn::Array::zeros(std::move(shape));
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  for (double& value : a.data) value = dist(rng);
  return a;
}

RelationLabel apply_scope(RelationLabel gold, st::LabelScope scope) {
  if (scope == st::LabelScope::Hyponym && gold == RelationLabel::SynonymOf)
    return RelationLabel::None;
  if (scope == st::LabelScope::Synonym && gold == RelationLabel::HyponymOf)
    return RelationLabel::None;
  return gold;
}

}  // namespace

Cnn::Cnn(const Hyperparams& hp, embeddings::FeatureVocabs vocabs,
         strategies::LabelInventory inventory,
         const std::optional<std::filesystem::path>& glove, Warnings* warnings)
    : hp_(hp), vocabs_(std::move(vocabs)), inventory_(std::move(inventory)) {
  // correct-order models cannot be queried in gold order at test time
  if ((hp_.strategy == st::OrderingStrategy::CorrectOrder ||
       hp_.strategy == st::OrderingStrategy::CorrectOrderNegSampling) &&
      hp_.eval_strategy != st::EvalStrategy::AnyOrder) {
    hp_.eval_strategy = st::EvalStrategy::AnyOrder;
    warn(warnings, "correct-order training forces any-order evaluation");
  }
  std::mt19937_64 rng(hp.seed);
  const auto wd = static_cast<std::size_t>(hp.word_dim);
  const auto fd = static_cast<std::size_t>(hp.feat_dim);

  if (hp.use_word) {
    if (glove) {
      auto loaded = embeddings::load_glove(*glove, wd, vocabs_.word, hp.seed);
      glove_coverage_ = loaded.coverage;
      if (glove_coverage_ < 0.5)
        warn(warnings, "pretrained vectors cover only " +
                           std::to_string(glove_coverage_ * 100.0) + "% of the vocabulary");
      params_.add("word_emb", nn::Array::from_table(loaded.table), true);
    } else {
      nn::Array table = uniform_array({vocabs_.word.size(), wd}, rng);
      std::fill_n(table.data.begin(), wd, 0.0);  // PAD row
      params_.add("word_emb", std::move(table), true);
    }
  }
  auto add_feature_table = [&](const char* name, std::size_t rows) {
    nn::Array table = uniform_array({rows, fd}, rng);
    std::fill_n(table.data.begin(), fd, 0.0);
    params_.add(name, std::move(table), true);
  };
  if (hp.use_relpos) {
    add_feature_table("relpos1_emb", vocabs_.relpos.size());
    add_feature_table("relpos2_emb", vocabs_.relpos.size());
  }
  if (hp.use_etype) add_feature_table("etype_emb", vocabs_.etype.size());
  if (hp.use_pos) add_feature_table("pos_emb", vocabs_.pos.size());

  const auto d = static_cast<std::size_t>(hp.input_dim());
  const auto f = static_cast<std::size_t>(hp.n_filters);
  const auto h = static_cast<std::size_t>(hp.filter_height);
  const auto c = static_cast<std::size_t>(inventory_.size());
  params_.add("conv_filters", uniform_array({f, h, d}, rng));
  params_.add("conv_bias", nn::Array::zeros({f}));
  params_.add("dense_w", uniform_array({c, f}, rng));
  params_.add("dense_b", nn::Array::zeros({c}));
}

std::vector<const nn::Array*> Cnn::enabled_tables() const {
  std::vector<const nn::Array*> tables;
  if (hp_.use_word) tables.push_back(&params_.get("word_emb"));
  if (hp_.use_relpos) {
    tables.push_back(&params_.get("relpos1_emb"));
    tables.push_back(&params_.get("relpos2_emb"));
  }
  if (hp_.use_etype) tables.push_back(&params_.get("etype_emb"));
  if (hp_.use_pos) tables.push_back(&params_.get("pos_emb"));
  return tables;
}

std::vector<std::vector<int>> Cnn::channel_ids(const tp::Example& example) const {
  // PAD-pad inputs shorter than the filter height
  const std::size_t n =
      std::max(example.tokens.size(), static_cast<std::size_t>(hp_.filter_height));
  std::vector<std::vector<int>> ids;
  auto channel = [&](auto field) {
    std::vector<int> column(n, 0);
    for (std::size_t t = 0; t < example.tokens.size(); ++t) column[t] = field(example.tokens[t]);
    ids.push_back(std::move(column));
  };
  if (hp_.use_word) channel([](const tp::TokenFeatures& f) { return f.word; });
  if (hp_.use_relpos) {
    channel([](const tp::TokenFeatures& f) { return f.relpos1; });
    channel([](const tp::TokenFeatures& f) { return f.relpos2; });
  }
  if (hp_.use_etype) channel([](const tp::TokenFeatures& f) { return f.etype; });
  if (hp_.use_pos) channel([](const tp::TokenFeatures& f) { return f.pos; });
  return ids;
}

struct Cnn::ForwardState {
  std::vector<std::vector<int>> ids;
  nn::Array embedded;
  nn::Array maps;
  nn::MaxPool pooled;
  std::vector<double> dense_input;
};

Cnn::ForwardState Cnn::forward(const tp::Example& example,
                               const std::vector<double>& drop_mask) const {
  if (example.tokens.empty()) throw std::invalid_argument("empty example");
  ++forward_count_;
  ForwardState state;
  state.ids = channel_ids(example);
  state.embedded = nn::embed_concat(enabled_tables(), state.ids);
  state.maps =
      nn::conv1d_relu(state.embedded, params_.get("conv_filters"), params_.get("conv_bias"));
  state.pooled = nn::max_pool(state.maps);
  state.dense_input = state.pooled.values;
  if (!drop_mask.empty()) {
    for (std::size_t i = 0; i < state.dense_input.size(); ++i)
      state.dense_input[i] *= drop_mask[i];
  }
  return state;
}

std::vector<double> Cnn::predict_probs(const tp::Example& example) const {
  ForwardState state = forward(example, {});
  return nn::dense_softmax(state.dense_input, params_.get("dense_w"), params_.get("dense_b"));
}

double Cnn::accumulate_gradients(const tp::Example& example,
                                 const std::vector<double>& drop_mask, nn::ParamStore& grads,
                                 double scale) const {
  ForwardState state = forward(example, drop_mask);
  auto dense = nn::dense_softmax_xent(state.dense_input, params_.get("dense_w"),
                                      params_.get("dense_b"), example.label_id);

  // dense layer
  {
    nn::Array& gw = grads.get("dense_w");
    for (std::size_t i = 0; i < gw.data.size(); ++i)
      gw.data[i] += scale * dense.grad_w.data[i];
    nn::Array& gb = grads.get("dense_b");
    for (std::size_t i = 0; i < gb.data.size(); ++i)
      gb.data[i] += scale * dense.grad_b.data[i];
  }

  // through dropout and pooling
  std::vector<double> grad_pooled = std::move(dense.grad_x);
  if (!drop_mask.empty()) {
    for (std::size_t i = 0; i < grad_pooled.size(); ++i) grad_pooled[i] *= drop_mask[i];
  }
  nn::Array grad_maps = nn::max_pool_backward(state.pooled, state.maps.rows(), grad_pooled);

  // convolution
  auto conv = nn::conv1d_relu_backward(state.embedded, params_.get("conv_filters"), state.maps,
                                       grad_maps);
  {
    nn::Array& gf = grads.get("conv_filters");
    for (std::size_t i = 0; i < gf.data.size(); ++i)
      gf.data[i] += scale * conv.filters.data[i];
    nn::Array& gb = grads.get("conv_bias");
    for (std::size_t i = 0; i < gb.data.size(); ++i)
      gb.data[i] += scale * conv.bias.data[i];
  }

  // scatter into the embedding tables (scale folded into the upstream grad)
  for (double& g : conv.input.data) g *= scale;
  std::vector<nn::Array*> table_grads;
  if (hp_.use_word) table_grads.push_back(&grads.get("word_emb"));
  if (hp_.use_relpos) {
    table_grads.push_back(&grads.get("relpos1_emb"));
    table_grads.push_back(&grads.get("relpos2_emb"));
  }
  if (hp_.use_etype) table_grads.push_back(&grads.get("etype_emb"));
  if (hp_.use_pos) table_grads.push_back(&grads.get("pos_emb"));
  nn::embed_concat_backward(conv.input, state.ids, table_grads);

  return dense.loss;
}

nn::Checkpoint Cnn::to_checkpoint() const {
  nn::Checkpoint ckpt;
  ckpt.config_json = to_config_json(hp_);
  ckpt.vocabs.emplace_back("word", vocabs_.word.symbols());
  ckpt.vocabs.emplace_back("pos", vocabs_.pos.symbols());
  ckpt.vocabs.emplace_back("etype", vocabs_.etype.symbols());
  ckpt.vocabs.emplace_back("relpos", vocabs_.relpos.symbols());
  ckpt.params = params_;
  return ckpt;
}

Cnn Cnn::from_checkpoint(const nn::Checkpoint& ckpt) {
  Cnn model;
  model.hp_ = hyperparams_from_json(ckpt.config_json);
  model.inventory_ = st::LabelInventory::make(model.hp_.strategy, model.hp_.label_scope);

  auto find_vocab = [&](std::string_view name) -> const std::vector<std::string>& {
    for (const auto& [vocab_name, symbols] : ckpt.vocabs)
      if (vocab_name == name) return symbols;
    throw std::runtime_error("checkpoint is missing vocab " + std::string(name));
  };
  auto rebuild = [](const std::vector<std::string>& symbols) {
    bool has_unk = symbols.size() > 1 && symbols[1] == "<unk>";
    return embeddings::Vocab::from_symbols(symbols, has_unk);
  };
  model.vocabs_.word = rebuild(find_vocab("word"));
  model.vocabs_.pos = rebuild(find_vocab("pos"));
  model.vocabs_.etype = rebuild(find_vocab("etype"));
  model.vocabs_.relpos = rebuild(find_vocab("relpos"));
  model.vocabs_.max_relpos = model.hp_.relpos_clip;

  model.params_ = ckpt.params;
  for (const char* required : {"conv_filters", "conv_bias", "dense_w", "dense_b"}) {
    if (!model.params_.has(required))
      throw std::runtime_error(std::string("checkpoint is missing parameter ") + required);
  }
  return model;
}

void save_model(const std::filesystem::path& path, const Cnn& model) {
  nn::save_checkpoint(path, model.to_checkpoint());
}

Cnn load_model(const std::filesystem::path& path) {
  return Cnn::from_checkpoint(nn::load_checkpoint(path));
}

// --- featurization -----------------------------------------------------------

namespace {

struct PreparedDoc {
  const Document* doc;
  tp::PreprocessedDoc prep;
};

std::vector<PreparedDoc> prepare_docs(const std::vector<Document>& docs,
                                      const tp::Toggles& toggles, const tp::PosFile* pos,
                                      Warnings* warnings) {
  std::vector<PreparedDoc> out;
  out.reserve(docs.size());
  for (const auto& doc : docs)
    out.push_back({&doc, tp::preprocess(doc, toggles, pos, warnings)});
  return out;
}

tp::Example featurize_pair(const PreparedDoc& prepared, const tp::Candidate& candidate,
                           const st::LabeledPair& pair, int label_id,
                           const embeddings::FeatureVocabs& vocabs, const tp::Toggles& toggles) {
  const auto& tokens = prepared.prep.tokens.at(candidate.sentence);
  tp::Example example =
      tp::cut_and_featurize(tokens, pair.arg1, pair.arg2, label_id, vocabs, toggles);
  example.doc_id = pair.doc_id;
  return example;
}

std::vector<tp::Example> featurize_training(const std::vector<PreparedDoc>& prepared,
                                            const Hyperparams& hp,
                                            const embeddings::FeatureVocabs& vocabs,
                                            const st::LabelInventory& inventory) {
  std::vector<tp::Example> examples;
  for (const auto& doc : prepared) {
    for (const auto& candidate : doc.prep.candidates) {
      tp::Candidate scoped = candidate;
      scoped.gold = apply_scope(candidate.gold, hp.label_scope);
      if (scoped.gold != RelationLabel::HyponymOf) scoped.gold_reversed = false;
      for (const auto& pair : st::expand_training(scoped, hp.strategy)) {
        examples.push_back(featurize_pair(doc, candidate, pair, inventory.id(pair.label),
                                          vocabs, hp.toggles));
      }
    }
  }
  return examples;
}

// one featurized query per ordering the evaluation strategy asks for
struct PairQueries {
  const tp::Candidate* candidate;
  std::vector<st::LabeledPair> pairs;
  std::vector<tp::Example> examples;
};

PairQueries build_queries(const PreparedDoc& prepared, const tp::Candidate& candidate,
                          const Cnn& model) {
  PairQueries queries;
  queries.candidate = &candidate;
  st::LabeledPair text_order{candidate.doc_id, candidate.arg1, candidate.arg2,
                             RelationLabel::None, true};
  queries.pairs.push_back(text_order);
  if (model.hp().eval_strategy == st::EvalStrategy::AnyOrder) {
    st::LabeledPair reversed{candidate.doc_id, candidate.arg2, candidate.arg1,
                             RelationLabel::None, false};
    queries.pairs.push_back(reversed);
  }
  for (const auto& pair : queries.pairs)
    queries.examples.push_back(
        featurize_pair(prepared, candidate, pair, 0, model.vocabs(), model.hp().toggles));
  return queries;
}

std::vector<st::Prediction> run_queries(const Cnn& model, const PairQueries& queries) {
  std::vector<st::Prediction> predictions;
  for (std::size_t q = 0; q < queries.pairs.size(); ++q) {
    std::vector<double> probs = model.predict_probs(queries.examples[q]);
    auto arg = static_cast<std::size_t>(
        std::max_element(probs.begin(), probs.end()) - probs.begin());
    st::LabeledPair pair = queries.pairs[q];
    pair.label = model.inventory().label(static_cast<int>(arg));
    predictions.push_back({pair, probs[arg]});
  }
  return predictions;
}

}  // namespace

// --- training ----------------------------------------------------------------

namespace {

struct DevSet {
  std::vector<st::RelationPrediction> gold;
  std::vector<PairQueries> queries;
};

DevSet build_dev_set(const std::vector<PreparedDoc>& prepared,
                     const std::vector<Document>& docs, const Cnn& model) {
  DevSet dev;
  dev.gold = eval::gold_relations(docs);
  for (const auto& doc : prepared) {
    for (const auto& candidate : doc.prep.candidates)
      dev.queries.push_back(build_queries(doc, candidate, model));
  }
  return dev;
}

double dev_micro_f1(const Cnn& model, const DevSet& dev) {
  if (dev.queries.empty()) return 0.0;
  std::vector<st::Prediction> predictions;
  for (const auto& queries : dev.queries) {
    auto preds = run_queries(model, queries);
    predictions.insert(predictions.end(), preds.begin(), preds.end());
  }
  auto decoded = st::decode(predictions, model.hp().eval_strategy);
  return eval::score(decoded, dev.gold).micro.f1;
}

}  // namespace

TrainResult train(const std::vector<Document>& train_docs,
                  const std::vector<Document>& dev_docs, const Hyperparams& hp,
                  const std::optional<std::filesystem::path>& glove,
                  const tp::PosFile* pos, Warnings* warnings) {
  if (train_docs.empty()) throw std::invalid_argument("empty training set");

  auto prepared = prepare_docs(train_docs, hp.toggles, pos, warnings);

  std::vector<std::vector<Token>> train_sentences;
  for (const auto& doc : prepared)
    for (const auto& sentence : doc.prep.tokens) train_sentences.push_back(sentence);
  auto vocabs = embeddings::build_vocabs(train_sentences, hp.relpos_clip);
  auto inventory = st::LabelInventory::make(hp.strategy, hp.label_scope);

  std::vector<tp::Example> examples = featurize_training(prepared, hp, vocabs, inventory);
  if (examples.empty()) throw std::invalid_argument("no training examples generated");
  bool any_positive = std::any_of(examples.begin(), examples.end(),
                                  [](const tp::Example& e) { return e.label_id != 0; });
  if (!any_positive)
    throw std::runtime_error(
        "all-negative training set: no positive class to upsample, training is impossible");

  examples = st::upsample(examples, hp.upsample_ratio, inventory, warnings);

  TrainResult result;
  result.model = Cnn(hp, std::move(vocabs), inventory, glove, warnings);
  Cnn& model = result.model;

  auto dev_prepared = prepare_docs(dev_docs, hp.toggles, pos, warnings);
  DevSet dev = build_dev_set(dev_prepared, dev_docs, model);

  std::mt19937_64 rng(hp.seed ^ kTrainSeedSalt);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  nn::ParamStore grads = model.params().zeros_like();
  nn::ParamStore best_params = model.params();
  double best_f1 = -1.0;
  int epochs_since_best = 0;

  for (int epoch = 0; epoch < hp.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    const auto batch_size = static_cast<std::size_t>(hp.minibatch);
    for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
      std::size_t end = std::min(order.size(), begin + batch_size);
      for (auto& entry : grads.entries)
        std::fill(entry.value.data.begin(), entry.value.data.end(), 0.0);
      double scale = 1.0 / static_cast<double>(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        std::vector<double> mask;
        if (hp.p_drop > 0.0)
          mask = nn::dropout_mask(static_cast<std::size_t>(hp.n_filters), hp.p_drop, rng);
        epoch_loss += model.accumulate_gradients(examples[order[i]], mask, grads, scale);
      }
      nn::sgd_step(model.params(), grads, hp.lr);
    }

    result.history.train_loss.push_back(epoch_loss / static_cast<double>(examples.size()));
    double f1 = dev_micro_f1(model, dev);
    result.history.dev_f1.push_back(f1);

    if (f1 > best_f1) {
      best_f1 = f1;
      best_params = model.params();
      result.history.best_epoch = static_cast<std::size_t>(epoch);
      epochs_since_best = 0;
    } else if (++epochs_since_best >= hp.patience) {
      break;
    }
  }

  model.params() = std::move(best_params);
  return result;
}

// --- prediction ----------------------------------------------------------------

PairPrediction predict_pair(const Cnn& model, const std::vector<Token>& sentence_tokens,
                            const tp::Candidate& candidate, st::EvalStrategy eval_strategy) {
  PairQueries queries;
  queries.candidate = &candidate;
  queries.pairs.push_back({candidate.doc_id, candidate.arg1, candidate.arg2,
                           RelationLabel::None, true});
  if (eval_strategy == st::EvalStrategy::AnyOrder)
    queries.pairs.push_back({candidate.doc_id, candidate.arg2, candidate.arg1,
                             RelationLabel::None, false});

  PairPrediction out;
  std::vector<st::Prediction> predictions;
  for (auto& pair : queries.pairs) {
    tp::Example example = tp::cut_and_featurize(sentence_tokens, pair.arg1, pair.arg2, 0,
                                                model.vocabs(), model.hp().toggles);
    example.doc_id = candidate.doc_id;
    std::vector<double> probs = model.predict_probs(example);
    auto arg = static_cast<std::size_t>(
        std::max_element(probs.begin(), probs.end()) - probs.begin());
    pair.label = model.inventory().label(static_cast<int>(arg));
    predictions.push_back({pair, probs[arg]});
    out.probs.push_back(std::move(probs));
  }
  auto decoded = st::decode(predictions, eval_strategy);
  if (!decoded.empty()) out.relation = decoded.front();
  return out;
}

namespace {

rules::PairState pair_state_from(const tp::Candidate& candidate,
                                 const std::optional<st::RelationPrediction>& relation) {
  rules::PairState state;
  state.e1 = candidate.arg1;
  state.e2 = candidate.arg2;
  if (!relation) {
    state.label = RelationLabel::None;
    state.prob = 0.0;
    return state;
  }
  state.label = relation->label;
  state.prob = relation->prob;
  if (relation->label == RelationLabel::HyponymOf)
    state.hypo_first = relation->arg1 == candidate.arg1.id;
  return state;
}

std::vector<st::RelationPrediction> states_to_relations(
    const std::string& doc_id, const std::vector<rules::PairState>& states) {
  std::vector<st::RelationPrediction> out;
  for (const auto& state : states) {
    if (state.label == RelationLabel::None) continue;
    if (state.label == RelationLabel::SynonymOf) {
      out.push_back({doc_id, state.e1.id, state.e2.id, state.label, state.prob});
    } else {
      const auto& hypo = state.hypo_first ? state.e1 : state.e2;
      const auto& hyper = state.hypo_first ? state.e2 : state.e1;
      out.push_back({doc_id, hypo.id, hyper.id, RelationLabel::HyponymOf, state.prob});
    }
  }
  return out;
}

}  // namespace

std::vector<st::RelationPrediction> predict_document(const Cnn& model, const Document& doc,
                                                     const tp::PosFile* pos, bool use_rules,
                                                     Warnings* warnings) {
  tp::PreprocessedDoc prep = tp::preprocess(doc, model.hp().toggles, pos, warnings);

  // pair predictions grouped per sentence so the rules see whole sentences
  std::map<std::size_t, std::vector<rules::PairState>> by_sentence;
  for (const auto& candidate : prep.candidates) {
    auto prediction = predict_pair(model, prep.tokens.at(candidate.sentence), candidate,
                                   model.hp().eval_strategy);
    by_sentence[candidate.sentence].push_back(pair_state_from(candidate, prediction.relation));
  }

  std::vector<st::RelationPrediction> out;
  for (auto& [sentence, states] : by_sentence) {
    if (use_rules) rules::apply_rules(prep.tokens.at(sentence), states);
    auto relations = states_to_relations(doc.id, states);
    out.insert(out.end(), relations.begin(), relations.end());
  }
  return out;
}

eval::ScoreReport evaluate_docs(const Cnn& model, const std::vector<Document>& docs,
                                const tp::PosFile* pos, bool use_rules, Warnings* warnings) {
  std::vector<st::RelationPrediction> predictions;
  for (const auto& doc : docs) {
    auto rels = predict_document(model, doc, pos, use_rules, warnings);
    predictions.insert(predictions.end(), rels.begin(), rels.end());
  }
  return eval::score(predictions, eval::gold_relations(docs));
}

// --- ablation ------------------------------------------------------------------

std::vector<AblationRow> ablate(const std::vector<Document>& train_docs,
                                const std::vector<Document>& dev_docs, const Hyperparams& base,
                                const std::optional<std::filesystem::path>& glove,
                                const tp::PosFile* pos, Warnings* warnings) {
  struct Config {
    std::string name;
    Hyperparams hp;
    bool rules = false;
  };
  std::vector<Config> configs;
  auto features = [&](bool rp, bool et, bool p) {
    Hyperparams hp = base;
    hp.use_word = true;
    hp.use_relpos = rp;
    hp.use_etype = et;
    hp.use_pos = p;
    return hp;
  };
  configs.push_back({"w", features(false, false, false)});
  configs.push_back({"w+rp", features(true, false, false)});
  configs.push_back({"w+rp+et", features(true, true, false)});
  configs.push_back({"w+rp+et+pos", features(true, true, true)});
  configs.push_back({"w+rp+et+pos+rules", features(true, true, true), true});
  {
    Hyperparams hp = features(true, true, true);
    hp.toggles.bracket_deletion = false;
    configs.push_back({"-bracket_deletion", hp});
  }
  {
    Hyperparams hp = features(true, true, true);
    hp.toggles.sentence_cutting = false;
    configs.push_back({"-sentence_cutting", hp});
  }

  std::vector<AblationRow> rows;
  for (const auto& config : configs) {
    TrainResult trained = train(train_docs, dev_docs, config.hp, glove, pos, warnings);
    auto report = evaluate_docs(trained.model, dev_docs, pos, config.rules, warnings);
    rows.push_back({config.name, report.micro.precision, report.micro.recall, report.micro.f1});
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "config,precision,recall,f1\n";
  for (const auto& row : rows)
    out << row.config << ',' << row.precision << ',' << row.recall << ',' << row.f1 << '\n';
  return out.str();
}

// --- gradient checking -----------------------------------------------------------

nn::GradCheckReport grad_check_model(Cnn& model, const tp::Example& example, double eps,
                                     std::size_t coords_per_array) {
  nn::ParamStore analytic = model.params().zeros_like();
  model.accumulate_gradients(example, {}, analytic, 1.0);
  auto loss = [&]() {
    std::vector<double> probs = model.predict_probs(example);
    return -std::log(probs[static_cast<std::size_t>(example.label_id)]);
  };
  return nn::grad_check(model.params(), loss, analytic, eps, coords_per_array,
                        model.hp().seed ^ 0x5eedc0deull);
}

nn::GradCheckReport grad_check_random_config(std::uint64_t seed, double eps) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  Hyperparams hp;
  hp.seed = seed;
  hp.word_dim = pick(3, 8);
  hp.feat_dim = pick(2, 4);  // input dim <= 8 + 4*4 = 24
  hp.n_filters = pick(2, 8);
  hp.filter_height = pick(1, 5);
  hp.p_drop = 0.0;
  hp.strategy = st::OrderingStrategy::FixedOrder;

  auto vocabs = embeddings::empty_vocabs(hp.relpos_clip);
  const int n_words = pick(5, 20);
  for (int w = 0; w < n_words; ++w) vocabs.word.add("word" + std::to_string(w));
  for (int p = 0; p < 6; ++p) vocabs.pos.add("TAG" + std::to_string(p));

  auto inventory = st::LabelInventory::make(hp.strategy, hp.label_scope);
  Cnn model(hp, vocabs, inventory);

  tp::Example example;
  const int n_tokens = pick(1, 12);
  auto id_in = [&](const embeddings::Vocab& vocab) {
    return pick(1, static_cast<int>(vocab.size()) - 1);
  };
  for (int t = 0; t < n_tokens; ++t) {
    tp::TokenFeatures feats;
    feats.word = id_in(vocabs.word);
    feats.relpos1 = id_in(vocabs.relpos);
    feats.relpos2 = id_in(vocabs.relpos);
    feats.etype = id_in(vocabs.etype);
    feats.pos = id_in(vocabs.pos);
    example.tokens.push_back(feats);
  }
  example.label_id = pick(0, inventory.size() - 1);

  return grad_check_model(model, example, eps);
}

}  // namespace scirel::model
