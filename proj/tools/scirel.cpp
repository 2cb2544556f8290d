// scirel: relation extraction toolkit for scientific text.
// Subcommands: train, predict, evaluate, ablate, stats, gradcheck, merge.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scirel/corpus.hpp"
#include "scirel/eval.hpp"
#include "scirel/model.hpp"
#include "scirel/rules.hpp"

namespace fs = std::filesystem;
using namespace scirel;
namespace md = scirel::model;
namespace st = scirel::strategies;
namespace tp = scirel::textproc;

namespace {

constexpr int kExitBelowThreshold = 1;
constexpr int kExitUsage = 2;

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_warnings(const Warnings& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

struct Paths {
  std::string data_root;
  std::string train_dir;
  std::string dev_dir;
  std::string test_dir;
  std::string embeddings;
  std::string pos_file;

  fs::path resolve(const std::string& exact, const char* subdir) const {
    if (!exact.empty()) return exact;
    if (!data_root.empty()) return fs::path(data_root) / subdir;
    throw CLI::ValidationError("missing path: pass --" + std::string(subdir) +
                               "-dir or set --data-root / SCIREL_DATA");
  }
  std::optional<fs::path> glove() const {
    if (!embeddings.empty()) return fs::path(embeddings);
    return std::nullopt;
  }
};

void add_path_options(CLI::App* cmd, Paths& paths) {
  cmd->add_option("--data-root", paths.data_root,
                  "Data root; train/dev/test default to its subdirectories")
      ->envname("SCIREL_DATA");
  cmd->add_option("--train-dir", paths.train_dir, "Directory of .txt/.ann training pairs");
  cmd->add_option("--dev-dir", paths.dev_dir, "Directory of .txt/.ann development pairs");
  cmd->add_option("--test-dir", paths.test_dir, "Directory of .txt/.ann test pairs");
  cmd->add_option("--embeddings", paths.embeddings,
                  "Pretrained word vectors (text format); random init when omitted");
  cmd->add_option("--pos-file", paths.pos_file,
                  "Pre-tagged tokens: doc_id<TAB>index<TAB>surface<TAB>tag");
}

struct HyperOverrides {
  std::string config_file;
  std::map<std::string, std::string> values;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "Flat JSON config; flags override its fields");
    auto stash = [this](const char* key) {
      return [this, key](const std::string& v) { values[key] = v; };
    };
    cmd->add_option_function<std::string>("--seed", stash("seed"), "RNG seed");
    cmd->add_option_function<std::string>("--lr", stash("lr"), "Learning rate");
    cmd->add_option_function<std::string>("--max-epochs", stash("max_epochs"), "Epoch cap");
    cmd->add_option_function<std::string>("--patience", stash("patience"),
                                          "Early-stopping patience");
    cmd->add_option_function<std::string>("--minibatch", stash("minibatch"), "Minibatch size");
    cmd->add_option_function<std::string>("--upsample-ratio", stash("upsample_ratio"),
                                          "Positive-class upsampling ratio");
    cmd->add_option_function<std::string>("--p-drop", stash("p_drop"), "Dropout probability");
    cmd->add_option_function<std::string>("--word-dim", stash("word_dim"),
                                          "Token embedding dimension");
    cmd->add_option_function<std::string>("--feat-dim", stash("feat_dim"),
                                          "Feature embedding dimension");
    cmd->add_option_function<std::string>("--filter-height", stash("filter_height"),
                                          "Convolution filter height");
    cmd->add_option_function<std::string>("--n-filters", stash("n_filters"),
                                          "Number of convolution filters");
    cmd->add_option_function<std::string>("--strategy", stash("strategy"),
                                          "correct_order|correct_order_neg_sampling|"
                                          "fixed_order|any_order");
    cmd->add_option_function<std::string>("--eval-strategy", stash("eval_strategy"),
                                          "fixed_order|any_order");
    cmd->add_option_function<std::string>("--label-scope", stash("label_scope"),
                                          "all|hyponym|synonym");
    cmd->add_option_function<std::string>("--feature-mask", stash("feature_mask"),
                                          "Comma-separated subset of w,rp,et,pos");
    cmd->add_flag_function("--no-bracket-deletion",
                           [this](std::int64_t) { values["bracket_deletion"] = "false"; },
                           "Keep bracketed reference marks");
    cmd->add_flag_function("--no-sentence-cutting",
                           [this](std::int64_t) { values["sentence_cutting"] = "false"; },
                           "Keep full sentences instead of the argument window");
  }

  md::Hyperparams resolve() const {
    nlohmann::json obj =
        nlohmann::json::parse(config_file.empty() ? std::string("{}") : slurp(config_file));
    for (const auto& [key, raw] : values) {
      if (key == "feature_mask") {
        nlohmann::json mask = nlohmann::json::array();
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) mask.push_back(item);
        obj[key] = mask;
      } else if (key == "strategy" || key == "eval_strategy" || key == "label_scope") {
        obj[key] = raw;
      } else if (key == "bracket_deletion" || key == "sentence_cutting") {
        obj[key] = raw == "true";
      } else {
        obj[key] = nlohmann::json::parse(raw);  // numeric flag values
      }
    }
    return md::hyperparams_from_json(obj.dump());
  }
};

std::vector<Document> load_docs(const fs::path& dir, Warnings* warnings) {
  auto docs = corpus::load_directory(dir, warnings);
  if (docs.empty()) throw std::runtime_error("no documents found in " + dir.string());
  return docs;
}

std::optional<tp::PosFile> load_pos(const Paths& paths) {
  if (paths.pos_file.empty()) return std::nullopt;
  return tp::load_pos_file(paths.pos_file);
}

// --- commands ---------------------------------------------------------------

int cmd_train(const Paths& paths, const HyperOverrides& overrides,
              const std::string& checkpoint, const std::string& history) {
  md::Hyperparams hp = overrides.resolve();
  Warnings warnings;
  auto train_docs = load_docs(paths.resolve(paths.train_dir, "train"), &warnings);
  auto dev_docs = load_docs(paths.resolve(paths.dev_dir, "dev"), &warnings);
  auto pos = load_pos(paths);

  auto result = md::train(train_docs, dev_docs, hp, paths.glove(),
                          pos ? &*pos : nullptr, &warnings);
  print_warnings(warnings);

  md::save_model(checkpoint, result.model);
  write_atomic(history, md::history_csv(result.history));
  std::cerr << "best epoch " << result.history.best_epoch << ", dev micro-F1 "
            << result.history.dev_f1[result.history.best_epoch] << '\n';
  return 0;
}

Document predictions_to_document(const Document& doc,
                                 const std::vector<st::RelationPrediction>& relations) {
  Document out;
  out.id = doc.id;
  out.text = doc.text;
  out.entities = doc.entities;
  for (const auto& rel : relations) out.gold.push_back({rel.label, rel.arg1, rel.arg2});
  return out;
}

int cmd_predict(const Paths& paths, const std::string& checkpoint,
                const std::string& output_dir, bool no_rules) {
  auto model = md::load_model(checkpoint);
  Warnings warnings;
  auto docs = load_docs(paths.resolve(paths.test_dir, "test"), &warnings);
  auto pos = load_pos(paths);

  fs::create_directories(output_dir);
  write_atomic(fs::path(output_dir) / "run_config.json", model.to_checkpoint().config_json);
  for (const auto& doc : docs) {
    auto relations =
        md::predict_document(model, doc, pos ? &*pos : nullptr, !no_rules, &warnings);
    write_atomic(fs::path(output_dir) / (doc.id + ".ann"),
                 corpus::to_standoff(predictions_to_document(doc, relations)));
  }
  print_warnings(warnings);
  return 0;
}

int cmd_evaluate(const std::string& gold_dir, const std::string& pred_dir,
                 const std::string& output, double min_micro_f1) {
  Warnings warnings;
  auto gold_docs = load_docs(gold_dir, &warnings);

  std::vector<st::RelationPrediction> predictions;
  for (const auto& doc : gold_docs) {
    fs::path ann = fs::path(pred_dir) / (doc.id + ".ann");
    if (!fs::exists(ann)) continue;  // no predictions for this document
    auto parsed = corpus::parse_brat(doc.text, slurp(ann), doc.id, &warnings);
    for (const auto& rel : parsed.gold)
      predictions.push_back({doc.id, rel.arg1, rel.arg2, rel.label, 1.0});
  }

  auto report = eval::score(predictions, eval::gold_relations(gold_docs));
  print_warnings(warnings);
  std::string csv = eval::report_csv(report);
  if (output.empty())
    std::cout << csv;
  else
    write_atomic(output, csv);
  if (min_micro_f1 > 0.0 && report.micro.f1 < min_micro_f1) {
    std::cerr << "micro-F1 " << report.micro.f1 << " below threshold " << min_micro_f1
              << '\n';
    return kExitBelowThreshold;
  }
  return 0;
}

int cmd_stats(const std::string& data_dir, const std::string& output) {
  Warnings warnings;
  auto docs = load_docs(data_dir, &warnings);
  std::vector<tp::Candidate> candidates;
  for (const auto& doc : docs) {
    auto prep = tp::preprocess(doc, {}, nullptr, &warnings);
    candidates.insert(candidates.end(), prep.candidates.begin(), prep.candidates.end());
  }
  auto stats = corpus::dataset_stats(docs, candidates, &warnings);
  print_warnings(warnings);
  std::string csv = corpus::stats_csv(stats);
  if (output.empty())
    std::cout << csv;
  else
    write_atomic(output, csv);
  return 0;
}

int cmd_ablate(const Paths& paths, const HyperOverrides& overrides,
               const std::string& output) {
  md::Hyperparams hp = overrides.resolve();
  Warnings warnings;
  auto train_docs = load_docs(paths.resolve(paths.train_dir, "train"), &warnings);
  auto dev_docs = load_docs(paths.resolve(paths.dev_dir, "dev"), &warnings);
  auto pos = load_pos(paths);
  auto rows = md::ablate(train_docs, dev_docs, hp, paths.glove(),
                         pos ? &*pos : nullptr, &warnings);
  print_warnings(warnings);
  std::string csv = md::ablation_csv(rows);
  if (output.empty())
    std::cout << csv;
  else
    write_atomic(output, csv);
  return 0;
}

int cmd_gradcheck(double eps, std::uint64_t seed, int configs, const std::string& output) {
  std::ostringstream csv;
  csv << std::setprecision(6) << "seed,parameter,max_rel_err\n";
  double worst = 0.0;
  for (int i = 0; i < configs; ++i) {
    auto report = md::grad_check_random_config(seed + static_cast<std::uint64_t>(i), eps);
    for (const auto& [name, err] : report.per_array)
      csv << seed + static_cast<std::uint64_t>(i) << ',' << name << ',' << err << '\n';
    worst = std::max(worst, report.max_rel_err);
  }
  if (output.empty())
    std::cout << csv.str();
  else
    write_atomic(output, csv.str());
  std::cerr << "max relative error over " << configs << " configuration(s): " << worst
            << '\n';
  return 0;
}

int cmd_merge(const Paths& paths, const std::string& ckpt_hypo, const std::string& ckpt_syn,
              const std::string& output_dir, bool no_rules) {
  auto hypo_model = md::load_model(ckpt_hypo);
  auto syn_model = md::load_model(ckpt_syn);
  Warnings warnings;
  if (hypo_model.hp().label_scope != st::LabelScope::Hyponym)
    warn(&warnings, ckpt_hypo + " was not trained with label_scope=hyponym");
  if (syn_model.hp().label_scope != st::LabelScope::Synonym)
    warn(&warnings, ckpt_syn + " was not trained with label_scope=synonym");
  auto docs = load_docs(paths.resolve(paths.test_dir, "test"), &warnings);
  auto pos = load_pos(paths);

  fs::create_directories(output_dir);
  write_atomic(fs::path(output_dir) / "run_config.json",
               hypo_model.to_checkpoint().config_json);
  for (const auto& doc : docs) {
    auto from_hypo =
        md::predict_document(hypo_model, doc, pos ? &*pos : nullptr, false, &warnings);
    auto from_syn =
        md::predict_document(syn_model, doc, pos ? &*pos : nullptr, false, &warnings);

    // union; a pair claimed by both goes to the higher probability
    std::map<std::pair<std::string, std::string>, st::RelationPrediction> merged;
    for (const auto& rel : from_hypo) {
      auto key = std::minmax(rel.arg1, rel.arg2);
      merged.emplace(key, rel);
    }
    for (const auto& rel : from_syn) {
      auto key = std::minmax(rel.arg1, rel.arg2);
      auto [it, inserted] = merged.emplace(key, rel);
      if (!inserted && rel.prob > it->second.prob) it->second = rel;
    }
    std::vector<st::RelationPrediction> relations;
    for (auto& [key, rel] : merged) relations.push_back(rel);

    if (!no_rules) {
      auto prep = tp::preprocess(doc, hypo_model.hp().toggles, pos ? &*pos : nullptr,
                                 &warnings);
      std::map<std::size_t, std::vector<rules::PairState>> by_sentence;
      std::map<std::pair<std::string, std::string>, const st::RelationPrediction*> claimed;
      for (const auto& rel : relations)
        claimed[std::minmax(rel.arg1, rel.arg2)] = &rel;
      for (const auto& cand : prep.candidates) {
        rules::PairState state;
        state.e1 = cand.arg1;
        state.e2 = cand.arg2;
        auto it = claimed.find(std::minmax(cand.arg1.id, cand.arg2.id));
        if (it != claimed.end()) {
          state.label = it->second->label;
          state.prob = it->second->prob;
          if (state.label == RelationLabel::HyponymOf)
            state.hypo_first = it->second->arg1 == cand.arg1.id;
        }
        by_sentence[cand.sentence].push_back(state);
      }
      relations.clear();
      for (auto& [sentence, states] : by_sentence) {
        rules::apply_rules(prep.tokens.at(sentence), states);
        for (const auto& state : states) {
          if (state.label == RelationLabel::None) continue;
          if (state.label == RelationLabel::SynonymOf) {
            relations.push_back({doc.id, state.e1.id, state.e2.id, state.label, state.prob});
          } else {
            const auto& hypo = state.hypo_first ? state.e1 : state.e2;
            const auto& hyper = state.hypo_first ? state.e2 : state.e1;
            relations.push_back(
                {doc.id, hypo.id, hyper.id, RelationLabel::HyponymOf, state.prob});
          }
        }
      }
    }
    write_atomic(fs::path(output_dir) / (doc.id + ".ann"),
                 corpus::to_standoff(predictions_to_document(doc, relations)));
  }
  print_warnings(warnings);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relation extraction toolkit for scientific text"};
  app.require_subcommand(1);

  Paths paths;
  HyperOverrides overrides;

  // train
  auto* train = app.add_subcommand("train", "Train a relation classifier");
  add_path_options(train, paths);
  overrides.add_to(train);
  std::string checkpoint = "model.ckpt";
  std::string history = "history.csv";
  train->add_option("--checkpoint", checkpoint, "Output checkpoint path");
  train->add_option("--history", history, "Output per-epoch history CSV");

  // predict
  auto* predict = app.add_subcommand("predict", "Write standoff relation files");
  add_path_options(predict, paths);
  std::string predict_ckpt;
  std::string output_dir = "predictions";
  bool no_rules = false;
  predict->add_option("--checkpoint", predict_ckpt, "Trained checkpoint")->required();
  predict->add_option("--output-dir,-o", output_dir, "Directory for .ann outputs");
  predict->add_flag("--no-rules", no_rules, "Disable rule-based postprocessing");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold");
  std::string gold_dir;
  std::string pred_dir;
  std::string eval_output;
  double min_micro_f1 = 0.0;
  evaluate->add_option("--gold-dir", gold_dir, "Gold .txt/.ann directory")->required();
  evaluate->add_option("--pred-dir", pred_dir, "Predicted .ann directory")->required();
  evaluate->add_option("--output,-o", eval_output, "Report CSV (stdout when omitted)");
  evaluate->add_option("--min-micro-f1", min_micro_f1,
                       "Exit 1 when the micro-F1 falls below this gate");

  // stats
  auto* stats = app.add_subcommand("stats", "Per-class candidate counts");
  std::string stats_dir;
  std::string stats_output;
  stats->add_option("--data-dir", stats_dir, "Directory of .txt/.ann pairs")->required();
  stats->add_option("--output,-o", stats_output, "CSV path (stdout when omitted)");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Feature and preprocessing ablations");
  add_path_options(ablate, paths);
  overrides.add_to(ablate);
  std::string ablate_output;
  ablate->add_option("--output,-o", ablate_output, "CSV path (stdout when omitted)");

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  double eps = 1e-5;
  std::uint64_t gc_seed = 1;
  int gc_configs = 1;
  std::string gc_output;
  gradcheck->add_option("--eps", eps, "Finite-difference step");
  gradcheck->add_option("--seed", gc_seed, "Base RNG seed");
  gradcheck->add_option("--configs", gc_configs, "Number of random configurations");
  gradcheck->add_option("--output,-o", gc_output, "CSV path (stdout when omitted)");

  // merge
  auto* merge = app.add_subcommand("merge", "Merge binary hyponym/synonym classifiers");
  add_path_options(merge, paths);
  std::string ckpt_hypo;
  std::string ckpt_syn;
  std::string merge_output = "predictions";
  bool merge_no_rules = false;
  merge->add_option("--checkpoint-hypo", ckpt_hypo, "Hyponym classifier checkpoint")
      ->required();
  merge->add_option("--checkpoint-syn", ckpt_syn, "Synonym classifier checkpoint")
      ->required();
  merge->add_option("--output-dir,-o", merge_output, "Directory for .ann outputs");
  merge->add_flag("--no-rules", merge_no_rules, "Disable rule-based postprocessing");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(paths, overrides, checkpoint, history);
    if (predict->parsed()) return cmd_predict(paths, predict_ckpt, output_dir, no_rules);
    if (evaluate->parsed()) return cmd_evaluate(gold_dir, pred_dir, eval_output, min_micro_f1);
    if (stats->parsed()) return cmd_stats(stats_dir, stats_output);
    if (ablate->parsed()) return cmd_ablate(paths, overrides, ablate_output);
    if (gradcheck->parsed()) return cmd_gradcheck(eps, gc_seed, gc_configs, gc_output);
    if (merge->parsed())
      return cmd_merge(paths, ckpt_hypo, ckpt_syn, merge_output, merge_no_rules);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
