#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "scirel/corpus.hpp"
#include "scirel/eval.hpp"
#include "scirel/model.hpp"
#include "scirel/rules.hpp"
#include "scirel/strategies.hpp"
#include "scirel/textproc.hpp"

namespace py = pybind11;
using namespace scirel;
namespace md = scirel::model;
namespace st = scirel::strategies;
namespace tp = scirel::textproc;

namespace {

std::string label_str(RelationLabel label) { return std::string(label_name(label)); }

py::dict report_dict(const eval::ScoreReport& report) {
  auto cls = [](const eval::ClassScore& s) {
    py::dict d;
    d["tp"] = s.tp;
    d["fp"] = s.fp;
    d["fn"] = s.fn;
    d["precision"] = s.precision;
    d["recall"] = s.recall;
    d["f1"] = s.f1;
    return d;
  };
  py::dict d;
  d["Synonym-of"] = cls(report.synonym);
  d["Hyponym-of"] = cls(report.hyponym);
  d["micro"] = cls(report.micro);
  return d;
}

std::vector<st::RelationPrediction> relations_from_tuples(
    const std::vector<std::tuple<std::string, std::string, std::string, std::string>>& rels) {
  std::vector<st::RelationPrediction> out;
  out.reserve(rels.size());
  for (const auto& [doc, a1, a2, label] : rels)
    out.push_back({doc, a1, a2, parse_label(label), 1.0});
  return out;
}

}  // namespace

PYBIND11_MODULE(_scirel, m) {
  m.doc() = "Relation extraction toolkit for scientific text (C++ core)";

  py::register_exception<ParseError>(m, "BratParseError", PyExc_ValueError);

  py::class_<EntityMention>(m, "EntityMention")
      .def_readonly("id", &EntityMention::id)
      .def_property_readonly("etype",
                             [](const EntityMention& e) { return std::string(etype_name(e.etype)); })
      .def_readonly("start", &EntityMention::start)
      .def_readonly("end", &EntityMention::end)
      .def_readonly("surface", &EntityMention::surface)
      .def("__repr__", [](const EntityMention& e) {
        return "EntityMention(" + e.id + ", " + std::string(etype_name(e.etype)) + ", " +
               std::to_string(e.start) + ".." + std::to_string(e.end) + ", '" + e.surface +
               "')";
      });

  py::class_<GoldRelation>(m, "GoldRelation")
      .def_property_readonly("label",
                             [](const GoldRelation& r) { return label_str(r.label); })
      .def_readonly("arg1", &GoldRelation::arg1)
      .def_readonly("arg2", &GoldRelation::arg2);

  py::class_<Document>(m, "Document")
      .def_readonly("id", &Document::id)
      .def_readonly("text", &Document::text)
      .def_readonly("entities", &Document::entities)
      .def_readonly("gold", &Document::gold);

  py::class_<Token>(m, "Token")
      .def_readonly("surface", &Token::surface)
      .def_readonly("start", &Token::start)
      .def_readonly("end", &Token::end)
      .def_readonly("pos", &Token::pos);

  py::class_<tp::Candidate>(m, "Candidate")
      .def_readonly("doc_id", &tp::Candidate::doc_id)
      .def_readonly("arg1", &tp::Candidate::arg1)
      .def_readonly("arg2", &tp::Candidate::arg2)
      .def_property_readonly("gold",
                             [](const tp::Candidate& c) { return label_str(c.gold); })
      .def_readonly("gold_reversed", &tp::Candidate::gold_reversed)
      .def_readonly("sentence", &tp::Candidate::sentence);

  m.def(
      "parse_brat",
      [](const std::string& text, const std::string& ann, const std::string& doc_id) {
        return corpus::parse_brat(text, ann, doc_id);
      },
      py::arg("text"), py::arg("ann"), py::arg("doc_id") = "",
      "Parse standoff annotations against their raw text");

  m.def("to_standoff", &corpus::to_standoff, py::arg("document"));
  m.def("load_directory",
        [](const std::filesystem::path& dir) { return corpus::load_directory(dir); },
        py::arg("directory"), "Load all paired .txt/.ann files");

  m.def(
      "split_sentences",
      [](const std::string& text) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& span : tp::split_sentences(text)) out.emplace_back(span.start, span.end);
        return out;
      },
      py::arg("text"), "Sentence spans as (start, end) byte offsets");

  m.def(
      "tokenize",
      [](const std::string& text) { return tp::tokenize(text, {0, text.size()}); },
      py::arg("text"), "Offset-preserving tokenization of a whole string");

  m.def(
      "generate_candidates",
      [](const Document& doc) {
        return tp::generate_candidates(doc, tp::split_sentences(doc.text));
      },
      py::arg("document"), "Same-type entity pairs per sentence with gold labels");

  m.def(
      "expand_training",
      [](const tp::Candidate& cand, const std::string& strategy) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& pair : st::expand_training(cand, st::parse_strategy(strategy)))
          out.emplace_back(pair.arg1.id, pair.arg2.id, label_str(pair.label));
        return out;
      },
      py::arg("candidate"), py::arg("strategy"),
      "Training pairs (arg1, arg2, label) under an argument-ordering strategy");

  m.def("is_abbreviation", &rules::is_abbreviation, py::arg("long_words"),
        py::arg("short_form"));

  m.def(
      "score",
      [](const std::vector<std::tuple<std::string, std::string, std::string, std::string>>& pred,
         const std::vector<std::tuple<std::string, std::string, std::string, std::string>>&
             gold) {
        return report_dict(eval::score(relations_from_tuples(pred),
                                       relations_from_tuples(gold)));
      },
      py::arg("pred"), py::arg("gold"),
      "Score canonical (doc, arg1, arg2, label) tuples; returns per-class and micro counts");

  m.def("grad_check", &md::grad_check_random_config, py::arg("seed") = 1,
        py::arg("eps") = 1e-5,
        "Finite-difference check of a random small model; returns the report");

  py::class_<nn::GradCheckReport>(m, "GradCheckReport")
      .def_readonly("max_rel_err", &nn::GradCheckReport::max_rel_err)
      .def_readonly("per_array", &nn::GradCheckReport::per_array);

  m.def(
      "train",
      [](const std::filesystem::path& train_dir, const std::filesystem::path& dev_dir,
         const std::string& config_json, const std::filesystem::path& checkpoint,
         std::optional<std::filesystem::path> embeddings) {
        Warnings warnings;
        auto train_docs = corpus::load_directory(train_dir, &warnings);
        auto dev_docs = corpus::load_directory(dev_dir, &warnings);
        auto hp = md::hyperparams_from_json(config_json.empty() ? "{}" : config_json);
        auto result = md::train(train_docs, dev_docs, hp, embeddings, nullptr, &warnings);
        md::save_model(checkpoint, result.model);
        py::dict out;
        out["best_epoch"] = result.history.best_epoch;
        out["dev_f1"] = result.history.dev_f1;
        out["train_loss"] = result.history.train_loss;
        out["warnings"] = warnings;
        return out;
      },
      py::arg("train_dir"), py::arg("dev_dir"), py::arg("config_json") = "",
      py::arg("checkpoint") = "model.ckpt", py::arg("embeddings") = std::nullopt,
      "Train a model from standoff directories and write a checkpoint");

  m.def(
      "predict",
      [](const std::filesystem::path& checkpoint, const std::string& text,
         const std::string& ann, const std::string& doc_id, bool use_rules) {
        auto model = md::load_model(checkpoint);
        auto doc = corpus::parse_brat(text, ann, doc_id);
        std::vector<std::tuple<std::string, std::string, std::string, double>> out;
        for (const auto& rel : md::predict_document(model, doc, nullptr, use_rules))
          out.emplace_back(rel.arg1, rel.arg2, label_str(rel.label), rel.prob);
        return out;
      },
      py::arg("checkpoint"), py::arg("text"), py::arg("ann"), py::arg("doc_id") = "",
      py::arg("use_rules") = true,
      "Predict relations for one document; returns (arg1, arg2, label, prob) tuples");
}
