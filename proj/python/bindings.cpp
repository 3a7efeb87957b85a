//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "retrosyn/pipeline.hpp"

namespace py = pybind11;
using namespace retrosyn;

namespace {

/// One bundle of configuration, vocabulary and parameters, mirroring what
/// the command line tool holds between subcommands.
class PyModel {
 public:
  PyModel(const std::string& config_text, const Vocabulary& vocab)
      : cfg_(TrainConfig::parse(config_text)), vocab_(vocab) {
    RandomGen rng(cfg_.seed);
    model_ = std::make_unique<RetroModel>(store_, cfg_, vocab_.size(), rng);
  }

  py::dict fit(const std::vector<ProcessedRecord>& records) {
    TrainStats stats = train(store_, *model_, records, vocab_, cfg_);
    py::dict out;
    out["epoch_loss"] = stats.epoch_loss;
    out["edit_loss"] = stats.edit_loss;
    out["synthon_loss"] = stats.synthon_loss;
    out["total_loss"] = stats.total_loss;
    out["final_lr"] = stats.final_lr;
    out["edit_records"] = stats.edit_records;
    out["synthon_single_edit_records"] = stats.synthon_single_edit_records;
    out["synthon_multi_edit_records"] = stats.synthon_multi_edit_records;
    return out;
  }

  std::vector<std::pair<std::string, double>> predict(const std::string& smiles,
                                                      int width) const {
    Molecule product = parse_smiles(smiles);
    std::vector<std::pair<std::string, double>> out;
    for (const Prediction& p : beam_search(*model_, product, vocab_, width)) {
      out.push_back({p.reactants, p.score});
    }
    return out;
  }

  void save(const std::string& path) const {
    std::map<std::string, std::string> meta;
    meta["format"] = "1";
    meta["config"] = cfg_.serialize();
    meta["vocab_size"] = std::to_string(vocab_.size());
    save_checkpoint(path, store_, meta, false);
  }

  static std::unique_ptr<PyModel> load(const std::string& path,
                                       const Vocabulary& vocab) {
    std::map<std::string, std::string> meta;
    ParameterStore probe;
    load_checkpoint(path, probe, meta);
    auto model = std::make_unique<PyModel>(meta.at("config"), vocab);
    model->store_ = ParameterStore();
    std::map<std::string, std::string> ignored;
    load_checkpoint(path, model->store_, ignored);
    RandomGen rng(model->cfg_.seed);
    model->model_ =
        std::make_unique<RetroModel>(model->store_, model->cfg_, vocab.size(), rng);
    return model;
  }

  std::string config_text() const { return cfg_.serialize(); }

 private:
  TrainConfig cfg_;
  Vocabulary vocab_;
  ParameterStore store_;
  std::unique_ptr<RetroModel> model_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "retrosyn core: graph edits, synthon completion and beam search";

  py::register_exception<ParseError>(m, "SmilesParseError", PyExc_ValueError);
  py::register_exception<ValenceError>(m, "MoleculeValenceError", PyExc_ValueError);
  py::register_exception<RecordError>(m, "ReactionRecordError", PyExc_ValueError);

  // molecules
  m.def("canonical_smiles",
        [](const std::string& s) { return canonical_smiles(parse_smiles(s)); },
        py::arg("smiles"), "Canonical SMILES with atom maps stripped.");
  m.def("is_isomorphic",
        [](const std::string& a, const std::string& b) {
          return is_isomorphic(parse_smiles(a), parse_smiles(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("num_atoms",
        [](const std::string& s) { return parse_smiles(s).num_atoms(); });
  m.def("num_bonds",
        [](const std::string& s) { return parse_smiles(s).num_bonds(); });
  m.def("num_edit_candidates",
        [](const std::string& s) {
          return EditPredictor::num_candidates(parse_smiles(s));
        },
        "Single-edit scoring slots for a product: 4 per bond plus 1 per atom.");

  // dataset
  py::class_<ProcessedRecord>(m, "ProcessedRecord")
      .def_readonly("product_smiles", &ProcessedRecord::product_smiles)
      .def_readonly("lg_indices", &ProcessedRecord::lg_indices)
      .def_readonly("reaction_class", &ProcessedRecord::reaction_class)
      .def_property_readonly(
          "edits", [](const ProcessedRecord& r) { return serialize_edits(r.edits); })
      .def("single_edit", &ProcessedRecord::single_edit)
      .def("__repr__", [](const ProcessedRecord& r) {
        return "<ProcessedRecord " + serialize_record(r) + ">";
      });

  py::class_<Vocabulary>(m, "Vocabulary")
      .def("__len__", &Vocabulary::size)
      .def("key", &Vocabulary::key)
      .def("index_of", &Vocabulary::index_of)
      .def("save", &Vocabulary::save)
      .def_static("load", &Vocabulary::load);

  py::class_<ProcessedDataset>(m, "ProcessedDataset")
      .def_readonly("records", &ProcessedDataset::records)
      .def_readonly("vocab", &ProcessedDataset::vocab)
      .def_readonly("warnings", &ProcessedDataset::warnings)
      .def_property_readonly("stats", [](const ProcessedDataset& d) {
        py::dict out;
        out["total"] = d.stats.total;
        out["ok"] = d.stats.ok;
        out["parse_errors"] = d.stats.parse_errors;
        out["new_bond_skips"] = d.stats.new_bond_skips;
        out["alignment_skips"] = d.stats.alignment_skips;
        out["other_skips"] = d.stats.other_skips;
        out["single_edit"] = d.stats.single_edit;
        return out;
      });

  m.def("preprocess", &preprocess, py::arg("lines"),
        "Parse atom-mapped reactions into edit/leaving-group records.");
  m.def("save_records", &save_records);
  m.def("load_records", &load_records);
  m.def("ground_truth_reactants", &ground_truth_reactants, py::arg("record"),
        py::arg("vocab"));

  // model
  py::class_<PyModel>(m, "Model")
      .def(py::init<const std::string&, const Vocabulary&>(), py::arg("config"),
           py::arg("vocab"))
      .def("fit", &PyModel::fit, py::arg("records"))
      .def("predict", &PyModel::predict, py::arg("smiles"), py::arg("width") = 10)
      .def("save", &PyModel::save, py::arg("path"))
      .def_static("load", &PyModel::load, py::arg("path"), py::arg("vocab"))
      .def_property_readonly("config", &PyModel::config_text);

  // evaluation over prediction files
  m.def("evaluate",
        [](const std::string& predictions_path,
           const std::vector<ProcessedRecord>& records, const Vocabulary& vocab,
           const std::vector<int>& ns) {
          EvalReport report =
              evaluate_topn(read_predictions(predictions_path), records, vocab, ns);
          py::dict out;
          py::dict topn;
          for (const auto& [n, acc] : report.topn) topn[py::int_(n)] = acc;
          out["topn"] = topn;
          out["edit_accuracy"] = report.edit_accuracy;
          out["group_accuracy"] = report.group_accuracy;
          out["count"] = report.count;
          return out;
        },
        py::arg("predictions_path"), py::arg("records"), py::arg("vocab"),
        py::arg("ns") = std::vector<int>{1, 3, 5, 10, 50});
}
