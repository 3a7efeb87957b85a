//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrosyn/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace retrosyn {

namespace {

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

TrainConfig TrainConfig::parse(const std::string& text) {
  TrainConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.pop_back();
    }
    std::size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) {
      ++start;
    }
    line = line.substr(start);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    try {
      if (key == "hidden") cfg.hidden = std::stoi(value);
      else if (key == "mpn_steps") cfg.mpn_steps = std::stoi(value);
      else if (key == "conv_channels") cfg.conv_channels = parse_int_list(value);
      else if (key == "conv_kernel") cfg.conv_kernel = std::stoi(value);
      else if (key == "score_hidden") cfg.score_hidden = std::stoi(value);
      else if (key == "max_edit_steps") cfg.max_edit_steps = std::stoi(value);
      else if (key == "embed") cfg.embed = std::stoi(value);
      else if (key == "dropout") cfg.dropout = std::stod(value);
      else if (key == "use_class") cfg.use_class = value == "true" || value == "1";
      else if (key == "lr") cfg.lr = std::stod(value);
      else if (key == "clip_norm") cfg.clip_norm = std::stod(value);
      else if (key == "lambda_edit") cfg.lambda_edit = std::stod(value);
      else if (key == "lambda_synthon") cfg.lambda_synthon = std::stod(value);
      else if (key == "epochs") cfg.epochs = std::stoi(value);
      else if (key == "plateau_factor") cfg.plateau_factor = std::stod(value);
      else if (key == "plateau_patience") cfg.plateau_patience = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "mode") cfg.mode = value;
      else if (key == "beam_width") cfg.beam_width = std::stoi(value);
      else {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": bad value for '" + key + "'");
    }
  }
  if (cfg.mode != "shared" && cfg.mode != "separate" && cfg.mode != "edit" &&
      cfg.mode != "synthon") {
    throw std::invalid_argument("mode must be shared, separate, edit or synthon");
  }
  if (cfg.mode == "shared" && (cfg.lambda_edit <= 0.0 || cfg.lambda_synthon <= 0.0)) {
    throw std::invalid_argument("shared mode requires positive loss weights");
  }
  return cfg;
}

TrainConfig TrainConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config: " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse(buf.str());
}

std::string TrainConfig::serialize() const {
  std::ostringstream os;
  os << "hidden=" << hidden << "\n"
     << "mpn_steps=" << mpn_steps << "\n"
     << "conv_channels=" << join_ints(conv_channels) << "\n"
     << "conv_kernel=" << conv_kernel << "\n"
     << "score_hidden=" << score_hidden << "\n"
     << "max_edit_steps=" << max_edit_steps << "\n"
     << "embed=" << embed << "\n"
     << "dropout=" << dropout << "\n"
     << "use_class=" << (use_class ? "true" : "false") << "\n"
     << "lr=" << lr << "\n"
     << "clip_norm=" << clip_norm << "\n"
     << "lambda_edit=" << lambda_edit << "\n"
     << "lambda_synthon=" << lambda_synthon << "\n"
     << "epochs=" << epochs << "\n"
     << "plateau_factor=" << plateau_factor << "\n"
     << "plateau_patience=" << plateau_patience << "\n"
     << "seed=" << seed << "\n"
     << "mode=" << mode << "\n"
     << "beam_width=" << beam_width << "\n";
  return os.str();
}

namespace {

MpnConfig mpn_config(const TrainConfig& cfg) {
  MpnConfig m;
  m.atom_dim = cfg.use_class ? kAtomFeatureDimClass : kAtomFeatureDim;
  m.bond_dim = kBondFeatureDim;
  m.hidden = cfg.hidden;
  m.steps = cfg.mpn_steps;
  return m;
}

EditModelConfig edit_config(const TrainConfig& cfg) {
  EditModelConfig e;
  e.hidden = cfg.hidden;
  e.conv_channels = cfg.conv_channels;
  e.conv_kernel = cfg.conv_kernel;
  e.score_hidden = cfg.score_hidden;
  e.max_edit_steps = cfg.max_edit_steps;
  e.dropout = cfg.dropout;
  return e;
}

CompletionConfig completion_config(const TrainConfig& cfg) {
  CompletionConfig c;
  c.hidden = cfg.hidden;
  c.embed = cfg.embed;
  c.dropout = cfg.dropout;
  return c;
}

}  // namespace

RetroModel::RetroModel(ParameterStore& store, const TrainConfig& cfg, int vocab_size,
                       RandomGen& rng)
    : edit_encoder(store, "edit.enc", mpn_config(cfg), rng),
      edit_predictor(store, "edit", edit_config(cfg), rng),
      synthon_encoder(store, cfg.mode == "shared" ? "edit.enc" : "lg.enc",
                      mpn_config(cfg), rng),
      completion(store, "lg", completion_config(cfg), vocab_size, rng),
      use_class(cfg.use_class),
      shared_encoder(cfg.mode == "shared") {}

namespace {

// Pooled representations for a product and its synthon components, all
// through the completion-side encoder in one batch.
struct SynthonReps {
  Tensor product;                 // (1, hidden)
  std::vector<Tensor> components;  // completion order, (1, hidden) each
};

SynthonReps completion_reps(const RetroModel& model, const Molecule& product,
                            const Molecule& synthons, const std::vector<int>& order,
                            int reaction_class) {
  std::vector<Molecule> comps;
  for (int c : order) comps.push_back(extract_component(synthons, c));
  std::vector<const Molecule*> mols = {&product};
  std::vector<int> classes = {reaction_class};
  for (const auto& m : comps) {
    mols.push_back(&m);
    classes.push_back(reaction_class);
  }
  BatchedGraph g = batch_graphs(mols, classes, model.use_class);
  Tensor pooled = model.synthon_encoder.pool(model.synthon_encoder.encode(g), g);
  SynthonReps reps;
  reps.product = index_select(pooled, {0});
  for (std::size_t i = 0; i < comps.size(); ++i) {
    reps.components.push_back(index_select(pooled, {static_cast<int>(i) + 1}));
  }
  return reps;
}

}  // namespace

TrainStats train(ParameterStore& store, RetroModel& model,
                 const std::vector<ProcessedRecord>& records, const Vocabulary& vocab,
                 const TrainConfig& cfg, std::ostream* log) {
  (void)vocab;
  TrainStats stats;
  RandomGen rng(cfg.seed + 1);
  AdamConfig adam;
  adam.lr = cfg.lr;
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;

  // parsed once, reused across epochs
  std::vector<Molecule> products;
  for (const auto& record : records) {
    products.push_back(parse_smiles(record.product_smiles));
  }

  std::vector<int> index(records.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<int>(i);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int i = static_cast<int>(index.size()) - 1; i > 0; --i) {
      int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
      std::swap(index[i], index[j]);
    }
    double epoch_total = 0.0, epoch_edit = 0.0, epoch_synthon = 0.0;
    stats.edit_records = 0;
    stats.synthon_single_edit_records = 0;
    stats.synthon_multi_edit_records = 0;

    // loss weights apply in shared mode only; separate stages are unweighted
    const bool separate = cfg.mode == "separate";
    const double w_edit = cfg.mode == "shared" ? cfg.lambda_edit : 1.0;
    const double w_synthon = cfg.mode == "shared" ? cfg.lambda_synthon : 1.0;
    auto step = [&](Tensor loss) {
      store.zero_grad();
      loss.backward();
      store.clip_gradients(cfg.clip_norm);
      store.adam_step(adam);
    };

    for (int idx : index) {
      const ProcessedRecord& record = records[idx];
      const Molecule& product = products[idx];
      Tensor loss;
      double edit_part = 0.0, synthon_part = 0.0;

      if (cfg.mode != "synthon") {
        BatchedGraph g = batch_graphs({&product}, {record.reaction_class},
                                      model.use_class);
        Tensor reps = model.edit_encoder.encode(g);
        Tensor edit_loss =
            record.single_edit()
                ? model.edit_predictor.single_loss(reps, g, 0, record.edits, true, rng)
                : model.edit_predictor.multi_loss(reps, g, 0, record.edits, true, rng);
        edit_part = edit_loss.item();
        if (!std::isfinite(edit_part)) {
          throw std::runtime_error("edit loss is not finite at record " +
                                   std::to_string(idx));
        }
        if (separate) {
          step(edit_loss);
        } else {
          loss = scale(edit_loss, w_edit);
        }
        ++stats.edit_records;
      }

      // the completion stage learns from single-edit records only
      if (cfg.mode != "edit" && record.single_edit()) {
        Molecule synthons = apply_edits(product, record.edits);
        std::vector<int> order = completion_order(synthons);
        SynthonReps reps = completion_reps(model, product, synthons, order,
                                           record.reaction_class);
        Tensor syn_loss = model.completion.sequence_loss(
            reps.product, reps.components, record.lg_indices, true, rng);
        synthon_part = syn_loss.item();
        if (!std::isfinite(synthon_part)) {
          throw std::runtime_error("synthon loss is not finite at record " +
                                   std::to_string(idx));
        }
        if (separate) {
          step(syn_loss);
        } else {
          Tensor weighted = scale(syn_loss, w_synthon);
          loss = loss.defined() ? add(loss, weighted) : weighted;
        }
        ++stats.synthon_single_edit_records;
      }

      if (!separate && loss.defined()) step(loss);
      epoch_edit += edit_part;
      epoch_synthon += synthon_part;
      epoch_total += w_edit * edit_part + w_synthon * synthon_part;
    }

    stats.epoch_loss.push_back(epoch_total / std::max<std::size_t>(1, records.size()));
    stats.edit_loss = epoch_edit;
    stats.synthon_loss = epoch_synthon;
    stats.total_loss = epoch_total;
    if (log) {
      *log << "epoch " << epoch + 1 << " loss " << stats.epoch_loss.back() << " lr "
           << adam.lr << "\n";
    }

    if (stats.epoch_loss.back() < best - 1e-9) {
      best = stats.epoch_loss.back();
      stale = 0;
    } else if (++stale >= cfg.plateau_patience) {
      adam.lr *= cfg.plateau_factor;
      stale = 0;
      if (log) *log << "plateau: lr decayed to " << adam.lr << "\n";
    }
  }
  stats.final_lr = adam.lr;
  return stats;
}

std::vector<Prediction> beam_search(const RetroModel& model, const Molecule& product,
                                    const Vocabulary& vocab, int width,
                                    int reaction_class) {
  RandomGen rng(0);  // inference only; dropout is off
  BatchedGraph g = batch_graphs({&product}, {reaction_class}, model.use_class);
  Tensor edit_reps = model.edit_encoder.encode(g);
  auto edits = model.edit_predictor.predict_single(edit_reps, g, 0, width, rng);

  static const LeavingGroup kEndGroup;
  std::map<std::string, Prediction> merged;

  for (const auto& [edit_set, edit_logp] : edits) {
    Molecule synthons;
    try {
      synthons = apply_edits(product, edit_set);
    } catch (const std::exception&) {
      continue;
    }
    std::vector<int> order = completion_order(synthons);
    SynthonReps reps = completion_reps(model, product, synthons, order, reaction_class);

    struct BeamState {
      std::vector<int> groups;
      double logp = 0.0;
      int prev = Vocabulary::kStart;
    };
    std::vector<BeamState> beam = {{}};
    for (std::size_t c = 0; c < order.size(); ++c) {
      std::vector<BeamState> next;
      for (const BeamState& state : beam) {
        auto top = model.completion.topk(reps.product, reps.components[c], state.prev,
                                         width, rng);
        for (const auto& [gi, lp] : top) {
          BeamState ns = state;
          ns.groups.push_back(gi);
          ns.logp += lp;
          ns.prev = gi;
          next.push_back(std::move(ns));
        }
      }
      std::stable_sort(next.begin(), next.end(),
                       [](const BeamState& a, const BeamState& b) {
                         return a.logp > b.logp;
                       });
      if (static_cast<int>(next.size()) > width) next.resize(width);
      beam = std::move(next);
    }

    for (const BeamState& state : beam) {
      std::vector<const LeavingGroup*> groups;
      for (int gi : state.groups) {
        groups.push_back(gi == Vocabulary::kEnd ? &kEndGroup : &vocab.group(gi));
      }
      Molecule reactants;
      try {
        reactants = assemble_reactants(product, edit_set, groups);
      } catch (const std::exception&) {
        continue;
      }
      Prediction pred;
      pred.reactants = canonical_smiles(reactants);
      pred.score = edit_logp + state.logp;
      pred.edits = edit_set;
      pred.lg_indices = state.groups;
      auto it = merged.find(pred.reactants);
      if (it == merged.end() || pred.score > it->second.score) {
        merged[pred.reactants] = std::move(pred);
      }
    }
  }

  std::vector<Prediction> out;
  for (auto& [key, pred] : merged) out.push_back(std::move(pred));
  std::stable_sort(out.begin(), out.end(), [](const Prediction& a, const Prediction& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.reactants < b.reactants;
  });
  return out;
}

void write_predictions(const std::string& path,
                       const std::vector<PredictionBlock>& blocks) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write predictions: " + path);
  for (const auto& block : blocks) {
    os << "# " << block.product_smiles << "\n";
    int rank = 1;
    for (const auto& pred : block.predictions) {
      os << rank++ << "\t" << pred.score << "\t" << pred.reactants << "\t"
         << serialize_edits(pred.edits) << "\t"
         << (pred.lg_indices.empty() ? "-" : join_ints(pred.lg_indices)) << "\n";
    }
    os << "\n";
  }
}

std::vector<PredictionBlock> read_predictions(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read predictions: " + path);
  std::vector<PredictionBlock> blocks;
  std::string line;
  PredictionBlock current;
  bool open = false;
  auto flush = [&]() {
    if (open) blocks.push_back(std::move(current));
    current = PredictionBlock{};
    open = false;
  };
  while (std::getline(is, line)) {
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.rfind("# ", 0) == 0) {
      flush();
      current.product_smiles = line.substr(2);
      open = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() < 3) {
      throw std::runtime_error("malformed prediction line: " + line);
    }
    Prediction pred;
    pred.score = std::stod(fields[1]);
    pred.reactants = fields[2];
    if (fields.size() > 3) pred.edits = parse_edits(fields[3]);
    if (fields.size() > 4 && fields[4] != "-") {
      pred.lg_indices = parse_int_list(fields[4]);
    }
    if (!open) {
      current.product_smiles.clear();
      open = true;
    }
    current.predictions.push_back(std::move(pred));
  }
  flush();
  return blocks;
}

std::string ground_truth_reactants(const ProcessedRecord& record,
                                   const Vocabulary& vocab) {
  static const LeavingGroup kEndGroup;
  Molecule product = parse_smiles(record.product_smiles);
  std::vector<const LeavingGroup*> groups;
  for (int gi : record.lg_indices) {
    groups.push_back(gi == Vocabulary::kEnd ? &kEndGroup : &vocab.group(gi));
  }
  return canonical_smiles(assemble_reactants(product, record.edits, groups));
}

EvalReport evaluate_topn(const std::vector<PredictionBlock>& blocks,
                         const std::vector<ProcessedRecord>& records,
                         const Vocabulary& vocab, const std::vector<int>& ns) {
  if (blocks.size() != records.size()) {
    throw std::invalid_argument("prediction blocks and records differ in count");
  }
  EvalReport report;
  report.count = static_cast<int>(records.size());
  std::vector<int> hits(ns.size(), 0);
  int edit_hits = 0, group_hits = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::string truth = ground_truth_reactants(records[i], vocab);
    int first_match = -1;
    for (std::size_t r = 0; r < blocks[i].predictions.size(); ++r) {
      if (blocks[i].predictions[r].reactants == truth) {
        first_match = static_cast<int>(r);
        break;
      }
    }
    for (std::size_t k = 0; k < ns.size(); ++k) {
      if (first_match >= 0 && first_match < ns[k]) ++hits[k];
    }
    if (!blocks[i].predictions.empty()) {
      const Prediction& top = blocks[i].predictions.front();
      if (top.edits == records[i].edits) ++edit_hits;
      if (top.lg_indices == records[i].lg_indices) ++group_hits;
    }
  }
  for (std::size_t k = 0; k < ns.size(); ++k) {
    report.topn.push_back({ns[k], report.count ? double(hits[k]) / report.count : 0.0});
  }
  report.edit_accuracy = report.count ? double(edit_hits) / report.count : 0.0;
  report.group_accuracy = report.count ? double(group_hits) / report.count : 0.0;
  return report;
}

void save_records(const std::string& path, const std::vector<ProcessedRecord>& records) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write dataset: " + path);
  for (const auto& record : records) os << serialize_record(record) << "\n";
}

std::vector<ProcessedRecord> load_records(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read dataset: " + path);
  std::vector<ProcessedRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) out.push_back(parse_record(line));
  }
  return out;
}

}  // namespace retrosyn
