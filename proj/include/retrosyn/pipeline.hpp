//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RETROSYN_PIPELINE_HPP
#define RETROSYN_PIPELINE_HPP

#include <iosfwd>

#include "retrosyn/completion.hpp"
#include "retrosyn/edit_model.hpp"

namespace retrosyn {

/// Flat key=value run configuration. Unknown keys are rejected.
struct TrainConfig {
  // model
  int hidden = 300;
  int mpn_steps = 10;
  std::vector<int> conv_channels = {600, 300, 150};
  int conv_kernel = 5;
  int score_hidden = 300;
  int max_edit_steps = 6;
  int embed = 200;
  double dropout = 0.2;
  bool use_class = false;
  // optimization
  double lr = 0.001;
  double clip_norm = 20.0;
  double lambda_edit = 1.0;
  double lambda_synthon = 2.0;
  int epochs = 100;
  double plateau_factor = 0.9;
  int plateau_patience = 5;
  std::uint64_t seed = 0;
  // shared: one encoder, combined loss lambda_e*L_e + lambda_s*L_s
  // separate: independent encoders, each loss stepped on its own
  // edit | synthon: train only that stage
  std::string mode = "shared";
  int beam_width = 10;

  static TrainConfig parse(const std::string& text);
  static TrainConfig load(const std::string& path);
  std::string serialize() const;
};

/// The full two-stage model over one parameter store. In shared mode the
/// completion stage reads the edit encoder's parameters, so both losses
/// update one message passing network.
struct RetroModel {
  RetroModel(ParameterStore& store, const TrainConfig& cfg, int vocab_size,
             RandomGen& rng);

  MpnEncoder edit_encoder;
  EditPredictor edit_predictor;
  MpnEncoder synthon_encoder;
  CompletionModel completion;
  bool use_class;
  bool shared_encoder;
};

struct TrainStats {
  std::vector<double> epoch_loss;
  double final_lr = 0.0;
  // loss accounting for the last epoch
  double edit_loss = 0.0;
  double synthon_loss = 0.0;
  double total_loss = 0.0;
  // which records fed the synthon loss
  int synthon_single_edit_records = 0;
  int synthon_multi_edit_records = 0;
  int edit_records = 0;
};

TrainStats train(ParameterStore& store, RetroModel& model,
                 const std::vector<ProcessedRecord>& records, const Vocabulary& vocab,
                 const TrainConfig& cfg, std::ostream* log = nullptr);

struct Prediction {
  std::string reactants;  // canonical SMILES, maps stripped
  double score = 0.0;     // log probability
  EditSet edits;
  std::vector<int> lg_indices;  // completion order
};

/// Single-edit beam: the top `width` edits each expand through a `width`-wide
/// leaving-group beam per component; results are assembled, invalid
/// attachments dropped and duplicates merged keeping the best score.
std::vector<Prediction> beam_search(const RetroModel& model, const Molecule& product,
                                    const Vocabulary& vocab, int width,
                                    int reaction_class = 0);

struct PredictionBlock {
  std::string product_smiles;
  std::vector<Prediction> predictions;
};

void write_predictions(const std::string& path,
                       const std::vector<PredictionBlock>& blocks);
std::vector<PredictionBlock> read_predictions(const std::string& path);

struct EvalReport {
  std::vector<std::pair<int, double>> topn;  // (n, reactant accuracy)
  double edit_accuracy = 0.0;   // rank-1 edit set correct
  double group_accuracy = 0.0;  // rank-1 leaving groups correct
  int count = 0;
};

/// Exact-match accuracies of predicted reactant sets against the recorded
/// ground truth, by canonical SMILES equality.
EvalReport evaluate_topn(const std::vector<PredictionBlock>& blocks,
                         const std::vector<ProcessedRecord>& records,
                         const Vocabulary& vocab,
                         const std::vector<int>& ns = {1, 3, 5, 10, 50});

/// Canonical unmapped reactant string for a processed record.
std::string ground_truth_reactants(const ProcessedRecord& record,
                                   const Vocabulary& vocab);

// dataset file helpers
void save_records(const std::string& path, const std::vector<ProcessedRecord>& records);
std::vector<ProcessedRecord> load_records(const std::string& path);

}  // namespace retrosyn

#endif  // RETROSYN_PIPELINE_HPP
