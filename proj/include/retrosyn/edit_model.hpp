//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RETROSYN_EDIT_MODEL_HPP
#define RETROSYN_EDIT_MODEL_HPP

#include "retrosyn/mpn.hpp"

namespace retrosyn {

struct EditModelConfig {
  int hidden = 300;  // atom representation size coming out of the encoder
  std::vector<int> conv_channels = {600, 300, 150};
  int conv_kernel = 5;
  int score_hidden = 300;
  int max_edit_steps = 6;
  double dropout = 0.2;
};

/// One scoring slot: either changing a bond to a new label or editing an
/// atom's hydrogen count. Indices are local to the molecule.
struct EditCandidate {
  bool is_atom = false;
  int atom = -1;                            // local atom index
  int bond_u = -1, bond_v = -1;             // local atom indices, u lower rank
  EditLabel label = EditLabel::Delete;
};

struct EditLogits {
  Tensor logits;  // (1, num candidates [+1 with the stop slot])
  std::vector<EditCandidate> candidates;
  int stop_index = -1;  // -1 when the stop slot is absent
};

struct ScoredEdits {
  EditSet edits;
  double log_prob = 0.0;
};

/// Scores every candidate graph edit with a joint softmax per molecule.
/// Multi-edit sequences run the scorer over a recurrent per-atom state,
/// with a pooled stop score appended each step.
class EditPredictor {
 public:
  EditPredictor(ParameterStore& store, const std::string& prefix,
                const EditModelConfig& cfg, RandomGen& rng);

  /// Candidate logits for one graph of the batch given per-atom states.
  EditLogits score(const Tensor& atom_states, const BatchedGraph& graph, int graph_idx,
                   bool with_stop, bool training, RandomGen& rng) const;

  /// Exactly 4 bond labels per bond plus one hydrogen slot per atom.
  static int num_candidates(const Molecule& mol) {
    return 4 * mol.num_bonds() + mol.num_atoms();
  }

  /// Cross entropy of the single ground-truth edit under the joint softmax.
  Tensor single_loss(const Tensor& atom_reps, const BatchedGraph& graph, int graph_idx,
                     const EditSet& target, bool training, RandomGen& rng) const;

  /// Teacher-forced sum of per-step cross entropies over the edit sequence,
  /// ending with the stop step.
  Tensor multi_loss(const Tensor& atom_reps, const BatchedGraph& graph, int graph_idx,
                    const EditSet& target, bool training, RandomGen& rng) const;

  /// Top-k single edits with log probabilities, best first.
  std::vector<ScoredEdits> predict_single(const Tensor& atom_reps,
                                          const BatchedGraph& graph, int graph_idx,
                                          int k, RandomGen& rng) const;

  /// Greedy multi-step decoding until the stop slot wins or the step limit
  /// is reached. Accumulates per-step log probabilities.
  ScoredEdits predict_multi(const Tensor& atom_reps, const BatchedGraph& graph,
                            int graph_idx, RandomGen& rng) const;

  /// Index of the target edit within logits.candidates; throws if absent.
  static int target_index(const EditLogits& logits, const Molecule& mol,
                          const BondEdit& edit);
  static int target_index(const EditLogits& logits, const Molecule& mol,
                          const AtomEdit& edit);

  const EditModelConfig& config() const { return cfg_; }

 private:
  Tensor next_state(const Tensor& state, const Tensor& atom_reps) const;
  EditSet candidate_to_edits(const EditCandidate& cand, const Molecule& mol) const;

  EditModelConfig cfg_;
  ConvStack atom_conv_, bond_conv_;
  struct Scorer {
    Tensor W, b, u;
  };
  Scorer bond_scorers_[5];
  Scorer atom_scorer_;
  Scorer stop_scorer_;
  Tensor Wh_, Wc_, bh_;  // state recurrence
};

}  // namespace retrosyn

#endif  // RETROSYN_EDIT_MODEL_HPP
