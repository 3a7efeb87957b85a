//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RETROSYN_COMPLETION_HPP
#define RETROSYN_COMPLETION_HPP

#include "retrosyn/mpn.hpp"

namespace retrosyn {

struct CompletionConfig {
  int hidden = 300;  // graph representation size from the encoder
  int embed = 200;
  double dropout = 0.2;
};

/// Classifies the leaving group for each synthon component in completion
/// order, conditioned on the product, the component and the previously
/// chosen group's embedding.
class CompletionModel {
 public:
  CompletionModel(ParameterStore& store, const std::string& prefix,
                  const CompletionConfig& cfg, int vocab_size, RandomGen& rng);

  /// (1, vocab) scores for one component. prev_index is the group chosen
  /// for the previous component, Vocabulary::kStart for the first.
  Tensor logits(const Tensor& product_rep, const Tensor& synthon_rep, int prev_index,
                bool training, RandomGen& rng) const;

  /// Teacher-forced sum of cross entropies over the component sequence.
  Tensor sequence_loss(const Tensor& product_rep, const std::vector<Tensor>& synthon_reps,
                       const std::vector<int>& targets, bool training,
                       RandomGen& rng) const;

  /// Top-k (vocabulary index, log probability) pairs; the START and PAD
  /// control slots are masked out.
  std::vector<std::pair<int, double>> topk(const Tensor& product_rep,
                                           const Tensor& synthon_rep, int prev_index,
                                           int k, RandomGen& rng) const;

  int vocab_size() const { return vocab_size_; }
  const CompletionConfig& config() const { return cfg_; }

 private:
  CompletionConfig cfg_;
  int vocab_size_;
  Tensor embeddings_;  // (vocab, embed)
  Tensor W1_, W2_, W3_, b_;
  Tensor U_, bu_;  // (embed, vocab) output projection
};

/// Joins a leaving group onto one synthon component and settles hydrogen
/// counts. Attachment sites are the marked atoms on either side, taken in
/// canonical order. Bond order for a single-site group is the smaller of
/// the two free valences; multi-site groups attach with single bonds
/// paired in order. Throws ValenceError when no valid attachment exists.
Molecule attach_leaving_group(const Molecule& synthon_component, const LeavingGroup& group);

/// Applies the edits to the product and reattaches one leaving group per
/// synthon component, given in completion order. Returns the combined
/// multi-component reactant molecule.
Molecule assemble_reactants(const Molecule& product, const EditSet& edits,
                            const std::vector<const LeavingGroup*>& groups);

}  // namespace retrosyn

#endif  // RETROSYN_COMPLETION_HPP
