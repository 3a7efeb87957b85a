//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrosyn/edit_model.hpp"

#include <algorithm>
#include <cmath>

namespace retrosyn {

EditPredictor::EditPredictor(ParameterStore& store, const std::string& prefix,
                             const EditModelConfig& cfg, RandomGen& rng)
    : cfg_(cfg),
      atom_conv_(store, prefix + ".atom", cfg.hidden, cfg.conv_channels,
                 cfg.conv_kernel, rng),
      bond_conv_(store, prefix + ".bond", 2 * cfg.hidden, cfg.conv_channels,
                 cfg.conv_kernel, rng) {
  int f = cfg.conv_channels.back();
  int h = cfg.score_hidden;
  auto make_scorer = [&](const std::string& name, int in) {
    Scorer s;
    s.W = ensure_param(store, name + ".W", {in, h}, rng);
    s.b = ensure_zeros(store, name + ".b", {1, h});
    s.u = ensure_param(store, name + ".u", {h, 1}, rng);
    return s;
  };
  for (int k = 0; k < 5; ++k) {
    bond_scorers_[k] = make_scorer(prefix + ".label" + std::to_string(k), f);
  }
  atom_scorer_ = make_scorer(prefix + ".atomscore", f);
  stop_scorer_ = make_scorer(prefix + ".stop", cfg.hidden);
  Wh_ = ensure_param(store, prefix + ".Wh", {cfg.hidden, cfg.hidden}, rng);
  Wc_ = ensure_param(store, prefix + ".Wc", {cfg.hidden, cfg.hidden}, rng);
  bh_ = ensure_zeros(store, prefix + ".bh", {1, cfg.hidden});
}

Tensor EditPredictor::next_state(const Tensor& state, const Tensor& atom_reps) const {
  return tanh_t(add_rowvec(add(matmul(state, Wh_), matmul(atom_reps, Wc_)), bh_));
}

EditLogits EditPredictor::score(const Tensor& atom_states, const BatchedGraph& graph,
                                int graph_idx, bool with_stop, bool training,
                                RandomGen& rng) const {
  const BatchedGraph::Entry& entry = graph.graphs.at(graph_idx);
  const Molecule& mol = *entry.mol;
  auto apply_scorer = [&](const Scorer& s, const Tensor& x) {
    Tensor hidden = relu(add_rowvec(matmul(x, s.W), s.b));
    hidden = dropout(hidden, cfg_.dropout, training, rng);
    return matmul(hidden, s.u);  // (rows, 1)
  };

  EditLogits out;
  std::vector<Tensor> parts;

  if (mol.num_bonds() > 0) {
    std::vector<int> us, vs;
    for (const auto& bref : entry.bonds_by_rank) {
      us.push_back(bref.u);
      vs.push_back(bref.v);
    }
    Tensor bond_seq = concat_cols({index_select(atom_states, us),
                                   index_select(atom_states, vs)});
    Tensor bond_feat = bond_conv_.apply(bond_seq, cfg_.dropout, training, rng);
    for (int k = 0; k < 5; ++k) {
      std::vector<int> keep;
      for (int i = 0; i < static_cast<int>(entry.bonds_by_rank.size()); ++i) {
        const Bond& bond = mol.bond(entry.bonds_by_rank[i].local_bond);
        if (edit_label_from_order(bond.order) == static_cast<EditLabel>(k)) continue;
        keep.push_back(i);
        EditCandidate cand;
        cand.bond_u = entry.bonds_by_rank[i].u - entry.atom_offset;
        cand.bond_v = entry.bonds_by_rank[i].v - entry.atom_offset;
        cand.label = static_cast<EditLabel>(k);
        out.candidates.push_back(cand);
      }
      if (keep.empty()) continue;
      Tensor scores = apply_scorer(bond_scorers_[k], index_select(bond_feat, keep));
      parts.push_back(transpose(scores));
    }
  }

  Tensor atom_seq = index_select(atom_states, entry.atoms_by_rank);
  Tensor atom_feat = atom_conv_.apply(atom_seq, cfg_.dropout, training, rng);
  parts.push_back(transpose(apply_scorer(atom_scorer_, atom_feat)));
  for (int r = 0; r < entry.num_atoms; ++r) {
    EditCandidate cand;
    cand.is_atom = true;
    cand.atom = entry.atoms_by_rank[r] - entry.atom_offset;
    out.candidates.push_back(cand);
  }

  if (with_stop) {
    Tensor pooled = sum_rows(atom_seq);
    parts.push_back(apply_scorer(stop_scorer_, pooled));
    out.stop_index = static_cast<int>(out.candidates.size());
  }
  out.logits = concat_cols(parts);
  return out;
}

int EditPredictor::target_index(const EditLogits& logits, const Molecule& mol,
                                const BondEdit& edit) {
  for (int i = 0; i < static_cast<int>(logits.candidates.size()); ++i) {
    const EditCandidate& cand = logits.candidates[i];
    if (cand.is_atom || cand.label != edit.new_label) continue;
    int ma = mol.atom(cand.bond_u).atom_map;
    int mb = mol.atom(cand.bond_v).atom_map;
    if (std::min(ma, mb) == edit.map_a && std::max(ma, mb) == edit.map_b) return i;
  }
  throw std::invalid_argument("bond edit has no candidate slot");
}

int EditPredictor::target_index(const EditLogits& logits, const Molecule& mol,
                                const AtomEdit& edit) {
  for (int i = 0; i < static_cast<int>(logits.candidates.size()); ++i) {
    const EditCandidate& cand = logits.candidates[i];
    if (cand.is_atom && mol.atom(cand.atom).atom_map == edit.map_atom) return i;
  }
  throw std::invalid_argument("atom edit has no candidate slot");
}

EditSet EditPredictor::candidate_to_edits(const EditCandidate& cand,
                                          const Molecule& mol) const {
  EditSet edits;
  if (cand.is_atom) {
    edits.atom_edits.push_back({mol.atom(cand.atom).atom_map});
  } else {
    int ma = mol.atom(cand.bond_u).atom_map;
    int mb = mol.atom(cand.bond_v).atom_map;
    edits.bond_edits.push_back({std::min(ma, mb), std::max(ma, mb), cand.label});
  }
  return edits;
}

Tensor EditPredictor::single_loss(const Tensor& atom_reps, const BatchedGraph& graph,
                                  int graph_idx, const EditSet& target, bool training,
                                  RandomGen& rng) const {
  if (target.size() != 1) {
    throw std::invalid_argument("single-edit loss needs exactly one edit");
  }
  EditLogits logits = score(atom_reps, graph, graph_idx, false, training, rng);
  const Molecule& mol = *graph.graphs.at(graph_idx).mol;
  int idx = target.bond_edits.empty()
                ? target_index(logits, mol, target.atom_edits[0])
                : target_index(logits, mol, target.bond_edits[0]);
  return cross_entropy(logits.logits, idx);
}

Tensor EditPredictor::multi_loss(const Tensor& atom_reps, const BatchedGraph& graph,
                                 int graph_idx, const EditSet& target, bool training,
                                 RandomGen& rng) const {
  const Molecule& mol = *graph.graphs.at(graph_idx).mol;
  Tensor state = atom_reps;
  Tensor total;
  auto add_step = [&](const EditLogits& logits, int idx) {
    Tensor ce = cross_entropy(logits.logits, idx);
    total = total.defined() ? add(total, ce) : ce;
  };
  for (const BondEdit& edit : target.bond_edits) {
    EditLogits logits = score(state, graph, graph_idx, true, training, rng);
    add_step(logits, target_index(logits, mol, edit));
    state = next_state(state, atom_reps);
  }
  for (const AtomEdit& edit : target.atom_edits) {
    EditLogits logits = score(state, graph, graph_idx, true, training, rng);
    add_step(logits, target_index(logits, mol, edit));
    state = next_state(state, atom_reps);
  }
  EditLogits final_logits = score(state, graph, graph_idx, true, training, rng);
  add_step(final_logits, final_logits.stop_index);
  return total;
}

std::vector<ScoredEdits> EditPredictor::predict_single(const Tensor& atom_reps,
                                                       const BatchedGraph& graph,
                                                       int graph_idx, int k,
                                                       RandomGen& rng) const {
  EditLogits logits = score(atom_reps, graph, graph_idx, false, false, rng);
  Tensor logp = log_softmax_rows(logits.logits);
  std::vector<int> order(logits.candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return logp.at(a) > logp.at(b); });
  const Molecule& mol = *graph.graphs.at(graph_idx).mol;
  std::vector<ScoredEdits> out;
  for (int i = 0; i < std::min<int>(k, static_cast<int>(order.size())); ++i) {
    out.push_back({candidate_to_edits(logits.candidates[order[i]], mol),
                   logp.at(order[i])});
  }
  return out;
}

ScoredEdits EditPredictor::predict_multi(const Tensor& atom_reps,
                                         const BatchedGraph& graph, int graph_idx,
                                         RandomGen& rng) const {
  const Molecule& mol = *graph.graphs.at(graph_idx).mol;
  Tensor state = atom_reps;
  ScoredEdits result;
  std::vector<int> taken;
  for (int step = 0; step < cfg_.max_edit_steps; ++step) {
    EditLogits logits = score(state, graph, graph_idx, true, false, rng);
    Tensor logp = log_softmax_rows(logits.logits);
    int best = -1;
    for (int i = 0; i < static_cast<int>(logits.logits.size()); ++i) {
      if (std::find(taken.begin(), taken.end(), i) != taken.end()) continue;
      if (best < 0 || logp.at(i) > logp.at(best)) best = i;
    }
    result.log_prob += logp.at(best);
    if (best == logits.stop_index) break;
    taken.push_back(best);
    EditSet edits = candidate_to_edits(logits.candidates[best], mol);
    for (const auto& e : edits.bond_edits) result.edits.bond_edits.push_back(e);
    for (const auto& e : edits.atom_edits) result.edits.atom_edits.push_back(e);
    state = next_state(state, atom_reps);
  }
  return result;
}

}  // namespace retrosyn
