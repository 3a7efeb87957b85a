//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrosyn/completion.hpp"

#include <algorithm>
#include <cmath>

namespace retrosyn {

CompletionModel::CompletionModel(ParameterStore& store, const std::string& prefix,
                                 const CompletionConfig& cfg, int vocab_size,
                                 RandomGen& rng)
    : cfg_(cfg), vocab_size_(vocab_size) {
  embeddings_ = ensure_param(store, prefix + ".emb", {vocab_size, cfg.embed}, rng);
  W1_ = ensure_param(store, prefix + ".W1", {cfg.hidden, cfg.embed}, rng);
  W2_ = ensure_param(store, prefix + ".W2", {cfg.hidden, cfg.embed}, rng);
  W3_ = ensure_param(store, prefix + ".W3", {cfg.embed, cfg.embed}, rng);
  b_ = ensure_zeros(store, prefix + ".b", {1, cfg.embed});
  U_ = ensure_param(store, prefix + ".U", {cfg.embed, vocab_size}, rng);
  bu_ = ensure_zeros(store, prefix + ".bu", {1, vocab_size});
}

Tensor CompletionModel::logits(const Tensor& product_rep, const Tensor& synthon_rep,
                               int prev_index, bool training, RandomGen& rng) const {
  if (prev_index < 0 || prev_index >= vocab_size_) {
    throw std::invalid_argument("previous group index out of range");
  }
  Tensor prev = embedding_lookup(embeddings_, {prev_index});
  Tensor hidden = relu(add_rowvec(
      add(add(matmul(product_rep, W1_), matmul(synthon_rep, W2_)), matmul(prev, W3_)),
      b_));
  hidden = dropout(hidden, cfg_.dropout, training, rng);
  return add_rowvec(matmul(hidden, U_), bu_);
}

Tensor CompletionModel::sequence_loss(const Tensor& product_rep,
                                      const std::vector<Tensor>& synthon_reps,
                                      const std::vector<int>& targets, bool training,
                                      RandomGen& rng) const {
  if (synthon_reps.size() != targets.size() || targets.empty()) {
    throw std::invalid_argument("one target group per synthon component required");
  }
  Tensor total;
  int prev = Vocabulary::kStart;
  for (std::size_t c = 0; c < targets.size(); ++c) {
    Tensor ce = cross_entropy(
        logits(product_rep, synthon_reps[c], prev, training, rng), targets[c]);
    total = total.defined() ? add(total, ce) : ce;
    prev = targets[c];
  }
  return total;
}

std::vector<std::pair<int, double>> CompletionModel::topk(const Tensor& product_rep,
                                                          const Tensor& synthon_rep,
                                                          int prev_index, int k,
                                                          RandomGen& rng) const {
  Tensor scores = logits(product_rep, synthon_rep, prev_index, false, rng);
  Tensor logp = log_softmax_rows(scores);
  std::vector<std::pair<int, double>> out;
  for (int i = 0; i < vocab_size_; ++i) {
    if (i == Vocabulary::kStart || i == Vocabulary::kPad) continue;
    out.push_back({i, logp.at(i)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (static_cast<int>(out.size()) > k) out.resize(k);
  return out;
}

Molecule attach_leaving_group(const Molecule& synthon_component,
                              const LeavingGroup& group) {
  MolBuilder builder(synthon_component);

  std::vector<int> marks;
  std::vector<int> rank = canonical_rank(synthon_component);
  for (int i = 0; i < synthon_component.num_atoms(); ++i) {
    if (synthon_component.atom(i).attach_mark) marks.push_back(i);
  }
  std::sort(marks.begin(), marks.end(), [&](int a, int b) { return rank[a] < rank[b]; });

  auto bond_units_in = [&builder](int idx) {
    int half = 0;
    for (const Bond& bond : builder.bonds()) {
      if (bond.a == idx || bond.b == idx) half += bond_order_half_units(bond.order);
    }
    return half / 2;
  };
  auto free_val = [&](int idx) {
    const Atom& atom = builder.atom(idx);
    int dv = default_valence(atom.element, atom.formal_charge);
    if (dv < 0) return 0;
    return dv - bond_units_in(idx) - atom.explicit_h;
  };

  if (!group.is_end()) {
    if (marks.empty()) throw ValenceError("no attachment site on synthon");
    std::vector<int> gmap(group.graph.num_atoms(), -1);
    for (int i = 0; i < group.graph.num_atoms(); ++i) {
      Atom atom = group.graph.atom(i);
      atom.attach_mark = false;
      gmap[i] = builder.add_atom(atom);
    }
    for (const Bond& bond : group.graph.bonds()) {
      builder.add_bond(gmap[bond.a], gmap[bond.b], bond.order);
    }

    if (group.attach_atoms.size() == 1) {
      // a single-site group binds the first marked atom; any further marks
      // just refill with hydrogen
      int s = marks[0];
      int g = gmap[group.attach_atoms[0]];
      int order = std::min(free_val(s), free_val(g));
      if (order < 1) throw ValenceError("no free valence for attachment");
      order = std::min(order, 3);
      builder.add_bond(s, g, static_cast<BondOrder>(order));
    } else {
      if (group.attach_atoms.size() != marks.size()) {
        throw ValenceError("attachment site count mismatch");
      }
      for (std::size_t i = 0; i < marks.size(); ++i) {
        int s = marks[i];
        int g = gmap[group.attach_atoms[i]];
        if (free_val(s) < 1 || free_val(g) < 1) {
          throw ValenceError("no free valence for attachment");
        }
        builder.add_bond(s, g, BondOrder::Single);
      }
    }
  }

  // refill hydrogens on the former attachment sites and clear the marks
  for (int idx : marks) {
    Atom& atom = builder.atom(idx);
    int dv = default_valence(atom.element, atom.formal_charge);
    if (dv >= 0) {
      atom.implicit_h = std::max(0, dv - bond_units_in(idx) - atom.explicit_h);
    }
    atom.no_implicit = true;
    atom.attach_mark = false;
  }
  return builder.finalize(false);
}

Molecule assemble_reactants(const Molecule& product, const EditSet& edits,
                            const std::vector<const LeavingGroup*>& groups) {
  Molecule synthons = apply_edits(product, edits);
  std::vector<int> order = completion_order(synthons);
  if (order.size() != groups.size()) {
    throw std::invalid_argument("one leaving group per synthon component required");
  }
  MolBuilder combined;
  for (std::size_t i = 0; i < order.size(); ++i) {
    Molecule part = attach_leaving_group(extract_component(synthons, order[i]),
                                         *groups[i]);
    std::vector<int> remap(part.num_atoms());
    for (int a = 0; a < part.num_atoms(); ++a) remap[a] = combined.add_atom(part.atom(a));
    for (const Bond& bond : part.bonds()) {
      combined.add_bond(remap[bond.a], remap[bond.b], bond.order);
    }
  }
  return combined.finalize(false);
}

}  // namespace retrosyn
