//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RETROSYN_MPN_HPP
#define RETROSYN_MPN_HPP

#include "retrosyn/reaction.hpp"
#include "retrosyn/tensor.hpp"

namespace retrosyn {

struct MpnConfig {
  int atom_dim = kAtomFeatureDim;
  int bond_dim = kBondFeatureDim;
  int hidden = 300;
  int steps = 10;
};

/// One or more molecules flattened into a single message-passing workload.
/// Bonds become two directed edges each; the pair arrays enumerate, for
/// every edge (u,v), the edges (w,u) with w != v whose messages feed it.
struct BatchedGraph {
  struct BondRef {
    int u = -1;  // global atom row, lower canonical rank
    int v = -1;
    int local_bond = -1;
  };
  struct Entry {
    const Molecule* mol = nullptr;
    int atom_offset = 0;
    int num_atoms = 0;
    int reaction_class = 0;
    std::vector<int> rank;           // canonical rank per local atom
    std::vector<int> atoms_by_rank;  // global rows in canonical order
    std::vector<BondRef> bonds_by_rank;
  };

  int num_atoms = 0;
  int num_edges = 0;  // directed
  Tensor atom_features;  // num_atoms x atom_dim
  Tensor edge_features;  // num_edges x (atom_dim + bond_dim), [x_src, x_bond]
  std::vector<int> edge_src, edge_dst;
  std::vector<int> pair_edge, pair_in;
  std::vector<int> atom_graph;  // graph id per atom row
  std::vector<Entry> graphs;
};

BatchedGraph batch_graphs(const std::vector<const Molecule*>& mols,
                          const std::vector<int>& classes, bool with_class);

/// Fetches an existing parameter or creates it, so models can be built over
/// a store freshly initialized or restored from a checkpoint.
Tensor ensure_param(ParameterStore& store, const std::string& name,
                    const std::vector<int>& shape, RandomGen& rng);
Tensor ensure_zeros(ParameterStore& store, const std::string& name,
                    const std::vector<int>& shape);

/// Gated-recurrent message passing over directed edges followed by a ReLU
/// readout per atom.
class MpnEncoder {
 public:
  MpnEncoder(ParameterStore& store, const std::string& prefix, const MpnConfig& cfg,
             RandomGen& rng);

  /// Per-atom representations, (num_atoms, hidden).
  Tensor encode(const BatchedGraph& graph) const;
  /// Sum pooling to per-graph representations, (num_graphs, hidden).
  Tensor pool(const Tensor& atom_reps, const BatchedGraph& graph) const;

  const MpnConfig& config() const { return cfg_; }

 private:
  MpnConfig cfg_;
  Tensor Wz_, bz_;       // update gate over [edge_input, incoming sum]
  Tensor Wr_, br_, Ur_;  // reset gate, per incoming message
  Tensor Wm_, Um_, bm_;  // candidate message
  Tensor Wo_, bo_;       // readout over [atom_input, incoming sum]
};

/// Three same-padded 1-D convolutions with ReLU between them.
class ConvStack {
 public:
  ConvStack(ParameterStore& store, const std::string& prefix, int in_channels,
            const std::vector<int>& channels, int kernel, RandomGen& rng);

  /// (length, in_channels) -> (length, channels.back()).
  Tensor apply(const Tensor& seq, double dropout_p, bool training, RandomGen& rng) const;
  int out_channels() const;

 private:
  std::vector<Tensor> kernels_, biases_;
};

}  // namespace retrosyn

#endif  // RETROSYN_MPN_HPP
