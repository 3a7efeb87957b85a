//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrosyn/mpn.hpp"

#include <algorithm>

namespace retrosyn {

BatchedGraph batch_graphs(const std::vector<const Molecule*>& mols,
                          const std::vector<int>& classes, bool with_class) {
  if (mols.size() != classes.size()) {
    throw std::invalid_argument("one reaction class per molecule required");
  }
  BatchedGraph out;
  int atom_dim = with_class ? kAtomFeatureDimClass : kAtomFeatureDim;
  std::vector<double> atom_rows, edge_rows;

  for (std::size_t g = 0; g < mols.size(); ++g) {
    const Molecule& mol = *mols[g];
    FeatureVectors feats = featurize(mol, classes[g], with_class);

    BatchedGraph::Entry entry;
    entry.mol = &mol;
    entry.atom_offset = out.num_atoms;
    entry.num_atoms = mol.num_atoms();
    entry.reaction_class = classes[g];
    entry.rank = canonical_rank(mol);

    entry.atoms_by_rank.resize(mol.num_atoms());
    for (int i = 0; i < mol.num_atoms(); ++i) {
      entry.atoms_by_rank[entry.rank[i]] = entry.atom_offset + i;
    }
    for (int b = 0; b < mol.num_bonds(); ++b) {
      const Bond& bond = mol.bond(b);
      int u = bond.a, v = bond.b;
      if (entry.rank[u] > entry.rank[v]) std::swap(u, v);
      entry.bonds_by_rank.push_back({entry.atom_offset + u, entry.atom_offset + v, b});
    }
    std::sort(entry.bonds_by_rank.begin(), entry.bonds_by_rank.end(),
              [&](const BatchedGraph::BondRef& a, const BatchedGraph::BondRef& b) {
                int ra = entry.rank[a.u - entry.atom_offset];
                int rb = entry.rank[b.u - entry.atom_offset];
                if (ra != rb) return ra < rb;
                return entry.rank[a.v - entry.atom_offset] <
                       entry.rank[b.v - entry.atom_offset];
              });

    atom_rows.insert(atom_rows.end(), feats.atom_features.begin(), feats.atom_features.end());
    for (int i = 0; i < mol.num_atoms(); ++i) out.atom_graph.push_back(static_cast<int>(g));

    // two directed edges per bond, both directions adjacent
    int edge_offset = out.num_edges;
    std::vector<std::vector<int>> edges_into(mol.num_atoms());  // by destination
    for (int b = 0; b < mol.num_bonds(); ++b) {
      const Bond& bond = mol.bond(b);
      for (int dir = 0; dir < 2; ++dir) {
        int src = dir == 0 ? bond.a : bond.b;
        int dst = dir == 0 ? bond.b : bond.a;
        int e = out.num_edges++;
        out.edge_src.push_back(entry.atom_offset + src);
        out.edge_dst.push_back(entry.atom_offset + dst);
        edges_into[dst].push_back(e);
        const double* af = feats.atom_features.data() +
                           static_cast<std::size_t>(src) * atom_dim;
        edge_rows.insert(edge_rows.end(), af, af + atom_dim);
        const double* bf = feats.bond_features.data() +
                           static_cast<std::size_t>(b) * kBondFeatureDim;
        edge_rows.insert(edge_rows.end(), bf, bf + kBondFeatureDim);
      }
    }
    // incoming pairs: edge (u,v) receives messages from edges (w,u), w != v
    for (int b = 0; b < mol.num_bonds(); ++b) {
      const Bond& bond = mol.bond(b);
      for (int dir = 0; dir < 2; ++dir) {
        int src = dir == 0 ? bond.a : bond.b;
        int dst = dir == 0 ? bond.b : bond.a;
        int e = edge_offset + 2 * b + dir;
        for (int in : edges_into[src]) {
          if (out.edge_src[in] == entry.atom_offset + dst) continue;
          out.pair_edge.push_back(e);
          out.pair_in.push_back(in);
        }
      }
    }

    out.num_atoms += mol.num_atoms();
    out.graphs.push_back(std::move(entry));
  }

  out.atom_features = Tensor::from_data({out.num_atoms, atom_dim}, std::move(atom_rows));
  out.edge_features = Tensor::from_data({out.num_edges, atom_dim + kBondFeatureDim},
                                        std::move(edge_rows));
  return out;
}

Tensor ensure_param(ParameterStore& store, const std::string& name,
                    const std::vector<int>& shape, RandomGen& rng) {
  if (store.contains(name)) {
    Tensor t = store.get(name);
    if (t.shape() != shape) {
      throw ShapeError("parameter " + name + " has mismatched shape");
    }
    return t;
  }
  return store.add(name, shape, rng);
}

Tensor ensure_zeros(ParameterStore& store, const std::string& name,
                    const std::vector<int>& shape) {
  if (store.contains(name)) {
    Tensor t = store.get(name);
    if (t.shape() != shape) {
      throw ShapeError("parameter " + name + " has mismatched shape");
    }
    return t;
  }
  return store.add_zeros(name, shape);
}

MpnEncoder::MpnEncoder(ParameterStore& store, const std::string& prefix,
                       const MpnConfig& cfg, RandomGen& rng)
    : cfg_(cfg) {
  int fin = cfg.atom_dim + cfg.bond_dim;
  int d = cfg.hidden;
  Wz_ = ensure_param(store, prefix + ".Wz", {fin + d, d}, rng);
  bz_ = ensure_zeros(store, prefix + ".bz", {1, d});
  Wr_ = ensure_param(store, prefix + ".Wr", {fin, d}, rng);
  br_ = ensure_zeros(store, prefix + ".br", {1, d});
  Ur_ = ensure_param(store, prefix + ".Ur", {d, d}, rng);
  Wm_ = ensure_param(store, prefix + ".Wm", {fin, d}, rng);
  Um_ = ensure_param(store, prefix + ".Um", {d, d}, rng);
  bm_ = ensure_zeros(store, prefix + ".bm", {1, d});
  Wo_ = ensure_param(store, prefix + ".Wo", {cfg.atom_dim + d, d}, rng);
  bo_ = ensure_zeros(store, prefix + ".bo", {1, d});
}

Tensor MpnEncoder::encode(const BatchedGraph& graph) const {
  int d = cfg_.hidden;
  int E = graph.num_edges;
  Tensor agg;  // per-atom sum of incoming messages
  if (E == 0) {
    agg = Tensor::zeros({graph.num_atoms, d});
  } else {
    Tensor edge_in = graph.edge_features;
    Tensor pre_r = add_rowvec(matmul(edge_in, Wr_), br_);
    Tensor pre_m = matmul(edge_in, Wm_);
    Tensor m = Tensor::zeros({E, d});
    bool has_pairs = !graph.pair_edge.empty();
    for (int t = 0; t < cfg_.steps; ++t) {
      Tensor s, rt;
      if (has_pairs) {
        Tensor m_in = index_select(m, graph.pair_in);
        s = segment_sum(m_in, graph.pair_edge, E);
        Tensor r = sigmoid(add(index_select(pre_r, graph.pair_edge), matmul(m_in, Ur_)));
        rt = segment_sum(mul(r, m_in), graph.pair_edge, E);
      } else {
        s = Tensor::zeros({E, d});
        rt = Tensor::zeros({E, d});
      }
      Tensor z = sigmoid(add_rowvec(matmul(concat_cols({edge_in, s}), Wz_), bz_));
      Tensor mt = tanh_t(add_rowvec(add(pre_m, matmul(rt, Um_)), bm_));
      m = add(mul(affine(z, -1.0, 1.0), s), mul(z, mt));
    }
    agg = segment_sum(m, graph.edge_dst, graph.num_atoms);
  }
  return relu(add_rowvec(matmul(concat_cols({graph.atom_features, agg}), Wo_), bo_));
}

Tensor MpnEncoder::pool(const Tensor& atom_reps, const BatchedGraph& graph) const {
  return segment_sum(atom_reps, graph.atom_graph, static_cast<int>(graph.graphs.size()));
}

ConvStack::ConvStack(ParameterStore& store, const std::string& prefix, int in_channels,
                     const std::vector<int>& channels, int kernel, RandomGen& rng) {
  int in = in_channels;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    std::string name = prefix + ".conv" + std::to_string(i);
    kernels_.push_back(ensure_param(store, name + ".K", {channels[i], kernel, in}, rng));
    biases_.push_back(ensure_zeros(store, name + ".b", {1, channels[i]}));
    in = channels[i];
  }
}

int ConvStack::out_channels() const { return kernels_.back().dim(0); }

Tensor ConvStack::apply(const Tensor& seq, double dropout_p, bool training,
                        RandomGen& rng) const {
  Tensor h = seq;
  for (std::size_t i = 0; i < kernels_.size(); ++i) {
    h = conv1d(h, kernels_[i], biases_[i]);
    if (i + 1 < kernels_.size()) {
      h = relu(h);
      h = dropout(h, dropout_p, training, rng);
    }
  }
  return h;
}

}  // namespace retrosyn
