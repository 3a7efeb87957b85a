//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: nine end-to-end criteria, one pass/fail line each.
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "retrosyn/pipeline.hpp"

using namespace retrosyn;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int id, const std::string& what, bool ok) {
  std::cout << "criterion " << id << " " << (ok ? "PASS" : "FAIL") << ": " << what
            << std::endl;
  CHECK_MESSAGE(ok, "criterion ", id, ": ", what);
}

std::vector<std::string> read_lines(const std::string& name) {
  std::ifstream in(std::string(RETROSYN_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

/// Central-difference check of every parameter in the store against the
/// analytic gradients of loss_fn. 64-bit throughout.
bool grads_match(ParameterStore& store, const std::function<Tensor()>& loss_fn,
                 double tol = 1e-4) {
  store.zero_grad();
  loss_fn().backward();
  const double h = 1e-5;
  bool ok = true;
  for (const auto& [name, param] : store.params()) {
    Tensor p = param;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double saved = p.mutable_data()[i];
      p.mutable_data()[i] = saved + h;
      double up = loss_fn().item();
      p.mutable_data()[i] = saved - h;
      double down = loss_fn().item();
      p.mutable_data()[i] = saved;
      double numeric = (up - down) / (2 * h);
      double analytic = p.grad()[i];
      double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
      if (std::abs(numeric - analytic) / denom >= tol &&
          std::abs(numeric - analytic) >= 1e-9) {
        std::cout << "  gradient mismatch: " << name << "[" << i << "] numeric "
                  << numeric << " analytic " << analytic << "\n";
        ok = false;
      }
    }
  }
  return ok;
}

void fill(Tensor t, std::initializer_list<double> values) {
  REQUIRE(t.size() == values.size());
  std::copy(values.begin(), values.end(), t.mutable_data().begin());
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.hidden = 24;
  cfg.mpn_steps = 2;
  cfg.conv_channels = {24, 12};
  cfg.conv_kernel = 3;
  cfg.score_hidden = 12;
  cfg.embed = 12;
  cfg.dropout = 0.0;
  cfg.lr = 0.003;
  cfg.seed = 3;
  return cfg;
}

struct Reps {
  Tensor product;
  std::vector<Tensor> components;
};

/// Product and ordered synthon component representations through the
/// completion-side encoder.
Reps completion_reps(const RetroModel& model, const Molecule& product,
                     const Molecule& synthons, const std::vector<int>& order) {
  std::vector<Molecule> comps;
  for (int c : order) comps.push_back(extract_component(synthons, c));
  std::vector<const Molecule*> mols = {&product};
  std::vector<int> classes(1 + comps.size(), 0);
  for (const auto& m : comps) mols.push_back(&m);
  BatchedGraph g = batch_graphs(mols, classes, false);
  Tensor pooled = model.synthon_encoder.pool(model.synthon_encoder.encode(g), g);
  Reps reps;
  reps.product = index_select(pooled, {0});
  for (std::size_t i = 0; i < comps.size(); ++i) {
    reps.components.push_back(index_select(pooled, {static_cast<int>(i) + 1}));
  }
  return reps;
}

bool edit_top1_correct(const RetroModel& model, const ProcessedRecord& rec) {
  RandomGen rng(0);
  Molecule product = parse_smiles(rec.product_smiles);
  BatchedGraph g = batch_graphs({&product}, {rec.reaction_class}, model.use_class);
  auto top = model.edit_predictor.predict_single(model.edit_encoder.encode(g), g, 0,
                                                 1, rng);
  return !top.empty() && top[0].edits == rec.edits;
}

bool groups_top1_correct(const RetroModel& model, const ProcessedRecord& rec) {
  RandomGen rng(0);
  Molecule product = parse_smiles(rec.product_smiles);
  Molecule synthons = apply_edits(product, rec.edits);
  std::vector<int> order = completion_order(synthons);
  REQUIRE(order.size() == rec.lg_indices.size());
  Reps reps = completion_reps(model, product, synthons, order);
  int prev = Vocabulary::kStart;
  for (std::size_t c = 0; c < order.size(); ++c) {
    auto top = model.completion.topk(reps.product, reps.components[c], prev, 1, rng);
    if (top.empty() || top[0].first != rec.lg_indices[c]) return false;
    prev = top[0].first;
  }
  return true;
}

}  // namespace

TEST_CASE("criterion 1: corpus round trip") {
  auto start = Clock::now();
  auto lines = read_lines("reactions.txt");
  REQUIRE(lines.size() >= 200);
  ProcessedDataset data = preprocess(lines);
  int matches = 0;
  LeavingGroup end_group;
  bool sizes_ok = data.stats.ok == data.stats.total &&
                  data.records.size() == lines.size();
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const ProcessedRecord& rec = data.records[i];
    Molecule product = parse_smiles(rec.product_smiles);
    std::vector<const LeavingGroup*> groups;
    for (int gi : rec.lg_indices) {
      groups.push_back(gi == Vocabulary::kEnd ? &end_group : &data.vocab.group(gi));
    }
    Molecule rebuilt = assemble_reactants(product, rec.edits, groups);
    if (is_isomorphic(rebuilt, parse_reaction(lines[i]).reactants)) ++matches;
  }
  double elapsed = seconds_since(start);
  std::ostringstream what;
  what << "round trip " << matches << "/" << lines.size() << " reactions in "
       << elapsed << "s";
  report(1, what.str(),
         sizes_ok && matches == static_cast<int>(lines.size()) && elapsed < 10.0);
}

TEST_CASE("criterion 2: canonicalization stability under atom permutations") {
  auto start = Clock::now();
  auto lines = read_lines("molecules.txt");
  REQUIRE(lines.size() >= 50);
  RandomGen rng(11);
  int stable = 0, total = 0;
  for (std::size_t m = 0; m < 50; ++m) {
    Molecule mol = parse_smiles(lines[m]);
    std::string canon = canonical_smiles(mol);
    int n = mol.num_atoms();
    bool all_same = true;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<int> perm(n);
      for (int i = 0; i < n; ++i) perm[i] = i;
      for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
      }
      std::vector<int> inverse(n);
      MolBuilder builder;
      for (int i = 0; i < n; ++i) {
        inverse[perm[i]] = builder.add_atom(mol.atom(perm[i]));
      }
      for (const Bond& bond : mol.bonds()) {
        builder.add_bond(inverse[bond.a], inverse[bond.b], bond.order);
      }
      ++total;
      if (canonical_smiles(builder.finalize()) != canon) all_same = false;
    }
    if (all_same) ++stable;
  }
  double elapsed = seconds_since(start);
  std::ostringstream what;
  what << "canonical string stable for " << stable << "/50 molecules x 100 "
       << "permutations in " << elapsed << "s";
  report(2, what.str(), stable == 50 && total == 5000 && elapsed < 10.0);
}

TEST_CASE("criterion 3: gradient checks across primitives and model heads") {
  auto start = Clock::now();
  bool ok = true;
  RandomGen init(7);

  // every tensor primitive, exercised away from non-differentiable kinks
  {
    ParameterStore store;
    Tensor A = store.add("A", {2, 3}, init);
    Tensor B = store.add("B", {3, 2}, init);
    Tensor C = store.add("C", {2, 3}, init);
    Tensor v = store.add("v", {1, 3}, init);
    fill(A, {0.4, -0.7, 1.1, -0.3, 0.8, -1.2});
    fill(B, {0.5, -0.9, 0.3, 1.4, -0.6, 0.2});
    fill(C, {-0.8, 0.6, 0.9, 1.3, -0.4, 0.7});
    fill(v, {0.25, -0.55, 0.85});
    Tensor W = Tensor::from_data({2, 3}, {0.3, 1.2, -0.7, 0.9, -0.2, 0.5});

    std::vector<std::pair<std::string, std::function<Tensor()>>> cases = {
        {"matmul", [&] { return sum_all(matmul(A, B)); }},
        {"add", [&] { return sum_all(mul(add(A, C), W)); }},
        {"sub", [&] { return sum_all(mul(sub(A, C), W)); }},
        {"mul", [&] { return sum_all(mul(mul(A, C), W)); }},
        {"add_rowvec", [&] { return sum_all(mul(add_rowvec(A, v), W)); }},
        {"scale", [&] { return sum_all(mul(scale(A, 1.7), W)); }},
        {"affine", [&] { return sum_all(mul(affine(A, -0.6, 0.4), W)); }},
        {"concat_cols", [&] { return sum_all(mul(concat_cols({A, C}),
                                                 concat_cols({W, W}))); }},
        {"transpose", [&] { return sum_all(matmul(transpose(A), A)); }},
        {"relu", [&] { return sum_all(mul(relu(A), W)); }},
        {"tanh", [&] { return sum_all(mul(tanh_t(A), W)); }},
        {"sigmoid", [&] { return sum_all(mul(sigmoid(A), W)); }},
        {"softmax_rows", [&] { return sum_all(mul(softmax_rows(A), W)); }},
        {"log_softmax_rows", [&] { return sum_all(mul(log_softmax_rows(A), W)); }},
        {"sum_all", [&] { return sum_all(A); }},
        {"sum_rows", [&] { return sum_all(mul(sum_rows(A), v)); }},
        {"segment_sum", [&] { return sum_all(mul(segment_sum(A, {1, 0}, 2), W)); }},
        {"index_select", [&] {
           Tensor W3 = Tensor::from_data(
               {3, 3}, {0.2, -0.9, 0.4, 1.1, 0.6, -0.3, -0.5, 0.8, 0.1});
           return sum_all(mul(index_select(A, {1, 0, 1}), W3));
         }},
        {"embedding_lookup", [&] {
           Tensor W3 = Tensor::from_data(
               {3, 3}, {0.7, -0.2, 1.3, -0.6, 0.5, 0.9, 0.4, -1.1, 0.3});
           return sum_all(mul(embedding_lookup(A, {1, 1, 0}), W3));
         }},
        {"dropout", [&] {
           RandomGen r(5);
           return sum_all(mul(dropout(A, 0.4, true, r), W));
         }},
        {"cross_entropy", [&] { return cross_entropy(index_select(A, {0}), 2); }},
    };
    for (auto& [name, fn] : cases) {
      if (!grads_match(store, fn)) {
        std::cout << "  primitive failed: " << name << "\n";
        ok = false;
      }
    }
  }

  // conv1d over its own parameter set (sequence, kernel and bias)
  {
    ParameterStore store;
    RandomGen rng(9);
    Tensor seq = store.add("seq", {4, 2}, rng);
    Tensor kernel = store.add("kernel", {2, 3, 2}, rng);
    Tensor bias = store.add("bias", {1, 2}, rng);
    Tensor W = Tensor::from_data({4, 2}, {0.6, -0.8, 0.3, 1.2, -0.4, 0.9, 0.1, -0.7});
    if (!grads_match(store, [&] { return sum_all(mul(conv1d(seq, kernel, bias), W)); })) {
      std::cout << "  primitive failed: conv1d\n";
      ok = false;
    }
  }

  Molecule ester = parse_smiles("[CH3:1][C:2](=[O:3])[O:4][CH2:5][CH3:6]");
  MpnConfig mcfg;
  mcfg.hidden = 5;
  mcfg.steps = 2;
  EditModelConfig ecfg;
  ecfg.hidden = 5;
  ecfg.conv_channels = {6, 4};
  ecfg.conv_kernel = 3;
  ecfg.score_hidden = 4;
  ecfg.dropout = 0.0;

  // two message passing steps end to end
  {
    ParameterStore store;
    RandomGen rng(21);
    MpnEncoder enc(store, "enc", mcfg, rng);
    BatchedGraph g = batch_graphs({&ester}, {0}, false);
    Tensor target = Tensor::from_data({1, 5}, {0.3, -0.8, 0.5, 1.1, -0.4});
    if (!grads_match(store, [&] {
          Tensor pooled = enc.pool(enc.encode(g), g);
          return sum_all(mul(pooled, target));
        })) {
      std::cout << "  T=2 message passing failed\n";
      ok = false;
    }
  }

  // edit head, single loss
  {
    ParameterStore store;
    RandomGen rng(22);
    MpnEncoder enc(store, "enc", mcfg, rng);
    EditPredictor head(store, "edit", ecfg, rng);
    BatchedGraph g = batch_graphs({&ester}, {0}, false);
    EditSet target;
    target.bond_edits.push_back({2, 4, EditLabel::Delete});
    RandomGen unused(0);
    if (!grads_match(store, [&] {
          return head.single_loss(enc.encode(g), g, 0, target, false, unused);
        })) {
      std::cout << "  edit head single loss failed\n";
      ok = false;
    }
  }

  // two-step multi-edit loss through the state recurrence
  {
    ParameterStore store;
    RandomGen rng(23);
    MpnEncoder enc(store, "enc", mcfg, rng);
    EditPredictor head(store, "edit", ecfg, rng);
    BatchedGraph g = batch_graphs({&ester}, {0}, false);
    EditSet target;
    target.bond_edits.push_back({2, 4, EditLabel::Delete});
    target.atom_edits.push_back({5});
    RandomGen unused(0);
    if (!grads_match(store, [&] {
          return head.multi_loss(enc.encode(g), g, 0, target, false, unused);
        })) {
      std::cout << "  two-step multi edit loss failed\n";
      ok = false;
    }
  }

  // completion head including the previous-group embedding recurrence
  {
    ParameterStore store;
    RandomGen rng(24);
    CompletionConfig ccfg;
    ccfg.hidden = 4;
    ccfg.embed = 3;
    ccfg.dropout = 0.0;
    CompletionModel comp(store, "lg", ccfg, 6, rng);
    Tensor prod = Tensor::from_data({1, 4}, {0.5, -0.3, 0.8, 0.1});
    Tensor s1 = Tensor::from_data({1, 4}, {0.2, 0.4, -0.6, 0.9});
    Tensor s2 = Tensor::from_data({1, 4}, {-0.1, 0.7, 0.3, -0.5});
    RandomGen unused(0);
    if (!grads_match(store, [&] {
          return comp.sequence_loss(prod, {s1, s2}, {4, 1}, false, unused);
        })) {
      std::cout << "  completion recurrence failed\n";
      ok = false;
    }
  }

  double elapsed = seconds_since(start);
  std::ostringstream what;
  what << "finite differences match analytic gradients (rel err < 1e-4, 64-bit) in "
       << elapsed << "s";
  report(3, what.str(), ok && elapsed < 60.0);
}

TEST_CASE("criterion 4: candidate count is exactly 4M+N") {
  auto lines = read_lines("reactions.txt");
  ProcessedDataset data = preprocess(lines);
  ParameterStore store;
  RandomGen rng(31);
  MpnConfig mcfg;
  mcfg.hidden = 4;
  mcfg.steps = 1;
  EditModelConfig ecfg;
  ecfg.hidden = 4;
  ecfg.conv_channels = {4, 4};
  ecfg.conv_kernel = 3;
  ecfg.score_hidden = 4;
  ecfg.dropout = 0.0;
  MpnEncoder enc(store, "enc", mcfg, rng);
  EditPredictor head(store, "edit", ecfg, rng);
  bool ok = true;
  int checked = 0;
  RandomGen unused(0);
  for (const auto& rec : data.records) {
    Molecule product = parse_smiles(rec.product_smiles);
    BatchedGraph g = batch_graphs({&product}, {0}, false);
    EditLogits scored = head.score(enc.encode(g), g, 0, false, false, unused);
    int expected = 4 * product.num_bonds() + product.num_atoms();
    if (static_cast<int>(scored.candidates.size()) != expected ||
        scored.logits.dim(1) != expected ||
        expected != EditPredictor::num_candidates(product)) {
      ok = false;
    }
    ++checked;
  }
  std::ostringstream what;
  what << "4M+N candidate slots verified on " << checked << " products";
  report(4, what.str(), ok && checked == static_cast<int>(lines.size()));
}

TEST_CASE("criterion 5: 32-reaction overfit reaches 95% on both stages") {
  auto start = Clock::now();
  auto lines = read_lines("reactions.txt");
  ProcessedDataset data = preprocess(lines);
  std::vector<ProcessedRecord> singles;
  for (const auto& r : data.records) {
    if (r.single_edit()) singles.push_back(r);
  }
  REQUIRE(singles.size() >= 32);
  std::vector<ProcessedRecord> subset;
  std::size_t stride = singles.size() / 32;
  for (std::size_t i = 0; i < singles.size() && subset.size() < 32; i += stride) {
    subset.push_back(singles[i]);
  }
  REQUIRE(subset.size() == 32);

  TrainConfig cfg = small_config();
  cfg.epochs = 25;
  RandomGen rng(cfg.seed);
  ParameterStore store;
  RetroModel model(store, cfg, data.vocab.size(), rng);

  int epochs_used = 0;
  double edit_acc = 0.0, group_acc = 0.0;
  for (int chunk = 0; chunk < 8; ++chunk) {  // up to 200 epochs
    train(store, model, subset, data.vocab, cfg);
    epochs_used += cfg.epochs;
    int edit_hits = 0, group_hits = 0;
    for (const auto& rec : subset) {
      if (edit_top1_correct(model, rec)) ++edit_hits;
      if (groups_top1_correct(model, rec)) ++group_hits;
    }
    edit_acc = edit_hits / 32.0;
    group_acc = group_hits / 32.0;
    if (edit_acc >= 0.95 && group_acc >= 0.95) break;
  }
  double elapsed = seconds_since(start);
  std::ostringstream what;
  what << "overfit after " << epochs_used << " epochs: edit top-1 " << edit_acc
       << ", leaving-group top-1 " << group_acc << " in " << elapsed << "s";
  report(5, what.str(), edit_acc >= 0.95 && group_acc >= 0.95 && elapsed < 300.0);
}

TEST_CASE("criterion 6: beam search matches brute force on a toy model") {
  auto start = Clock::now();
  auto lines = read_lines("reactions.txt");
  std::vector<std::string> subset(lines.begin(), lines.begin() + 12);
  ProcessedDataset data = preprocess(subset);

  TrainConfig cfg = small_config();
  cfg.hidden = 8;
  cfg.conv_channels = {8, 8};
  cfg.score_hidden = 6;
  cfg.embed = 6;
  RandomGen rng(41);
  ParameterStore store;
  RetroModel model(store, cfg, data.vocab.size(), rng);  // random weights

  Molecule product = parse_smiles("[CH3:1][C:2](=[O:3])[O:4][CH2:5][CH3:6]");
  int full_width = EditPredictor::num_candidates(product);

  // brute force: every single edit, every leaving-group assignment
  std::map<std::string, Prediction> merged;
  RandomGen unused(0);
  BatchedGraph g = batch_graphs({&product}, {0}, false);
  auto all_edits = model.edit_predictor.predict_single(model.edit_encoder.encode(g),
                                                       g, 0, full_width, unused);
  LeavingGroup end_group;
  for (const auto& scored : all_edits) {
    Molecule synthons;
    try {
      synthons = apply_edits(product, scored.edits);
    } catch (const std::exception&) {
      continue;
    }
    std::vector<int> order = completion_order(synthons);
    Reps reps = completion_reps(model, product, synthons, order);

    std::function<void(std::size_t, int, double, std::vector<int>&)> expand =
        [&](std::size_t c, int prev, double logp, std::vector<int>& groups) {
          if (c == order.size()) {
            std::vector<const LeavingGroup*> ptrs;
            for (int gi : groups) {
              ptrs.push_back(gi == Vocabulary::kEnd ? &end_group
                                                    : &data.vocab.group(gi));
            }
            Molecule reactants;
            try {
              reactants = assemble_reactants(product, scored.edits, ptrs);
            } catch (const std::exception&) {
              return;
            }
            Prediction pred;
            pred.reactants = canonical_smiles(reactants);
            pred.score = scored.log_prob + logp;
            auto it = merged.find(pred.reactants);
            if (it == merged.end() || pred.score > it->second.score) {
              merged[pred.reactants] = pred;
            }
            return;
          }
          auto options = model.completion.topk(reps.product, reps.components[c], prev,
                                               data.vocab.size(), unused);
          for (const auto& [gi, lp] : options) {
            groups.push_back(gi);
            expand(c + 1, gi, logp + lp, groups);
            groups.pop_back();
          }
        };
    std::vector<int> groups;
    expand(0, Vocabulary::kStart, 0.0, groups);
  }
  std::vector<Prediction> brute;
  for (auto& [key, pred] : merged) brute.push_back(pred);
  std::stable_sort(brute.begin(), brute.end(),
                   [](const Prediction& a, const Prediction& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.reactants < b.reactants;
                   });

  auto beam = beam_search(model, product, data.vocab, full_width);

  bool ok = beam.size() == brute.size() && !beam.empty();
  for (std::size_t i = 0; ok && i < beam.size(); ++i) {
    ok = beam[i].reactants == brute[i].reactants &&
         std::abs(beam[i].score - brute[i].score) < 1e-6;
  }
  double elapsed = seconds_since(start);
  std::ostringstream what;
  what << "beam of width " << full_width << " equals brute force over "
       << brute.size() << " assemblies (within 1e-6) in " << elapsed << "s";
  report(6, what.str(), ok && elapsed < 30.0);
}

TEST_CASE("criterion 7: shared loss combines the stages with fixed weights") {
  auto lines = read_lines("reactions.txt");
  ProcessedDataset data = preprocess(lines);
  // mix single- and multi-edit records
  std::vector<ProcessedRecord> subset;
  int singles = 0, multis = 0;
  for (const auto& r : data.records) {
    if (r.single_edit() && singles < 6) {
      subset.push_back(r);
      ++singles;
    } else if (!r.single_edit() && multis < 4) {
      subset.push_back(r);
      ++multis;
    }
  }
  REQUIRE(singles == 6);
  REQUIRE(multis == 4);

  TrainConfig cfg = small_config();
  cfg.hidden = 8;
  cfg.conv_channels = {8, 8};
  cfg.score_hidden = 6;
  cfg.embed = 6;
  cfg.epochs = 2;
  cfg.mode = "shared";
  cfg.lambda_edit = 1.0;
  cfg.lambda_synthon = 2.0;
  RandomGen rng(cfg.seed);
  ParameterStore store;
  RetroModel model(store, cfg, data.vocab.size(), rng);
  TrainStats stats = train(store, model, subset, data.vocab, cfg);

  bool weights_ok = std::abs(stats.total_loss - (1.0 * stats.edit_loss +
                                                 2.0 * stats.synthon_loss)) <
                    1e-9 * std::max(1.0, std::abs(stats.total_loss));
  bool counters_ok = stats.edit_records == 10 &&
                     stats.synthon_single_edit_records == 6 &&
                     stats.synthon_multi_edit_records == 0;
  bool encoder_shared = true;
  for (const auto& [name, t] : store.params()) {
    if (name.rfind("lg.enc.", 0) == 0) encoder_shared = false;
  }
  std::ostringstream what;
  what << "L = 1.0*L_e + 2.0*L_s over one encoder; synthon stage consumed "
       << stats.synthon_single_edit_records << " single-edit and "
       << stats.synthon_multi_edit_records << " multi-edit records";
  report(7, what.str(), weights_ok && counters_ok && encoder_shared);
}

TEST_CASE("criterion 8: seeded runs are bit-identical") {
  auto lines = read_lines("reactions.txt");
  std::vector<std::string> subset(lines.begin(), lines.begin() + 8);
  ProcessedDataset data = preprocess(subset);
  TrainConfig cfg = small_config();
  cfg.hidden = 8;
  cfg.conv_channels = {8, 8};
  cfg.score_hidden = 6;
  cfg.embed = 6;
  cfg.epochs = 4;
  cfg.seed = 99;

  auto run = [&](const std::string& tag) {
    RandomGen rng(cfg.seed);
    ParameterStore store;
    RetroModel model(store, cfg, data.vocab.size(), rng);
    train(store, model, data.records, data.vocab, cfg);
    std::string ckpt = "acc8_" + tag + ".ckpt";
    std::map<std::string, std::string> meta;
    meta["config"] = cfg.serialize();
    save_checkpoint(ckpt, store, meta, false);
    std::vector<PredictionBlock> blocks;
    for (const auto& rec : data.records) {
      PredictionBlock block;
      block.product_smiles = rec.product_smiles;
      block.predictions =
          beam_search(model, parse_smiles(rec.product_smiles), data.vocab, 5);
      blocks.push_back(std::move(block));
    }
    std::string preds = "acc8_" + tag + ".preds";
    write_predictions(preds, blocks);
    return std::pair<std::string, std::string>{ckpt, preds};
  };

  auto read_bytes = [](const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::stringstream buf;
    buf << is.rdbuf();
    return buf.str();
  };

  auto [ckpt_a, preds_a] = run("a");
  auto [ckpt_b, preds_b] = run("b");
  bool ckpt_same = read_bytes(ckpt_a) == read_bytes(ckpt_b);
  bool preds_same = read_bytes(preds_a) == read_bytes(preds_b);
  for (const auto& f : {ckpt_a, preds_a, ckpt_b, preds_b}) std::remove(f.c_str());
  std::ostringstream what;
  what << "two seeded runs: checkpoints " << (ckpt_same ? "identical" : "differ")
       << ", prediction files " << (preds_same ? "identical" : "differ");
  report(8, what.str(), ckpt_same && preds_same);
}

TEST_CASE("criterion 9: evaluation counts planted truths exactly") {
  auto lines = read_lines("reactions.txt");
  std::vector<std::string> subset(lines.begin(), lines.begin() + 8);
  ProcessedDataset data = preprocess(subset);
  REQUIRE(data.records.size() == 8);

  // plant the ground truth at ranks 1, 2, 4, 6, 12, 51 and absent twice
  std::vector<int> planted_rank = {1, 2, 4, 6, 12, 51, 0, 0};
  std::vector<PredictionBlock> blocks(8);
  for (std::size_t i = 0; i < 8; ++i) {
    blocks[i].product_smiles = data.records[i].product_smiles;
    std::string truth = ground_truth_reactants(data.records[i], data.vocab);
    int depth = std::max(planted_rank[i], 3);
    for (int r = 1; r <= depth; ++r) {
      Prediction p;
      if (r == planted_rank[i]) {
        p.reactants = truth;
        p.edits = data.records[i].edits;
        p.lg_indices = data.records[i].lg_indices;
      } else {
        p.reactants = "C.C";
      }
      p.score = -static_cast<double>(r);
      blocks[i].predictions.push_back(std::move(p));
    }
  }
  // exercise the file format on the way through
  write_predictions("acc9.preds", blocks);
  auto loaded = read_predictions("acc9.preds");
  std::remove("acc9.preds");

  EvalReport report_v = evaluate_topn(loaded, data.records, data.vocab,
                                      {1, 3, 5, 10, 50});
  auto expect = [&](int idx, int n, double acc) {
    return report_v.topn[idx].first == n &&
           std::abs(report_v.topn[idx].second - acc) < 1e-12;
  };
  bool ok = report_v.topn.size() == 5 && expect(0, 1, 1.0 / 8) &&
            expect(1, 3, 2.0 / 8) && expect(2, 5, 3.0 / 8) &&
            expect(3, 10, 4.0 / 8) && expect(4, 50, 5.0 / 8) &&
            std::abs(report_v.edit_accuracy - 1.0 / 8) < 1e-12 &&
            std::abs(report_v.group_accuracy - 1.0 / 8) < 1e-12 &&
            report_v.count == 8;
  std::ostringstream what;
  what << "top-{1,3,5,10,50} = {1,2,3,4,5}/8 on planted prediction files";
  report(9, what.str(), ok);
}
