//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "retrosyn/pipeline.hpp"

using namespace retrosyn;

namespace {

TrainConfig tiny_train_config() {
  TrainConfig cfg;
  cfg.hidden = 8;
  cfg.mpn_steps = 2;
  cfg.conv_channels = {8, 8};
  cfg.conv_kernel = 3;
  cfg.score_hidden = 8;
  cfg.embed = 8;
  cfg.dropout = 0.0;
  cfg.epochs = 3;
  cfg.seed = 17;
  return cfg;
}

std::vector<std::string> fixture_lines(int stride, int limit) {
  std::ifstream in(std::string(RETROSYN_FIXTURE_DIR) + "/reactions.txt");
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  int i = 0;
  while (std::getline(in, line)) {
    if (i++ % stride == 0 && static_cast<int>(lines.size()) < limit) {
      lines.push_back(line);
    }
  }
  return lines;
}

}  // namespace

TEST_CASE("config defaults match the documented values") {
  TrainConfig cfg;
  CHECK(cfg.lr == 0.001);
  CHECK(cfg.clip_norm == 20.0);
  CHECK(cfg.lambda_edit == 1.0);
  CHECK(cfg.lambda_synthon == 2.0);
  CHECK(cfg.hidden == 300);
  CHECK(cfg.mpn_steps == 10);
  CHECK(cfg.conv_channels == std::vector<int>{600, 300, 150});
  CHECK(cfg.conv_kernel == 5);
  CHECK(cfg.embed == 200);
  CHECK(cfg.dropout == 0.2);
  CHECK(cfg.epochs == 100);
  CHECK(cfg.plateau_factor == 0.9);
  CHECK(cfg.plateau_patience == 5);
  CHECK(cfg.mode == "shared");
}

TEST_CASE("config parsing handles overrides, comments and errors") {
  TrainConfig cfg = TrainConfig::parse(
      "# comment\n"
      "hidden=32\n"
      "lr=0.01  # trailing comment\n"
      "conv_channels=16,8\n"
      "mode=edit\n"
      "\n");
  CHECK(cfg.hidden == 32);
  CHECK(cfg.lr == 0.01);
  CHECK(cfg.conv_channels == std::vector<int>{16, 8});
  CHECK(cfg.mode == "edit");

  CHECK_THROWS(TrainConfig::parse("bogus_key=1\n"));
  CHECK_THROWS(TrainConfig::parse("hidden\n"));
  CHECK_THROWS(TrainConfig::parse("hidden=abc\n"));
  CHECK_THROWS(TrainConfig::parse("mode=banana\n"));
  CHECK_THROWS(TrainConfig::parse("mode=shared\nlambda_edit=0\n"));
  CHECK(TrainConfig::parse("mode=separate\n").mode == "separate");

  TrainConfig round = TrainConfig::parse(cfg.serialize());
  CHECK(round.hidden == cfg.hidden);
  CHECK(round.lr == cfg.lr);
  CHECK(round.conv_channels == cfg.conv_channels);
  CHECK(round.mode == cfg.mode);
}

TEST_CASE("prediction files round-trip") {
  std::vector<PredictionBlock> blocks(2);
  blocks[0].product_smiles = "[CH3:1][OH:2]";
  Prediction p;
  p.reactants = "CO.Cl";
  p.score = -0.25;
  p.edits.bond_edits.push_back({1, 2, EditLabel::Delete});
  p.lg_indices = {3, 1};
  blocks[0].predictions.push_back(p);
  p = Prediction{};
  p.reactants = "CCO";
  p.score = -1.5;
  blocks[0].predictions.push_back(p);
  blocks[1].product_smiles = "[CH4:1]";  // empty prediction list

  std::string path = "pred_roundtrip.txt";
  write_predictions(path, blocks);
  auto loaded = read_predictions(path);
  std::remove(path.c_str());

  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].product_smiles == blocks[0].product_smiles);
  REQUIRE(loaded[0].predictions.size() == 2);
  CHECK(loaded[0].predictions[0].reactants == "CO.Cl");
  CHECK(loaded[0].predictions[0].score == doctest::Approx(-0.25));
  CHECK(loaded[0].predictions[0].edits == blocks[0].predictions[0].edits);
  CHECK(loaded[0].predictions[0].lg_indices == std::vector<int>{3, 1});
  CHECK(loaded[0].predictions[1].edits.empty());
  CHECK(loaded[1].predictions.empty());
}

TEST_CASE("evaluation counts exact reactant matches at each depth") {
  ProcessedDataset data = preprocess(fixture_lines(13, 4));
  REQUIRE(data.records.size() == 4);

  std::vector<PredictionBlock> blocks(4);
  for (std::size_t i = 0; i < 4; ++i) {
    blocks[i].product_smiles = data.records[i].product_smiles;
  }
  auto truth = [&](int i) { return ground_truth_reactants(data.records[i], data.vocab); };
  auto filler = [](double s) {
    Prediction p;
    p.reactants = "C.C";
    p.score = s;
    return p;
  };
  // record 0: truth at rank 1, and the rank-1 metadata matches the record
  Prediction right;
  right.reactants = truth(0);
  right.score = -0.1;
  right.edits = data.records[0].edits;
  right.lg_indices = data.records[0].lg_indices;
  blocks[0].predictions = {right, filler(-2)};
  // record 1: truth at rank 3
  blocks[1].predictions = {filler(-1), filler(-1.5)};
  Prediction r1;
  r1.reactants = truth(1);
  r1.score = -2;
  blocks[1].predictions.push_back(r1);
  // record 2: truth at rank 6
  for (int k = 0; k < 5; ++k) blocks[2].predictions.push_back(filler(-1.0 - k));
  Prediction r2;
  r2.reactants = truth(2);
  r2.score = -9;
  blocks[2].predictions.push_back(r2);
  // record 3: never found
  blocks[3].predictions = {filler(-1)};

  EvalReport report = evaluate_topn(blocks, data.records, data.vocab, {1, 3, 5, 10, 50});
  REQUIRE(report.topn.size() == 5);
  CHECK(report.topn[0] == std::pair<int, double>{1, 0.25});
  CHECK(report.topn[1] == std::pair<int, double>{3, 0.50});
  CHECK(report.topn[2] == std::pair<int, double>{5, 0.50});
  CHECK(report.topn[3] == std::pair<int, double>{10, 0.75});
  CHECK(report.topn[4] == std::pair<int, double>{50, 0.75});
  CHECK(report.edit_accuracy == doctest::Approx(0.25));
  CHECK(report.group_accuracy == doctest::Approx(0.25));

  blocks.pop_back();
  CHECK_THROWS(evaluate_topn(blocks, data.records, data.vocab));
}

TEST_CASE("ground truth reactants equal the original reactant sets") {
  auto lines = fixture_lines(29, 6);
  ProcessedDataset data = preprocess(lines);
  REQUIRE(data.records.size() == lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    RetroPair pair = parse_reaction(lines[i]);
    SmilesWriteOptions opts;  // canonical, maps stripped
    CHECK(ground_truth_reactants(data.records[i], data.vocab) ==
          write_smiles(pair.reactants, opts));
  }
}

TEST_CASE("training runs, logs counters and lowers the loss") {
  ProcessedDataset data = preprocess(fixture_lines(11, 8));
  REQUIRE(data.records.size() == 8);
  TrainConfig cfg = tiny_train_config();
  cfg.epochs = 8;
  RandomGen rng(cfg.seed);
  ParameterStore store;
  RetroModel model(store, cfg, data.vocab.size(), rng);
  TrainStats stats = train(store, model, data.records, data.vocab, cfg);

  REQUIRE(stats.epoch_loss.size() == 8);
  CHECK(stats.epoch_loss.back() < stats.epoch_loss.front());
  CHECK(stats.synthon_multi_edit_records == 0);
  int single = 0;
  for (const auto& r : data.records) single += r.single_edit() ? 1 : 0;
  CHECK(stats.synthon_single_edit_records == single);
  CHECK(stats.edit_records == 8);
  // the weighted sum accounting holds exactly
  CHECK(stats.total_loss ==
        doctest::Approx(cfg.lambda_edit * stats.edit_loss +
                        cfg.lambda_synthon * stats.synthon_loss)
            .epsilon(1e-9));
}

TEST_CASE("shared mode reuses the edit encoder, separate mode does not") {
  TrainConfig cfg = tiny_train_config();
  auto encoder_param_counts = [&](const std::string& mode) {
    TrainConfig c = cfg;
    c.mode = mode;
    RandomGen rng(c.seed);
    ParameterStore store;
    RetroModel model(store, c, 8, rng);
    int edit_enc = 0, lg_enc = 0;
    for (const auto& [name, t] : store.params()) {
      if (name.rfind("edit.enc.", 0) == 0) ++edit_enc;
      if (name.rfind("lg.enc.", 0) == 0) ++lg_enc;
    }
    return std::pair<int, int>{edit_enc, lg_enc};
  };
  auto [shared_e, shared_l] = encoder_param_counts("shared");
  auto [sep_e, sep_l] = encoder_param_counts("separate");
  CHECK(shared_e > 0);
  CHECK(shared_l == 0);
  CHECK(sep_e == shared_e);
  CHECK(sep_l == shared_e);
}

TEST_CASE("separate mode training steps both stages") {
  ProcessedDataset data = preprocess(fixture_lines(23, 4));
  TrainConfig cfg = tiny_train_config();
  cfg.mode = "separate";
  RandomGen rng(cfg.seed);
  ParameterStore store;
  RetroModel model(store, cfg, data.vocab.size(), rng);
  TrainStats stats = train(store, model, data.records, data.vocab, cfg);
  CHECK(stats.edit_records == 4);
  CHECK(stats.synthon_multi_edit_records == 0);
  CHECK(stats.synthon_single_edit_records > 0);
  // unweighted accounting in separate mode
  CHECK(stats.total_loss ==
        doctest::Approx(stats.edit_loss + stats.synthon_loss).epsilon(1e-9));
}

TEST_CASE("training is deterministic for a fixed seed") {
  ProcessedDataset data = preprocess(fixture_lines(37, 4));
  TrainConfig cfg = tiny_train_config();
  auto run = [&]() {
    RandomGen rng(cfg.seed);
    ParameterStore store;
    RetroModel model(store, cfg, data.vocab.size(), rng);
    train(store, model, data.records, data.vocab, cfg);
    std::vector<double> flat;
    for (const auto& [name, t] : store.params()) {
      flat.insert(flat.end(), t.data().begin(), t.data().end());
    }
    return flat;
  };
  CHECK(run() == run());
}

TEST_CASE("beam search produces deduplicated, sorted predictions") {
  ProcessedDataset data = preprocess(fixture_lines(17, 5));
  TrainConfig cfg = tiny_train_config();
  RandomGen rng(cfg.seed);
  ParameterStore store;
  RetroModel model(store, cfg, data.vocab.size(), rng);
  train(store, model, data.records, data.vocab, cfg);

  Molecule product = parse_smiles(data.records[0].product_smiles);
  auto preds = beam_search(model, product, data.vocab, 5);
  REQUIRE(!preds.empty());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    CHECK(seen.insert(preds[i].reactants).second);
    if (i) CHECK(preds[i].score <= preds[i - 1].score);
    CHECK(std::isfinite(preds[i].score));
    CHECK(!preds[i].reactants.empty());
  }
}
