//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: preprocess | train | predict | evaluate | stats.
// Exit codes: 0 ok, 1 usage, 2 data error, 3 numeric failure.
//

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "retrosyn/pipeline.hpp"

namespace fs = std::filesystem;
using namespace retrosyn;

namespace {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("RETROSYN_LOG");
  if (!env) return LogLevel::Info;
  std::string v(env);
  if (v == "quiet") return LogLevel::Quiet;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

const LogLevel kLevel = log_level();

void log_info(const std::string& msg) {
  if (kLevel >= LogLevel::Info) std::cerr << "[retrosyn] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (kLevel >= LogLevel::Debug) std::cerr << "[retrosyn] " << msg << "\n";
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write file: " + path);
  os << text;
}

std::string stats_report(const PreprocessStats& s, int vocab_size) {
  std::ostringstream os;
  os << "total\t" << s.total << "\n"
     << "ok\t" << s.ok << "\n"
     << "parse_errors\t" << s.parse_errors << "\n"
     << "new_bond_skips\t" << s.new_bond_skips << "\n"
     << "alignment_skips\t" << s.alignment_skips << "\n"
     << "other_skips\t" << s.other_skips << "\n"
     << "single_edit\t" << s.single_edit << "\n"
     << "single_edit_share\t" << s.single_edit_share() << "\n"
     << "vocab_size\t" << vocab_size << "\n";
  return os.str();
}

// Config file values overridden by any flags the user passed on the
// command line.
struct ConfigFlags {
  std::optional<std::string> mode;
  std::optional<int> epochs, hidden, mpn_steps, beam_width, plateau_patience;
  std::optional<double> lr, dropout, lambda_edit, lambda_synthon, clip_norm;
  std::optional<std::uint64_t> seed;
  std::optional<bool> use_class;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "shared | separate | edit | synthon");
    cmd->add_option("--epochs", epochs);
    cmd->add_option("--hidden", hidden);
    cmd->add_option("--mpn-steps", mpn_steps);
    cmd->add_option("--beam", beam_width);
    cmd->add_option("--plateau-patience", plateau_patience);
    cmd->add_option("--lr", lr);
    cmd->add_option("--dropout", dropout);
    cmd->add_option("--lambda-edit", lambda_edit);
    cmd->add_option("--lambda-synthon", lambda_synthon);
    cmd->add_option("--clip-norm", clip_norm);
    cmd->add_option("--seed", seed);
    cmd->add_flag("--use-class,!--no-use-class", use_class,
                  "condition on the reaction class");
  }

  TrainConfig apply(TrainConfig cfg) const {
    if (mode) cfg.mode = *mode;
    if (epochs) cfg.epochs = *epochs;
    if (hidden) cfg.hidden = *hidden;
    if (mpn_steps) cfg.mpn_steps = *mpn_steps;
    if (beam_width) cfg.beam_width = *beam_width;
    if (plateau_patience) cfg.plateau_patience = *plateau_patience;
    if (lr) cfg.lr = *lr;
    if (dropout) cfg.dropout = *dropout;
    if (lambda_edit) cfg.lambda_edit = *lambda_edit;
    if (lambda_synthon) cfg.lambda_synthon = *lambda_synthon;
    if (clip_norm) cfg.clip_norm = *clip_norm;
    if (seed) cfg.seed = *seed;
    if (use_class) cfg.use_class = *use_class;
    // reuse the parser's validation for the merged configuration
    return TrainConfig::parse(cfg.serialize());
  }
};

constexpr const char* kCheckpointFormat = "1";

void log_run(const TrainConfig& cfg) {
  log_info("config hash " + fnv1a_hex(cfg.serialize()) + " seed " +
           std::to_string(cfg.seed));
}

int run_preprocess(const std::string& input, const std::string& out_dir,
                   bool do_split, double train_ratio, double valid_ratio,
                   double test_ratio, std::uint64_t seed) {
  ProcessedDataset data = preprocess(read_lines(input));
  fs::create_directories(out_dir);
  fs::path dir(out_dir);
  save_records((dir / "records.txt").string(), data.records);
  data.vocab.save((dir / "vocab.txt").string());
  write_text((dir / "stats.txt").string(), stats_report(data.stats, data.vocab.size()));
  if (!data.warnings.empty()) {
    std::string text;
    for (const auto& w : data.warnings) text += w + "\n";
    write_text((dir / "warnings.txt").string(), text);
  }
  if (do_split) {
    SplitAssignment splits = split_dataset(static_cast<int>(data.records.size()),
                                           train_ratio, valid_ratio, test_ratio, seed);
    const char* names[3] = {"train.txt", "valid.txt", "test.txt"};
    for (int which = 0; which < 3; ++which) {
      std::vector<ProcessedRecord> part;
      for (int i : splits.of(which)) part.push_back(data.records[i]);
      save_records((dir / names[which]).string(), part);
    }
  }
  log_info("preprocess: " + std::to_string(data.stats.ok) + "/" +
           std::to_string(data.stats.total) + " records kept, vocabulary size " +
           std::to_string(data.vocab.size()));
  if (data.stats.ok == 0) {
    std::cerr << "error: no usable records in " << input << "\n";
    return 2;
  }
  return 0;
}

int run_train(const TrainConfig& cfg, const std::string& records_path,
              const std::string& vocab_path, const std::string& ckpt_path) {
  log_run(cfg);
  auto records = load_records(records_path);
  Vocabulary vocab = Vocabulary::load(vocab_path);
  if (records.empty()) {
    std::cerr << "error: empty dataset: " << records_path << "\n";
    return 2;
  }
  RandomGen rng(cfg.seed);
  ParameterStore store;
  RetroModel model(store, cfg, vocab.size(), rng);
  TrainStats stats = train(store, model, records, vocab, cfg,
                           kLevel >= LogLevel::Info ? &std::cerr : nullptr);
  std::map<std::string, std::string> meta;
  meta["format"] = kCheckpointFormat;
  meta["config"] = cfg.serialize();
  meta["vocab_size"] = std::to_string(vocab.size());
  meta["final_loss"] = std::to_string(stats.epoch_loss.back());
  save_checkpoint(ckpt_path, store, meta, /*float32=*/false);
  log_info("saved checkpoint " + ckpt_path + " (final loss " +
           std::to_string(stats.epoch_loss.back()) + ")");
  return 0;
}

Molecule product_from_line(const std::string& line) {
  Molecule product = line.find(">>") != std::string::npos
                         ? parse_reaction(line).product
                         : parse_smiles(line);
  bool mapped = true;
  for (const Atom& atom : product.atoms()) mapped = mapped && atom.atom_map != 0;
  if (!mapped) {
    // edits are expressed over atom-map numbers, so assign fresh ones
    MolBuilder builder(product);
    for (int i = 0; i < builder.num_atoms(); ++i) builder.atom(i).atom_map = i + 1;
    product = builder.finalize(false);
    log_debug("assigned atom maps to unmapped input: " + line);
  }
  return product;
}

int run_predict(const std::string& ckpt_path, const std::string& vocab_path,
                const std::string& input, const std::string& output,
                std::optional<int> beam_override) {
  ParameterStore store;
  std::map<std::string, std::string> meta;
  load_checkpoint(ckpt_path, store, meta);
  if (meta["format"] != kCheckpointFormat) {
    std::cerr << "error: checkpoint format mismatch in " << ckpt_path << "\n";
    return 2;
  }
  TrainConfig cfg = TrainConfig::parse(meta.at("config"));
  Vocabulary vocab = Vocabulary::load(vocab_path);
  if (meta.count("vocab_size") &&
      std::stoi(meta.at("vocab_size")) != vocab.size()) {
    std::cerr << "error: vocabulary size does not match the checkpoint\n";
    return 2;
  }
  log_run(cfg);
  RandomGen rng(cfg.seed);
  RetroModel model(store, cfg, vocab.size(), rng);
  int width = beam_override.value_or(cfg.beam_width);

  std::vector<PredictionBlock> blocks;
  for (const std::string& line : read_lines(input)) {
    if (line.empty() || line[0] == '#') continue;
    PredictionBlock block;
    block.product_smiles = line;
    Molecule product = product_from_line(line);
    block.predictions = beam_search(model, product, vocab, width);
    if (static_cast<int>(block.predictions.size()) > width) {
      block.predictions.resize(width);
    }
    if (block.predictions.empty()) {
      log_info("no valid candidate survived attachment for: " + line);
    }
    blocks.push_back(std::move(block));
    log_debug("predicted " + std::to_string(blocks.back().predictions.size()) +
              " candidates for input " + std::to_string(blocks.size()));
  }
  write_predictions(output, blocks);
  log_info("wrote " + std::to_string(blocks.size()) + " prediction blocks to " + output);
  return 0;
}

int run_evaluate(const std::string& pred_path, const std::string& records_path,
                 const std::string& vocab_path, const std::vector<int>& ns,
                 const std::string& output) {
  auto blocks = read_predictions(pred_path);
  auto records = load_records(records_path);
  Vocabulary vocab = Vocabulary::load(vocab_path);
  EvalReport report = evaluate_topn(blocks, records, vocab, ns);
  std::ostringstream os;
  for (const auto& [n, acc] : report.topn) os << n << "\t" << acc << "\n";
  os << "edit\t" << report.edit_accuracy << "\n"
     << "group\t" << report.group_accuracy << "\n"
     << "count\t" << report.count << "\n";
  if (output.empty()) {
    std::cout << os.str();
  } else {
    write_text(output, os.str());
    log_info("wrote accuracy report to " + output);
  }
  return 0;
}

int run_stats(const std::string& records_path, const std::string& vocab_path,
              const std::string& output) {
  auto records = load_records(records_path);
  Vocabulary vocab = Vocabulary::load(vocab_path);
  int single = 0;
  std::map<int, int> class_counts;
  std::map<int, int> group_uses;
  for (const auto& r : records) {
    single += r.single_edit() ? 1 : 0;
    ++class_counts[r.reaction_class];
    for (int gi : r.lg_indices) ++group_uses[gi];
  }
  std::ostringstream os;
  os << "records\t" << records.size() << "\n"
     << "single_edit\t" << single << "\n"
     << "multi_edit\t" << records.size() - single << "\n"
     << "vocab_size\t" << vocab.size() << "\n";
  for (const auto& [cls, n] : class_counts) os << "class_" << cls << "\t" << n << "\n";
  for (const auto& [gi, n] : group_uses) {
    os << "group\t" << vocab.key(gi) << "\t" << n << "\n";
  }
  if (output.empty()) {
    std::cout << os.str();
  } else {
    write_text(output, os.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"retrosyn: two-stage single-step retrosynthesis"};
  app.require_subcommand(1);

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "parse reactions, build the dataset");
  std::string pre_input, pre_out_dir;
  bool pre_split = false;
  double tr = 0.8, vr = 0.1, te = 0.1;
  std::uint64_t pre_seed = 0;
  pre->add_option("--input", pre_input, "atom-mapped reaction file")->required();
  pre->add_option("--out-dir", pre_out_dir, "output directory")->required();
  pre->add_flag("--split", pre_split, "also write train/valid/test splits");
  pre->add_option("--train-ratio", tr);
  pre->add_option("--valid-ratio", vr);
  pre->add_option("--test-ratio", te);
  pre->add_option("--seed", pre_seed);

  // train
  auto* tra = app.add_subcommand("train", "fit the two-stage model");
  std::string tra_config, tra_records, tra_vocab, tra_ckpt;
  ConfigFlags flags;
  tra->add_option("--config", tra_config, "key=value configuration file");
  tra->add_option("--records", tra_records, "processed dataset")->required();
  tra->add_option("--vocab", tra_vocab, "leaving-group vocabulary")->required();
  tra->add_option("--checkpoint", tra_ckpt, "checkpoint output path")->required();
  flags.add_options(tra);

  // predict
  auto* prd = app.add_subcommand("predict", "beam-search reactant candidates");
  std::string prd_ckpt, prd_vocab, prd_input, prd_output;
  std::optional<int> prd_beam;
  prd->add_option("--checkpoint", prd_ckpt)->required();
  prd->add_option("--vocab", prd_vocab)->required();
  prd->add_option("--input", prd_input, "one product SMILES or reaction per line")
      ->required();
  prd->add_option("--output", prd_output, "prediction file")->required();
  prd->add_option("--beam", prd_beam, "beam width (default from the checkpoint)");

  // evaluate
  auto* eva = app.add_subcommand("evaluate", "top-n accuracy of a prediction file");
  std::string eva_pred, eva_records, eva_vocab, eva_output;
  std::vector<int> eva_ns = {1, 3, 5, 10, 50};
  eva->add_option("--predictions", eva_pred)->required();
  eva->add_option("--records", eva_records)->required();
  eva->add_option("--vocab", eva_vocab)->required();
  eva->add_option("--n", eva_ns, "accuracy depths")->delimiter(',');
  eva->add_option("--output", eva_output, "report path (default stdout)");

  // stats
  auto* sta = app.add_subcommand("stats", "dataset statistics");
  std::string sta_records, sta_vocab, sta_output;
  sta->add_option("--records", sta_records)->required();
  sta->add_option("--vocab", sta_vocab)->required();
  sta->add_option("--output", sta_output, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (pre->parsed()) {
      return run_preprocess(pre_input, pre_out_dir, pre_split, tr, vr, te, pre_seed);
    }
    if (tra->parsed()) {
      TrainConfig cfg =
          tra_config.empty() ? TrainConfig{} : TrainConfig::load(tra_config);
      return run_train(flags.apply(cfg), tra_records, tra_vocab, tra_ckpt);
    }
    if (prd->parsed()) {
      return run_predict(prd_ckpt, prd_vocab, prd_input, prd_output, prd_beam);
    }
    if (eva->parsed()) {
      return run_evaluate(eva_pred, eva_records, eva_vocab, eva_ns, eva_output);
    }
    if (sta->parsed()) {
      return run_stats(sta_records, sta_vocab, sta_output);
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::string what = e.what();
    if (what.find("not finite") != std::string::npos) {
      std::cerr << "numeric failure: " << what << "\n";
      return 3;
    }
    std::cerr << "error: " << what << "\n";
    return 2;
  }
  return 1;
}
