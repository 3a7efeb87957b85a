//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RETROSYN_REACTION_HPP
#define RETROSYN_REACTION_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retrosyn/molgraph.hpp"

namespace retrosyn {

/// Record-level failure: the offending reaction is skipped and tallied,
/// ingestion continues.
class RecordError : public std::runtime_error {
 public:
  enum class Category { Malformed, NewBond, Alignment, Other };
  explicit RecordError(const std::string& what, Category category = Category::Other)
      : std::runtime_error(what), category_(category) {}
  Category category() const { return category_; }

 private:
  Category category_;
};

/// An atom-mapped reaction: single-component product, multi-component
/// reactants, atom maps forming a bijection from product atoms into
/// reactant atoms.
struct RetroPair {
  Molecule product;
  Molecule reactants;
  int reaction_class = 0;  // 0 = unknown, else 1..10
};

enum class EditLabel : int { Delete = 0, Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

const char* edit_label_name(EditLabel label);
EditLabel edit_label_from_name(const std::string& name);
EditLabel edit_label_from_order(BondOrder order);
BondOrder bond_order_from_label(EditLabel label);  // label != Delete

struct BondEdit {
  int map_a = 0;
  int map_b = 0;
  EditLabel new_label = EditLabel::Delete;
  bool operator==(const BondEdit&) const = default;
};

struct AtomEdit {
  int map_atom = 0;
  bool operator==(const AtomEdit&) const = default;
};

struct EditSet {
  std::vector<BondEdit> bond_edits;
  std::vector<AtomEdit> atom_edits;
  int size() const { return static_cast<int>(bond_edits.size() + atom_edits.size()); }
  bool empty() const { return size() == 0; }
  bool operator==(const EditSet&) const = default;
};

std::string serialize_edits(const EditSet& edits);
EditSet parse_edits(const std::string& text);

/// Leaving group: induced reactant subgraph absent from the synthon, with
/// attachment atoms marked and hydrogen counts frozen as in the reactant.
/// An empty graph stands for the END token (no group to add).
struct LeavingGroup {
  Molecule graph;
  std::vector<int> attach_atoms;  // marked atom indices, canonical order
  std::string canonical_key;
  bool is_end() const { return graph.num_atoms() == 0; }
};

/// Leaving-group vocabulary. Indices 0..2 are the START/END/PAD control
/// tokens; groups follow in first-seen order.
class Vocabulary {
 public:
  static constexpr int kStart = 0;
  static constexpr int kEnd = 1;
  static constexpr int kPad = 2;
  static constexpr const char* kStartKey = "<START>";
  static constexpr const char* kEndKey = "<END>";
  static constexpr const char* kPadKey = "<PAD>";

  Vocabulary();

  int size() const { return static_cast<int>(keys_.size()); }
  int num_groups() const { return size() - 3; }
  const std::string& key(int index) const { return keys_.at(index); }
  const LeavingGroup& group(int index) const;  // index >= 3
  int index_of(const std::string& key) const;  // -1 if absent
  /// Inserts if unseen; returns the index either way.
  int add(const LeavingGroup& group);

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<std::string> keys_;
  std::vector<LeavingGroup> groups_;  // parallel to keys_ from index 3
  std::map<std::string, int> lookup_;
};

/// Reconstructs a LeavingGroup from its canonical key.
LeavingGroup leaving_group_from_key(const std::string& key);

// --- per-record operations --------------------------------------------------

/// Parses "mapped_reactants>>mapped_product" with an optional tab-separated
/// class id. Throws RecordError on malformed records.
RetroPair parse_reaction(const std::string& line);

/// Diffs mapped product bonds/atoms against their reactant counterparts.
/// Throws RecordError for new-bond formation between product-mapped atoms.
EditSet extract_edits(const RetroPair& pair);

/// Applies edits, marking attachment sites. Hydrogens on marked atoms are
/// not refilled; the pending attachment decides them.
Molecule apply_edits(const Molecule& product, const EditSet& edits);

/// Pairs each synthon component with the reactant component of maximal
/// atom-map overlap. Throws RecordError on count mismatch or ambiguity.
std::vector<std::pair<int, int>> align_components(const Molecule& synthons,
                                                  const Molecule& reactants);

/// Induced subgraph on reactant atoms absent from the synthon component.
LeavingGroup extract_leaving_group(const Molecule& synthons, int synthon_comp,
                                   const Molecule& reactants, int reactant_comp);

/// Completion order over synthon components: descending atom count, ties
/// by canonical component string.
std::vector<int> completion_order(const Molecule& synthons);

/// Copies one connected component into its own Molecule. When given,
/// old_to_new receives the atom-index mapping (-1 for atoms outside the
/// component).
Molecule extract_component(const Molecule& mol, int comp,
                           std::vector<int>* old_to_new = nullptr);

// --- dataset-level operations ----------------------------------------------

struct ProcessedRecord {
  std::string product_smiles;  // atom-mapped
  EditSet edits;
  std::vector<int> lg_indices;  // per synthon component, completion order
  int reaction_class = 0;
  bool single_edit() const { return edits.size() == 1; }
};

struct PreprocessStats {
  int total = 0;
  int ok = 0;
  int parse_errors = 0;
  int new_bond_skips = 0;
  int alignment_skips = 0;
  int other_skips = 0;
  int single_edit = 0;
  double single_edit_share() const { return ok ? static_cast<double>(single_edit) / ok : 0.0; }
};

struct ProcessedDataset {
  std::vector<ProcessedRecord> records;
  Vocabulary vocab;
  PreprocessStats stats;
  std::vector<std::string> warnings;  // one line per skipped record
};

ProcessedDataset preprocess(const std::vector<std::string>& lines);

std::string serialize_record(const ProcessedRecord& record);
ProcessedRecord parse_record(const std::string& line);

/// Deterministic disjoint exhaustive split; ratios must sum to 1.
struct SplitAssignment {
  std::vector<int> split;  // 0 train, 1 valid, 2 test
  std::vector<int> of(int which) const;
};

SplitAssignment split_dataset(int count, double train_ratio, double valid_ratio,
                              double test_ratio, std::uint64_t seed);

/// Reaction signature: sorted bond-edit labels plus sorted leaving-group
/// keys. Used as a reproducible rarity proxy.
std::string reaction_signature(const ProcessedRecord& record, const Vocabulary& vocab);

struct RareSubset {
  std::vector<int> train, valid, test;  // record indices
};

/// Records whose signature occurs at most `threshold` times in the
/// training split, partitioned by the global split assignment.
RareSubset build_rare_subset(const std::vector<ProcessedRecord>& records,
                             const Vocabulary& vocab, const SplitAssignment& splits,
                             int threshold);

// --- featurization ----------------------------------------------------------

inline constexpr int kAtomFeatureDim = 88;        // 65 + 10 + 6 + 6 + 1
inline constexpr int kAtomFeatureDimClass = 98;   // + 10 class one-hot
inline constexpr int kBondFeatureDim = 6;         // 4 + 1 + 1
inline constexpr int kNumReactionClasses = 10;

struct FeatureVectors {
  int atom_dim = 0;
  int bond_dim = kBondFeatureDim;
  std::vector<double> atom_features;  // num_atoms x atom_dim, row major
  std::vector<double> bond_features;  // num_bonds x bond_dim
};

FeatureVectors featurize(const Molecule& mol, int reaction_class = 0,
                         bool with_class = false);

}  // namespace retrosyn

#endif  // RETROSYN_REACTION_HPP
