//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrosyn/reaction.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "retrosyn/tensor.hpp"

namespace retrosyn {

const char* edit_label_name(EditLabel label) {
  switch (label) {
    case EditLabel::Delete: return "DELETE";
    case EditLabel::Single: return "SINGLE";
    case EditLabel::Double: return "DOUBLE";
    case EditLabel::Triple: return "TRIPLE";
    case EditLabel::Aromatic: return "AROMATIC";
  }
  return "?";
}

EditLabel edit_label_from_name(const std::string& name) {
  for (int i = 0; i <= 4; ++i) {
    if (name == edit_label_name(static_cast<EditLabel>(i))) return static_cast<EditLabel>(i);
  }
  throw std::invalid_argument("unknown edit label '" + name + "'");
}

EditLabel edit_label_from_order(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return EditLabel::Single;
    case BondOrder::Double: return EditLabel::Double;
    case BondOrder::Triple: return EditLabel::Triple;
    case BondOrder::Aromatic: return EditLabel::Aromatic;
  }
  return EditLabel::Single;
}

BondOrder bond_order_from_label(EditLabel label) {
  switch (label) {
    case EditLabel::Single: return BondOrder::Single;
    case EditLabel::Double: return BondOrder::Double;
    case EditLabel::Triple: return BondOrder::Triple;
    case EditLabel::Aromatic: return BondOrder::Aromatic;
    case EditLabel::Delete: break;
  }
  throw std::invalid_argument("DELETE has no bond order");
}

std::string serialize_edits(const EditSet& edits) {
  if (edits.empty()) return "-";
  std::string out;
  for (const auto& edit : edits.bond_edits) {
    if (!out.empty()) out += ";";
    out += "b:" + std::to_string(edit.map_a) + "-" + std::to_string(edit.map_b) + ":" +
           edit_label_name(edit.new_label);
  }
  for (const auto& edit : edits.atom_edits) {
    if (!out.empty()) out += ";";
    out += "a:" + std::to_string(edit.map_atom);
  }
  return out;
}

EditSet parse_edits(const std::string& text) {
  EditSet edits;
  if (text == "-" || text.empty()) return edits;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.rfind("b:", 0) == 0) {
      auto dash = item.find('-', 2);
      auto colon = item.find(':', dash);
      if (dash == std::string::npos || colon == std::string::npos) {
        throw std::invalid_argument("malformed bond edit '" + item + "'");
      }
      BondEdit edit;
      edit.map_a = std::stoi(item.substr(2, dash - 2));
      edit.map_b = std::stoi(item.substr(dash + 1, colon - dash - 1));
      edit.new_label = edit_label_from_name(item.substr(colon + 1));
      edits.bond_edits.push_back(edit);
    } else if (item.rfind("a:", 0) == 0) {
      edits.atom_edits.push_back({std::stoi(item.substr(2))});
    } else {
      throw std::invalid_argument("malformed edit item '" + item + "'");
    }
  }
  return edits;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() {
  keys_ = {kStartKey, kEndKey, kPadKey};
  groups_.resize(3);
  for (int i = 0; i < 3; ++i) lookup_[keys_[i]] = i;
}

const LeavingGroup& Vocabulary::group(int index) const {
  if (index < 3 || index >= size()) {
    throw std::out_of_range("no leaving group at index " + std::to_string(index));
  }
  return groups_.at(index);
}

int Vocabulary::index_of(const std::string& key) const {
  auto it = lookup_.find(key);
  return it == lookup_.end() ? -1 : it->second;
}

int Vocabulary::add(const LeavingGroup& group) {
  if (group.is_end()) return kEnd;
  auto it = lookup_.find(group.canonical_key);
  if (it != lookup_.end()) return it->second;
  int index = size();
  keys_.push_back(group.canonical_key);
  groups_.push_back(group);
  lookup_[group.canonical_key] = index;
  return index;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write vocabulary: " + path);
  for (const auto& key : keys_) os << key << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read vocabulary: " + path);
  Vocabulary vocab;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ++lineno;
    if (lineno <= 3) {
      const char* expect[] = {kStartKey, kEndKey, kPadKey};
      if (line != expect[lineno - 1]) {
        throw std::runtime_error("vocabulary missing control token " +
                                 std::string(expect[lineno - 1]));
      }
      continue;
    }
    vocab.add(leaving_group_from_key(line));
  }
  return vocab;
}

LeavingGroup leaving_group_from_key(const std::string& key) {
  LeavingGroup group;
  group.graph = parse_smiles(key);
  group.canonical_key = key;
  std::vector<int> rank = canonical_rank(group.graph);
  for (int i = 0; i < group.graph.num_atoms(); ++i) {
    if (group.graph.atom(i).attach_mark) group.attach_atoms.push_back(i);
  }
  std::sort(group.attach_atoms.begin(), group.attach_atoms.end(),
            [&](int a, int b) { return rank[a] < rank[b]; });
  return group;
}

// ---------------------------------------------------------------------------
// Record-level operations

RetroPair parse_reaction(const std::string& line) {
  std::string body = line;
  int reaction_class = 0;
  if (auto tab = body.find('\t'); tab != std::string::npos) {
    std::string cls = body.substr(tab + 1);
    body = body.substr(0, tab);
    try {
      reaction_class = std::stoi(cls);
    } catch (const std::exception&) {
      throw RecordError("malformed class id '" + cls + "'", RecordError::Category::Malformed);
    }
  }
  auto arrow = body.find(">>");
  if (arrow == std::string::npos) {
    throw RecordError("missing '>>' separator", RecordError::Category::Malformed);
  }
  RetroPair pair;
  pair.reaction_class = reaction_class;
  try {
    pair.reactants = parse_smiles(body.substr(0, arrow));
    pair.product = parse_smiles(body.substr(arrow + 2));
  } catch (const std::exception& e) {
    throw RecordError(std::string("SMILES error: ") + e.what(),
                      RecordError::Category::Malformed);
  }
  if (pair.product.num_components() != 1) {
    throw RecordError("product must be a single component",
                      RecordError::Category::Malformed);
  }
  // map bijection onto product atoms
  std::set<int> reactant_maps;
  for (const Atom& atom : pair.reactants.atoms()) {
    if (atom.atom_map > 0) reactant_maps.insert(atom.atom_map);
  }
  for (int i = 0; i < pair.product.num_atoms(); ++i) {
    int map = pair.product.atom(i).atom_map;
    if (map == 0) {
      throw RecordError("unmapped product atom " + std::to_string(i),
                        RecordError::Category::Malformed);
    }
    if (!reactant_maps.count(map)) {
      throw RecordError("product map " + std::to_string(map) + " missing in reactants",
                        RecordError::Category::Malformed);
    }
  }
  return pair;
}

namespace {

// Multiset of (neighbor map, bond order) over neighbors that exist in the
// product, used to decide whether an atom's bond environment changed.
std::vector<std::pair<int, int>> mapped_neighborhood(const Molecule& mol, int atom,
                                                     const std::set<int>& product_maps) {
  std::vector<std::pair<int, int>> out;
  for (int bi : mol.incident_bonds(atom)) {
    const Bond& bond = mol.bond(bi);
    int other = bond.other(atom);
    int map = mol.atom(other).atom_map;
    if (map > 0 && product_maps.count(map)) {
      out.push_back({map, static_cast<int>(bond.order)});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

EditSet extract_edits(const RetroPair& pair) {
  const Molecule& product = pair.product;
  const Molecule& reactants = pair.reactants;
  std::set<int> product_maps;
  for (const Atom& atom : product.atoms()) product_maps.insert(atom.atom_map);

  EditSet edits;
  // bond edits: product bonds whose reactant counterpart differs
  for (const Bond& bond : product.bonds()) {
    int map_a = product.atom(bond.a).atom_map;
    int map_b = product.atom(bond.b).atom_map;
    int ra = reactants.atom_by_map(map_a);
    int rb = reactants.atom_by_map(map_b);
    int rbond = reactants.bond_between(ra, rb);
    if (rbond < 0) {
      edits.bond_edits.push_back({std::min(map_a, map_b), std::max(map_a, map_b),
                                  EditLabel::Delete});
    } else if (reactants.bond(rbond).order != bond.order) {
      edits.bond_edits.push_back({std::min(map_a, map_b), std::max(map_a, map_b),
                                  edit_label_from_order(reactants.bond(rbond).order)});
    }
  }
  // new-bond formation between product-mapped atoms is out of model
  for (const Bond& bond : reactants.bonds()) {
    int map_a = reactants.atom(bond.a).atom_map;
    int map_b = reactants.atom(bond.b).atom_map;
    if (map_a > 0 && map_b > 0 && product_maps.count(map_a) && product_maps.count(map_b)) {
      int pa = product.atom_by_map(map_a);
      int pb = product.atom_by_map(map_b);
      if (product.bond_between(pa, pb) < 0) {
        throw RecordError("new bond between mapped atoms " + std::to_string(map_a) +
                              "-" + std::to_string(map_b),
                          RecordError::Category::NewBond);
      }
    }
  }
  // atom edits: hydrogen count changed with unchanged mapped environment
  for (int i = 0; i < product.num_atoms(); ++i) {
    int map = product.atom(i).atom_map;
    int r = reactants.atom_by_map(map);
    if (product.atom(i).formal_charge != reactants.atom(r).formal_charge) {
      throw RecordError("charge change on mapped atom " + std::to_string(map),
                        RecordError::Category::Other);
    }
    if (product.atom(i).total_h() == reactants.atom(r).total_h()) continue;
    if (mapped_neighborhood(product, i, product_maps) ==
        mapped_neighborhood(reactants, r, product_maps)) {
      edits.atom_edits.push_back({map});
    }
  }
  return edits;
}

Molecule apply_edits(const Molecule& product, const EditSet& edits) {
  MolBuilder builder(product);
  std::set<int> marked;
  auto atom_of_map = [&](int map) {
    int idx = product.atom_by_map(map);
    if (idx < 0) throw std::invalid_argument("edit references unknown map " + std::to_string(map));
    return idx;
  };
  for (const BondEdit& edit : edits.bond_edits) {
    int a = atom_of_map(edit.map_a);
    int b = atom_of_map(edit.map_b);
    if (product.bond_between(a, b) < 0) {
      throw std::invalid_argument("edit references nonexistent bond " +
                                  std::to_string(edit.map_a) + "-" +
                                  std::to_string(edit.map_b));
    }
    if (edit.new_label == EditLabel::Delete) {
      builder.remove_bond(a, b);
    } else {
      builder.set_bond_order(a, b, bond_order_from_label(edit.new_label));
    }
    marked.insert(a);
    marked.insert(b);
  }
  for (const AtomEdit& edit : edits.atom_edits) marked.insert(atom_of_map(edit.map_atom));

  for (int idx : marked) {
    Atom& atom = builder.atom(idx);
    atom.attach_mark = true;
    // Hydrogens become sacrificial (implicit) but are not refilled; the
    // attachment step settles the final count.
    int total = atom.total_h();
    int units = 0;
    for (const Bond& bond : builder.bonds()) {
      if (bond.a == idx || bond.b == idx) units += bond_order_half_units(bond.order);
    }
    units /= 2;
    int dv = default_valence(atom.element, atom.formal_charge);
    int cap = dv < 0 ? total : std::max(0, dv - units);
    atom.explicit_h = 0;
    atom.implicit_h = std::min(total, cap);
    atom.no_implicit = true;
  }
  return builder.finalize(false);
}

std::vector<std::pair<int, int>> align_components(const Molecule& synthons,
                                                  const Molecule& reactants) {
  const int sc = synthons.num_components();
  const int rc = reactants.num_components();
  if (sc != rc) {
    throw RecordError("component count mismatch: " + std::to_string(sc) +
                          " synthons vs " + std::to_string(rc) + " reactants",
                      RecordError::Category::Alignment);
  }
  // map -> reactant component
  std::map<int, int> reactant_comp_of_map;
  for (int i = 0; i < reactants.num_atoms(); ++i) {
    if (reactants.atom(i).atom_map > 0) {
      reactant_comp_of_map[reactants.atom(i).atom_map] = reactants.component_of(i);
    }
  }
  std::vector<std::pair<int, int>> result;
  std::set<int> used;
  for (int comp = 0; comp < sc; ++comp) {
    std::vector<int> overlap(rc, 0);
    int atoms_in_comp = 0;
    for (int i = 0; i < synthons.num_atoms(); ++i) {
      if (synthons.component_of(i) != comp) continue;
      ++atoms_in_comp;
      auto it = reactant_comp_of_map.find(synthons.atom(i).atom_map);
      if (it != reactant_comp_of_map.end()) ++overlap[it->second];
    }
    int best = -1;
    for (int r = 0; r < rc; ++r) {
      if (best < 0 || overlap[r] > overlap[best]) best = r;
    }
    if (best < 0 || overlap[best] != atoms_in_comp) {
      throw RecordError("ambiguous component alignment", RecordError::Category::Alignment);
    }
    if (!used.insert(best).second) {
      throw RecordError("two synthon components map to one reactant component",
                        RecordError::Category::Alignment);
    }
    result.push_back({comp, best});
  }
  return result;
}

Molecule extract_component(const Molecule& mol, int comp, std::vector<int>* old_to_new) {
  MolBuilder builder;
  std::vector<int> remap(mol.num_atoms(), -1);
  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (mol.component_of(i) == comp) remap[i] = builder.add_atom(mol.atom(i));
  }
  for (const Bond& bond : mol.bonds()) {
    if (remap[bond.a] >= 0 && remap[bond.b] >= 0) {
      int bi = builder.add_bond(remap[bond.a], remap[bond.b], bond.order);
      builder.bonds()[bi].stereo_tag = bond.stereo_tag;
    }
  }
  if (old_to_new) *old_to_new = remap;
  return builder.finalize(false);
}

LeavingGroup extract_leaving_group(const Molecule& synthons, int synthon_comp,
                                   const Molecule& reactants, int reactant_comp) {
  std::set<int> synthon_maps;
  for (int i = 0; i < synthons.num_atoms(); ++i) {
    if (synthons.component_of(i) == synthon_comp) {
      synthon_maps.insert(synthons.atom(i).atom_map);
    }
  }
  // fragment = reactant-component atoms absent from the synthon component
  std::vector<int> remap(reactants.num_atoms(), -1);
  MolBuilder builder;
  for (int i = 0; i < reactants.num_atoms(); ++i) {
    if (reactants.component_of(i) != reactant_comp) continue;
    int map = reactants.atom(i).atom_map;
    if (map > 0 && synthon_maps.count(map)) continue;
    Atom atom = reactants.atom(i);
    atom.explicit_h = atom.total_h();  // freeze hydrogens as in the reactant
    atom.implicit_h = 0;
    atom.no_implicit = true;
    atom.atom_map = 0;
    atom.attach_mark = false;
    atom.stereo_tag.clear();
    remap[i] = builder.add_atom(atom);
  }
  for (const Bond& bond : reactants.bonds()) {
    bool a_in = remap[bond.a] >= 0, b_in = remap[bond.b] >= 0;
    if (a_in && b_in) {
      builder.add_bond(remap[bond.a], remap[bond.b], bond.order);
    } else if (a_in != b_in) {
      // bond into the synthon: mark the fragment-side atom
      builder.atom(a_in ? remap[bond.a] : remap[bond.b]).attach_mark = true;
    }
  }
  LeavingGroup group;
  group.graph = builder.finalize(false);
  if (group.graph.num_atoms() == 0) return group;  // END
  SmilesWriteOptions opts;
  opts.canonical = true;
  opts.attach_star = true;
  group.canonical_key = write_smiles(group.graph, opts);
  std::vector<int> rank = canonical_rank(group.graph);
  for (int i = 0; i < group.graph.num_atoms(); ++i) {
    if (group.graph.atom(i).attach_mark) group.attach_atoms.push_back(i);
  }
  std::sort(group.attach_atoms.begin(), group.attach_atoms.end(),
            [&](int a, int b) { return rank[a] < rank[b]; });
  return group;
}

std::vector<int> completion_order(const Molecule& synthons) {
  struct Entry {
    int comp;
    int atoms;
    std::string canonical;
  };
  std::vector<Entry> entries;
  for (int comp = 0; comp < synthons.num_components(); ++comp) {
    Molecule sub = extract_component(synthons, comp);
    entries.push_back({comp, sub.num_atoms(), canonical_smiles(sub)});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.atoms != b.atoms) return a.atoms > b.atoms;
    if (a.canonical != b.canonical) return a.canonical < b.canonical;
    return a.comp < b.comp;
  });
  std::vector<int> order;
  for (const auto& e : entries) order.push_back(e.comp);
  return order;
}

// ---------------------------------------------------------------------------
// Dataset-level operations

ProcessedDataset preprocess(const std::vector<std::string>& lines) {
  ProcessedDataset out;
  int lineno = 0;
  for (const std::string& line : lines) {
    ++lineno;
    if (line.empty()) continue;
    ++out.stats.total;
    try {
      RetroPair pair = parse_reaction(line);
      EditSet edits = extract_edits(pair);
      Molecule synthons = apply_edits(pair.product, edits);
      auto alignment = align_components(synthons, pair.reactants);
      std::map<int, int> reactant_of_synthon(alignment.begin(), alignment.end());
      ProcessedRecord record;
      record.reaction_class = pair.reaction_class;
      SmilesWriteOptions opts;
      opts.canonical = true;
      opts.include_maps = true;
      record.product_smiles = write_smiles(pair.product, opts);
      record.edits = edits;
      for (int comp : completion_order(synthons)) {
        LeavingGroup group = extract_leaving_group(synthons, comp, pair.reactants,
                                                   reactant_of_synthon.at(comp));
        record.lg_indices.push_back(out.vocab.add(group));
      }
      out.records.push_back(std::move(record));
      ++out.stats.ok;
      if (out.records.back().single_edit()) ++out.stats.single_edit;
    } catch (const RecordError& e) {
      switch (e.category()) {
        case RecordError::Category::Malformed: ++out.stats.parse_errors; break;
        case RecordError::Category::NewBond: ++out.stats.new_bond_skips; break;
        case RecordError::Category::Alignment: ++out.stats.alignment_skips; break;
        case RecordError::Category::Other: ++out.stats.other_skips; break;
      }
      out.warnings.push_back("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception& e) {
      ++out.stats.other_skips;
      out.warnings.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string serialize_record(const ProcessedRecord& record) {
  std::string lg;
  for (std::size_t i = 0; i < record.lg_indices.size(); ++i) {
    if (i) lg += ",";
    lg += std::to_string(record.lg_indices[i]);
  }
  if (lg.empty()) lg = "-";
  return record.product_smiles + "\t" + serialize_edits(record.edits) + "\t" + lg + "\t" +
         std::to_string(record.reaction_class);
}

ProcessedRecord parse_record(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, '\t')) fields.push_back(field);
  if (fields.size() != 4) {
    throw std::invalid_argument("processed record needs 4 tab-separated fields");
  }
  ProcessedRecord record;
  record.product_smiles = fields[0];
  record.edits = parse_edits(fields[1]);
  if (fields[2] != "-") {
    std::stringstream ls(fields[2]);
    std::string idx;
    while (std::getline(ls, idx, ',')) record.lg_indices.push_back(std::stoi(idx));
  }
  record.reaction_class = std::stoi(fields[3]);
  return record;
}

std::vector<int> SplitAssignment::of(int which) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(split.size()); ++i) {
    if (split[i] == which) out.push_back(i);
  }
  return out;
}

SplitAssignment split_dataset(int count, double train_ratio, double valid_ratio,
                              double test_ratio, std::uint64_t seed) {
  if (std::abs(train_ratio + valid_ratio + test_ratio - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must sum to 1");
  }
  std::vector<int> order(count);
  for (int i = 0; i < count; ++i) order[i] = i;
  RandomGen rng(seed);
  for (int i = count - 1; i > 0; --i) {
    int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  int n_train = static_cast<int>(count * train_ratio + 1e-9);
  int n_valid = static_cast<int>(count * valid_ratio + 1e-9);
  SplitAssignment assignment;
  assignment.split.assign(count, 2);
  for (int i = 0; i < count; ++i) {
    if (i < n_train) assignment.split[order[i]] = 0;
    else if (i < n_train + n_valid) assignment.split[order[i]] = 1;
  }
  return assignment;
}

std::string reaction_signature(const ProcessedRecord& record, const Vocabulary& vocab) {
  std::vector<std::string> parts;
  for (const auto& edit : record.edits.bond_edits) {
    parts.push_back(std::string("b:") + edit_label_name(edit.new_label));
  }
  for (std::size_t i = 0; i < record.edits.atom_edits.size(); ++i) parts.push_back("a:H");
  std::sort(parts.begin(), parts.end());
  std::vector<std::string> groups;
  for (int idx : record.lg_indices) groups.push_back(vocab.key(idx));
  std::sort(groups.begin(), groups.end());
  std::string out;
  for (const auto& p : parts) out += p + "|";
  out += ">>";
  for (const auto& g : groups) out += "|" + g;
  return out;
}

RareSubset build_rare_subset(const std::vector<ProcessedRecord>& records,
                             const Vocabulary& vocab, const SplitAssignment& splits,
                             int threshold) {
  std::map<std::string, int> train_counts;
  std::vector<std::string> signatures(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    signatures[i] = reaction_signature(records[i], vocab);
    if (splits.split[i] == 0) ++train_counts[signatures[i]];
  }
  RareSubset out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto it = train_counts.find(signatures[i]);
    int count = it == train_counts.end() ? 0 : it->second;
    if (count > threshold) continue;
    switch (splits.split[i]) {
      case 0: out.train.push_back(static_cast<int>(i)); break;
      case 1: out.valid.push_back(static_cast<int>(i)); break;
      default: out.test.push_back(static_cast<int>(i)); break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Featurization

FeatureVectors featurize(const Molecule& mol, int reaction_class, bool with_class) {
  FeatureVectors out;
  out.atom_dim = with_class ? kAtomFeatureDimClass : kAtomFeatureDim;
  out.atom_features.assign(static_cast<std::size_t>(mol.num_atoms()) * out.atom_dim, 0.0);
  out.bond_features.assign(static_cast<std::size_t>(mol.num_bonds()) * kBondFeatureDim, 0.0);

  for (int i = 0; i < mol.num_atoms(); ++i) {
    const Atom& atom = mol.atom(i);
    int sym = element_index(atom.element);
    if (sym < 0) {
      throw std::invalid_argument("cannot featurize unknown element '" + atom.element + "'");
    }
    double* f = out.atom_features.data() + static_cast<std::size_t>(i) * out.atom_dim;
    f[sym] = 1.0;
    f[65 + std::min(mol.degree(i), 9)] = 1.0;
    int explicit_val = mol.bond_valence_units(i) + atom.explicit_h;
    f[75 + std::clamp(explicit_val, 0, 5)] = 1.0;
    f[81 + std::clamp(atom.implicit_h, 0, 5)] = 1.0;
    f[87] = atom.aromatic ? 1.0 : 0.0;
    if (with_class && reaction_class >= 1 && reaction_class <= kNumReactionClasses) {
      f[88 + reaction_class - 1] = 1.0;
    }
  }
  for (int i = 0; i < mol.num_bonds(); ++i) {
    const Bond& bond = mol.bond(i);
    double* f = out.bond_features.data() + static_cast<std::size_t>(i) * kBondFeatureDim;
    switch (bond.order) {
      case BondOrder::Single: f[0] = 1.0; break;
      case BondOrder::Double: f[1] = 1.0; break;
      case BondOrder::Triple: f[2] = 1.0; break;
      case BondOrder::Aromatic: f[3] = 1.0; break;
    }
    f[4] = bond.conjugated ? 1.0 : 0.0;
    f[5] = bond.in_ring ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace retrosyn
