//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//
// Generates the test fixture corpus: atom-mapped reactions covering bond
// deletions, bond order changes, hydrogen-count edits and multi-edit
// records, built from fragment templates so every record is correct by
// construction. Also emits a molecule list for canonicalization tests.
//
// Usage: make_fixtures <fixture_dir>

#include <fstream>
#include <iostream>
#include <set>
#include <vector>

#include "retrosyn/reaction.hpp"

using namespace retrosyn;

namespace {

SmilesWriteOptions mapped_opts() {
  SmilesWriteOptions opts;
  opts.canonical = true;
  opts.include_maps = true;
  return opts;
}

// Copies a fragment into a builder, returns old->new index map.
std::vector<int> add_fragment(MolBuilder& builder, const Molecule& frag,
                              const std::set<int>& skip = {}) {
  std::vector<int> remap(frag.num_atoms(), -1);
  for (int i = 0; i < frag.num_atoms(); ++i) {
    if (skip.count(i)) continue;
    Atom atom = frag.atom(i);
    atom.atom_map = 0;
    remap[i] = builder.add_atom(atom);
  }
  for (const Bond& bond : frag.bonds()) {
    if (remap[bond.a] >= 0 && remap[bond.b] >= 0) {
      builder.add_bond(remap[bond.a], remap[bond.b], bond.order);
    }
  }
  return remap;
}

// Single atom of the given element, or -1 / -2 on none / many.
int unique_atom(const Molecule& mol, const std::string& element) {
  int found = -1;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (mol.atom(i).element == element) {
      if (found >= 0) return -2;
      found = i;
    }
  }
  return found;
}

std::vector<int> atoms_of(const Molecule& mol, const std::string& element) {
  std::vector<int> out;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (mol.atom(i).element == element) out.push_back(i);
  }
  return out;
}

struct FragRef {
  int frag;
  int atom;
};

// Condensation: the product joins the fragments with the given new single
// bonds after dropping the listed fragment atoms (the leaving atoms). The
// reactant side is the untouched fragments, one component each.
struct Join {
  FragRef a, b;
  BondOrder order = BondOrder::Single;
};

std::string make_condensation(const std::vector<Molecule>& frags,
                              const std::vector<Join>& joins,
                              const std::vector<FragRef>& drops, int cls) {
  std::vector<std::set<int>> skip(frags.size());
  for (const FragRef& d : drops) skip[d.frag].insert(d.atom);

  MolBuilder pb;
  std::vector<std::vector<int>> premap;
  for (std::size_t f = 0; f < frags.size(); ++f) {
    premap.push_back(add_fragment(pb, frags[f], skip[f]));
  }
  for (const auto& join : joins) {
    pb.add_bond(premap[join.a.frag][join.a.atom], premap[join.b.frag][join.b.atom],
                join.order);
  }
  for (int i = 0; i < pb.num_atoms(); ++i) pb.atom(i).atom_map = i + 1;
  Molecule product = pb.finalize(false);

  MolBuilder rb;
  for (std::size_t f = 0; f < frags.size(); ++f) {
    std::vector<int> remap = add_fragment(rb, frags[f]);
    for (int i = 0; i < frags[f].num_atoms(); ++i) {
      if (premap[f][i] >= 0) rb.atom(remap[i]).atom_map = premap[f][i] + 1;
    }
  }
  Molecule reactants = rb.finalize(false);
  return write_smiles(reactants, mapped_opts()) + ">>" +
         write_smiles(product, mapped_opts()) + "\t" + std::to_string(cls);
}

// Bond order change on a single component, e.g. a retro oxidation or retro
// hydrogenation. `a` and `b` index the reactant fragment.
std::string make_order_change(const Molecule& reactant, int a, int b,
                              BondOrder product_order, int cls) {
  MolBuilder pb;
  std::vector<int> remap = add_fragment(pb, reactant);
  pb.set_bond_order(remap[a], remap[b], product_order);
  for (int i = 0; i < pb.num_atoms(); ++i) pb.atom(i).atom_map = i + 1;
  Molecule product = pb.finalize(false);

  MolBuilder rb;
  std::vector<int> rmap = add_fragment(rb, reactant);
  for (int i = 0; i < reactant.num_atoms(); ++i) rb.atom(rmap[i]).atom_map = remap[i] + 1;
  Molecule reactants = rb.finalize(false);
  return write_smiles(reactants, mapped_opts()) + ">>" +
         write_smiles(product, mapped_opts()) + "\t" + std::to_string(cls);
}

// Group removal: the reactant is the product with extra fragments bonded
// on (one component); the product loses them, gaining hydrogens.
std::string make_removal(const Molecule& core, const std::vector<Molecule>& extras,
                         const std::vector<std::pair<int, FragRef>>& joins, int cls) {
  MolBuilder pb;
  std::vector<int> coremap = add_fragment(pb, core);
  for (int i = 0; i < pb.num_atoms(); ++i) pb.atom(i).atom_map = i + 1;
  Molecule product = pb.finalize(false);

  MolBuilder rb;
  std::vector<int> rcore = add_fragment(rb, core);
  for (int i = 0; i < core.num_atoms(); ++i) rb.atom(rcore[i]).atom_map = coremap[i] + 1;
  std::vector<std::vector<int>> extramap;
  for (const Molecule& extra : extras) extramap.push_back(add_fragment(rb, extra));
  for (const auto& [core_atom, ref] : joins) {
    rb.add_bond(rcore[core_atom], extramap[ref.frag][ref.atom], BondOrder::Single);
  }
  Molecule reactants = rb.finalize(false);
  return write_smiles(reactants, mapped_opts()) + ">>" +
         write_smiles(product, mapped_opts()) + "\t" + std::to_string(cls);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <fixture_dir>\n";
    return 1;
  }
  std::string dir = argv[1];

  const std::vector<std::string> acyl_chlorides = {
      "CC(=O)Cl",           "CCC(=O)Cl",        "CCCC(=O)Cl",
      "CC(C)C(=O)Cl",       "CC(C)CC(=O)Cl",    "c1ccc(C(=O)Cl)cc1",
      "Cc1ccc(C(=O)Cl)cc1", "C1CCCCC1C(=O)Cl"};
  const std::vector<std::string> alcohols = {
      "OC",          "OCC",          "OCCC",           "OC(C)C",
      "OCC(C)C",     "OCCCC",        "OCc1ccccc1",     "OC1CCCCC1"};
  const std::vector<std::string> amines = {
      "NC",          "NCC",          "NCCC",           "NC(C)C",
      "NCC(C)C",     "NCCCC",        "NCc1ccccc1",     "N(C)CC"};
  const std::vector<std::string> bromides = {
      "CBr", "CCBr", "CCCBr", "CC(C)CBr", "BrCc1ccccc1"};
  const std::vector<std::string> sec_alcohols = {
      "CC(O)C",     "CC(O)CC",    "CCC(O)CC",  "CC(O)CCC",
      "CC(O)CC(C)C", "OC1CCCCC1", "CC(O)Cc1ccccc1", "CCC(O)C(C)C",
      "OCC",        "OCCC",       "OCCc1ccccc1", "OCC(C)C"};
  const std::vector<std::string> alkenes = {
      "C=CC",    "CC=CC",   "CC=CCC",  "CCC=CCC",
      "CC(C)=CC", "C1=CCCCC1", "CC=C(C)C", "C=CCCC"};
  const std::vector<std::string> diacyls = {
      "ClC(=O)C(=O)Cl", "ClC(=O)CC(=O)Cl", "ClC(=O)CCC(=O)Cl",
      "ClC(=O)c1ccc(C(=O)Cl)cc1"};
  const std::vector<std::string> diamines = {
      "NCCN", "NCCCN", "NCCCCN", "NCc1ccc(CN)cc1"};
  const std::vector<std::string> protecting = {"C(=O)OC(C)(C)C", "CC=O"};
  const std::vector<int> protect_site = {0, 1};

  std::vector<std::string> lines;

  // esters (class 1) and amides (class 2)
  for (const auto& acl : acyl_chlorides) {
    Molecule acid = parse_smiles(acl);
    int cl = unique_atom(acid, "Cl");
    int acyl_c = acid.bond(acid.incident_bonds(cl)[0]).other(cl);
    for (const auto& alc : alcohols) {
      Molecule nuc = parse_smiles(alc);
      lines.push_back(make_condensation({acid, nuc}, {{{0, acyl_c}, {1, unique_atom(nuc, "O")}}},
                                        {{0, cl}}, 1));
    }
    for (const auto& am : amines) {
      Molecule nuc = parse_smiles(am);
      lines.push_back(make_condensation({acid, nuc}, {{{0, acyl_c}, {1, unique_atom(nuc, "N")}}},
                                        {{0, cl}}, 2));
    }
  }

  // ethers (class 3)
  for (const auto& brs : bromides) {
    Molecule halide = parse_smiles(brs);
    int br = unique_atom(halide, "Br");
    int carbon = halide.bond(halide.incident_bonds(br)[0]).other(br);
    for (const auto& alc : alcohols) {
      Molecule nuc = parse_smiles(alc);
      lines.push_back(make_condensation({halide, nuc}, {{{0, carbon}, {1, unique_atom(nuc, "O")}}},
                                        {{0, br}}, 3));
    }
  }

  // retro oxidations (class 4): alcohol reactant, carbonyl product
  for (const auto& alc : sec_alcohols) {
    Molecule mol = parse_smiles(alc);
    int o = unique_atom(mol, "O");
    int c = mol.bond(mol.incident_bonds(o)[0]).other(o);
    lines.push_back(make_order_change(mol, c, o, BondOrder::Double, 4));
  }

  // retro hydrogenations (class 5): alkene reactant, alkane product
  for (const auto& ene : alkenes) {
    Molecule mol = parse_smiles(ene);
    int bond = -1;
    for (int i = 0; i < mol.num_bonds(); ++i) {
      if (mol.bond(i).order == BondOrder::Double) bond = i;
    }
    lines.push_back(
        make_order_change(mol, mol.bond(bond).a, mol.bond(bond).b, BondOrder::Single, 5));
  }

  // amine deprotections (class 6): one hydrogen-count edit
  for (const auto& am : amines) {
    Molecule amine = parse_smiles(am);
    int n = unique_atom(amine, "N");
    for (std::size_t p = 0; p < protecting.size(); ++p) {
      Molecule pg = parse_smiles(protecting[p]);
      lines.push_back(make_removal(amine, {pg}, {{n, {0, protect_site[p]}}}, 6));
    }
  }

  // diesters (class 7): two deletions, a bridging synthon with two marks
  for (const auto& dia : diacyls) {
    Molecule core = parse_smiles(dia);
    std::vector<int> cls = atoms_of(core, "Cl");
    int c0 = core.bond(core.incident_bonds(cls[0])[0]).other(cls[0]);
    int c1 = core.bond(core.incident_bonds(cls[1])[0]).other(cls[1]);
    for (const auto& alc : alcohols) {
      if (alc == "OC1CCCCC1") continue;  // keep the corpus light on ring esters
      Molecule nuc = parse_smiles(alc);
      int o = unique_atom(nuc, "O");
      lines.push_back(make_condensation(
          {core, nuc, nuc},
          {{{0, c0}, {1, o}}, {{0, c1}, {2, o}}},
          {{0, cls[0]}, {0, cls[1]}}, 7));
    }
  }

  // double deprotections (class 8): two hydrogen-count edits
  for (const auto& dam : diamines) {
    Molecule amine = parse_smiles(dam);
    std::vector<int> ns = atoms_of(amine, "N");
    for (std::size_t p = 0; p < protecting.size(); ++p) {
      Molecule pg = parse_smiles(protecting[p]);
      lines.push_back(make_removal(amine, {pg, pg},
                                   {{ns[0], {0, protect_site[p]}}, {ns[1], {1, protect_site[p]}}},
                                   8));
    }
  }

  // imines (class 9): condensation through a double bond, so the leaving
  // oxygen reattaches at order two on the way back
  const std::vector<std::string> aldehydes = {"CC=O", "CCC=O", "c1ccccc1C=O",
                                              "CC(C)C=O"};
  for (const auto& ald : aldehydes) {
    Molecule carbonyl = parse_smiles(ald);
    int o = unique_atom(carbonyl, "O");
    int c = carbonyl.bond(carbonyl.incident_bonds(o)[0]).other(o);
    for (const auto& am : amines) {
      if (am == "N(C)CC") continue;  // secondary amines cannot form the imine
      Molecule nuc = parse_smiles(am);
      lines.push_back(make_condensation(
          {carbonyl, nuc},
          {{{0, c}, {1, unique_atom(nuc, "N")}, BondOrder::Double}},
          {{0, o}}, 9));
    }
  }

  // sanity: every generated record must survive preprocessing
  ProcessedDataset data = preprocess(lines);
  if (data.stats.ok != data.stats.total || data.stats.total != static_cast<int>(lines.size())) {
    std::cerr << "corpus broken: " << data.stats.ok << "/" << data.stats.total << " ok\n";
    for (const auto& w : data.warnings) std::cerr << "  " << w << "\n";
    return 1;
  }

  std::ofstream rx(dir + "/reactions.txt");
  for (const auto& line : lines) rx << line << "\n";
  rx.close();

  // canonicalization fixture: 50 distinct product structures
  std::set<std::string> seen;
  std::ofstream mols(dir + "/molecules.txt");
  int count = 0;
  for (const auto& record : data.records) {
    Molecule product = parse_smiles(record.product_smiles);
    std::string canon = canonical_smiles(product);
    if (!seen.insert(canon).second) continue;
    mols << canon << "\n";
    if (++count == 50) break;
  }
  if (count < 50) {
    std::cerr << "only " << count << " distinct molecules\n";
    return 1;
  }

  std::cout << lines.size() << " reactions, " << count << " molecules, vocab "
            << data.vocab.size() << "\n";
  return 0;
}
