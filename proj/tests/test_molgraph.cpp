//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "retrosyn/molgraph.hpp"

using namespace retrosyn;

namespace {

Molecule permuted(const Molecule& mol, const std::vector<int>& perm) {
  // perm[i] = new index of old atom i
  MolBuilder builder;
  std::vector<Atom> atoms(mol.num_atoms());
  for (int i = 0; i < mol.num_atoms(); ++i) atoms[perm[i]] = mol.atom(i);
  for (auto& atom : atoms) builder.add_atom(atom);
  for (int i = 0; i < mol.num_bonds(); ++i) {
    const Bond& bond = mol.bond(i);
    builder.add_bond(perm[bond.a], perm[bond.b], bond.order);
  }
  return builder.finalize(false);
}

}  // namespace

TEST_CASE("parse ethanol") {
  Molecule mol = parse_smiles("CCO");
  REQUIRE(mol.num_atoms() == 3);
  REQUIRE(mol.num_bonds() == 2);
  CHECK(mol.atom(0).element == "C");
  CHECK(mol.atom(2).element == "O");
  CHECK(mol.atom(0).implicit_h == 3);
  CHECK(mol.atom(1).implicit_h == 2);
  CHECK(mol.atom(2).implicit_h == 1);
  CHECK(mol.bond(0).order == BondOrder::Single);
}

TEST_CASE("parse benzene") {
  Molecule mol = parse_smiles("c1ccccc1");
  REQUIRE(mol.num_atoms() == 6);
  REQUIRE(mol.num_bonds() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(mol.atom(i).aromatic);
    CHECK(mol.atom(i).implicit_h == 1);
  }
  for (int i = 0; i < 6; ++i) CHECK(mol.bond(i).order == BondOrder::Aromatic);
}

TEST_CASE("bracket atoms with maps") {
  Molecule mol = parse_smiles("[CH3:1][OH:2]");
  REQUIRE(mol.num_atoms() == 2);
  CHECK(mol.atom(0).atom_map == 1);
  CHECK(mol.atom(1).atom_map == 2);
  CHECK(mol.atom(0).explicit_h == 3);
  CHECK(mol.atom(1).explicit_h == 1);
  CHECK(mol.atom(0).implicit_h == 0);
}

TEST_CASE("charges and multi-component") {
  Molecule mol = parse_smiles("[Na+].[O-]C(=O)C");
  CHECK(mol.num_components() == 2);
  CHECK(mol.atom(0).formal_charge == 1);
  CHECK(mol.atom(1).formal_charge == -1);
  CHECK(mol.atom(1).implicit_h == 0);
}

TEST_CASE("kekulized benzene canonicalizes like aromatic benzene") {
  Molecule a = parse_smiles("C1=CC=CC=C1");
  Molecule b = parse_smiles("c1ccccc1");
  CHECK(canonical_smiles(a) == canonical_smiles(b));
}

TEST_CASE("parse errors carry offsets") {
  CHECK_THROWS_AS(parse_smiles("C(C"), ParseError);
  CHECK_THROWS_AS(parse_smiles("C1CC"), ParseError);
  CHECK_THROWS_AS(parse_smiles("[Xx]"), ParseError);
  CHECK_THROWS_AS(parse_smiles("C(=O)(=O)(=O)O"), ValenceError);
  CHECK_THROWS_AS(parse_smiles(""), ParseError);
  CHECK_THROWS_AS(parse_smiles("C=#C"), ParseError);
}

TEST_CASE("write single carbon") {
  CHECK(canonical_smiles(parse_smiles("C")) == "C");
}

TEST_CASE("canonical form is order independent") {
  CHECK(canonical_smiles(parse_smiles("OCC")) == canonical_smiles(parse_smiles("CCO")));
}

TEST_CASE("two components write dot separated") {
  Molecule mol = parse_smiles("CCO.CC");
  std::string s = canonical_smiles(mol);
  CHECK(s.find('.') != std::string::npos);
  CHECK(is_isomorphic(parse_smiles(s), mol));
}

TEST_CASE("round trip preserves structure") {
  const char* fixtures[] = {
      "CCO", "c1ccccc1", "CC(=O)OCC", "C#N", "CC(C)(C)c1ccc(O)cc1",
      "[NH4+].[Cl-]", "O=C(O)c1ccccc1", "CN1CCC[C@H]1c1cccnc1",
      "FC(F)(F)c1ccccc1Br", "C/C=C/C", "c1ccc2ccccc2c1", "CSC", "CS(=O)(=O)O",
      "COP(=O)(OC)OC", "[13CH4]", "C[N+](C)(C)C.[I-]"};
  for (const char* s : fixtures) {
    CAPTURE(s);
    Molecule mol = parse_smiles(s);
    Molecule again = parse_smiles(canonical_smiles(mol));
    CHECK(is_isomorphic(mol, again));
    for (int i = 0; i < mol.num_atoms(); ++i) {
      CAPTURE(i);
      // valence bookkeeping: total H must fit the valence model
      const Atom& a = mol.atom(i);
      int dv = default_valence(a.element, a.formal_charge);
      if (dv >= 0 && !a.no_implicit) {
        const auto& vals = *allowed_valences(a.element);
        int used = mol.bond_valence_units(i) + a.total_h();
        bool matches = false;
        for (int v : vals) {
          if (std::max(0, v + a.formal_charge) == used) matches = true;
        }
        CHECK(matches);
      }
    }
  }
}

TEST_CASE("maps round trip when requested") {
  Molecule mol = parse_smiles("[CH3:1][C:2](=[O:3])[O:4][CH2:5][CH3:6]");
  std::string s = canonical_smiles(mol, true);
  Molecule again = parse_smiles(s);
  CHECK(again.atom_by_map(3) >= 0);
  CHECK(is_isomorphic(mol, again, false));
}

TEST_CASE("canonical rank is permutation invariant") {
  const char* fixtures[] = {"CC(=O)OCC",  "c1ccc2ccccc2c1", "CC(C)Cc1ccc(C)cc1",
                            "O=C(O)CCN", "FC(F)(Cl)Br", "CCOC(=O)c1ccccc1N"};
  std::mt19937 rng(1234);
  for (const char* s : fixtures) {
    CAPTURE(s);
    Molecule mol = parse_smiles(s);
    std::string expected = canonical_smiles(mol);
    std::vector<int> perm(mol.num_atoms());
    for (int i = 0; i < mol.num_atoms(); ++i) perm[i] = i;
    std::set<std::string> unique;
    for (int trial = 0; trial < 100; ++trial) {
      std::shuffle(perm.begin(), perm.end(), rng);
      unique.insert(canonical_smiles(permuted(mol, perm)));
    }
    CHECK(unique.size() == 1);
    CHECK(*unique.begin() == expected);
  }
}

TEST_CASE("isomorphism oracle") {
  Molecule m = parse_smiles("CCO");
  CHECK(is_isomorphic(m, m));
  CHECK_FALSE(is_isomorphic(parse_smiles("CCO"), parse_smiles("COC")));
  Molecule mapped = parse_smiles("[CH3:1][C:2](=[O:3])[O:4][CH2:5][CH3:6]");
  Molecule plain = parse_smiles("CC(=O)OCC");
  CHECK(is_isomorphic(mapped, plain, true));
  CHECK_FALSE(is_isomorphic(mapped, plain, false));
}

TEST_CASE("stereo tags carried verbatim") {
  Molecule mol = parse_smiles("C[C@H](N)O");
  int center = -1;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (!mol.atom(i).stereo_tag.empty()) center = i;
  }
  REQUIRE(center >= 0);
  CHECK(mol.atom(center).stereo_tag == "@");
  std::string s = canonical_smiles(mol);
  CHECK(s.find("@") != std::string::npos);
  Molecule again = parse_smiles(s);
  CHECK(is_isomorphic(mol, again));
}

TEST_CASE("element table size") {
  CHECK(element_table().size() == 65);
  CHECK(element_index("C") == 0);
  CHECK(element_index("Xx") == -1);
}

TEST_CASE("valence model") {
  CHECK(default_valence("C", 0) == 4);
  CHECK(default_valence("N", 1) == 4);
  CHECK(default_valence("O", -1) == 1);
  CHECK(max_valence("S", 0) == 6);
  CHECK(max_valence("P", 0) == 5);
  CHECK(default_valence("Fe", 0) == -1);
  // hypervalent sulfur picks the smallest consistent valence
  Molecule mol = parse_smiles("CS(=O)(=O)C");
  CHECK(mol.atom(1).implicit_h == 0);
}
