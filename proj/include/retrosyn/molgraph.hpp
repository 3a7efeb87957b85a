//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RETROSYN_MOLGRAPH_HPP
#define RETROSYN_MOLGRAPH_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace retrosyn {

/// Error raised while parsing SMILES text. Carries the byte offset of the
/// offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Error raised when a molecule violates the valence model.
class ValenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BondOrder : std::uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

/// Bond order in half units: single 2, double 4, triple 6, aromatic 3.
int bond_order_half_units(BondOrder order);
const char* bond_order_name(BondOrder order);

struct Atom {
  std::string element;
  int formal_charge = 0;
  int explicit_h = 0;
  int implicit_h = 0;
  bool aromatic = false;
  int atom_map = 0;           // 0 means unmapped
  bool attach_mark = false;   // synthon / leaving-group attachment site
  bool no_implicit = false;   // bracket atom: written H count is final
  std::string stereo_tag;     // "@" or "@@" as written, carried verbatim

  int total_h() const { return explicit_h + implicit_h; }
};

struct Bond {
  int a = -1;
  int b = -1;
  BondOrder order = BondOrder::Single;
  bool in_ring = false;
  bool conjugated = false;
  char stereo_tag = 0;  // '/' or '\\' as written

  int other(int atom) const { return atom == a ? b : a; }
};

// Fixed atom-symbol table used for featurization. 65 entries.
const std::vector<std::string>& element_table();
int element_index(std::string_view symbol);  // -1 if unknown

// Valence model: C4, N3, O2, S{2,4,6}, P{3,5}, halogens 1, B3.
// Charge shifts each allowed valence by +charge. Elements outside the
// model have no implicit hydrogens.
const std::vector<int>* allowed_valences(std::string_view element);
int default_valence(std::string_view element, int charge);  // -1 if unknown
int max_valence(std::string_view element, int charge);      // -1 if unknown

class Molecule;

/// Mutable construction surface for Molecule. finalize() validates and
/// freezes the graph.
class MolBuilder {
 public:
  MolBuilder() = default;
  explicit MolBuilder(const Molecule& mol);

  int add_atom(Atom atom);
  int add_bond(int a, int b, BondOrder order);
  void remove_bond(int a, int b);
  void set_bond_order(int a, int b, BondOrder order);

  Atom& atom(int i) { return atoms_.at(i); }
  const Atom& atom(int i) const { return atoms_.at(i); }
  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  std::vector<Bond>& bonds() { return bonds_; }

  /// Validates valences, recomputes implicit hydrogens for atoms without
  /// the no_implicit flag, perceives 6-ring aromaticity when requested and
  /// derives ring/conjugation/component annotations.
  Molecule finalize(bool perceive_aromaticity = true);

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
};

/// Attributed undirected molecular graph, immutable after construction.
/// Possibly multi-component.
class Molecule {
 public:
  Molecule() = default;

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  const Atom& atom(int i) const { return atoms_.at(i); }
  const Bond& bond(int i) const { return bonds_.at(i); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }

  /// Bond index between u and v, or -1.
  int bond_between(int u, int v) const;
  /// Bond indices incident to atom i.
  const std::vector<int>& incident_bonds(int i) const { return adjacency_.at(i); }
  int degree(int i) const { return static_cast<int>(adjacency_.at(i).size()); }

  int num_components() const { return num_components_; }
  int component_of(int atom) const { return component_.at(atom); }

  /// Sum of bond orders at atom i, in half units (aromatic counts 3).
  int bond_order_half_sum(int i) const;
  /// Integer valence units used by an atom's bonds (half sum / 2, floor).
  int bond_valence_units(int i) const { return bond_order_half_sum(i) / 2; }

  /// Atom index by atom-map number, or -1.
  int atom_by_map(int map) const;

  /// default_valence - bond units - explicit H; 0 if element unknown.
  int free_valence(int i) const;

 private:
  friend class MolBuilder;
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> component_;
  int num_components_ = 0;
};

/// Parses the organic subset + bracket atoms, ring closures (digits and
/// %nn), branches, bond symbols -=#:/\ and dots. Isotopes are accepted and
/// dropped; stereo tags are recorded verbatim.
Molecule parse_smiles(std::string_view text);

struct SmilesWriteOptions {
  bool canonical = true;
  bool include_maps = false;
  /// Render every atom bracketed with explicit H counts and a '*' marker
  /// on attachment atoms. Used for leaving-group vocabulary keys.
  bool attach_star = false;
};

std::string write_smiles(const Molecule& mol, const SmilesWriteOptions& opts = {});

/// Canonical atom ranking via iterative neighborhood-invariant refinement.
/// Initial invariant: (element, degree, charge, total H, aromatic); ties
/// after stabilization are split one orbit member at a time.
std::vector<int> canonical_rank(const Molecule& mol);

std::string canonical_smiles(const Molecule& mol, bool include_maps = false);

bool is_isomorphic(const Molecule& a, const Molecule& b, bool ignore_maps = true);

}  // namespace retrosyn

#endif  // RETROSYN_MOLGRAPH_HPP
