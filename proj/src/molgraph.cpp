//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrosyn/molgraph.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace retrosyn {

namespace {

const std::vector<std::string> kElements = {
    "C",  "N",  "O",  "S",  "F",  "Si", "P",  "Cl", "Br", "Mg", "Na", "Ca", "Fe",
    "As", "Al", "I",  "B",  "V",  "K",  "Tl", "Yb", "Sb", "Sn", "Ag", "Pd", "Co",
    "Se", "Ti", "Zn", "H",  "Li", "Ge", "Cu", "Au", "Ni", "Cd", "In", "Mn", "Zr",
    "Cr", "Pt", "Hg", "Pb", "W",  "Ru", "Nb", "Re", "Te", "Rh", "Tc", "Ba", "Bi",
    "Hf", "Mo", "U",  "Sm", "Os", "Ir", "Ce", "Gd", "Ga", "Cs", "Sc", "Pr", "*"};

static_assert(true, "");

const std::set<std::string> kOrganicSubset = {"B", "C", "N", "O", "P",
                                              "S", "F", "Cl", "Br", "I"};
const std::set<std::string> kAromaticSubset = {"b", "c", "n", "o", "p", "s"};

}  // namespace

const std::vector<std::string>& element_table() { return kElements; }

int element_index(std::string_view symbol) {
  for (std::size_t i = 0; i < kElements.size(); ++i) {
    if (kElements[i] == symbol) return static_cast<int>(i);
  }
  return -1;
}

int bond_order_half_units(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return 2;
    case BondOrder::Double: return 4;
    case BondOrder::Triple: return 6;
    case BondOrder::Aromatic: return 3;
  }
  return 2;
}

const char* bond_order_name(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return "SINGLE";
    case BondOrder::Double: return "DOUBLE";
    case BondOrder::Triple: return "TRIPLE";
    case BondOrder::Aromatic: return "AROMATIC";
  }
  return "?";
}

const std::vector<int>* allowed_valences(std::string_view element) {
  static const std::map<std::string, std::vector<int>, std::less<>> kModel = {
      {"C", {4}},  {"N", {3}},    {"O", {2}},    {"S", {2, 4, 6}},
      {"P", {3, 5}}, {"F", {1}},  {"Cl", {1}},   {"Br", {1}},
      {"I", {1}},  {"B", {3}},    {"H", {1}}};
  auto it = kModel.find(element);
  return it == kModel.end() ? nullptr : &it->second;
}

int default_valence(std::string_view element, int charge) {
  const auto* vals = allowed_valences(element);
  if (!vals) return -1;
  return std::max(0, vals->front() + charge);
}

int max_valence(std::string_view element, int charge) {
  const auto* vals = allowed_valences(element);
  if (!vals) return -1;
  return std::max(0, vals->back() + charge);
}

// ---------------------------------------------------------------------------
// MolBuilder

MolBuilder::MolBuilder(const Molecule& mol)
    : atoms_(mol.atoms()), bonds_(mol.bonds()) {}

int MolBuilder::add_atom(Atom atom) {
  atoms_.push_back(std::move(atom));
  return static_cast<int>(atoms_.size()) - 1;
}

int MolBuilder::add_bond(int a, int b, BondOrder order) {
  if (a == b || a < 0 || b < 0 || a >= num_atoms() || b >= num_atoms()) {
    throw std::invalid_argument("bond endpoints out of range");
  }
  for (const Bond& bond : bonds_) {
    if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a)) {
      throw std::invalid_argument("duplicate bond");
    }
  }
  Bond bond;
  bond.a = a;
  bond.b = b;
  bond.order = order;
  bonds_.push_back(bond);
  return static_cast<int>(bonds_.size()) - 1;
}

void MolBuilder::remove_bond(int a, int b) {
  auto it = std::find_if(bonds_.begin(), bonds_.end(), [&](const Bond& bond) {
    return (bond.a == a && bond.b == b) || (bond.a == b && bond.b == a);
  });
  if (it == bonds_.end()) throw std::invalid_argument("no such bond");
  bonds_.erase(it);
}

void MolBuilder::set_bond_order(int a, int b, BondOrder order) {
  for (Bond& bond : bonds_) {
    if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a)) {
      bond.order = order;
      return;
    }
  }
  throw std::invalid_argument("no such bond");
}

namespace {

int half_sum_for(const std::vector<Bond>& bonds, int atom) {
  int half = 0;
  for (const Bond& bond : bonds) {
    if (bond.a == atom || bond.b == atom) half += bond_order_half_units(bond.order);
  }
  return half;
}

// Kekulized-input aromaticity: 6-cycles of alternating single/double bonds
// over neutral C/N atoms become aromatic.
void perceive_six_ring_aromaticity(std::vector<Atom>& atoms, std::vector<Bond>& bonds) {
  const int n = static_cast<int>(atoms.size());
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, bond idx)
  for (int i = 0; i < static_cast<int>(bonds.size()); ++i) {
    adj[bonds[i].a].push_back({bonds[i].b, i});
    adj[bonds[i].b].push_back({bonds[i].a, i});
  }
  std::set<std::vector<int>> seen;
  std::vector<int> path;
  std::vector<bool> on_path(n, false);
  std::vector<int> path_bonds;
  std::set<int> aromatic_bonds;

  // Plain path enumeration, depth 6.
  std::function<void(int)> extend = [&](int start) {
    int u = path.back();
    for (auto [w, bi] : adj[u]) {
      if (path.size() == 6) {
        if (w == start) {
          std::vector<int> key = path;
          std::sort(key.begin(), key.end());
          if (seen.count(key)) continue;
          // alternation + atom eligibility
          std::vector<int> cyc_bonds = path_bonds;
          cyc_bonds.push_back(bi);
          bool ok = true;
          for (int idx : path) {
            const Atom& a = atoms[idx];
            if (a.aromatic || a.formal_charge != 0 ||
                (a.element != "C" && a.element != "N")) {
              ok = false;
              break;
            }
          }
          if (ok) {
            int singles = 0, doubles = 0;
            for (std::size_t k = 0; k < cyc_bonds.size() && ok; ++k) {
              BondOrder o1 = bonds[cyc_bonds[k]].order;
              BondOrder o2 = bonds[cyc_bonds[(k + 1) % 6]].order;
              if (o1 == BondOrder::Single) ++singles;
              else if (o1 == BondOrder::Double) ++doubles;
              else ok = false;
              if (ok && o1 == o2) ok = false;  // must alternate
            }
            if (ok && singles == 3 && doubles == 3) {
              seen.insert(key);
              for (int idx : path) atoms[idx].aromatic = true;
              for (int cb : cyc_bonds) aromatic_bonds.insert(cb);
            }
          }
        }
        continue;
      }
      if (on_path[w] || w < start) continue;
      path.push_back(w);
      path_bonds.push_back(bi);
      on_path[w] = true;
      extend(start);
      on_path[w] = false;
      path.pop_back();
      path_bonds.pop_back();
    }
  };

  for (int s = 0; s < n; ++s) {
    path = {s};
    path_bonds.clear();
    std::fill(on_path.begin(), on_path.end(), false);
    on_path[s] = true;
    extend(s);
  }
  for (int bi : aromatic_bonds) bonds[bi].order = BondOrder::Aromatic;
}

void mark_ring_bonds(const std::vector<Atom>& atoms, std::vector<Bond>& bonds) {
  // A bond is in a ring iff it is not a bridge.
  const int n = static_cast<int>(atoms.size());
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (int i = 0; i < static_cast<int>(bonds.size()); ++i) {
    adj[bonds[i].a].push_back({bonds[i].b, i});
    adj[bonds[i].b].push_back({bonds[i].a, i});
    bonds[i].in_ring = true;
  }
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  std::function<void(int, int)> dfs = [&](int u, int parent_bond) {
    disc[u] = low[u] = timer++;
    for (auto [w, bi] : adj[u]) {
      if (bi == parent_bond) continue;
      if (disc[w] >= 0) {
        low[u] = std::min(low[u], disc[w]);
      } else {
        dfs(w, bi);
        low[u] = std::min(low[u], low[w]);
        if (low[w] > disc[u]) bonds[bi].in_ring = false;  // bridge
      }
    }
  };
  for (int i = 0; i < n; ++i) {
    if (disc[i] < 0) dfs(i, -1);
  }
}

}  // namespace

Molecule MolBuilder::finalize(bool perceive_aromaticity) {
  for (const Atom& atom : atoms_) {
    if (element_index(atom.element) < 0) {
      throw ParseError("unknown element '" + atom.element + "'", 0);
    }
  }
  if (perceive_aromaticity) perceive_six_ring_aromaticity(atoms_, bonds_);

  // Implicit hydrogens and valence validation.
  for (int i = 0; i < num_atoms(); ++i) {
    Atom& atom = atoms_[i];
    int units = half_sum_for(bonds_, i) / 2 + atom.explicit_h;
    const auto* vals = allowed_valences(atom.element);
    if (vals) {
      int maxv = std::max(0, vals->back() + atom.formal_charge);
      if (units > maxv) {
        throw ValenceError("valence violation on atom " + std::to_string(i) + " (" +
                           atom.element + "): " + std::to_string(units) + " > " +
                           std::to_string(maxv));
      }
      if (!atom.no_implicit) {
        int target = -1;
        for (int v : *vals) {
          int adj = std::max(0, v + atom.formal_charge);
          if (adj >= units) {
            target = adj;
            break;
          }
        }
        atom.implicit_h = target < 0 ? 0 : target - units;
      }
    } else if (!atom.no_implicit) {
      atom.implicit_h = 0;
    }
  }

  mark_ring_bonds(atoms_, bonds_);

  // Conjugation: aromatic bonds, and single/double bonds whose both
  // endpoints carry some multiple bond or are aromatic.
  auto unsaturated = [&](int a) {
    if (atoms_[a].aromatic) return true;
    for (const Bond& bond : bonds_) {
      if ((bond.a == a || bond.b == a) &&
          (bond.order == BondOrder::Double || bond.order == BondOrder::Triple ||
           bond.order == BondOrder::Aromatic)) {
        return true;
      }
    }
    return false;
  };
  for (Bond& bond : bonds_) {
    bond.conjugated =
        bond.order == BondOrder::Aromatic || (unsaturated(bond.a) && unsaturated(bond.b));
  }

  Molecule mol;
  mol.atoms_ = atoms_;
  mol.bonds_ = bonds_;
  mol.adjacency_.assign(atoms_.size(), {});
  for (int i = 0; i < static_cast<int>(bonds_.size()); ++i) {
    mol.adjacency_[bonds_[i].a].push_back(i);
    mol.adjacency_[bonds_[i].b].push_back(i);
  }
  // Connected components by BFS.
  mol.component_.assign(atoms_.size(), -1);
  int comp = 0;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (mol.component_[i] >= 0) continue;
    std::vector<int> stack = {i};
    mol.component_[i] = comp;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int bi : mol.adjacency_[u]) {
        int w = mol.bonds_[bi].other(u);
        if (mol.component_[w] < 0) {
          mol.component_[w] = comp;
          stack.push_back(w);
        }
      }
    }
    ++comp;
  }
  mol.num_components_ = comp;

  // Atom-map uniqueness.
  std::set<int> maps;
  for (const Atom& atom : mol.atoms_) {
    if (atom.atom_map > 0 && !maps.insert(atom.atom_map).second) {
      throw ParseError("duplicate atom map " + std::to_string(atom.atom_map), 0);
    }
  }
  return mol;
}

// ---------------------------------------------------------------------------
// Molecule accessors

int Molecule::bond_between(int u, int v) const {
  for (int bi : adjacency_.at(u)) {
    if (bonds_[bi].other(u) == v) return bi;
  }
  return -1;
}

int Molecule::bond_order_half_sum(int i) const {
  int half = 0;
  for (int bi : adjacency_.at(i)) half += bond_order_half_units(bonds_[bi].order);
  return half;
}

int Molecule::atom_by_map(int map) const {
  for (int i = 0; i < num_atoms(); ++i) {
    if (atoms_[i].atom_map == map) return i;
  }
  return -1;
}

int Molecule::free_valence(int i) const {
  const Atom& atom = atoms_[i];
  int dv = default_valence(atom.element, atom.formal_charge);
  if (dv < 0) return 0;
  return std::max(0, dv - bond_valence_units(i) - atom.explicit_h);
}

// ---------------------------------------------------------------------------
// SMILES parser

namespace {

struct RingClosure {
  int atom = -1;
  char bond_symbol = 0;
  std::size_t offset = 0;
};

BondOrder order_from_symbol(char c) {
  switch (c) {
    case '-': case '/': case '\\': return BondOrder::Single;
    case '=': return BondOrder::Double;
    case '#': return BondOrder::Triple;
    case ':': return BondOrder::Aromatic;
  }
  return BondOrder::Single;
}

}  // namespace

Molecule parse_smiles(std::string_view text) {
  if (text.empty()) throw ParseError("empty SMILES", 0);
  MolBuilder builder;
  std::size_t pos = 0;
  int prev_atom = -1;
  char pending_bond = 0;
  std::size_t pending_bond_pos = 0;
  std::vector<int> branch_stack;
  std::map<int, RingClosure> ring_open;
  int paren_depth = 0;

  auto make_bond = [&](int a, int b, char symbol, std::size_t offset) {
    BondOrder order;
    if (symbol == 0) {
      order = (builder.atom(a).aromatic && builder.atom(b).aromatic)
                  ? BondOrder::Aromatic
                  : BondOrder::Single;
    } else {
      order = order_from_symbol(symbol);
    }
    int bi = builder.add_bond(a, b, order);
    if (symbol == '/' || symbol == '\\') builder.bonds()[bi].stereo_tag = symbol;
    (void)offset;
  };

  auto attach_atom = [&](int idx) {
    if (prev_atom >= 0) {
      make_bond(prev_atom, idx, pending_bond, pending_bond_pos);
    } else if (pending_bond != 0) {
      throw ParseError("bond symbol with no preceding atom", pending_bond_pos);
    }
    pending_bond = 0;
    prev_atom = idx;
  };

  while (pos < text.size()) {
    char c = text[pos];
    if (c == '(') {
      if (prev_atom < 0) throw ParseError("branch with no preceding atom", pos);
      branch_stack.push_back(prev_atom);
      ++paren_depth;
      ++pos;
    } else if (c == ')') {
      if (branch_stack.empty()) throw ParseError("unbalanced parentheses", pos);
      prev_atom = branch_stack.back();
      branch_stack.pop_back();
      --paren_depth;
      ++pos;
    } else if (c == '.') {
      if (pending_bond != 0) throw ParseError("bond before dot", pos);
      prev_atom = -1;
      ++pos;
    } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\') {
      if (pending_bond != 0) throw ParseError("duplicate bond symbol", pos);
      pending_bond = c;
      pending_bond_pos = pos;
      ++pos;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
      int num;
      if (c == '%') {
        if (pos + 2 >= text.size() ||
            !std::isdigit(static_cast<unsigned char>(text[pos + 1])) ||
            !std::isdigit(static_cast<unsigned char>(text[pos + 2]))) {
          throw ParseError("malformed %nn ring closure", pos);
        }
        num = (text[pos + 1] - '0') * 10 + (text[pos + 2] - '0');
        pos += 3;
      } else {
        num = c - '0';
        ++pos;
      }
      if (prev_atom < 0) throw ParseError("ring closure with no preceding atom", pos - 1);
      auto it = ring_open.find(num);
      if (it == ring_open.end()) {
        ring_open[num] = {prev_atom, pending_bond, pos - 1};
        pending_bond = 0;
      } else {
        char symbol = pending_bond != 0 ? pending_bond : it->second.bond_symbol;
        if (pending_bond != 0 && it->second.bond_symbol != 0 &&
            pending_bond != it->second.bond_symbol) {
          throw ParseError("conflicting ring bond symbols", pos - 1);
        }
        make_bond(it->second.atom, prev_atom, symbol, pos - 1);
        ring_open.erase(it);
        pending_bond = 0;
      }
    } else if (c == '[') {
      std::size_t start = pos;
      ++pos;
      Atom atom;
      atom.no_implicit = true;
      // isotope (ignored)
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos >= text.size()) throw ParseError("unterminated bracket atom", start);
      // element symbol
      if (std::islower(static_cast<unsigned char>(text[pos]))) {
        std::string sym(1, text[pos]);
        if (!kAromaticSubset.count(sym)) {
          // two-letter aromatic like "se" unsupported; reject
          throw ParseError("unknown aromatic element '" + sym + "'", pos);
        }
        atom.element = static_cast<char>(std::toupper(text[pos]));
        atom.aromatic = true;
        ++pos;
      } else if (std::isupper(static_cast<unsigned char>(text[pos]))) {
        std::string sym(1, text[pos]);
        ++pos;
        if (pos < text.size() && std::islower(static_cast<unsigned char>(text[pos])) &&
            element_index(sym + text[pos]) >= 0) {
          sym += text[pos];
          ++pos;
        }
        if (element_index(sym) < 0) throw ParseError("unknown element '" + sym + "'", pos - 1);
        atom.element = sym;
      } else if (text[pos] == '*') {
        atom.element = "*";
        ++pos;
      } else {
        throw ParseError("expected element symbol in bracket", pos);
      }
      // chirality
      if (pos < text.size() && text[pos] == '@') {
        atom.stereo_tag = "@";
        ++pos;
        if (pos < text.size() && text[pos] == '@') {
          atom.stereo_tag = "@@";
          ++pos;
        }
      }
      // hydrogen count
      if (pos < text.size() && text[pos] == 'H') {
        ++pos;
        int h = 1;
        if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
          h = 0;
          while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            h = h * 10 + (text[pos] - '0');
            ++pos;
          }
        }
        atom.explicit_h = h;
      }
      // charge
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        char sign = text[pos];
        int count = 0;
        while (pos < text.size() && text[pos] == sign) {
          ++count;
          ++pos;
        }
        if (count == 1 && pos < text.size() &&
            std::isdigit(static_cast<unsigned char>(text[pos]))) {
          count = 0;
          while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            count = count * 10 + (text[pos] - '0');
            ++pos;
          }
        }
        atom.formal_charge = sign == '+' ? count : -count;
      }
      // attachment marker (vocabulary-key extension)
      if (pos < text.size() && text[pos] == '*' && atom.element != "*") {
        atom.attach_mark = true;
        ++pos;
      }
      // atom map
      if (pos < text.size() && text[pos] == ':') {
        ++pos;
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
          throw ParseError("expected atom map number", pos);
        }
        int map = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
          map = map * 10 + (text[pos] - '0');
          ++pos;
        }
        atom.atom_map = map;
      }
      if (pos >= text.size() || text[pos] != ']') {
        throw ParseError("unterminated bracket atom", start);
      }
      ++pos;
      attach_atom(builder.add_atom(atom));
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::string sym(1, c);
      ++pos;
      if (pos < text.size() && std::islower(static_cast<unsigned char>(text[pos]))) {
        std::string two = sym + text[pos];
        if (kOrganicSubset.count(two)) {
          sym = two;
          ++pos;
        }
      }
      if (!kOrganicSubset.count(sym)) {
        throw ParseError("element '" + sym + "' requires brackets", pos - 1);
      }
      Atom atom;
      atom.element = sym;
      attach_atom(builder.add_atom(atom));
    } else if (std::islower(static_cast<unsigned char>(c))) {
      std::string sym(1, c);
      if (!kAromaticSubset.count(sym)) {
        throw ParseError("unknown aromatic atom '" + sym + "'", pos);
      }
      Atom atom;
      atom.element = static_cast<char>(std::toupper(c));
      atom.aromatic = true;
      attach_atom(builder.add_atom(atom));
      ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      break;  // trailing whitespace/comment
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }
  }
  if (paren_depth != 0) throw ParseError("unbalanced parentheses", text.size());
  if (!ring_open.empty()) {
    throw ParseError("unmatched ring bond " + std::to_string(ring_open.begin()->first),
                     ring_open.begin()->second.offset);
  }
  if (pending_bond != 0) throw ParseError("dangling bond symbol", pending_bond_pos);
  return builder.finalize();
}

// ---------------------------------------------------------------------------
// Canonical ranking

std::vector<int> canonical_rank(const Molecule& mol) {
  const int n = mol.num_atoms();
  std::vector<int> rank(n, 0);
  if (n == 0) return rank;

  auto assign_dense = [&](std::vector<std::vector<long long>>& keys) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return keys[a] < keys[b]; });
    int r = 0;
    rank[idx[0]] = 0;
    for (int i = 1; i < n; ++i) {
      if (keys[idx[i]] != keys[idx[i - 1]]) ++r;
      rank[idx[i]] = r;
    }
    return r + 1;
  };

  std::vector<std::vector<long long>> keys(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = mol.atom(i);
    keys[i] = {element_index(a.element), mol.degree(i), a.formal_charge,
               a.total_h(), a.aromatic ? 1 : 0};
  }
  int classes = assign_dense(keys);

  auto refine = [&]() {
    while (true) {
      for (int i = 0; i < n; ++i) {
        std::vector<long long> nbr;
        for (int bi : mol.incident_bonds(i)) {
          const Bond& bond = mol.bond(bi);
          nbr.push_back(static_cast<long long>(rank[bond.other(i)]) * 8 +
                        static_cast<int>(bond.order));
        }
        std::sort(nbr.begin(), nbr.end());
        keys[i] = {rank[i]};
        keys[i].insert(keys[i].end(), nbr.begin(), nbr.end());
      }
      int next = assign_dense(keys);
      if (next == classes) break;
      classes = next;
    }
  };
  refine();

  // Split remaining ties one orbit member at a time.
  while (classes < n) {
    std::vector<int> count(classes, 0);
    for (int i = 0; i < n; ++i) ++count[rank[i]];
    int target = -1;
    for (int r = 0; r < classes; ++r) {
      if (count[r] > 1) {
        target = r;
        break;
      }
    }
    int chosen = -1;
    for (int i = 0; i < n; ++i) {
      if (rank[i] == target && chosen < 0) chosen = i;
    }
    for (int i = 0; i < n; ++i) {
      keys[i] = {static_cast<long long>(rank[i]) * 2 + (i == chosen ? 0 : 1)};
    }
    classes = assign_dense(keys);
    refine();
  }
  return rank;
}

// ---------------------------------------------------------------------------
// SMILES writer

namespace {

struct Writer {
  const Molecule& mol;
  const SmilesWriteOptions& opts;
  const std::vector<int>& order;
  std::vector<bool> visited;
  std::vector<bool> bond_done;
  std::vector<std::vector<int>> closures;  // atom -> ring-closure bond ids
  std::map<int, int> closure_digit;        // bond id -> digit
  std::set<int> free_digits;
  int next_digit = 1;

  Writer(const Molecule& m, const SmilesWriteOptions& o, const std::vector<int>& ord)
      : mol(m), opts(o), order(ord) {
    visited.assign(m.num_atoms(), false);
    bond_done.assign(m.num_bonds(), false);
    closures.assign(m.num_atoms(), {});
  }

  std::vector<int> sorted_neighbors(int u) const {
    std::vector<int> out = mol.incident_bonds(u);
    std::sort(out.begin(), out.end(), [&](int x, int y) {
      return order[mol.bond(x).other(u)] < order[mol.bond(y).other(u)];
    });
    return out;
  }

  // First pass: mark ring-closure bonds (non-tree edges of the DFS).
  void find_closures(int root) {
    std::vector<std::pair<int, int>> stack = {{root, -1}};
    while (!stack.empty()) {
      auto [u, pb] = stack.back();
      stack.pop_back();
      if (visited[u]) continue;
      visited[u] = true;
      auto nbrs = sorted_neighbors(u);
      // push in reverse so lowest-rank neighbor is expanded first
      for (auto it = nbrs.rbegin(); it != nbrs.rend(); ++it) {
        int bi = *it;
        if (bi == pb) continue;
        int w = mol.bond(bi).other(u);
        if (visited[w]) {
          if (!bond_done[bi]) {
            bond_done[bi] = true;
            closures[mol.bond(bi).a].push_back(bi);
            closures[mol.bond(bi).b].push_back(bi);
          }
        } else {
          stack.push_back({w, bi});
        }
      }
    }
  }

  std::string bond_token(const Bond& bond) const {
    switch (bond.order) {
      case BondOrder::Single:
        if (bond.stereo_tag) return std::string(1, bond.stereo_tag);
        if (mol.atom(bond.a).aromatic && mol.atom(bond.b).aromatic) return "-";
        return "";
      case BondOrder::Double: return "=";
      case BondOrder::Triple: return "#";
      case BondOrder::Aromatic:
        if (mol.atom(bond.a).aromatic && mol.atom(bond.b).aromatic) return "";
        return ":";
    }
    return "";
  }

  std::string atom_token(int i) const {
    const Atom& a = mol.atom(i);
    bool lower = a.aromatic && kAromaticSubset.count(
                                   std::string(1, std::tolower(a.element[0]))) &&
                 a.element.size() == 1;
    std::string sym = a.element;
    if (lower) sym[0] = static_cast<char>(std::tolower(sym[0]));

    bool want_map = opts.include_maps && a.atom_map > 0;
    bool want_star = opts.attach_star && a.attach_mark;
    bool needs_bracket = opts.attach_star || want_map || want_star ||
                         a.formal_charge != 0 || !a.stereo_tag.empty() ||
                         !kOrganicSubset.count(a.element) || (a.aromatic && !lower);
    if (!needs_bracket) {
      // bare atom only if re-parsing would give the same H count
      const auto* vals = allowed_valences(a.element);
      int units = mol.bond_valence_units(i);
      int expected = 0;
      if (vals) {
        expected = -1;
        for (int v : *vals) {
          if (v >= units) {
            expected = v - units;
            break;
          }
        }
        if (expected < 0) expected = 0;
      }
      if (expected != a.total_h()) needs_bracket = true;
    }
    if (!needs_bracket) return sym;

    std::string out = "[";
    if (a.aromatic && !lower && a.element.size() == 1) {
      out += static_cast<char>(std::tolower(a.element[0]));
    } else {
      out += sym;
    }
    out += a.stereo_tag;
    int h = a.total_h();
    if (h == 1) out += "H";
    else if (h > 1) out += "H" + std::to_string(h);
    if (a.formal_charge == 1) out += "+";
    else if (a.formal_charge == -1) out += "-";
    else if (a.formal_charge > 1) out += "+" + std::to_string(a.formal_charge);
    else if (a.formal_charge < -1) out += "-" + std::to_string(-a.formal_charge);
    if (want_star) out += "*";
    if (want_map) out += ":" + std::to_string(a.atom_map);
    out += "]";
    return out;
  }

  std::string digit_token(int digit) const {
    if (digit < 10) return std::to_string(digit);
    return "%" + std::to_string(digit);
  }

  void emit(int u, int parent_bond, std::string& out) {
    out += atom_token(u);
    // ring closures at this atom, ordered by partner rank
    std::vector<int> cl = closures[u];
    std::sort(cl.begin(), cl.end(), [&](int x, int y) {
      return order[mol.bond(x).other(u)] < order[mol.bond(y).other(u)];
    });
    for (int bi : cl) {
      auto it = closure_digit.find(bi);
      if (it == closure_digit.end()) {
        int digit;
        if (!free_digits.empty()) {
          digit = *free_digits.begin();
          free_digits.erase(free_digits.begin());
        } else {
          digit = next_digit++;
        }
        closure_digit[bi] = digit;
        out += bond_token(mol.bond(bi));
        out += digit_token(digit);
      } else {
        out += digit_token(it->second);
        free_digits.insert(it->second);
        closure_digit.erase(it);
      }
    }
    // tree children
    auto nbrs = sorted_neighbors(u);
    std::vector<int> children;
    for (int bi : nbrs) {
      if (bi == parent_bond || bond_done[bi]) continue;
      bond_done[bi] = true;
      children.push_back(bi);
    }
    for (std::size_t k = 0; k < children.size(); ++k) {
      int bi = children[k];
      int w = mol.bond(bi).other(u);
      bool last = k + 1 == children.size();
      if (!last) out += "(";
      out += bond_token(mol.bond(bi));
      emit(w, bi, out);
      if (!last) out += ")";
    }
  }
};

}  // namespace

std::string write_smiles(const Molecule& mol, const SmilesWriteOptions& opts) {
  std::vector<int> order;
  if (opts.canonical) {
    order = canonical_rank(mol);
  } else {
    order.resize(mol.num_atoms());
    for (int i = 0; i < mol.num_atoms(); ++i) order[i] = i;
  }
  Writer writer(mol, opts, order);

  std::vector<std::string> parts;
  for (int comp = 0; comp < mol.num_components(); ++comp) {
    int root = -1;
    for (int i = 0; i < mol.num_atoms(); ++i) {
      if (mol.component_of(i) != comp) continue;
      if (root < 0 || order[i] < order[root]) root = i;
    }
    if (root < 0) continue;
    std::fill(writer.visited.begin(), writer.visited.end(), false);
    writer.find_closures(root);
    std::string part;
    writer.emit(root, -1, part);
    parts.push_back(std::move(part));
  }
  if (opts.canonical) std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ".";
    out += parts[i];
  }
  return out;
}

std::string canonical_smiles(const Molecule& mol, bool include_maps) {
  SmilesWriteOptions opts;
  opts.canonical = true;
  opts.include_maps = include_maps;
  return write_smiles(mol, opts);
}

bool is_isomorphic(const Molecule& a, const Molecule& b, bool ignore_maps) {
  return canonical_smiles(a, !ignore_maps) == canonical_smiles(b, !ignore_maps);
}

}  // namespace retrosyn
