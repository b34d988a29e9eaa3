/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "invsyn/logic.hpp"

namespace invsyn {

// Linear combination over pseudo-variables.  A pseudo-variable is any TermId
// whose node is not arithmetic (Var, constant, or an uninterpreted
// application); the quantifier-elimination engines treat them as opaque.
struct LinExpr {
  std::map<TermId, Rat> coeffs;  // no zero entries
  Rat abs = 0;

  LinExpr() = default;
  explicit LinExpr(const Rat & c) : abs(c) {}

  LinExpr & operator+=(const LinExpr & o);
  LinExpr & operator*=(const Rat & c);
  friend LinExpr operator+(LinExpr a, const LinExpr & b) { return a += b; }
  friend LinExpr operator*(const Rat & c, LinExpr e) { return e *= c; }

  Rat coeff(TermId v) const
  {
    auto it = coeffs.find(v);
    return it == coeffs.end() ? Rat(0) : it->second;
  }
  bool is_const() const { return coeffs.empty(); }
  void drop(TermId v) { coeffs.erase(v); }
};

// One linear atom, semantics: body ⋈ 0, or modulus | body.
// Neq/Ndvd carry negation explicitly since the engines split on them.
struct LinAtom {
  enum class Kind : uint8_t { Le, Lt, Eq, Neq, Dvd, Ndvd, True, False };
  Kind kind = Kind::True;
  LinExpr body;
  Int modulus;  // Dvd/Ndvd only, > 0
  SortId sort = kNone;

  bool trivial() const { return kind == Kind::True || kind == Kind::False; }
};

// --- conversions ------------------------------------------------------------

// Flattens a term into a linear combination over pseudo-variables.
LinExpr linexpr_of_term(const Ctx & ctx, TermId t);

// Converts an arithmetic-sorted literal; throws ContractError on a literal
// over an uninterpreted sort.
LinAtom atom_of_lit(const Ctx & ctx, const Literal & l);

// Rebuilds a literal, splitting positive and negative coefficients across the
// relation for readability (x - y <= -1 prints as x + 1 <= y).
Literal lit_of_atom(Ctx & ctx, const LinAtom & a);

TermId term_of_linexpr(Ctx & ctx, const LinExpr & e, SortId sort);

// --- normalization ----------------------------------------------------------

// Drops zero coefficients, folds ground atoms to True/False, gcd-reduces and
// integer-tightens at integer sorts (e.g. 2x < 3 becomes x <= 1; strict
// inequalities disappear entirely there), makes the leading coefficient
// canonical (positive for Eq/Neq/Dvd; magnitude 1 at rational sorts).
LinAtom normalize_atom(const Ctx & ctx, LinAtom a);

// Negation (Le <-> Lt with flipped body, Eq <-> Neq, Dvd <-> Ndvd).
LinAtom negate_atom(const Ctx & ctx, const LinAtom & a);

// --- evaluation (used by the brute-force test oracles) -----------------------

Rat eval_linexpr(const LinExpr & e, const std::map<TermId, Rat> & asgn);
bool eval_atom(const LinAtom & a, const std::map<TermId, Rat> & asgn);

}  // namespace invsyn
