/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <functional>
#include <vector>

#include "invsyn/logic.hpp"

namespace invsyn {

// Quantifier-free boolean structure over literals.  Guards and update cases
// are parsed into this shape; the reduction pipeline flattens it to DNF.

struct BExpr {
  enum class Kind : uint8_t { True, False, Lit, And, Or, Not };
  Kind kind = Kind::True;
  Literal lit;              // Kind::Lit
  std::vector<BExpr> kids;  // And/Or/Not

  static BExpr mk_true() { return BExpr{}; }
  static BExpr mk_false()
  {
    BExpr e;
    e.kind = Kind::False;
    return e;
  }
  static BExpr mk_lit(const Literal & l)
  {
    BExpr e;
    e.kind = Kind::Lit;
    e.lit = l;
    return e;
  }
  static BExpr mk_and(std::vector<BExpr> kids);
  static BExpr mk_or(std::vector<BExpr> kids);
  static BExpr mk_not(BExpr kid);
};

// A conjunction of literals; one disjunct of a DNF.
using Cube = std::vector<Literal>;

// Sorts + dedups the cube in place; returns false if it contains an
// immediately contradictory pair (l and ~l) or a literal that evaluates to
// false on numerals alone.  True literals are dropped.
bool tidy_cube(const Ctx & ctx, Cube & cube);

// Flattens to disjunctive normal form.  Every emitted cube passed `tidy_cube`
// and the extra `prune` test (cubes for which `prune` returns true are
// dropped; pass nullptr for none).  Throws ContractError if more than `cap`
// cubes would be produced.
std::vector<Cube> to_dnf(const Ctx & ctx, const BExpr & e, size_t cap,
                         const std::function<bool(const Cube &)> & prune = nullptr);

// Negates a cube into a clause (De Morgan).
Clause negate_cube(const Ctx & ctx, const Cube & cube);

}  // namespace invsyn
