/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "invsyn/hierarchy.hpp"
#include "invsyn/qelim.hpp"
#include "invsyn/smt.hpp"

namespace invsyn {

// Universal constraint extraction: reduce a ground goal through a chain of
// extension levels, existentially eliminate everything that is neither a
// parameter nor an argument of a parameter read, and negate the result into
// a universally quantified clause set over the parameter signature alone.

enum class ElimMode : uint8_t {
  Full,   // parameter axioms are instantiated and carried through elimination
  Split,  // parameter axioms are kept aside; the result is meant to be used
          // conjoined with them (smaller elimination inputs, same strength)
};

struct ElimRequest {
  std::vector<ReductionLevel> chain;  // levels for the symbols being eliminated,
                                      // outermost first; a parameter level is
                                      // appended automatically
  ClauseSet param_axioms;             // axioms mentioning only parameters
  Cube goal;                          // ground conjunction G
  std::set<SymId> keep;               // parameter symbols (any arity) allowed in
                                      // the result
  std::set<SymId> eliminate_constants;  // constants forced into elimination even
                                        // when they occur under parameters
  ElimMode mode = ElimMode::Split;
  QeOptions qe;  // growth caps forwarded to DNF expansion and elimination
};

struct ElimTrace {
  ReductionResult reduction;
  std::set<TermId> eliminated;  // constants turned into existential variables
  std::vector<Cube> pre_qe;     // DNF handed to the eliminator
  std::vector<Cube> post_qe;    // eliminator output over kept constants
  std::vector<Cube> restored;   // after parameter terms return and arguments
                                // generalize to variables
  std::vector<std::pair<std::string, std::string>> generalized;  // constant -> variable
};

struct ElimResult {
  ClauseSet gamma;  // free variables read universally; mentions only base
                    // operations and kept symbols
  ElimTrace trace;
};

// Runs the five elimination steps.  Throws ContractError when the goal is not
// ground, a function symbol is covered by no level, an uninterpreted-sort
// constant cannot be eliminated, or a growth cap is exceeded.
ElimResult eliminate_symbols(Ctx & ctx, const ElimRequest & req);

// Soundness check: param_axioms ∪ gamma ∪ level axioms ∪ goal must be
// unsatisfiable.  Checked by reducing with gamma added to the parameter level
// (instantiation makes the check decidable); falls back to one quantified
// solver query when gamma falls outside the instantiable fragment.
SolverVerdict verify_gamma(SmtClient & client, Ctx & ctx, const ElimRequest & req,
                           const ElimResult & res);

// Human-readable account of a run: reduction, eliminated constants, pre/post
// elimination disjuncts, generalizations, and the resulting constraint.
std::string show_elimination(const Ctx & ctx, const ElimResult & res);

}  // namespace invsyn
