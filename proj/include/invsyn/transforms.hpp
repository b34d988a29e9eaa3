/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "invsyn/bexpr.hpp"
#include "invsyn/logic.hpp"

namespace invsyn {

// A substitution maps whole subterms (typically Var terms, but any term works)
// to replacement terms.  Application is innermost-first; after a node's
// children are rewritten the rebuilt node is looked up again, so chains
// registered on partially rewritten terms compose.
using Subst = std::map<TermId, TermId>;

TermId replace_term(Ctx & ctx, TermId t, const Subst & map);
Literal replace_lit(Ctx & ctx, const Literal & l, const Subst & map);
Clause replace_clause(Ctx & ctx, const Clause & c, const Subst & map);
Cube replace_cube(Ctx & ctx, const Cube & c, const Subst & map);

// Symbol renaming (used for priming state symbols and back).
TermId rename_syms(Ctx & ctx, TermId t, const std::map<SymId, SymId> & map);
Literal rename_lit(Ctx & ctx, const Literal & l, const std::map<SymId, SymId> & map);
Clause rename_clause(Ctx & ctx, const Clause & c, const std::map<SymId, SymId> & map);

// f -> f' over all state symbols (and the inverse).
std::map<SymId, SymId> prime_map(const Ctx & ctx);
std::map<SymId, SymId> unprime_map(const Ctx & ctx);

// --- occurrence queries -----------------------------------------------------

void collect_vars(const Ctx & ctx, TermId t, std::set<TermId> & out);
std::set<TermId> vars_of(const Ctx & ctx, const Clause & c);
std::set<TermId> vars_of(const Ctx & ctx, const Cube & c);

void collect_syms(const Ctx & ctx, TermId t, std::set<SymId> & out);
std::set<SymId> syms_of(const Ctx & ctx, const Cube & c);

bool contains_sym(const Ctx & ctx, TermId t, SymId f);
bool contains_any_sym(const Ctx & ctx, TermId t, const std::set<SymId> & fs);
bool lit_contains_any_sym(const Ctx & ctx, const Literal & l, const std::set<SymId> & fs);

// All application subterms whose head symbol is in `heads`.
void collect_apps_of(const Ctx & ctx, TermId t, const std::set<SymId> & heads,
                     std::set<TermId> & out);
void collect_apps_of(const Ctx & ctx, const Cube & c, const std::set<SymId> & heads,
                     std::set<TermId> & out);

// --- Skolemization ----------------------------------------------------------

// Negates one universally quantified clause into a ground conjunction,
// replacing each variable by a fresh constant `sk_<index>_<var>`.  The
// provenance map allows Step 4 of symbol elimination to restore the original
// variable names.
GroundConj negate_clause_skolemized(Ctx & ctx, const Clause & c, size_t index);

// Negates a whole universally quantified clause set: one ground conjunction
// per clause, with disjoint witness constants.  The result reads as a
// disjunction (the negation of a conjunction of clauses).
std::vector<GroundConj> skolemize_negation(Ctx & ctx, const ClauseSet & cs);

// --- matching ---------------------------------------------------------------

// Extends `s` so that pattern*s == target, or returns false leaving `s`
// unchanged.  Structural matching, plus a linear-arithmetic solve when the
// pattern (after substitution) is a linear polynomial with exactly one
// non-ground base term: c*b + d matched against t binds b to (t - d)/c when
// the division is exact for the sort.
bool match_term(Ctx & ctx, TermId pattern, TermId target, Subst & s);

// (t - d) / c with exactness checks at integer sorts; nullopt if not exact.
std::optional<TermId> divide_term(Ctx & ctx, TermId t, const Rat & c);

// --- clause hygiene ---------------------------------------------------------

// Sorts and dedups literals, drops trivially-true clauses and trivially-false
// literals, removes duplicate and syntactically subsumed clauses (A subsumes B
// when A's literals are a subset of B's).  Order of first occurrence is kept.
ClauseSet cleanup_clauses(const Ctx & ctx, ClauseSet cs);

// True when `a` entails `b` syntactically, i.e. a's literal set is a subset.
bool subsumes(const Clause & a, const Clause & b);

// --- clause-shape classification (locality metadata) ------------------------

// A clause is flat w.r.t. a set of extension symbols when those symbols are
// applied only to variables or constants (numerals or nullary applications)
// and never have another extension symbol below them.
bool is_flat(const Ctx & ctx, const Clause & c, const std::set<SymId> & ext);

// Linear = flat, plus no variable occurs in two distinct extension-symbol
// applications, nor twice within one application.
bool is_linear(const Ctx & ctx, const Clause & c, const std::set<SymId> & ext);

}  // namespace invsyn
