/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "invsyn/bexpr.hpp"
#include "invsyn/logic.hpp"
#include "invsyn/specfile.hpp"

namespace invsyn {

// Hierarchical reduction for (chains of) local theory extensions: universally
// quantified extension axioms are instantiated at the ground extension terms
// of the goal, extension terms are replaced by fresh definition constants,
// and congruence instances are added for the definitions.  The result is a
// ground base-theory formula equisatisfiable with the original goal whenever
// the extensions are local.

// One level of a reduction chain.  Reductions run outermost level first.
struct ReductionLevel {
  std::string name;
  ClauseSet clauses;     // axioms: flat, every variable below an extension term
  std::set<SymId> syms;  // extension symbols owned by this level
  Closure closure = Closure::Identity;
  LocalityClass locality = LocalityClass::Unverified;
  bool instantiate_axioms = true;  // emit the axiom instances
  bool emit_con0 = true;           // emit congruence instances for the defs
};

// Provenance of one axiom instance, for reports.
struct InstanceInfo {
  size_t clause_index = 0;  // index into the level's axiom set
  std::vector<std::pair<std::string, std::string>> subst;  // var -> shown term
};

// One purification definition c_t ~ t.
struct Definition {
  SymId constant = kNone;      // the fresh nullary definition symbol
  TermId constant_app = kNone; // its application, the term that replaces `term`
  SymId head = kNone;          // the extension symbol of the defined term
  TermId term = kNone;         // head applied to its (purified) ground args
  std::vector<TermId> args;    // the purified ground arguments
};

struct LevelReduction {
  std::string name;
  std::vector<Definition> defs;        // in first-occurrence order
  ClauseSet con0;                      // surviving congruence instances
  size_t instance_count = 0;           // axiom instances emitted at this level
  std::vector<InstanceInfo> provenance;
};

struct ReductionResult {
  ClauseSet k0;    // purified axiom instances, all levels, ground
  ClauseSet con0;  // all congruence instances, ground
  Cube g0;         // purified goal conjunction
  std::vector<LevelReduction> levels;  // outermost first: the definition stack
  bool locality_assumed = false;       // some level was not syntactically verified

  // all definitions, outermost level first
  std::vector<const Definition *> all_defs() const;
};

// The ground extension terms of `clauses` and `goal` whose head is in `syms`.
std::set<TermId> est_terms(const Ctx & ctx, const std::set<SymId> & syms,
                           const ClauseSet & clauses, const Cube & goal);

// The instantiation closure Psi(T) of a level: identity returns T; the
// array-property closure adds applications of the level symbols to every
// combination of known index terms (arguments of terms in T plus the ground
// index-sort terms mentioned by the level's axioms).  The result always
// contains T and is monotone in it.
std::set<TermId> apply_closure(Ctx & ctx, const ReductionLevel & level,
                               const std::set<TermId> & terms);

// K[T]: every instance of the flat clauses K in which each occurrence of an
// extension term (head in `syms`) lands in T.  Duplicates are removed and
// instances that evaluate to true are dropped; output is ordered by (clause
// index, substitution).  Throws ContractError if a clause is not flat, has a
// variable outside every extension term, or the instance count exceeds `cap`.
ClauseSet instantiate(Ctx & ctx, const ClauseSet & K, const std::set<SymId> & syms,
                      const std::set<TermId> & T,
                      std::vector<InstanceInfo> * provenance = nullptr,
                      size_t cap = 100000);

// Purifies the clauses and the cube with respect to the extension symbols:
// each ground extension term gets a definition constant `<symbol>_<n>`
// (bottom-up, first-occurrence order), occurrences are replaced, and
// congruence instances are generated for same-symbol definition pairs.
//
// A pair is pruned when the instance is redundant because some argument
// position is forced distinct by the goal itself — syntactically: a nonzero
// constant difference, a disequality literal, or a strict bound between the
// two argument terms (either orientation).  These drops preserve logical
// equivalence.  With `semantic_prune` set, surviving pairs are additionally
// dropped when a solver shows the goal together with the definitions entails
// the argument disequality (the hand-pruning style of reductions done on
// paper); this costs one query per pair and is skipped unless the goal itself
// is satisfiable with the definitions, the regime where it is justified.
struct Purified {
  ClauseSet clauses;
  Cube goal;
  std::vector<Definition> defs;
  ClauseSet con0;
};
Purified purify(Ctx & ctx, const ClauseSet & clauses, const Cube & goal,
                const std::set<SymId> & syms, bool emit_con0 = true,
                SmtClient * semantic_prune = nullptr);

// Runs instantiate + purify per level, outermost first, threading the
// definitions; the final formula k0 ∪ con0 ∪ g0 is ground and free of every
// chain symbol (ContractError otherwise).  Levels whose axioms are not
// syntactically verified local mark the result `locality_assumed`.
ReductionResult reduce_chain(Ctx & ctx, const std::vector<ReductionLevel> & chain,
                             const Cube & goal, SmtClient * semantic_prune = nullptr);

// Replaces definition constants by their defined terms, recursively, so that
// un-purification of a purified formula restores the original structurally.
TermId unpurify_term(Ctx & ctx, TermId t, const ReductionResult & r);
Literal unpurify_lit(Ctx & ctx, const Literal & l, const ReductionResult & r);
Clause unpurify_clause(Ctx & ctx, const Clause & c, const ReductionResult & r);

// Builds the reduction chain of a parsed problem: the theory levels in
// reverse declaration order (the last declared level is outermost), followed
// by an innermost free-functions level owning every non-nullary symbol not
// claimed by any theory level (unaxiomatized state arrays, primed copies).
std::vector<ReductionLevel> chain_from(const ProblemSpec & spec);

// Deterministic text dump of a reduction, for --dump-reduction and tests.
std::string show_reduction(const Ctx & ctx, const ReductionResult & r);

}  // namespace invsyn
