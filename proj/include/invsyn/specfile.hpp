/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "invsyn/logic.hpp"
#include "invsyn/smt.hpp"

namespace invsyn {

// ---------------------------------------------------------------------------
// problem specification (parsed .tcs file)

enum class BaseTheory : uint8_t { Lia, Lra, Mixed };

enum class Closure : uint8_t { Identity, Apf };

enum class LocalityClass : uint8_t {
  FreeFunctions,   // no axioms: free extension
  Monotone,        // every clause is a monotonicity axiom
  CaseDefinition,  // guarded definitions / bounds of a symbol
  Apf,             // array-property shape: positive index guards, direct reads
  Unverified,      // anything else (run with a "locality assumed" caveat)
};

const char * to_string(BaseTheory b);
const char * to_string(Closure c);
const char * to_string(LocalityClass c);

struct TheoryLevel {
  std::string name;
  Closure closure = Closure::Identity;
  ClauseSet clauses;
  std::vector<SymId> new_syms;  // non-nullary symbols first mentioned here
  LocalityClass locality = LocalityClass::Unverified;
};

struct UpdateCase {
  std::vector<TermId> vars;  // universally quantified over guard and effect
  Cube guard;                // quantifier-free, unprimed symbols only
  Cube effect;               // literals constraining the updated symbol's prime
};

struct UpdateSpec {
  SymId function = kNone;
  std::vector<UpdateCase> cases;
};

struct EliminateSpec {
  std::string name;
  bool star = false;  // f(*): the read constants of f's purification defs
};

enum class LoopMode : uint8_t { Naive, Refined };

struct SpecOptions {
  std::vector<std::string> keep;        // invariant-language symbols (default: params)
  std::vector<EliminateSpec> eliminate; // generalization candidates C_e
  std::optional<int> max_iters;
  std::optional<LoopMode> mode;
  std::optional<bool> apf_guard;
};

struct ProblemSpec {
  Ctx ctx;  // owns the signature and all terms referenced below
  std::string name;
  BaseTheory base = BaseTheory::Lia;
  std::vector<std::string> free_sorts;  // declaration order
  std::vector<TheoryLevel> levels;
  ClauseSet init;
  std::vector<UpdateSpec> updates;
  ClauseSet property;
  SpecOptions options;

  const UpdateSpec * update_for(SymId f) const;
};

// ---------------------------------------------------------------------------
// parsing

enum class DiagKind : uint8_t { Lexical, Syntax, SortCheck, Undeclared, RoleConflict, Version };

const char * to_string(DiagKind k);

struct Diagnostic {
  DiagKind kind = DiagKind::Syntax;
  int line = 0;
  int col = 0;
  std::string message;

  std::string to_string() const;
};

struct ParseResult {
  std::optional<ProblemSpec> spec;
  std::vector<Diagnostic> diags;

  bool ok() const { return spec.has_value() && diags.empty(); }
};

// Parses `.tcs` source text (grammar documented in docs/specfile.md).
// Deterministic and whitespace-insensitive; on failure the result carries
// line/column diagnostics and no spec.
ParseResult parse_spec(const std::string & text);
ParseResult parse_spec_file(const std::string & path);

// Canonical source form; parse(render_spec(s)) reproduces s.
std::string render_spec(const ProblemSpec & spec);

// Deterministic structural dump used by tests and --emit debugging.
std::string describe_spec(const ProblemSpec & spec);

// ---------------------------------------------------------------------------
// signature-condition validation (guard exclusivity/exhaustiveness and
// effect satisfiability, discharged through the solver)

enum class A3Status : uint8_t { Pass, Fail, Unknown };

const char * to_string(A3Status s);

struct A3Obligation {
  enum class Kind : uint8_t { Exclusivity, Exhaustiveness, EffectSat } kind;
  size_t case_i = 0;
  size_t case_j = 0;  // exclusivity only
  A3Status status = A3Status::Unknown;
  std::string detail;
};

struct A3Report {
  SymId function = kNone;
  std::vector<A3Obligation> obligations;

  bool all_pass() const;
  bool exhaustiveness_ok() const;  // Pass or Unknown (failures degrade to
                                   // warnings when no synthesis is requested)
};

// Discharges the n(n-1)/2 exclusivity, 1 exhaustiveness and n effect
// obligations of one update under the spec's theory levels.  Solver
// timeouts yield Unknown, never Fail.
A3Report validate_a3(const UpdateSpec & u, const ProblemSpec & spec, SmtClient & client);

// Syntactic locality classification of one theory level.
LocalityClass check_locality_class(const Ctx & ctx, const TheoryLevel & level);

}  // namespace invsyn
