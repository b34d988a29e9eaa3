/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invsyn/bexpr.hpp"
#include "invsyn/logic.hpp"

namespace invsyn {

// ---------------------------------------------------------------------------
// verdicts

enum class SolverStatus : uint8_t { Sat, Unsat, Unknown, Timeout, ProcessError };

const char * to_string(SolverStatus s);

struct ModelEntry {
  std::string text;           // value as printed by the solver
  std::optional<Rat> value;   // parsed when arithmetic
};

struct SolverVerdict {
  SolverStatus status = SolverStatus::ProcessError;
  std::map<std::string, ModelEntry> model;  // constant name -> value (Sat only)
  double wall_ms = 0;
  size_t query_bytes = 0;
  std::string raw;  // solver output (kept for diagnostics on errors)

  bool sat() const { return status == SolverStatus::Sat; }
  bool unsat() const { return status == SolverStatus::Unsat; }
  bool decided() const { return sat() || unsat(); }
};

// ---------------------------------------------------------------------------
// configuration

struct SolverConfig {
  std::string command = "node";
  std::vector<std::string> args;  // script path etc.; --server appended in server mode
  int timeout_ms = 10000;
  int grace_ms = 8000;  // transport/startup allowance past the soft timeout
  bool server = true;   // keep one solver process, frame queries through it
  bool models = true;

  // Resolves command/args from $INVSYN_SOLVER and $INVSYN_SOLVER_SHIM with
  // the in-repo shim as fallback.
  static SolverConfig from_env();
};

// ---------------------------------------------------------------------------
// script construction
//
// Collects assertions structurally and renders a deterministic SMT-LIB 2.6
// script: identical assertion sequences give byte-identical scripts.  Ground
// divisibility literals are encoded with fresh quotient/remainder constants;
// divisibility under a quantifier nests an (exists ...) instead.

class ScriptBuilder {
 public:
  explicit ScriptBuilder(const Ctx & ctx) : ctx_(ctx) {}

  void assert_lit(const Literal & l);
  void assert_cube(const Cube & c);                // conjunction of literals
  void assert_clause(const Clause & c);            // universally closed
  void assert_clauses(const ClauseSet & cs);
  void assert_dnf(const std::vector<Cube> & dnf);  // one (or ...) assertion
  void assert_ground(const GroundConj & g);

  bool quantified() const { return quantified_; }

  // Full script text (set-logic through check-sat / get-model).
  std::string render(bool want_model) const;

 private:
  struct Assertion {
    enum class Kind : uint8_t { Cube, Clause, Dnf } kind;
    Cube cube;
    Clause clause;
    std::vector<Cube> dnf;
  };
  const Ctx & ctx_;
  std::vector<Assertion> asserts_;
  bool quantified_ = false;
};

// ---------------------------------------------------------------------------
// solver process client
//
// One in-flight query at a time.  In server mode a single child process
// handles successive queries framed by sentinel lines; on timeout the child
// is killed and respawned for the next query.  In one-shot mode each query
// spawns a fresh process.

class SmtClient {
 public:
  explicit SmtClient(SolverConfig cfg = SolverConfig::from_env());
  ~SmtClient();
  SmtClient(const SmtClient &) = delete;
  SmtClient & operator=(const SmtClient &) = delete;

  const SolverConfig & config() const { return cfg_; }

  SolverVerdict check(const ScriptBuilder & script);
  SolverVerdict check_raw(const std::string & body, bool expect_model);

  void shutdown();  // terminate a server-mode child (no-op otherwise)

 private:
  bool ensure_process(std::string & error);
  void kill_process();
  SolverVerdict roundtrip(const std::string & script, bool expect_model);

  SolverConfig cfg_;
  long long pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string rdbuf_;
};

// ---------------------------------------------------------------------------
// query helpers

// Satisfiability of a ground conjunction (plus optional quantified background
// clause sets, asserted as-is for the solver to instantiate).
SolverVerdict check_sat(SmtClient & client, const Ctx & ctx, const Cube & cube,
                        const std::vector<const ClauseSet *> & background = {});

// Do the hypotheses entail every clause of `goal`?  The goal is negated by
// Skolemization (one ground conjunction per clause, joined as a disjunction);
// hypotheses are asserted universally quantified.  Unsat means entailment
// holds; Sat carries a counter-model over the witness constants.
SolverVerdict check_entailment(SmtClient & client, Ctx & ctx,
                               const std::vector<const ClauseSet *> & hypotheses,
                               const ClauseSet & goal);

enum class Equiv : uint8_t { Equivalent, Inequivalent, Unknown };

struct EquivResult {
  Equiv verdict = Equiv::Unknown;
  SolverVerdict forward;   // background ∧ a ⊨ b ?
  SolverVerdict backward;  // background ∧ b ⊨ a ?
};

// Theory equivalence of two clause sets via two entailment queries.
EquivResult check_equivalence(SmtClient & client, Ctx & ctx, const ClauseSet & a,
                              const ClauseSet & b,
                              const std::vector<const ClauseSet *> & background = {});

}  // namespace invsyn
