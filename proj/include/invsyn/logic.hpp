/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "invsyn/diag.hpp"
#include "invsyn/numbers.hpp"

namespace invsyn {

using SortId = uint32_t;
using SymId = uint32_t;
using TermId = uint32_t;
constexpr uint32_t kNone = UINT32_MAX;

// ---------------------------------------------------------------------------
// Sorts

enum class SortInterp : uint8_t {
  Int,   // linear integer arithmetic
  Real,  // linear rational arithmetic
  Free,  // uninterpreted
};

struct Sort {
  std::string name;
  SortInterp interp;
};

// ---------------------------------------------------------------------------
// Function symbols
//
// Every non-arithmetic symbol of the problem lives here: parameters,
// state functions and their primed copies, plain extension functions,
// Skolem constants and the constants introduced by purification.
// Arithmetic (+, *, numerals, comparisons) is built into terms/literals.

struct FuncDecl {
  std::string name;
  std::vector<SortId> args;
  SortId result = kNone;

  bool is_param = false;   // member of the invariant language (the keep set)
  bool is_state = false;   // updated by transitions; has a primed partner
  bool is_primed = false;  // the f' copy of a state symbol
  bool is_skolem = false;  // introduced when negating a universal formula
  bool is_def = false;     // purification constant naming an extension term
  SymId partner = kNone;   // f <-> f' link (both directions)

  bool nullary() const { return args.empty(); }
};

// ---------------------------------------------------------------------------
// Terms (hash-consed in a per-problem arena)

enum class TermKind : uint8_t {
  Var,  // named variable (free variables of clauses are universal)
  Num,  // rational/integer numeral
  App,  // f(t1,...,tn) for a FuncDecl f (n may be 0)
  Add,  // n-ary sum
  Mul,  // numeral * term (linear arithmetic only)
};

struct TermNode {
  TermKind kind;
  SortId sort = kNone;
  SymId sym = kNone;           // App: function symbol; Var: interned name id
  uint32_t num = kNone;        // Num/Mul: index into the numeral table
  std::vector<TermId> kids;    // App args, Add summands, Mul operand
};

// ---------------------------------------------------------------------------
// Literals
//
// Arithmetic atoms are kept in a closed-under-negation normal form:
// only Eq / Le / Lt, always positive except for Eq over terms (disequality)
// and divisibility constraints, whose negations are not expressible
// otherwise.

enum class Rel : uint8_t { Eq, Le, Lt };

struct Literal {
  bool pos = true;
  bool dvd = false;  // k | arg (modulus, lhs); rel unused
  Rel rel = Rel::Eq;
  TermId lhs = kNone;
  TermId rhs = kNone;
  Int modulus;  // divisibility only

  bool operator==(const Literal & o) const
  {
    return pos == o.pos && dvd == o.dvd && rel == o.rel && lhs == o.lhs && rhs == o.rhs &&
           modulus == o.modulus;
  }
  bool operator<(const Literal & o) const
  {
    if (dvd != o.dvd) return dvd < o.dvd;
    if (lhs != o.lhs) return lhs < o.lhs;
    if (rhs != o.rhs) return rhs < o.rhs;
    if (rel != o.rel) return rel < o.rel;
    if (pos != o.pos) return pos < o.pos;
    return modulus < o.modulus;
  }
};

// A clause is a disjunction of literals; its free variables are implicitly
// universally quantified.
struct Clause {
  std::vector<Literal> lits;
  bool operator==(const Clause & o) const { return lits == o.lits; }
};

using ClauseSet = std::vector<Clause>;

// A ground conjunction of literals, remembering which Skolem constant stands
// for which variable of which source clause.
struct GroundConj {
  std::vector<Literal> lits;
  // skolem constant -> (source clause index, source variable name)
  std::map<SymId, std::pair<size_t, std::string>> skolems;
};

// ---------------------------------------------------------------------------
// Problem context: signature + term arena.  One per parsed problem; all
// TermIds/SymIds are relative to their context.  Terms are immutable once
// interned.

class Ctx {
 public:
  Ctx();

  // --- sorts
  SortId add_sort(const std::string & name, SortInterp interp);
  SortId sort_by_name(const std::string & name) const;  // kNone if absent
  const Sort & sort(SortId s) const { return sorts_.at(s); }
  size_t num_sorts() const { return sorts_.size(); }

  // --- symbols
  SymId add_func(FuncDecl d);
  SymId func_by_name(const std::string & name) const;  // kNone if absent
  const FuncDecl & func(SymId f) const { return funcs_.at(f); }
  FuncDecl & func_mut(SymId f) { return funcs_.at(f); }
  size_t num_funcs() const { return funcs_.size(); }

  // Fresh symbol with a name derived from `base` (appends _2, _3, ... until
  // unused).  Deterministic for a deterministic call sequence.
  SymId fresh_func(const std::string & base, FuncDecl proto);

  // --- terms
  TermId var(const std::string & name, SortId sort);
  TermId numeral(const Rat & value, SortId sort);
  TermId app(SymId f, std::vector<TermId> args = {});
  TermId add(std::vector<TermId> summands);  // flattens, folds numerals
  TermId mul(const Rat & coeff, TermId t);   // folds nested Mul and numerals
  TermId sub(TermId a, TermId b) { return add({a, mul(-1, b)}); }

  const TermNode & term(TermId t) const { return terms_.at(t); }
  const Rat & num_value(uint32_t idx) const { return numerals_.at(idx); }
  const Rat & value_of(TermId t) const { return numerals_.at(terms_.at(t).num); }
  const std::string & var_name(TermId v) const { return var_names_.at(terms_.at(v).sym); }
  SortId sort_of(TermId t) const { return terms_.at(t).sort; }
  bool is_num(TermId t) const { return terms_.at(t).kind == TermKind::Num; }

  // Evaluates a ground arithmetic term made of numerals only; nullopt if any
  // non-numeral leaf occurs.
  std::optional<Rat> eval_const(TermId t) const;

  // --- literal construction (normalizes orientation and negation)
  Literal lit(Rel rel, TermId lhs, TermId rhs, bool pos = true) const;
  Literal dvd_lit(const Int & modulus, TermId arg, bool pos = true) const;
  Literal negate(const Literal & l) const;

  // Decides trivially-true / trivially-false for literals whose sides are
  // numeral-evaluable; nullopt otherwise.
  std::optional<bool> eval_lit(const Literal & l) const;

  // --- printing (deterministic infix form used in reports and tests)
  std::string show(TermId t) const;
  std::string show(const Literal & l) const;
  std::string show(const Clause & c) const;          // lit1 || lit2 ...
  std::string show_conj(const std::vector<Literal> & lits) const;
  std::string show_set(const ClauseSet & cs) const;  // one clause per line

  // built-in sorts (registered by the constructor as needed by base theory)
  SortId int_sort() const { return int_sort_; }
  SortId real_sort() const { return real_sort_; }

 private:
  TermId intern(TermNode n);
  uint32_t intern_num(const Rat & v);

  std::vector<Sort> sorts_;
  std::map<std::string, SortId> sort_names_;

  std::vector<FuncDecl> funcs_;
  std::map<std::string, SymId> func_names_;

  std::vector<TermNode> terms_;
  std::unordered_map<uint64_t, std::vector<TermId>> term_index_;  // hash -> candidates

  std::vector<Rat> numerals_;
  std::map<Rat, uint32_t> numeral_index_;

  std::vector<std::string> var_names_;
  std::map<std::pair<std::string, SortId>, TermId> var_index_;

  SortId int_sort_ = kNone;
  SortId real_sort_ = kNone;
};

}  // namespace invsyn
