/* SPDX-License-Identifier: Apache-2.0 */

// Parser diagnostics (each kind, with positions), the parse/render fixpoint,
// term normalization through the surface syntax, locality classification of
// theory levels, and the solver-backed update signature conditions.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "invsyn/specfile.hpp"

using namespace invsyn;

namespace {

SolverConfig live_config()
{
  SolverConfig cfg;
  cfg.command = "node";
  cfg.args = {INVSYN_SOLVER_SHIM};
  cfg.timeout_ms = 60000;
  return cfg;
}

SmtClient & live_client()
{
  static SmtClient client(live_config());
  return client;
}

ProblemSpec parsed(const std::string & text)
{
  ParseResult r = parse_spec(text);
  std::string all;
  for (const Diagnostic & d : r.diags) all += d.to_string() + "\n";
  INFO(all);
  REQUIRE(r.ok());
  return std::move(*r.spec);
}

Diagnostic expect_error(const std::string & text, DiagKind kind)
{
  ParseResult r = parse_spec(text);
  REQUIRE(!r.ok());
  REQUIRE(!r.diags.empty());
  INFO(r.diags[0].to_string());
  CHECK(r.diags[0].kind == kind);
  return r.diags[0];
}

void check_roundtrip(const std::string & text)
{
  ProblemSpec s1 = parsed(text);
  std::string r1 = render_spec(s1);
  INFO(r1);
  ProblemSpec s2 = parsed(r1);
  CHECK(describe_spec(s1) == describe_spec(s2));
  CHECK(render_spec(s2) == r1);
}

const char * kTank = R"(
version 1

system tank

signature {
  param low : real
  param high : real
  param fill : real
  state level : real
}

init {
  clause low <= level
  clause level <= high
}

update level {
  case level + fill <= high => level' = level + fill
  case high < level + fill => level' = high
}

property {
  clause level <= high
}

options {
  keep low, high
  max_iters 10
  mode refined
}
)";

}  // namespace

// ---------------------------------------------------------------------------
// parsing happy path

TEST_CASE("parses a complete system description")
{
  ProblemSpec s = parsed(kTank);
  CHECK(s.name == "tank");
  CHECK(s.base == BaseTheory::Lra);
  CHECK(s.free_sorts.empty());
  CHECK(s.init.size() == 2);
  CHECK(s.property.size() == 1);
  REQUIRE(s.updates.size() == 1);

  SymId level = s.ctx.func_by_name("level");
  REQUIRE(level != kNone);
  CHECK(s.ctx.func(level).is_state);
  SymId prime = s.ctx.func(level).partner;
  REQUIRE(prime != kNone);
  CHECK(s.ctx.func(prime).name == "level'");
  CHECK(s.ctx.func(prime).partner == level);

  const UpdateSpec * u = s.update_for(level);
  REQUIRE(u != nullptr);
  CHECK(u->cases.size() == 2);
  CHECK(u->cases[0].vars.empty());
  CHECK(u->cases[0].guard.size() == 1);
  CHECK(u->cases[0].effect.size() == 1);

  // no update block for a parameter
  CHECK(s.update_for(s.ctx.func_by_name("low")) == nullptr);

  REQUIRE(s.options.keep.size() == 2);
  CHECK(s.options.keep[0] == "low");
  CHECK(s.options.max_iters == 10);
  CHECK(s.options.mode == LoopMode::Refined);
  CHECK(!s.options.apf_guard.has_value());
}

TEST_CASE("base theory inference")
{
  CHECK(parsed("version 1 signature { state c : int } init { clause c = 0 }").base ==
        BaseTheory::Lia);
  CHECK(parsed("version 1 signature { state r : real } init { clause r = 0 }").base ==
        BaseTheory::Lra);
  CHECK(parsed("version 1 signature { state c : int  state r : real }").base ==
        BaseTheory::Mixed);
}

TEST_CASE("division by a numeral becomes a rational coefficient")
{
  ProblemSpec s = parsed(R"(
version 1
signature { state d3 : real }
init { clause d3 = 1 }
update d3 { case true => d3' = d3 / 2 }
property { clause d3 <= 1 }
)");
  std::string r = render_spec(s);
  CHECK(r.find("d3' = 1/2*d3") != std::string::npos);
  check_roundtrip(r);
}

TEST_CASE("linear normalization flows through the surface syntax")
{
  ProblemSpec s = parsed(R"(
version 1
signature { state a : int  state b : int }
init { clause 2*(a + b) - a <= 4 }
)");
  // 2*(a+b) - a folds to a + 2*b
  CHECK(render_spec(s).find("a + 2*b <= 4") != std::string::npos);
}

TEST_CASE("bracket sugar reads as application")
{
  ProblemSpec s = parsed(R"(
version 1
signature { func a : (int) -> int }
theory level arr closure apf {
  axiom forall i : int, j : int . i < j => a[i] <= a[j]
}
)");
  CHECK(render_spec(s).find("a(i) <= a(j)") != std::string::npos);
  check_roundtrip(render_spec(s));
}

TEST_CASE("parse of render is the identity on representative systems")
{
  check_roundtrip(kTank);

  check_roundtrip(R"(
version 1
sorts { elem }
signature {
  param e0 : elem
  state owner : (int) -> elem
}
init { clause forall i : int . owner(i) = e0 }
update owner { case forall i : int . true => owner'(i) = e0 }
property { clause forall i : int . owner(i) = e0 }
)");

  check_roundtrip(R"(
version 1
signature { state c : int }
init { clause c = 0 }
update c {
  case 2 divides c => c' = c + 1
  case not 2 divides c => c' = c + 2
}
property { clause 0 <= c }
options {
  eliminate c(*)
  mode naive
  apf_guard on
}
)");

  check_roundtrip(R"(
version 1
signature {
  param m : int
  param M : int
  func g : (int) -> int
}
theory level mono closure identity {
  axiom forall x : int, y : int . x <= y => g(x) <= g(y)
}
theory level range closure identity {
  axiom m <= M
}
init { clause g(0) = m }
property { clause m <= M }
)");
}

// ---------------------------------------------------------------------------
// diagnostics

TEST_CASE("version errors")
{
  CHECK(expect_error("", DiagKind::Version).message.find("version 1") != std::string::npos);
  CHECK(expect_error("signature { }", DiagKind::Version).line == 1);
  Diagnostic d = expect_error("version 3\nsignature { }", DiagKind::Version);
  CHECK(d.message.find("version 3") != std::string::npos);
}

TEST_CASE("lexical errors")
{
  Diagnostic d = expect_error("version 1\ninit { clause 0.5 <= 1 }", DiagKind::Lexical);
  CHECK(d.message.find("write p/q") != std::string::npos);
  CHECK(d.line == 2);

  CHECK(expect_error("version 1\nsignature { param a : int }\ninit { clause a = 3 ; }",
                     DiagKind::Lexical)
            .line == 3);
}

TEST_CASE("syntax errors")
{
  // missing '=>' between guard and effect
  Diagnostic d = expect_error(R"(
version 1
signature { state c : int }
update c { case c <= 0 c' = 1 }
)",
                              DiagKind::Syntax);
  CHECK(d.message.find("=>") != std::string::npos);
  CHECK(d.line == 4);

  CHECK(expect_error("version 1\ntheory level t closure weird { }", DiagKind::Syntax)
            .message.find("identity") != std::string::npos);
  expect_error("version 1\noptions { wibble 3 }", DiagKind::Syntax);
  expect_error("version 1\nsignature { state c : int }\ninit { clause c = }",
               DiagKind::Syntax);
  // true/false cannot be literals inside a compound formula
  expect_error("version 1\nsignature { state c : int }\ninit { clause c = 0 || true }",
               DiagKind::Syntax);
  // binder lists must agree across the cases of one update
  expect_error(R"(
version 1
signature { state f : (int) -> int }
update f {
  case forall x : int . x <= 0 => f'(x) = 0
  case forall y : int . 0 < y => f'(y) = 1
}
)",
               DiagKind::Syntax);
}

TEST_CASE("sort-check errors")
{
  const char * pre = "version 1\nsignature { state c : int  state d : int  state r : real }\n";
  auto bad = [&](const std::string & clause) {
    return expect_error(std::string(pre) + "init { clause " + clause + " }",
                        DiagKind::SortCheck);
  };
  CHECK(bad("c = 1/2").message.find("non-integer numeral") != std::string::npos);
  CHECK(bad("c <= r").message.find("different sorts") != std::string::npos);
  CHECK(bad("c / d <= 1").message.find("division by a symbol") != std::string::npos);
  CHECK(bad("c / 0 <= 1").message.find("division by zero") != std::string::npos);
  CHECK(bad("c * d <= 1").message.find("nonlinear") != std::string::npos);
  CHECK(bad("c divides d").message.find("positive integer") != std::string::npos);
  CHECK(bad("0 divides c").message.find("positive integer") != std::string::npos);

  CHECK(expect_error("version 1\nsorts { elem }\nsignature { param e : elem }\n"
                     "init { clause e <= e }",
                     DiagKind::SortCheck)
            .message.find("arithmetic") != std::string::npos);

  Diagnostic arity = expect_error(
      "version 1\nsignature { func f : (int) -> int }\ninit { clause f(1, 2) <= 0 }",
      DiagKind::SortCheck);
  CHECK(arity.message.find("1 argument") != std::string::npos);
}

TEST_CASE("undeclared-symbol errors")
{
  Diagnostic d = expect_error("version 1\ninit { clause zz <= 0 }", DiagKind::Undeclared);
  CHECK(d.message.find("zz") != std::string::npos);
  CHECK(d.line == 2);
  expect_error("version 1\nsignature { param p : wat }", DiagKind::Undeclared);
  expect_error("version 1\nupdate zz { case true => zz' = 0 }", DiagKind::Undeclared);
  expect_error("version 1\nsignature { param p : int }\noptions { keep q }",
               DiagKind::Undeclared);
}

TEST_CASE("role-conflict errors")
{
  Diagnostic primed = expect_error(R"(
version 1
signature { state c : int }
update c { case c' <= 0 => c' = 0 }
)",
                                   DiagKind::RoleConflict);
  CHECK(primed.message == "primed symbol in guard");
  CHECK(primed.line == 4);

  CHECK(expect_error("version 1\nsignature { state c : int }\ninit { clause c' = 0 }",
                     DiagKind::RoleConflict)
            .message.find("outside an update effect") != std::string::npos);

  CHECK(expect_error(
            "version 1\nsignature { param p : int }\nupdate p { case true => p' = 0 }",
            DiagKind::RoleConflict)
            .message.find("state symbols") != std::string::npos);

  expect_error("version 1\nsignature { state x' : int }", DiagKind::RoleConflict);
  expect_error("version 1\nsignature { param a : int  param a : real }",
               DiagKind::RoleConflict);
  expect_error("version 1\nsorts { int }", DiagKind::RoleConflict);
  expect_error("version 1\nsorts { e  e }", DiagKind::RoleConflict);
  expect_error("version 1\ninit { }\ninit { }", DiagKind::RoleConflict);
  expect_error(
      "version 1\nsignature { state c : int }\n"
      "update c { case true => c' = 0 }\nupdate c { case true => c' = 1 }",
      DiagKind::RoleConflict);

  // the effect must actually constrain the updated symbol
  CHECK(expect_error("version 1\nsignature { state c : int }\nupdate c { case true => c = 1 }",
                     DiagKind::RoleConflict)
            .message.find("does not constrain 'c''") != std::string::npos);
}

TEST_CASE("recovery yields one diagnostic per broken block")
{
  ParseResult r = parse_spec(R"(
version 1
signature { param a : int }
init { clause zz <= 0 }
property { clause ww <= 0 }
)");
  CHECK(!r.ok());
  REQUIRE(r.diags.size() == 2);
  CHECK(r.diags[0].kind == DiagKind::Undeclared);
  CHECK(r.diags[1].kind == DiagKind::Undeclared);
  CHECK(r.diags[0].line == 4);
  CHECK(r.diags[1].line == 5);
}

// ---------------------------------------------------------------------------
// locality classification

namespace {

LocalityClass locality_of(const std::string & text)
{
  ProblemSpec s = parsed(text);
  REQUIRE(s.levels.size() == 1);
  return s.levels[0].locality;
}

}  // namespace

TEST_CASE("locality: no axioms means free functions")
{
  CHECK(locality_of("version 1\nsignature { func g : (int) -> int }\n"
                    "theory level free closure identity { }") == LocalityClass::FreeFunctions);
  // axioms over constants only constrain no extension function
  CHECK(locality_of("version 1\nsignature { param m : int  param M : int }\n"
                    "theory level bounds closure identity { axiom m <= M }") ==
        LocalityClass::FreeFunctions);
}

TEST_CASE("locality: monotonicity axioms")
{
  CHECK(locality_of(R"(
version 1
signature { func g : (int) -> int }
theory level mono closure identity {
  axiom forall x : int, y : int . x <= y => g(x) <= g(y)
}
)") == LocalityClass::Monotone);
}

TEST_CASE("locality: the declared closure disambiguates sortedness")
{
  const char * axiom = R"(
theory level sorted closure %s {
  axiom forall i : int, j : int . i <= j => a(i) <= a(j)
}
)";
  std::string pre = "version 1\nsignature { func a : (int) -> int }\n";
  std::string apf = pre + axiom;
  apf.replace(apf.find("%s"), 2, "apf");
  std::string ident = pre + axiom;
  ident.replace(ident.find("%s"), 2, "identity");
  CHECK(locality_of(apf) == LocalityClass::Apf);
  CHECK(locality_of(ident) == LocalityClass::Monotone);
}

TEST_CASE("locality: bounded sortedness is an array property")
{
  CHECK(locality_of(R"(
version 1
signature { param n : int  func a : (int) -> int }
theory level sorted closure apf {
  axiom forall i : int, j : int . 1 <= i && i < j && j <= n => a(i) <= a(j)
}
)") == LocalityClass::Apf);
}

TEST_CASE("locality: guarded definitions and bounds")
{
  CHECK(locality_of(R"(
version 1
signature { param M : int  func f : (int) -> int }
theory level fdef closure identity {
  axiom forall x : int . f(x) <= M
  axiom forall x : int . 0 < x => f(x) = 0
}
)") == LocalityClass::CaseDefinition);
}

TEST_CASE("locality: nested reads are never verified")
{
  CHECK(locality_of(R"(
version 1
signature { func g : (int) -> int }
theory level nest closure identity {
  axiom forall x : int . g(g(x)) = x
}
)") == LocalityClass::Unverified);
}

TEST_CASE("locality: variables escaping the reads are not array properties")
{
  CHECK(locality_of(R"(
version 1
signature { func g : (int) -> int }
theory level sums closure identity {
  axiom forall x : int, y : int . g(x) + g(y) <= x + y
}
)") == LocalityClass::Unverified);
}

TEST_CASE("locality: new symbols are attributed to their first level")
{
  ProblemSpec s = parsed(R"(
version 1
signature { param m : int  func g : (int) -> int  func h : (int) -> int }
theory level one closure identity {
  axiom forall x : int, y : int . x <= y => g(x) <= g(y)
}
theory level two closure identity {
  axiom forall x : int . g(x) <= h(x)
}
)");
  REQUIRE(s.levels.size() == 2);
  REQUIRE(s.levels[0].new_syms.size() == 1);
  CHECK(s.ctx.func(s.levels[0].new_syms[0]).name == "g");
  REQUIRE(s.levels[1].new_syms.size() == 1);
  CHECK(s.ctx.func(s.levels[1].new_syms[0]).name == "h");
  CHECK(describe_spec(s).find("locality monotone") != std::string::npos);
}

// ---------------------------------------------------------------------------
// update signature conditions (exclusivity / exhaustiveness / effect
// satisfiability), discharged through the solver

namespace {

A3Report report_for(const ProblemSpec & spec, const char * sym)
{
  const UpdateSpec * u = spec.update_for(spec.ctx.func_by_name(sym));
  REQUIRE(u != nullptr);
  return validate_a3(*u, spec, live_client());
}

size_t count_kind(const A3Report & rep, A3Obligation::Kind k)
{
  size_t n = 0;
  for (const A3Obligation & o : rep.obligations)
    if (o.kind == k) ++n;
  return n;
}

A3Status status_of_kind(const A3Report & rep, A3Obligation::Kind k)
{
  for (const A3Obligation & o : rep.obligations)
    if (o.kind == k) return o.status;
  FAIL("obligation kind missing");
  return A3Status::Unknown;
}

}  // namespace

TEST_CASE("signature conditions hold for the tank updates")
{
  ProblemSpec spec = parsed(kTank);
  A3Report rep = report_for(spec, "level");
  // n cases yield n(n-1)/2 exclusivity checks, 1 exhaustiveness, n effects
  CHECK(rep.obligations.size() == 4);
  CHECK(count_kind(rep, A3Obligation::Kind::Exclusivity) == 1);
  CHECK(count_kind(rep, A3Obligation::Kind::Exhaustiveness) == 1);
  CHECK(count_kind(rep, A3Obligation::Kind::EffectSat) == 2);
  for (const A3Obligation & o : rep.obligations) {
    INFO((int)o.kind << " " << o.case_i << "," << o.case_j << " " << o.detail);
    CHECK(o.status == A3Status::Pass);
  }
  CHECK(rep.all_pass());
  CHECK(rep.exhaustiveness_ok());
}

TEST_CASE("obligation count grows as pairs plus cases plus one")
{
  ProblemSpec spec = parsed(R"(
version 1
signature { state c : int }
init { clause c = 0 }
update c {
  case c < 0 => c' = 0
  case c = 0 => c' = 1
  case 0 < c => c' = c
}
property { clause 0 <= c }
)");
  A3Report rep = report_for(spec, "c");
  CHECK(rep.obligations.size() == 7);  // 3 + 1 + 3
  CHECK(count_kind(rep, A3Obligation::Kind::Exclusivity) == 3);
  CHECK(rep.all_pass());
}

TEST_CASE("overlapping guards fail exclusivity only")
{
  ProblemSpec spec = parsed(R"(
version 1
signature { state c : int }
init { clause c = 0 }
update c {
  case c <= 0 => c' = 0
  case 0 <= c => c' = 1
}
property { clause 0 <= c }
)");
  A3Report rep = report_for(spec, "c");
  REQUIRE(rep.obligations.size() == 4);
  const A3Obligation & ex = rep.obligations[0];
  CHECK(ex.kind == A3Obligation::Kind::Exclusivity);
  CHECK(ex.case_i == 0);
  CHECK(ex.case_j == 1);
  CHECK(ex.status == A3Status::Fail);  // both guards hold at c = 0
  CHECK(status_of_kind(rep, A3Obligation::Kind::Exhaustiveness) == A3Status::Pass);
  CHECK(status_of_kind(rep, A3Obligation::Kind::EffectSat) == A3Status::Pass);
  CHECK(!rep.all_pass());
  CHECK(rep.exhaustiveness_ok());
}

TEST_CASE("guards with a gap fail exhaustiveness only")
{
  ProblemSpec spec = parsed(R"(
version 1
signature { state c : int }
init { clause c = 0 }
update c {
  case c <= 0 => c' = 0
  case 2 <= c => c' = 1
}
property { clause 0 <= c }
)");
  A3Report rep = report_for(spec, "c");
  CHECK(status_of_kind(rep, A3Obligation::Kind::Exclusivity) == A3Status::Pass);
  CHECK(status_of_kind(rep, A3Obligation::Kind::Exhaustiveness) == A3Status::Fail);  // c = 1
  CHECK(!rep.exhaustiveness_ok());
}

TEST_CASE("interval effects are satisfiable exactly under the range axiom")
{
  auto mk = [](const std::string & theory) {
    return "version 1\n"
           "signature { param m : int  param M : int  state f : (int) -> int }\n" +
           theory +
           R"(
init { clause forall x : int . m <= f(x) }
update f { case forall x : int . true => m <= f'(x) && f'(x) <= M }
property { clause forall x : int . m <= f(x) }
)";
  };
  // with m <= M in the background theory the interval is inhabited
  ProblemSpec good = parsed(mk("theory level range closure identity { axiom m <= M }\n"));
  A3Report rep = report_for(good, "f");
  CHECK(rep.obligations.size() == 2);  // unconditional single case
  CHECK(rep.all_pass());

  // without it, nothing constrains m <= M and the effect can be empty
  ProblemSpec bad = parsed(mk(""));
  A3Report rep2 = report_for(bad, "f");
  CHECK(status_of_kind(rep2, A3Obligation::Kind::Exhaustiveness) == A3Status::Pass);
  CHECK(status_of_kind(rep2, A3Obligation::Kind::EffectSat) == A3Status::Fail);
}

TEST_CASE("effects over uninterpreted value sorts use the quantified check")
{
  ProblemSpec spec = parsed(R"(
version 1
sorts { elem }
signature { param e0 : elem  state owner : (int) -> elem }
init { clause forall i : int . owner(i) = e0 }
update owner { case forall i : int . true => owner'(i) = e0 }
property { clause forall i : int . owner(i) = e0 }
)");
  A3Report rep = report_for(spec, "owner");
  CHECK(rep.obligations.size() == 2);
  CHECK(rep.all_pass());
}
