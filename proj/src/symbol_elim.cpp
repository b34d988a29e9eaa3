/* SPDX-License-Identifier: Apache-2.0 */

#include "invsyn/symbol_elim.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "invsyn/diag.hpp"
#include "invsyn/transforms.hpp"

namespace invsyn {

namespace {

void collect_consts(const Ctx & ctx, TermId t, std::set<TermId> & out)
{
  const TermNode & n = ctx.term(t);
  if (n.kind == TermKind::App && n.kids.empty()) {
    out.insert(t);
    return;
  }
  for (TermId k : n.kids) collect_consts(ctx, k, out);
}

void collect_consts(const Ctx & ctx, const Literal & l, std::set<TermId> & out)
{
  collect_consts(ctx, l.lhs, out);
  if (!l.dvd) collect_consts(ctx, l.rhs, out);
}

bool term_mentions(const Ctx & ctx, TermId t, TermId needle)
{
  if (t == needle) return true;
  for (TermId k : ctx.term(t).kids)
    if (term_mentions(ctx, k, needle)) return true;
  return false;
}

bool lit_mentions(const Ctx & ctx, const Literal & l, TermId needle)
{
  if (term_mentions(ctx, l.lhs, needle)) return true;
  return !l.dvd && term_mentions(ctx, l.rhs, needle);
}

// Leftover application check: elimination runs on base-theory formulae, so
// after the reduction every remaining application must be a plain constant.
void require_reduced(const Ctx & ctx, TermId t)
{
  const TermNode & n = ctx.term(t);
  if (n.kind == TermKind::App && !n.kids.empty())
    throw ContractError("no reduction level covers function symbol '" + ctx.func(n.sym).name +
                        "' in " + ctx.show(t));
  for (TermId k : n.kids) require_reduced(ctx, k);
}

// Substitutes away uninterpreted-sort targets: positive equalities define the
// constant, remaining disequalities are dropped (uninterpreted sorts are
// treated as unbounded, so a disequation never constrains satisfiability once
// the constant is otherwise unmentioned).  Returns false when the cube turns
// unsatisfiable.  Anything else mentioning a target is outside the supported
// fragment.
bool strip_free_targets(Ctx & ctx, Cube & cube, const std::set<TermId> & free_targets)
{
  if (free_targets.empty()) return true;
  bool progress = true;
  while (progress) {
    progress = false;
    for (TermId t : free_targets) {
      for (const Literal & l : cube) {
        if (l.dvd || l.rel != Rel::Eq || !l.pos) continue;
        TermId other = kNone;
        if (l.lhs == t && l.rhs != t)
          other = l.rhs;
        else if (l.rhs == t && l.lhs != t)
          other = l.lhs;
        if (other == kNone || term_mentions(ctx, other, t)) continue;
        Subst s;
        s[t] = other;
        for (Literal & x : cube) x = replace_lit(ctx, x, s);
        if (!tidy_cube(ctx, cube)) return false;
        progress = true;
        break;
      }
      if (progress) break;
    }
  }
  Cube kept;
  for (const Literal & l : cube) {
    bool hit = false;
    for (TermId t : free_targets)
      if (lit_mentions(ctx, l, t)) {
        hit = true;
        if (l.dvd || l.rel != Rel::Eq || l.pos)
          throw ContractError("cannot eliminate uninterpreted-sort constant from " +
                              ctx.show(l));
        break;
      }
    if (!hit) kept.push_back(l);
  }
  cube = std::move(kept);
  return true;
}

std::string strip_skolem_prefix(const FuncDecl & fd)
{
  // negate_clause_skolemized names witnesses sk_<index>_<variable>
  if (!fd.is_skolem || fd.name.rfind("sk_", 0) != 0) return fd.name;
  size_t second = fd.name.find('_', 3);
  if (second == std::string::npos || second + 1 >= fd.name.size()) return fd.name;
  for (size_t i = 3; i < second; ++i)
    if (!std::isdigit(static_cast<unsigned char>(fd.name[i]))) return fd.name;
  return fd.name.substr(second + 1);
}

void require_parameter_only(const Ctx & ctx, const ClauseSet & axioms,
                            const std::set<SymId> & keep)
{
  for (const Clause & c : axioms)
    for (const Literal & l : c.lits) {
      std::set<SymId> syms;
      collect_syms(ctx, l.lhs, syms);
      if (!l.dvd) collect_syms(ctx, l.rhs, syms);
      for (SymId s : syms)
        if (!keep.count(s))
          throw ContractError("parameter axiom mentions non-parameter symbol '" +
                              ctx.func(s).name + "'");
    }
}

}  // namespace

ElimResult eliminate_symbols(Ctx & ctx, const ElimRequest & req)
{
  require_parameter_only(ctx, req.param_axioms, req.keep);
  for (const ReductionLevel & lv : req.chain)
    for (SymId s : lv.syms)
      if (req.keep.count(s))
        throw ContractError("kept symbol '" + ctx.func(s).name +
                            "' must not appear in an elimination level");

  // Step 1: hierarchical reduction; parameters purify at an innermost level of
  // their own (instantiating their axioms only in full mode).
  std::vector<ReductionLevel> chain = req.chain;
  ReductionLevel params;
  params.name = "parameters";
  if (req.mode == ElimMode::Full) params.clauses = req.param_axioms;
  for (SymId s : req.keep)
    if (!ctx.func(s).nullary()) params.syms.insert(s);
  params.instantiate_axioms = req.mode == ElimMode::Full;
  params.emit_con0 = false;  // restored parameter terms satisfy congruence anyway
  params.locality =
      params.clauses.empty() ? LocalityClass::FreeFunctions : LocalityClass::Unverified;
  if (!params.syms.empty() || !params.clauses.empty()) chain.push_back(std::move(params));

  ElimResult res;
  res.trace.reduction = reduce_chain(ctx, chain, req.goal);
  const ReductionResult & red = res.trace.reduction;
  for (const ClauseSet * cs : {&red.k0, &red.con0})
    for (const Clause & c : *cs)
      for (const Literal & l : c.lits) {
        require_reduced(ctx, l.lhs);
        if (!l.dvd) require_reduced(ctx, l.rhs);
      }
  for (const Literal & l : red.g0) {
    require_reduced(ctx, l.lhs);
    if (!l.dvd) require_reduced(ctx, l.rhs);
  }

  // Step 2: sort the constants of the reduced set.  Definition constants of
  // kept symbols stay and are later replaced by the terms they name; constants
  // under those definitions stay and are later generalized; everything else
  // becomes an existential variable, as do the constants explicitly listed
  // for elimination (and any definition built on top of them).
  std::vector<const Definition *> defs = red.all_defs();
  std::set<TermId> tainted;
  for (SymId s : req.eliminate_constants) {
    if (!ctx.func(s).nullary())
      throw ContractError("eliminate-constants entry '" + ctx.func(s).name +
                          "' is not a constant");
    tainted.insert(ctx.app(s));
  }
  bool grew = !tainted.empty();
  while (grew) {
    grew = false;
    for (const Definition * d : defs) {
      if (tainted.count(d->constant_app)) continue;
      std::set<TermId> argc;
      for (TermId a : d->args) collect_consts(ctx, a, argc);
      for (TermId t : argc)
        if (tainted.count(t)) {
          tainted.insert(d->constant_app);
          grew = true;
          break;
        }
    }
  }

  Subst replace_back;
  std::set<TermId> def_consts;  // surviving parameter definitions
  std::set<TermId> arg_consts;  // constants inside their arguments
  for (const Definition * d : defs) {
    if (!req.keep.count(d->head) || tainted.count(d->constant_app)) continue;
    replace_back[d->constant_app] = d->term;
    def_consts.insert(d->constant_app);
    for (TermId a : d->args) collect_consts(ctx, a, arg_consts);
  }

  std::set<TermId> universe;
  for (const Clause & c : red.k0)
    for (const Literal & l : c.lits) collect_consts(ctx, l, universe);
  for (const Clause & c : red.con0)
    for (const Literal & l : c.lits) collect_consts(ctx, l, universe);
  for (const Literal & l : red.g0) collect_consts(ctx, l, universe);

  std::set<TermId> gen;
  for (TermId t : arg_consts) {
    SymId s = ctx.term(t).sym;
    if (!req.keep.count(s) && !def_consts.count(t) && !tainted.count(t)) gen.insert(t);
  }
  std::set<TermId> targets;
  for (TermId t : universe) {
    SymId s = ctx.term(t).sym;
    if (tainted.count(t))
      targets.insert(t);
    else if (req.keep.count(s) || def_consts.count(t) || gen.count(t))
      continue;
    else
      targets.insert(t);
  }
  res.trace.eliminated = targets;

  std::set<TermId> arith_targets, free_targets;
  for (TermId t : targets) {
    SortInterp interp = ctx.sort(ctx.term(t).sort).interp;
    (interp == SortInterp::Free ? free_targets : arith_targets).insert(t);
  }

  // Step 3: flatten to DNF and eliminate per disjunct.
  std::vector<BExpr> conj;
  for (const ClauseSet * cs : {&red.k0, &red.con0})
    for (const Clause & c : *cs) {
      std::vector<BExpr> lits;
      lits.reserve(c.lits.size());
      for (const Literal & l : c.lits) lits.push_back(BExpr::mk_lit(l));
      conj.push_back(BExpr::mk_or(std::move(lits)));
    }
  for (const Literal & l : red.g0) conj.push_back(BExpr::mk_lit(l));
  res.trace.pre_qe = to_dnf(ctx, BExpr::mk_and(std::move(conj)), req.qe.cube_cap);

  std::vector<Cube> ground;
  for (Cube cube : res.trace.pre_qe)
    if (strip_free_targets(ctx, cube, free_targets)) ground.push_back(std::move(cube));
  res.trace.post_qe = eliminate_dnf(ctx, ground, arith_targets, req.qe);

  // Step 4: put parameter terms back (innermost definitions first, so nested
  // reads unfold completely), then trade argument constants for variables.
  Subst gen_subst;
  std::set<std::string> taken;
  for (TermId t : gen) {
    const FuncDecl & fd = ctx.func(ctx.term(t).sym);
    std::string name = strip_skolem_prefix(fd);
    if (taken.count(name)) name = fd.name;
    for (int n = 2; taken.count(name); ++n) name = fd.name + "_" + std::to_string(n);
    taken.insert(name);
    gen_subst[t] = ctx.var(name, fd.result);
    res.trace.generalized.emplace_back(fd.name, name);
  }
  res.trace.restored = res.trace.post_qe;
  for (Cube & cube : res.trace.restored)
    for (Literal & l : cube) {
      Literal prev;
      do {
        prev = l;
        l = replace_lit(ctx, l, replace_back);
      } while (!(l == prev));
      l = replace_lit(ctx, l, gen_subst);
    }

  // Step 5: negate the disjunction into clauses and tidy the result.  Unit
  // parameter axioms prune literals they refute and clauses they entail (the
  // constraint is always used conjoined with the parameter axioms).
  ClauseSet gamma;
  gamma.reserve(res.trace.restored.size());
  for (const Cube & cube : res.trace.restored) gamma.push_back(negate_cube(ctx, cube));
  std::set<Literal> units, unit_negs;
  for (const Clause & c : req.param_axioms)
    if (c.lits.size() == 1) {
      units.insert(c.lits[0]);
      unit_negs.insert(ctx.negate(c.lits[0]));
    }
  ClauseSet pruned;
  for (Clause & c : gamma) {
    bool entailed = false;
    Clause out;
    for (const Literal & l : c.lits) {
      if (units.count(l)) {
        entailed = true;
        break;
      }
      if (!unit_negs.count(l)) out.lits.push_back(l);
    }
    if (!entailed) pruned.push_back(std::move(out));
  }
  res.gamma = cleanup_clauses(ctx, std::move(pruned));

  // The advertised purity: nothing outside the kept signature may survive.
  for (const Clause & c : res.gamma)
    for (const Literal & l : c.lits) {
      std::set<SymId> syms;
      collect_syms(ctx, l.lhs, syms);
      if (!l.dvd) collect_syms(ctx, l.rhs, syms);
      for (SymId s : syms)
        if (!req.keep.count(s))
          throw ContractError("symbol elimination leaked '" + ctx.func(s).name +
                              "' into the constraint");
    }
  return res;
}

SolverVerdict verify_gamma(SmtClient & client, Ctx & ctx, const ElimRequest & req,
                           const ElimResult & res)
{
  // Instantiation-based check: with gamma joining the parameter axioms at the
  // innermost level the conjunction reduces to ground base clauses, and an
  // Unsat verdict is sound no matter whether the extension is local.
  std::vector<ReductionLevel> chain;
  for (ReductionLevel lv : req.chain) {
    lv.instantiate_axioms = true;
    lv.emit_con0 = true;
    chain.push_back(std::move(lv));
  }
  ReductionLevel params;
  params.name = "parameters";
  params.clauses = req.param_axioms;
  params.clauses.insert(params.clauses.end(), res.gamma.begin(), res.gamma.end());
  for (SymId s : req.keep)
    if (!ctx.func(s).nullary()) params.syms.insert(s);
  chain.push_back(std::move(params));
  try {
    ReductionResult red = reduce_chain(ctx, chain, req.goal);
    return check_sat(client, ctx, red.g0, {&red.k0, &red.con0});
  } catch (const ContractError &) {
    // Gamma fell outside the instantiable fragment; leave quantifiers to the
    // solver.
    std::vector<const ClauseSet *> bg = {&req.param_axioms, &res.gamma};
    for (const ReductionLevel & lv : req.chain) bg.push_back(&lv.clauses);
    return check_sat(client, ctx, req.goal, bg);
  }
}

std::string show_elimination(const Ctx & ctx, const ElimResult & res)
{
  std::ostringstream os;
  os << show_reduction(ctx, res.trace.reduction);
  os << "eliminated:";
  for (TermId t : res.trace.eliminated) os << ' ' << ctx.show(t);
  os << '\n';
  os << "pre-elimination disjuncts: " << res.trace.pre_qe.size() << '\n';
  for (const Cube & cube : res.trace.pre_qe) os << "  " << ctx.show_conj(cube) << '\n';
  os << "post-elimination disjuncts: " << res.trace.post_qe.size() << '\n';
  for (const Cube & cube : res.trace.post_qe) os << "  " << ctx.show_conj(cube) << '\n';
  if (!res.trace.generalized.empty()) {
    os << "generalized:";
    for (const auto & [from, to] : res.trace.generalized) os << ' ' << from << " -> " << to;
    os << '\n';
  }
  os << "gamma:\n";
  if (res.gamma.empty()) os << "  true\n";
  for (const Clause & c : res.gamma) os << "  " << ctx.show(c) << '\n';
  return os.str();
}

}  // namespace invsyn
