/* SPDX-License-Identifier: Apache-2.0 */

#include "invsyn/hierarchy.hpp"

#include <algorithm>
#include <sstream>

#include "invsyn/diag.hpp"
#include "invsyn/smt.hpp"
#include "invsyn/transforms.hpp"

namespace invsyn {

// ---------------------------------------------------------------------------
// small helpers

static bool ground(const Ctx & ctx, TermId t)
{
  std::set<TermId> vs;
  collect_vars(ctx, t, vs);
  return vs.empty();
}

static bool arith_sort(const Ctx & ctx, TermId t)
{
  return ctx.sort(ctx.sort_of(t)).interp != SortInterp::Free;
}

// An extension occurrence is an application of a level symbol with at least
// one argument; nullary symbols are plain base constants and never purified.
static bool ext_occurrence(const Ctx & ctx, TermId t, const std::set<SymId> & syms)
{
  const TermNode & n = ctx.term(t);
  return n.kind == TermKind::App && !n.kids.empty() && syms.count(n.sym) != 0;
}

static void scan_ext(const Ctx & ctx, TermId t, const std::set<SymId> & syms, bool only_ground,
                     std::set<TermId> & seen, std::vector<TermId> * order)
{
  if (ext_occurrence(ctx, t, syms) && (!only_ground || ground(ctx, t)) && seen.insert(t).second &&
      order)
    order->push_back(t);
  for (TermId k : ctx.term(t).kids) scan_ext(ctx, k, syms, only_ground, seen, order);
}

static void scan_lit(const Ctx & ctx, const Literal & l, const std::set<SymId> & syms,
                     bool only_ground, std::set<TermId> & seen, std::vector<TermId> * order)
{
  scan_ext(ctx, l.lhs, syms, only_ground, seen, order);
  if (!l.dvd && l.rhs != kNone) scan_ext(ctx, l.rhs, syms, only_ground, seen, order);
}

// Truth value of a literal that is decidable without a model: identical
// sides, a constant difference between arithmetic sides, or a numeral
// divisibility test.
static std::optional<bool> lit_truth(Ctx & ctx, const Literal & l)
{
  if (l.dvd) return ctx.eval_lit(l);  // numeral divisibility
  if (l.lhs == l.rhs) {
    bool holds = l.rel != Rel::Lt;  // t=t and t<=t hold, t<t does not
    return l.pos ? holds : !holds;
  }
  if (arith_sort(ctx, l.lhs)) {
    if (auto d = ctx.eval_const(ctx.sub(l.lhs, l.rhs))) {
      bool holds = l.rel == Rel::Eq ? *d == 0 : l.rel == Rel::Le ? *d <= 0 : *d < 0;
      return l.pos ? holds : !holds;
    }
  }
  return std::nullopt;
}

// Removes decidably-false literals; nullopt when a literal is decidably true
// (the clause holds in every model and can be dropped).
static std::optional<Clause> simplify_instance(Ctx & ctx, const Clause & c)
{
  Clause kept;
  for (const Literal & l : c.lits) {
    auto v = lit_truth(ctx, l);
    if (v && *v) return std::nullopt;
    if (v && !*v) continue;
    kept.lits.push_back(l);
  }
  return kept;  // may be empty: a decided contradiction
}

// ---------------------------------------------------------------------------
// extension ground terms

std::set<TermId> est_terms(const Ctx & ctx, const std::set<SymId> & syms,
                           const ClauseSet & clauses, const Cube & goal)
{
  std::set<TermId> seen;
  for (const Clause & c : clauses)
    for (const Literal & l : c.lits) scan_lit(ctx, l, syms, /*only_ground=*/true, seen, nullptr);
  for (const Literal & l : goal) scan_lit(ctx, l, syms, /*only_ground=*/true, seen, nullptr);
  return seen;
}

// ---------------------------------------------------------------------------
// instantiation closure

// Maximal ground subterms of the axioms whose sort can index an extension
// symbol: these are the guard bounds the array property fragment instantiates
// at (e.g. the 0 and n of "forall i j. 0 <= i && i < j && j <= n => ...").
static void axiom_index_terms(const Ctx & ctx, TermId t, const std::set<SortId> & arg_sorts,
                              std::vector<TermId> & out, std::set<TermId> & seen)
{
  if (ground(ctx, t)) {
    if (arg_sorts.count(ctx.sort_of(t)) && seen.insert(t).second) out.push_back(t);
    return;
  }
  for (TermId k : ctx.term(t).kids) axiom_index_terms(ctx, k, arg_sorts, out, seen);
}

std::set<TermId> apply_closure(Ctx & ctx, const ReductionLevel & level,
                               const std::set<TermId> & terms)
{
  if (level.closure == Closure::Identity) return terms;

  // index terms per sort, in deterministic first-seen order
  std::map<SortId, std::vector<TermId>> index;
  std::set<TermId> seen;
  auto add_index = [&](TermId t) {
    if (seen.insert(t).second) index[ctx.sort_of(t)].push_back(t);
  };
  for (TermId t : terms)
    for (TermId k : ctx.term(t).kids) add_index(k);

  std::set<SortId> arg_sorts;
  for (SymId f : level.syms)
    for (SortId s : ctx.func(f).args) arg_sorts.insert(s);
  std::vector<TermId> from_axioms;
  for (const Clause & c : level.clauses)
    for (const Literal & l : c.lits) {
      axiom_index_terms(ctx, l.lhs, arg_sorts, from_axioms, seen);
      if (!l.dvd && l.rhs != kNone) axiom_index_terms(ctx, l.rhs, arg_sorts, from_axioms, seen);
    }
  for (TermId t : from_axioms) index[ctx.sort_of(t)].push_back(t);

  std::set<TermId> out = terms;
  for (SymId f : level.syms) {
    const FuncDecl & d = ctx.func(f);
    if (d.args.empty()) continue;
    std::vector<const std::vector<TermId> *> pools;
    bool feasible = true;
    for (SortId s : d.args) {
      auto it = index.find(s);
      if (it == index.end() || it->second.empty()) {
        feasible = false;
        break;
      }
      pools.push_back(&it->second);
    }
    if (!feasible) continue;
    std::vector<size_t> odo(d.args.size(), 0);
    while (true) {
      std::vector<TermId> args;
      for (size_t i = 0; i < odo.size(); ++i) args.push_back((*pools[i])[odo[i]]);
      out.insert(ctx.app(f, args));
      size_t i = odo.size();
      while (i > 0 && ++odo[i - 1] == pools[i - 1]->size()) odo[--i] = 0;
      if (i == 0) break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// instantiation

ClauseSet instantiate(Ctx & ctx, const ClauseSet & K, const std::set<SymId> & syms,
                      const std::set<TermId> & T, std::vector<InstanceInfo> * provenance,
                      size_t cap)
{
  ClauseSet out;
  std::set<std::vector<Literal>> dedup;
  std::vector<TermId> pool(T.begin(), T.end());

  for (size_t ci = 0; ci < K.size(); ++ci) {
    const Clause & c = K[ci];
    if (!is_flat(ctx, c, syms))
      throw ContractError("axiom clause is not flat: " + ctx.show(c));

    // extension occurrences, in literal order
    std::set<TermId> occ_seen;
    std::vector<TermId> occs;
    for (const Literal & l : c.lits) scan_lit(ctx, l, syms, /*only_ground=*/false, occ_seen, &occs);

    // every clause variable must be instantiated through some occurrence
    std::set<TermId> cvars = vars_of(ctx, c);
    std::set<TermId> covered;
    for (TermId o : occs)
      for (TermId k : ctx.term(o).kids) collect_vars(ctx, k, covered);
    for (TermId v : cvars)
      if (!covered.count(v))
        throw ContractError("variable '" + ctx.show(v) +
                            "' does not occur below an extension symbol in axiom: " + ctx.show(c));

    Subst binding;
    auto match = [&](TermId occ, TermId cand, std::vector<TermId> & bound) -> bool {
      const TermNode & eo = ctx.term(occ);
      const TermNode & ct = ctx.term(cand);
      if (eo.sym != ct.sym || eo.kids.size() != ct.kids.size()) return false;
      for (size_t i = 0; i < eo.kids.size(); ++i) {
        TermId ea = eo.kids[i], ta = ct.kids[i];
        if (ctx.term(ea).kind == TermKind::Var) {
          auto it = binding.find(ea);
          if (it == binding.end()) {
            binding.emplace(ea, ta);
            bound.push_back(ea);
          } else if (it->second != ta) {
            return false;
          }
        } else if (ea != ta) {  // flatness: a numeral or base constant
          return false;
        }
      }
      return true;
    };

    auto emit = [&]() {
      Clause inst = replace_clause(ctx, c, binding);
      auto simplified = simplify_instance(ctx, inst);
      if (!simplified) return;  // holds trivially
      if (!dedup.insert(simplified->lits).second) return;
      if (out.size() >= cap)
        throw ContractError("instantiation exceeds " + std::to_string(cap) + " clauses");
      out.push_back(std::move(*simplified));
      if (provenance) {
        InstanceInfo info;
        info.clause_index = ci;
        for (const auto & [v, t] : binding) info.subst.emplace_back(ctx.show(v), ctx.show(t));
        provenance->push_back(std::move(info));
      }
    };

    auto rec = [&](auto && self, size_t oi) -> void {
      if (oi == occs.size()) {
        emit();
        return;
      }
      TermId occ = occs[oi];
      if (ground(ctx, occ)) {  // a ground occurrence must itself be in T
        if (T.count(occ)) self(self, oi + 1);
        return;
      }
      for (TermId cand : pool) {
        std::vector<TermId> bound;
        if (match(occ, cand, bound)) self(self, oi + 1);
        for (TermId v : bound) binding.erase(v);
      }
    };
    rec(rec, 0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// purification

// Is the goal conjunction alone enough to see that `a` and `b` always take
// distinct values?  Triggers: a nonzero constant difference, a disequality
// literal, or a strict bound between them.
static bool forced_distinct(Ctx & ctx, const Cube & goal, TermId a, TermId b)
{
  if (a == b) return false;
  if (arith_sort(ctx, a)) {
    if (auto d = ctx.eval_const(ctx.sub(a, b)); d && *d != 0) return true;
  }
  Literal diseq = ctx.lit(Rel::Eq, a, b, /*pos=*/false);
  Literal lt_ab = ctx.lit(Rel::Lt, a, b);
  Literal lt_ba = ctx.lit(Rel::Lt, b, a);
  for (const Literal & l : goal)
    if (l == diseq || l == lt_ab || l == lt_ba) return true;
  return false;
}

Purified purify(Ctx & ctx, const ClauseSet & clauses, const Cube & goal,
                const std::set<SymId> & syms, bool emit_con0, SmtClient * semantic_prune)
{
  Purified res;
  std::map<SymId, int> counter;
  std::map<TermId, TermId> memo;  // extension term (purified args) -> constant

  auto pure = [&](auto && self, TermId t) -> TermId {
    const TermNode & node = ctx.term(t);
    TermKind kind = node.kind;
    SymId sym = node.sym;
    uint32_t num = node.num;
    std::vector<TermId> kids = node.kids;  // copy: the arena may grow below
    if (kids.empty()) return t;            // variables, numerals, constants

    bool changed = false;
    for (TermId & k : kids) {
      TermId p = self(self, k);
      changed |= p != k;
      k = p;
    }
    TermId rebuilt = t;
    if (changed) {
      switch (kind) {
        case TermKind::App: rebuilt = ctx.app(sym, kids); break;
        case TermKind::Add: rebuilt = ctx.add(kids); break;
        case TermKind::Mul: rebuilt = ctx.mul(ctx.num_value(num), kids.at(0)); break;
        default: throw ContractError("unexpected term shape during purification");
      }
    }
    if (!(kind == TermKind::App && !kids.empty() && syms.count(sym))) return rebuilt;

    auto it = memo.find(rebuilt);
    if (it != memo.end()) return it->second;
    int & n = counter[sym];
    ++n;
    FuncDecl proto;
    proto.name = ctx.func(sym).name + "_" + std::to_string(n);
    proto.result = ctx.func(sym).result;
    proto.is_def = true;
    SymId fresh = ctx.fresh_func(proto.name, proto);
    TermId capp = ctx.app(fresh);
    memo.emplace(rebuilt, capp);
    Definition def;
    def.constant = fresh;
    def.constant_app = capp;
    def.head = sym;
    def.term = rebuilt;
    def.args = ctx.term(rebuilt).kids;
    res.defs.push_back(std::move(def));
    return capp;
  };
  auto pure_lit = [&](const Literal & l) {  // rebuild: keeps Eq sides ordered
    if (l.dvd) return ctx.dvd_lit(l.modulus, pure(pure, l.lhs), l.pos);
    return ctx.lit(l.rel, pure(pure, l.lhs), pure(pure, l.rhs), l.pos);
  };

  for (const Clause & c : clauses) {
    Clause pc;
    for (const Literal & l : c.lits) pc.lits.push_back(pure_lit(l));
    res.clauses.push_back(std::move(pc));
  }
  for (const Literal & l : goal) res.goal.push_back(pure_lit(l));

  if (!emit_con0) return res;

  // candidate congruence pairs, minus the syntactically redundant ones
  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t i = 0; i < res.defs.size(); ++i)
    for (size_t j = i + 1; j < res.defs.size(); ++j) {
      const Definition & a = res.defs[i];
      const Definition & b = res.defs[j];
      if (a.head != b.head) continue;
      bool redundant = false;
      for (size_t k = 0; k < a.args.size() && !redundant; ++k)
        redundant = forced_distinct(ctx, res.goal, a.args[k], b.args[k]);
      if (!redundant) pairs.emplace_back(i, j);
    }

  if (semantic_prune && !pairs.empty()) {
    Cube base = res.goal;
    for (const Definition & d : res.defs) base.push_back(ctx.lit(Rel::Eq, d.constant_app, d.term));
    if (check_sat(*semantic_prune, ctx, base).status == SolverStatus::Sat) {
      std::vector<std::pair<size_t, size_t>> kept;
      for (auto [i, j] : pairs) {
        Cube q = base;
        for (size_t k = 0; k < res.defs[i].args.size(); ++k)
          q.push_back(ctx.lit(Rel::Eq, res.defs[i].args[k], res.defs[j].args[k]));
        if (check_sat(*semantic_prune, ctx, q).status != SolverStatus::Unsat)
          kept.emplace_back(i, j);
      }
      pairs = std::move(kept);
    }
  }

  for (auto [i, j] : pairs) {
    const Definition & a = res.defs[i];
    const Definition & b = res.defs[j];
    Clause inst;
    for (size_t k = 0; k < a.args.size(); ++k)
      inst.lits.push_back(ctx.lit(Rel::Eq, a.args[k], b.args[k], /*pos=*/false));
    inst.lits.push_back(ctx.lit(Rel::Eq, a.constant_app, b.constant_app));
    if (auto simplified = simplify_instance(ctx, inst))
      res.con0.push_back(std::move(*simplified));
  }
  return res;
}

// ---------------------------------------------------------------------------
// chains

std::vector<const Definition *> ReductionResult::all_defs() const
{
  std::vector<const Definition *> out;
  for (const LevelReduction & lr : levels)
    for (const Definition & d : lr.defs) out.push_back(&d);
  return out;
}

ReductionResult reduce_chain(Ctx & ctx, const std::vector<ReductionLevel> & chain,
                             const Cube & goal, SmtClient * semantic_prune)
{
  for (const Literal & l : goal) {
    std::set<TermId> vs;
    collect_vars(ctx, l.lhs, vs);
    if (!l.dvd && l.rhs != kNone) collect_vars(ctx, l.rhs, vs);
    if (!vs.empty()) throw ContractError("goal conjunction is not ground: " + ctx.show(l));
  }

  ReductionResult res;
  res.g0 = goal;
  // clauses accumulated across levels; con0 clauses are tracked separately so
  // the final split keeps axiom instances and congruence instances apart
  ClauseSet work, work_con0;

  for (const ReductionLevel & level : chain) {
    if (level.locality == LocalityClass::Unverified && !level.clauses.empty())
      res.locality_assumed = true;

    LevelReduction lr;
    lr.name = level.name;

    if (level.instantiate_axioms && !level.clauses.empty()) {
      ClauseSet in_scope = work;
      for (const Clause & c : work_con0) in_scope.push_back(c);
      for (const Clause & c : level.clauses) in_scope.push_back(c);
      std::set<TermId> t = est_terms(ctx, level.syms, in_scope, res.g0);
      t = apply_closure(ctx, level, t);
      ClauseSet instances = instantiate(ctx, level.clauses, level.syms, t, &lr.provenance);
      lr.instance_count = instances.size();
      for (Clause & c : instances) work.push_back(std::move(c));
    }

    ClauseSet combined = work;
    for (const Clause & c : work_con0) combined.push_back(c);
    Purified p = purify(ctx, combined, res.g0, level.syms, level.emit_con0, semantic_prune);
    for (size_t i = 0; i < work.size(); ++i) work[i] = p.clauses[i];
    for (size_t i = 0; i < work_con0.size(); ++i) work_con0[i] = p.clauses[work.size() + i];
    res.g0 = p.goal;
    lr.defs = std::move(p.defs);
    lr.con0 = p.con0;
    for (Clause & c : p.con0) work_con0.push_back(std::move(c));
    res.levels.push_back(std::move(lr));
  }

  std::set<SymId> all_syms;
  for (const ReductionLevel & level : chain) all_syms.insert(level.syms.begin(), level.syms.end());
  std::set<TermId> leftover;
  for (const Clause & c : work)
    for (const Literal & l : c.lits) scan_lit(ctx, l, all_syms, false, leftover, nullptr);
  for (const Clause & c : work_con0)
    for (const Literal & l : c.lits) scan_lit(ctx, l, all_syms, false, leftover, nullptr);
  for (const Literal & l : res.g0) scan_lit(ctx, l, all_syms, false, leftover, nullptr);
  if (!leftover.empty())
    throw ContractError("reduction incomplete: extension term '" + ctx.show(*leftover.begin()) +
                        "' remains after the last level");

  res.k0 = std::move(work);
  res.con0 = std::move(work_con0);
  return res;
}

// ---------------------------------------------------------------------------
// un-purification

static Subst def_subst(const ReductionResult & r)
{
  Subst s;
  for (const Definition * d : r.all_defs()) s.emplace(d->constant_app, d->term);
  return s;
}

TermId unpurify_term(Ctx & ctx, TermId t, const ReductionResult & r)
{
  Subst s = def_subst(r);
  for (TermId cur = t;;) {  // defs are acyclic: each pass strips one layer
    TermId next = replace_term(ctx, cur, s);
    if (next == cur) return cur;
    cur = next;
  }
}

Literal unpurify_lit(Ctx & ctx, const Literal & l, const ReductionResult & r)
{
  if (l.dvd) return ctx.dvd_lit(l.modulus, unpurify_term(ctx, l.lhs, r), l.pos);
  return ctx.lit(l.rel, unpurify_term(ctx, l.lhs, r), unpurify_term(ctx, l.rhs, r), l.pos);
}

Clause unpurify_clause(Ctx & ctx, const Clause & c, const ReductionResult & r)
{
  Clause out;
  for (const Literal & l : c.lits) out.lits.push_back(unpurify_lit(ctx, l, r));
  return out;
}

// ---------------------------------------------------------------------------
// chains from parsed systems

std::vector<ReductionLevel> chain_from(const ProblemSpec & spec)
{
  std::vector<ReductionLevel> chain;
  std::set<SymId> claimed;
  for (auto it = spec.levels.rbegin(); it != spec.levels.rend(); ++it) {
    ReductionLevel lv;
    lv.name = it->name;
    lv.clauses = it->clauses;
    lv.closure = it->closure;
    lv.locality = it->locality;
    for (SymId f : it->new_syms) {
      claimed.insert(f);
      if (!spec.ctx.func(f).nullary()) lv.syms.insert(f);
    }
    chain.push_back(std::move(lv));
  }
  ReductionLevel free_lv;
  free_lv.name = "free";
  free_lv.locality = LocalityClass::FreeFunctions;
  for (SymId f = 0; f < spec.ctx.num_funcs(); ++f) {
    const FuncDecl & d = spec.ctx.func(f);
    if (!d.nullary() && !d.is_def && !d.is_skolem && !claimed.count(f)) free_lv.syms.insert(f);
  }
  if (!free_lv.syms.empty()) chain.push_back(std::move(free_lv));
  return chain;
}

// ---------------------------------------------------------------------------
// reporting

std::string show_reduction(const Ctx & ctx, const ReductionResult & r)
{
  std::ostringstream os;
  for (const LevelReduction & lr : r.levels) {
    os << "level " << lr.name << "\n";
    os << "  instances: " << lr.instance_count << "\n";
    for (const Definition & d : lr.defs)
      os << "  def " << ctx.func(d.constant).name << " = " << ctx.show(d.term) << "\n";
    for (const Clause & c : lr.con0) os << "  con0 " << ctx.show(c) << "\n";
  }
  os << "k0:\n";
  for (const Clause & c : r.k0) os << "  " << ctx.show(c) << "\n";
  os << "con0:\n";
  for (const Clause & c : r.con0) os << "  " << ctx.show(c) << "\n";
  os << "g0:\n";
  for (const Literal & l : r.g0) os << "  " << ctx.show(l) << "\n";
  os << "locality: " << (r.locality_assumed ? "assumed" : "verified") << "\n";
  return os.str();
}

}  // namespace invsyn
