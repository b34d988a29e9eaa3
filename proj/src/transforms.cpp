/* SPDX-License-Identifier: Apache-2.0 */

#include "invsyn/transforms.hpp"

#include <algorithm>
#include <cassert>

namespace invsyn {

// ---------------------------------------------------------------------------
// substitution / renaming

TermId replace_term(Ctx & ctx, TermId t, const Subst & map)
{
  auto it = map.find(t);
  if (it != map.end()) return it->second;
  // Copy node data up front: building terms may grow the arena.
  const TermNode n = ctx.term(t);
  TermId rebuilt = t;
  switch (n.kind) {
    case TermKind::Var:
    case TermKind::Num: return t;
    case TermKind::App: {
      std::vector<TermId> kids;
      kids.reserve(n.kids.size());
      bool changed = false;
      for (TermId k : n.kids) {
        TermId r = replace_term(ctx, k, map);
        changed |= r != k;
        kids.push_back(r);
      }
      if (changed) rebuilt = ctx.app(n.sym, std::move(kids));
      break;
    }
    case TermKind::Add: {
      std::vector<TermId> kids;
      kids.reserve(n.kids.size());
      bool changed = false;
      for (TermId k : n.kids) {
        TermId r = replace_term(ctx, k, map);
        changed |= r != k;
        kids.push_back(r);
      }
      if (changed) rebuilt = ctx.add(std::move(kids));
      break;
    }
    case TermKind::Mul: {
      TermId r = replace_term(ctx, n.kids[0], map);
      if (r != n.kids[0]) rebuilt = ctx.mul(ctx.num_value(n.num), r);
      break;
    }
  }
  if (rebuilt != t) {
    auto again = map.find(rebuilt);
    if (again != map.end()) return again->second;
  }
  return rebuilt;
}

Literal replace_lit(Ctx & ctx, const Literal & l, const Subst & map)
{
  if (l.dvd) return ctx.dvd_lit(l.modulus, replace_term(ctx, l.lhs, map), l.pos);
  return ctx.lit(l.rel, replace_term(ctx, l.lhs, map), replace_term(ctx, l.rhs, map), l.pos);
}

Clause replace_clause(Ctx & ctx, const Clause & c, const Subst & map)
{
  Clause out;
  out.lits.reserve(c.lits.size());
  for (const Literal & l : c.lits) out.lits.push_back(replace_lit(ctx, l, map));
  return out;
}

Cube replace_cube(Ctx & ctx, const Cube & c, const Subst & map)
{
  Cube out;
  out.reserve(c.size());
  for (const Literal & l : c) out.push_back(replace_lit(ctx, l, map));
  return out;
}

TermId rename_syms(Ctx & ctx, TermId t, const std::map<SymId, SymId> & map)
{
  const TermNode n = ctx.term(t);
  switch (n.kind) {
    case TermKind::Var:
    case TermKind::Num: return t;
    case TermKind::App: {
      std::vector<TermId> kids;
      kids.reserve(n.kids.size());
      for (TermId k : n.kids) kids.push_back(rename_syms(ctx, k, map));
      auto it = map.find(n.sym);
      SymId f = it == map.end() ? n.sym : it->second;
      if (f == n.sym && kids == n.kids) return t;
      return ctx.app(f, std::move(kids));
    }
    case TermKind::Add: {
      std::vector<TermId> kids;
      kids.reserve(n.kids.size());
      for (TermId k : n.kids) kids.push_back(rename_syms(ctx, k, map));
      return kids == n.kids ? t : ctx.add(std::move(kids));
    }
    case TermKind::Mul: {
      TermId r = rename_syms(ctx, n.kids[0], map);
      return r == n.kids[0] ? t : ctx.mul(ctx.num_value(n.num), r);
    }
  }
  return t;
}

Literal rename_lit(Ctx & ctx, const Literal & l, const std::map<SymId, SymId> & map)
{
  if (l.dvd) return ctx.dvd_lit(l.modulus, rename_syms(ctx, l.lhs, map), l.pos);
  return ctx.lit(l.rel, rename_syms(ctx, l.lhs, map), rename_syms(ctx, l.rhs, map), l.pos);
}

Clause rename_clause(Ctx & ctx, const Clause & c, const std::map<SymId, SymId> & map)
{
  Clause out;
  out.lits.reserve(c.lits.size());
  for (const Literal & l : c.lits) out.lits.push_back(rename_lit(ctx, l, map));
  return out;
}

std::map<SymId, SymId> prime_map(const Ctx & ctx)
{
  std::map<SymId, SymId> m;
  for (SymId f = 0; f < ctx.num_funcs(); ++f) {
    const FuncDecl & d = ctx.func(f);
    if (d.is_state && !d.is_primed && d.partner != kNone) m.emplace(f, d.partner);
  }
  return m;
}

std::map<SymId, SymId> unprime_map(const Ctx & ctx)
{
  std::map<SymId, SymId> m;
  for (SymId f = 0; f < ctx.num_funcs(); ++f) {
    const FuncDecl & d = ctx.func(f);
    if (d.is_primed && d.partner != kNone) m.emplace(f, d.partner);
  }
  return m;
}

// ---------------------------------------------------------------------------
// occurrence queries

void collect_vars(const Ctx & ctx, TermId t, std::set<TermId> & out)
{
  const TermNode & n = ctx.term(t);
  if (n.kind == TermKind::Var) {
    out.insert(t);
    return;
  }
  for (TermId k : n.kids) collect_vars(ctx, k, out);
}

std::set<TermId> vars_of(const Ctx & ctx, const Clause & c)
{
  std::set<TermId> out;
  for (const Literal & l : c.lits) {
    collect_vars(ctx, l.lhs, out);
    if (!l.dvd && l.rhs != kNone) collect_vars(ctx, l.rhs, out);
  }
  return out;
}

std::set<TermId> vars_of(const Ctx & ctx, const Cube & c)
{
  std::set<TermId> out;
  for (const Literal & l : c) {
    collect_vars(ctx, l.lhs, out);
    if (!l.dvd && l.rhs != kNone) collect_vars(ctx, l.rhs, out);
  }
  return out;
}

void collect_syms(const Ctx & ctx, TermId t, std::set<SymId> & out)
{
  const TermNode & n = ctx.term(t);
  if (n.kind == TermKind::App) out.insert(n.sym);
  for (TermId k : n.kids) collect_syms(ctx, k, out);
}

std::set<SymId> syms_of(const Ctx & ctx, const Cube & c)
{
  std::set<SymId> out;
  for (const Literal & l : c) {
    collect_syms(ctx, l.lhs, out);
    if (!l.dvd && l.rhs != kNone) collect_syms(ctx, l.rhs, out);
  }
  return out;
}

bool contains_sym(const Ctx & ctx, TermId t, SymId f)
{
  const TermNode & n = ctx.term(t);
  if (n.kind == TermKind::App && n.sym == f) return true;
  for (TermId k : n.kids)
    if (contains_sym(ctx, k, f)) return true;
  return false;
}

bool contains_any_sym(const Ctx & ctx, TermId t, const std::set<SymId> & fs)
{
  const TermNode & n = ctx.term(t);
  if (n.kind == TermKind::App && fs.count(n.sym)) return true;
  for (TermId k : n.kids)
    if (contains_any_sym(ctx, k, fs)) return true;
  return false;
}

bool lit_contains_any_sym(const Ctx & ctx, const Literal & l, const std::set<SymId> & fs)
{
  if (contains_any_sym(ctx, l.lhs, fs)) return true;
  return !l.dvd && l.rhs != kNone && contains_any_sym(ctx, l.rhs, fs);
}

void collect_apps_of(const Ctx & ctx, TermId t, const std::set<SymId> & heads,
                     std::set<TermId> & out)
{
  const TermNode & n = ctx.term(t);
  if (n.kind == TermKind::App && heads.count(n.sym)) out.insert(t);
  for (TermId k : n.kids) collect_apps_of(ctx, k, heads, out);
}

void collect_apps_of(const Ctx & ctx, const Cube & c, const std::set<SymId> & heads,
                     std::set<TermId> & out)
{
  for (const Literal & l : c) {
    collect_apps_of(ctx, l.lhs, heads, out);
    if (!l.dvd && l.rhs != kNone) collect_apps_of(ctx, l.rhs, heads, out);
  }
}

// ---------------------------------------------------------------------------
// Skolemization

GroundConj negate_clause_skolemized(Ctx & ctx, const Clause & c, size_t index)
{
  GroundConj g;
  Subst sub;
  // Deterministic constant order: by variable name.
  std::set<TermId> var_set = vars_of(ctx, c);
  std::vector<TermId> vars(var_set.begin(), var_set.end());
  std::sort(vars.begin(), vars.end(), [&](TermId a, TermId b) {
    return ctx.var_name(a) < ctx.var_name(b);
  });
  for (TermId v : vars) {
    const std::string & name = ctx.var_name(v);
    FuncDecl d;
    d.result = ctx.sort_of(v);
    d.is_skolem = true;
    SymId sk = ctx.fresh_func("sk_" + std::to_string(index) + "_" + name, std::move(d));
    sub.emplace(v, ctx.app(sk));
    g.skolems.emplace(sk, std::make_pair(index, name));
  }
  g.lits.reserve(c.lits.size());
  for (const Literal & l : c.lits) g.lits.push_back(replace_lit(ctx, ctx.negate(l), sub));
  return g;
}

std::vector<GroundConj> skolemize_negation(Ctx & ctx, const ClauseSet & cs)
{
  std::vector<GroundConj> out;
  out.reserve(cs.size());
  for (size_t i = 0; i < cs.size(); ++i) out.push_back(negate_clause_skolemized(ctx, cs[i], i));
  return out;
}

// ---------------------------------------------------------------------------
// matching

// Splits a canonical arithmetic term into coefficient/base pairs plus an
// absolute constant.
struct LinView {
  std::vector<std::pair<Rat, TermId>> parts;
  Rat abs = 0;
};

static LinView lin_view(const Ctx & ctx, TermId t)
{
  LinView v;
  const TermNode & n = ctx.term(t);
  switch (n.kind) {
    case TermKind::Num: v.abs = ctx.num_value(n.num); break;
    case TermKind::Mul: v.parts.emplace_back(ctx.num_value(n.num), n.kids[0]); break;
    case TermKind::Add:
      for (TermId k : n.kids) {
        const TermNode & kn = ctx.term(k);
        if (kn.kind == TermKind::Num)
          v.abs += ctx.num_value(kn.num);
        else if (kn.kind == TermKind::Mul)
          v.parts.emplace_back(ctx.num_value(kn.num), kn.kids[0]);
        else
          v.parts.emplace_back(1, k);
      }
      break;
    default: v.parts.emplace_back(1, t); break;
  }
  return v;
}

std::optional<TermId> divide_term(Ctx & ctx, TermId t, const Rat & c)
{
  if (c == 0) return std::nullopt;
  SortId sort = ctx.sort_of(t);
  bool integral = ctx.sort(sort).interp == SortInterp::Int;
  LinView v = lin_view(ctx, t);
  std::vector<TermId> kids;
  Rat abs = v.abs / c;
  if (integral && !is_integer(abs)) return std::nullopt;
  for (auto & [coeff, base] : v.parts) {
    Rat q = coeff / c;
    if (integral && !is_integer(q)) return std::nullopt;
    kids.push_back(ctx.mul(q, base));
  }
  kids.push_back(ctx.numeral(abs, sort));
  return ctx.add(std::move(kids));
}

static bool term_is_ground(const Ctx & ctx, TermId t)
{
  const TermNode & n = ctx.term(t);
  if (n.kind == TermKind::Var) return false;
  for (TermId k : n.kids)
    if (!term_is_ground(ctx, k)) return false;
  return true;
}

bool match_term(Ctx & ctx, TermId pattern, TermId target, Subst & s)
{
  TermId p = replace_term(ctx, pattern, s);
  if (p == target) return true;
  const TermNode pn = ctx.term(p);
  switch (pn.kind) {
    case TermKind::Var: {
      if (ctx.sort_of(p) != ctx.sort_of(target)) return false;
      s.emplace(p, target);
      return true;
    }
    case TermKind::Num: return false;  // p == target already ruled out
    case TermKind::App: {
      const TermNode tn = ctx.term(target);
      if (tn.kind != TermKind::App || tn.sym != pn.sym) return false;
      Subst saved = s;
      for (size_t i = 0; i < pn.kids.size(); ++i)
        if (!match_term(ctx, pn.kids[i], tn.kids[i], s)) {
          s = std::move(saved);
          return false;
        }
      return true;
    }
    case TermKind::Add:
    case TermKind::Mul: {
      if (ctx.sort_of(p) != ctx.sort_of(target)) return false;
      // Linear solve: admissible when exactly one base still has variables.
      LinView v = lin_view(ctx, p);
      std::vector<TermId> ground_parts;
      Rat open_coeff = 0;
      TermId open_base = kNone;
      for (auto & [coeff, base] : v.parts) {
        if (term_is_ground(ctx, base)) {
          ground_parts.push_back(ctx.mul(coeff, base));
        } else if (open_base == kNone) {
          open_base = base;
          open_coeff = coeff;
        } else {
          return false;  // two open bases: alignment would be a guess
        }
      }
      if (open_base == kNone) return false;  // ground but unequal
      ground_parts.push_back(ctx.numeral(v.abs, pn.sort));
      TermId rest = ctx.add(std::move(ground_parts));
      auto solved = divide_term(ctx, ctx.sub(target, rest), open_coeff);
      if (!solved) return false;
      Subst saved = s;
      if (match_term(ctx, open_base, *solved, s)) return true;
      s = std::move(saved);
      return false;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// clause hygiene

bool subsumes(const Clause & a, const Clause & b)
{
  return std::includes(b.lits.begin(), b.lits.end(), a.lits.begin(), a.lits.end());
}

ClauseSet cleanup_clauses(const Ctx & ctx, ClauseSet cs)
{
  ClauseSet out;
  for (Clause & c : cs) {
    std::sort(c.lits.begin(), c.lits.end());
    c.lits.erase(std::unique(c.lits.begin(), c.lits.end()), c.lits.end());
    bool taut = false;
    std::vector<Literal> kept;
    for (const Literal & l : c.lits) {
      auto v = ctx.eval_lit(l);
      if (v) {
        if (*v) taut = true;
        continue;
      }
      kept.push_back(l);
    }
    if (!taut)
      for (const Literal & l : kept)
        if (std::binary_search(c.lits.begin(), c.lits.end(), ctx.negate(l))) {
          taut = true;
          break;
        }
    if (taut) continue;
    c.lits = std::move(kept);
    bool drop = false;
    for (const Clause & prev : out)
      if (subsumes(prev, c)) {
        drop = true;
        break;
      }
    if (drop) continue;
    std::erase_if(out, [&](const Clause & prev) { return subsumes(c, prev); });
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// clause-shape classification

static bool arg_is_simple(const Ctx & ctx, TermId t, const std::set<SymId> & ext)
{
  const TermNode & n = ctx.term(t);
  switch (n.kind) {
    case TermKind::Var:
    case TermKind::Num: return true;
    case TermKind::App: return n.kids.empty() && !ext.count(n.sym);
    default: return false;
  }
}

static bool term_flat(const Ctx & ctx, TermId t, const std::set<SymId> & ext)
{
  const TermNode & n = ctx.term(t);
  if (n.kind == TermKind::App && ext.count(n.sym)) {
    for (TermId k : n.kids)
      if (!arg_is_simple(ctx, k, ext)) return false;
    return true;
  }
  for (TermId k : n.kids)
    if (!term_flat(ctx, k, ext)) return false;
  return true;
}

bool is_flat(const Ctx & ctx, const Clause & c, const std::set<SymId> & ext)
{
  for (const Literal & l : c.lits) {
    if (!term_flat(ctx, l.lhs, ext)) return false;
    if (!l.dvd && l.rhs != kNone && !term_flat(ctx, l.rhs, ext)) return false;
  }
  return true;
}

bool is_linear(const Ctx & ctx, const Clause & c, const std::set<SymId> & ext)
{
  if (!is_flat(ctx, c, ext)) return false;
  std::set<TermId> apps;
  for (const Literal & l : c.lits) {
    collect_apps_of(ctx, l.lhs, ext, apps);
    if (!l.dvd && l.rhs != kNone) collect_apps_of(ctx, l.rhs, ext, apps);
  }
  std::map<TermId, TermId> owner;  // variable -> the one application using it
  for (TermId a : apps) {
    std::set<TermId> seen_here;
    for (TermId k : ctx.term(a).kids) {
      std::set<TermId> vs;
      collect_vars(ctx, k, vs);
      for (TermId v : vs) {
        if (seen_here.count(v)) return false;  // twice within one application
        seen_here.insert(v);
        auto [it, fresh] = owner.emplace(v, a);
        if (!fresh && it->second != a) return false;  // shared across applications
      }
    }
  }
  return true;
}

}  // namespace invsyn
