/* SPDX-License-Identifier: Apache-2.0 */

#include "invsyn/qelim.hpp"

#include <algorithm>
#include <cassert>

namespace invsyn {

namespace {

// --------------------------------------------------------------------------
// shared helpers

bool body_mentions(const LinAtom & a, TermId v) { return a.body.coeffs.count(v) != 0; }

size_t count_occurrences(const std::vector<AtomCube> & cubes, TermId v)
{
  size_t n = 0;
  for (const AtomCube & c : cubes)
    for (const LinAtom & a : c) n += body_mentions(a, v) ? 1 : 0;
  return n;
}

void cap_check(size_t n, size_t cap, const char * where)
{
  if (n > cap)
    throw ContractError(std::string("disjunct budget exceeded (") + std::to_string(cap) +
                        ") during quantifier elimination: " + where);
}

// Splits every disequation mentioning v into its two strict sides.
void split_neq_on(const Ctx & ctx, const AtomCube & cube, TermId v,
                  std::vector<AtomCube> & out, size_t cap)
{
  for (size_t i = 0; i < cube.size(); ++i) {
    const LinAtom & a = cube[i];
    if (a.kind != LinAtom::Kind::Neq || !body_mentions(a, v)) continue;
    for (int side = 0; side < 2; ++side) {
      LinAtom strict;
      strict.kind = LinAtom::Kind::Lt;
      strict.sort = a.sort;
      strict.body = a.body;
      if (side) strict.body *= Rat(-1);
      AtomCube rest = cube;
      rest[i] = normalize_atom(ctx, std::move(strict));
      split_neq_on(ctx, rest, v, out, cap);
    }
    return;
  }
  cap_check(out.size() + 1, cap, "disequation splitting");
  out.push_back(cube);
}

// Substitutes the solution of eq (coeff c on v, rest r: c*v + r = 0) into
// atom `a` (integer path: cross-multiply, keeping everything integral).
LinAtom subst_eq_int(const Ctx & ctx, const LinAtom & a, TermId v, const Rat & c,
                     const LinExpr & eqbody)
{
  Rat d = a.body.coeff(v);
  if (d == 0) return a;
  LinAtom b = a;
  b.body *= c;                      // positive c: relation preserved
  LinExpr sub = eqbody;             // c*v + r
  sub *= Rat(-1) * d;               // -d*c*v - d*r
  b.body += sub;                    // eliminates v since b had d*c*v
  if (b.kind == LinAtom::Kind::Dvd || b.kind == LinAtom::Kind::Ndvd)
    b.modulus *= num(c);
  assert(b.body.coeff(v) == 0);
  b.body.drop(v);
  return normalize_atom(ctx, std::move(b));
}

// --------------------------------------------------------------------------
// one-variable integer elimination (cube has no Neq on v)

std::vector<AtomCube> cooper_one(const Ctx & ctx, const AtomCube & cube, TermId v,
                                 const QeOptions & opt)
{
  using K = LinAtom::Kind;

  // equality substitution first
  const LinAtom * best_eq = nullptr;
  for (const LinAtom & a : cube)
    if (a.kind == K::Eq && body_mentions(a, v))
      if (!best_eq || abs(num(a.body.coeff(v))) < abs(num(best_eq->body.coeff(v))))
        best_eq = &a;
  if (best_eq) {
    LinExpr eqbody = best_eq->body;
    Rat c = eqbody.coeff(v);
    if (c < 0) {
      eqbody *= Rat(-1);
      c = -c;
    }
    AtomCube out;
    for (const LinAtom & a : cube) {
      if (&a == best_eq) continue;
      LinAtom s = subst_eq_int(ctx, a, v, c, eqbody);
      if (s.kind == K::False) return {};
      if (s.kind != K::True) out.push_back(std::move(s));
    }
    if (c > 1) {
      // c*v = -r is solvable only when c divides r
      LinAtom dv;
      dv.kind = K::Dvd;
      dv.sort = best_eq->sort;
      dv.modulus = num(c);
      dv.body = eqbody;
      dv.body.drop(v);
      dv = normalize_atom(ctx, std::move(dv));
      if (dv.kind == K::False) return {};
      if (dv.kind != K::True) out.push_back(std::move(dv));
    }
    return {std::move(out)};
  }

  // Cooper proper.  Atoms on v are Le/Dvd/Ndvd; scale them to coefficient ±m.
  Int m = 1;
  for (const LinAtom & a : cube)
    if (body_mentions(a, v)) m = lcm(m, abs(num(a.body.coeff(v))));

  struct Bound {           // strict bound:  b < y  or  y < u
    LinExpr term;
  };
  struct Periodic {        // mod | sign*y + rest
    Int mod;
    int sign;
    LinExpr rest;
    bool pos;              // Dvd vs Ndvd
  };
  AtomCube others;
  std::vector<Bound> lowers, uppers;
  std::vector<Periodic> periodics;
  for (const LinAtom & a : cube) {
    Rat c = a.body.coeff(v);
    if (c == 0) {
      others.push_back(a);
      continue;
    }
    Rat ac = c;
    if (ac < 0) ac = -ac;
    Rat s = Rat(m) / ac;
    LinExpr scaled = a.body;
    scaled *= s;
    int sign = c < 0 ? -1 : 1;
    LinExpr rest = scaled;
    rest.drop(v);
    switch (a.kind) {
      case K::Le: {
        if (sign > 0) {
          // y + rest <= 0  ⇔  y < -rest + 1
          Bound u;
          u.term = Rat(-1) * rest;
          u.term.abs += 1;
          uppers.push_back(std::move(u));
        } else {
          // -y + rest <= 0  ⇔  rest - 1 < y
          Bound l;
          l.term = rest;
          l.term.abs -= 1;
          lowers.push_back(std::move(l));
        }
        break;
      }
      case K::Dvd:
      case K::Ndvd: {
        Periodic p;
        p.mod = a.modulus * num(s);  // s integral: m is the coefficient lcm
        p.sign = sign;
        p.rest = std::move(rest);
        p.pos = a.kind == K::Dvd;
        periodics.push_back(std::move(p));
        break;
      }
      default: throw ContractError("unexpected atom kind in integer elimination");
    }
  }
  {
    Periodic p;  // m | y from the y = m*v change of variable
    p.mod = m;
    p.sign = 1;
    p.rest = LinExpr();
    p.pos = true;
    periodics.push_back(std::move(p));
  }
  Int delta = 1;
  for (const Periodic & p : periodics) delta = lcm(delta, p.mod);

  auto subst_y = [&](const LinExpr & t) {
    // instantiate y := t in bounds and periodic constraints
    AtomCube out = others;
    for (const Bound & b : lowers) {
      LinAtom a;
      a.kind = K::Lt;
      a.sort = ctx.sort_of(v);
      a.body = b.term;
      a.body += Rat(-1) * t;
      out.push_back(normalize_atom(ctx, std::move(a)));
    }
    for (const Bound & u : uppers) {
      LinAtom a;
      a.kind = K::Lt;
      a.sort = ctx.sort_of(v);
      a.body = t;
      a.body += Rat(-1) * u.term;
      out.push_back(normalize_atom(ctx, std::move(a)));
    }
    for (const Periodic & p : periodics) {
      LinAtom a;
      a.kind = p.pos ? K::Dvd : K::Ndvd;
      a.sort = ctx.sort_of(v);
      a.modulus = p.mod;
      a.body = t;
      a.body *= Rat(p.sign);
      a.body += p.rest;
      out.push_back(normalize_atom(ctx, std::move(a)));
    }
    return out;
  };

  std::vector<AtomCube> result;
  bool use_lower = lowers.size() <= uppers.size();
  const std::vector<Bound> & base = use_lower ? lowers : uppers;
  auto emit = [&](AtomCube cube_out) {
    bool ok = true;
    for (LinAtom & a : cube_out)
      if (a.kind == K::False) ok = false;
    if (!ok) return;
    std::erase_if(cube_out, [](const LinAtom & a) { return a.kind == K::True; });
    cap_check(result.size() + 1, opt.cube_cap, "integer testpoint expansion");
    result.push_back(std::move(cube_out));
  };
  if (base.empty()) {
    // unbounded on the chosen side: only residues matter
    for (Int j = 1; j <= delta; ++j) {
      AtomCube out = others;
      for (const Periodic & p : periodics) {
        LinAtom a;
        a.kind = p.pos ? K::Dvd : K::Ndvd;
        a.sort = ctx.sort_of(v);
        a.modulus = p.mod;
        a.body = p.rest;
        a.body.abs += Rat(p.sign) * Rat(j);
        out.push_back(normalize_atom(ctx, std::move(a)));
      }
      // bounds on the other side are satisfiable arbitrarily far out: drop
      emit(std::move(out));
    }
  } else {
    for (const Bound & b : base)
      for (Int j = 1; j <= delta; ++j) {
        LinExpr t = b.term;
        t.abs += use_lower ? Rat(j) : Rat(-j);
        emit(subst_y(t));
      }
  }
  return result;
}

// --------------------------------------------------------------------------
// one-variable rational elimination (cube has no Neq on v)

std::vector<AtomCube> fourier_one(const Ctx & ctx, const AtomCube & cube, TermId v,
                                  const QeOptions & opt)
{
  using K = LinAtom::Kind;
  (void)opt;

  const LinAtom * eq = nullptr;
  for (const LinAtom & a : cube)
    if (a.kind == K::Eq && body_mentions(a, v)) {
      eq = &a;
      break;
    }
  if (eq) {
    Rat c = eq->body.coeff(v);
    LinExpr solved = eq->body;  // v = -(rest)/c
    solved.drop(v);
    solved *= Rat(-1) / c;
    AtomCube out;
    for (const LinAtom & a : cube) {
      if (&a == eq) continue;
      Rat d = a.body.coeff(v);
      if (d == 0) {
        out.push_back(a);
        continue;
      }
      LinAtom b = a;
      b.body.drop(v);
      LinExpr add = solved;
      add *= d;
      b.body += add;
      b = normalize_atom(ctx, std::move(b));
      if (b.kind == K::False) return {};
      if (b.kind != K::True) out.push_back(std::move(b));
    }
    return {std::move(out)};
  }

  struct Side {
    LinExpr bound;  // v >= bound / v <= bound
    bool strict;
  };
  AtomCube out;
  std::vector<Side> lowers, uppers;
  for (const LinAtom & a : cube) {
    Rat c = a.body.coeff(v);
    if (c == 0) {
      out.push_back(a);
      continue;
    }
    if (a.kind != K::Le && a.kind != K::Lt)
      throw ContractError("unexpected atom kind in rational elimination");
    Side s;
    s.strict = a.kind == K::Lt;
    s.bound = a.body;
    s.bound.drop(v);
    s.bound *= Rat(-1) / c;  // c*v <= -rest  →  v ⋚ -rest/c
    (c > 0 ? uppers : lowers).push_back(std::move(s));
  }
  for (const Side & lo : lowers)
    for (const Side & hi : uppers) {
      LinAtom a;
      a.kind = lo.strict || hi.strict ? K::Lt : K::Le;
      a.sort = ctx.sort_of(v);
      a.body = lo.bound;
      a.body += Rat(-1) * hi.bound;  // lo <= hi  ⇔  lo - hi <= 0
      a = normalize_atom(ctx, std::move(a));
      if (a.kind == K::False) return {};
      if (a.kind != K::True) out.push_back(std::move(a));
    }
  return {std::move(out)};
}

// --------------------------------------------------------------------------
// multi-variable driver

using OneVarEngine = std::vector<AtomCube> (*)(const Ctx &, const AtomCube &, TermId,
                                               const QeOptions &);

std::vector<AtomCube> eliminate_sorted(const Ctx & ctx, const AtomCube & cube,
                                       const std::set<TermId> & targets,
                                       const QeOptions & opt, OneVarEngine engine)
{
  std::vector<AtomCube> work{cube};
  std::set<TermId> remaining = targets;
  while (!remaining.empty()) {
    TermId v = *remaining.begin();
    size_t best = SIZE_MAX;
    for (TermId cand : remaining) {
      size_t n = count_occurrences(work, cand);
      if (n < best) {
        best = n;
        v = cand;
      }
    }
    remaining.erase(v);
    std::vector<AtomCube> next;
    for (const AtomCube & c : work) {
      std::vector<AtomCube> noneq;
      split_neq_on(ctx, c, v, noneq, opt.cube_cap);
      for (const AtomCube & c2 : noneq)
        for (AtomCube & r : engine(ctx, c2, v, opt)) {
          if (opt.simplify && !simplify_atom_cube(ctx, r)) continue;
          cap_check(next.size() + 1, opt.cube_cap, "disjunct accumulation");
          next.push_back(std::move(r));
        }
    }
    work = std::move(next);
  }
  return work;
}

bool term_contains(const Ctx & ctx, TermId hay, TermId needle)
{
  if (hay == needle) return true;
  for (TermId k : ctx.term(hay).kids)
    if (term_contains(ctx, k, needle)) return true;
  return false;
}

}  // namespace

std::vector<AtomCube> eliminate_lra(const Ctx & ctx, const AtomCube & cube,
                                    const std::set<TermId> & targets, const QeOptions & opt)
{
  return eliminate_sorted(ctx, cube, targets, opt, fourier_one);
}

std::vector<AtomCube> eliminate_lia(const Ctx & ctx, const AtomCube & cube,
                                    const std::set<TermId> & targets, const QeOptions & opt)
{
  return eliminate_sorted(ctx, cube, targets, opt, cooper_one);
}

bool simplify_atom_cube(const Ctx & ctx, AtomCube & cube)
{
  using K = LinAtom::Kind;
  AtomCube atoms;
  for (LinAtom & a : cube) {
    LinAtom n = normalize_atom(ctx, std::move(a));
    if (n.kind == K::False) return false;
    if (n.kind != K::True) atoms.push_back(std::move(n));
  }

  // group ordering-and-equality atoms by their coefficient vector
  using Key = std::vector<std::pair<TermId, Rat>>;
  struct Group {
    std::optional<Rat> eq;
    std::optional<Rat> le;        // tightest: largest abs
    std::optional<Rat> lt;
    std::vector<Rat> neqs;
  };
  std::map<Key, Group> groups;
  AtomCube kept;  // divisibility atoms pass through (deduplicated at the end)
  for (LinAtom & a : atoms) {
    if (a.kind == K::Dvd || a.kind == K::Ndvd) {
      kept.push_back(std::move(a));
      continue;
    }
    Key key(a.body.coeffs.begin(), a.body.coeffs.end());
    Group & g = groups[key];
    switch (a.kind) {
      case K::Eq:
        if (g.eq && *g.eq != a.body.abs) return false;
        g.eq = a.body.abs;
        break;
      case K::Neq: g.neqs.push_back(a.body.abs); break;
      case K::Le:
        if (!g.le || a.body.abs > *g.le) g.le = a.body.abs;
        break;
      case K::Lt:
        if (!g.lt || a.body.abs > *g.lt) g.lt = a.body.abs;
        break;
      default: break;
    }
  }
  for (auto & [key, g] : groups) {
    auto mk = [&](K kind, const Rat & abs) {
      LinAtom a;
      a.kind = kind;
      for (auto & [v, c] : key) a.body.coeffs.emplace(v, c);
      a.body.abs = abs;
      a.sort = key.empty() ? kNone : ctx.sort_of(key.front().first);
      return a;
    };
    if (g.eq) {
      // sum = -eqAbs; check the other relations at that point
      for (const Rat & n : g.neqs)
        if (n == *g.eq) return false;
      if (g.le && *g.le - *g.eq > 0) return false;
      if (g.lt && *g.lt - *g.eq >= 0) return false;
      kept.push_back(mk(K::Eq, *g.eq));
      continue;
    }
    if (g.le && g.lt) {
      // sum <= -le vs sum < -lt: keep the stronger bound
      if (*g.lt >= *g.le)
        g.le.reset();
      else
        g.lt.reset();
    }
    if (g.le) kept.push_back(mk(K::Le, *g.le));
    if (g.lt) kept.push_back(mk(K::Lt, *g.lt));
    std::sort(g.neqs.begin(), g.neqs.end());
    g.neqs.erase(std::unique(g.neqs.begin(), g.neqs.end()), g.neqs.end());
    for (const Rat & n : g.neqs) kept.push_back(mk(K::Neq, n));
  }

  // opposing-bound contradiction: a <= 0 and b <= 0 with a + b a positive constant
  for (size_t i = 0; i < kept.size(); ++i)
    for (size_t j = i + 1; j < kept.size(); ++j) {
      const LinAtom & a = kept[i];
      const LinAtom & b = kept[j];
      bool aord = a.kind == K::Le || a.kind == K::Lt;
      bool bord = b.kind == K::Le || b.kind == K::Lt;
      if (!aord || !bord) continue;
      LinExpr sum = a.body;
      sum += b.body;
      if (!sum.is_const()) continue;
      bool strict = a.kind == K::Lt || b.kind == K::Lt;
      if (strict ? sum.abs >= 0 : sum.abs > 0) return false;
    }

  cube = std::move(kept);
  return true;
}

std::vector<Cube> eliminate_cube(Ctx & ctx, const Cube & cube, const std::set<TermId> & targets,
                                 const QeOptions & opt)
{
  if (targets.empty()) return {cube};

  Cube passthrough;
  std::map<SortId, AtomCube> parts;
  for (const Literal & l : cube) {
    SortId s = ctx.sort_of(l.lhs);
    if (!l.dvd && ctx.sort(s).interp == SortInterp::Free) {
      for (TermId t : targets)
        if (term_contains(ctx, l.lhs, t) || (l.rhs != kNone && term_contains(ctx, l.rhs, t)))
          throw ContractError("cannot eliminate '" + ctx.show(t) +
                              "' from an uninterpreted-sort literal");
      passthrough.push_back(l);
      continue;
    }
    LinAtom a = atom_of_lit(ctx, l);
    if (a.kind == LinAtom::Kind::False) return {};
    if (a.kind == LinAtom::Kind::True) continue;
    // a target buried inside an opaque application cannot be eliminated
    for (const auto & [base, c] : a.body.coeffs)
      for (TermId t : targets)
        if (base != t && term_contains(ctx, base, t))
          throw ContractError("cannot eliminate '" + ctx.show(t) +
                              "' inside the uninterpreted term '" + ctx.show(base) + "'");
    parts[a.sort].push_back(std::move(a));
  }

  std::vector<Cube> result{passthrough};
  for (auto & [sort, atoms] : parts) {
    std::set<TermId> here;
    for (TermId t : targets)
      if (ctx.sort_of(t) == sort) here.insert(t);
    std::vector<AtomCube> dnf =
        ctx.sort(sort).interp == SortInterp::Int
            ? eliminate_lia(ctx, atoms, here, opt)
            : eliminate_lra(ctx, atoms, here, opt);
    std::vector<Cube> next;
    for (const Cube & done : result)
      for (const AtomCube & part : dnf) {
        Cube merged = done;
        for (const LinAtom & a : part) merged.push_back(lit_of_atom(ctx, a));
        cap_check(next.size() + 1, opt.cube_cap, "per-sort recombination");
        next.push_back(std::move(merged));
      }
    result = std::move(next);
  }
  // verify targets of sorts that never occurred in any atom were simply absent
  std::vector<Cube> tidied;
  for (Cube & c : result) {
    if (!tidy_cube(ctx, c)) continue;
    tidied.push_back(std::move(c));
  }
  return tidied;
}

std::vector<Cube> eliminate_dnf(Ctx & ctx, const std::vector<Cube> & dnf,
                                const std::set<TermId> & targets, const QeOptions & opt)
{
  std::vector<Cube> out;
  for (const Cube & c : dnf)
    for (Cube & r : eliminate_cube(ctx, c, targets, opt)) {
      cap_check(out.size() + 1, opt.cube_cap, "disjunction accumulation");
      out.push_back(std::move(r));
    }
  return out;
}

}  // namespace invsyn
