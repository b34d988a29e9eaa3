/* SPDX-License-Identifier: Apache-2.0 */

#include "invsyn/linatom.hpp"

#include <cassert>

namespace invsyn {

LinExpr & LinExpr::operator+=(const LinExpr & o)
{
  abs += o.abs;
  for (const auto & [v, c] : o.coeffs) {
    Rat & slot = coeffs[v];
    slot += c;
    if (slot == 0) coeffs.erase(v);
  }
  return *this;
}

LinExpr & LinExpr::operator*=(const Rat & c)
{
  if (c == 0) {
    coeffs.clear();
    abs = 0;
    return *this;
  }
  abs *= c;
  for (auto & [v, k] : coeffs) k *= c;
  return *this;
}

LinExpr linexpr_of_term(const Ctx & ctx, TermId t)
{
  LinExpr e;
  const TermNode & n = ctx.term(t);
  switch (n.kind) {
    case TermKind::Num: e.abs = ctx.num_value(n.num); break;
    case TermKind::Mul: e.coeffs.emplace(n.kids[0], ctx.num_value(n.num)); break;
    case TermKind::Add:
      for (TermId k : n.kids) e += linexpr_of_term(ctx, k);
      break;
    default: e.coeffs.emplace(t, 1); break;
  }
  return e;
}

LinAtom atom_of_lit(const Ctx & ctx, const Literal & l)
{
  LinAtom a;
  if (l.dvd) {
    a.sort = ctx.sort_of(l.lhs);
    a.kind = l.pos ? LinAtom::Kind::Dvd : LinAtom::Kind::Ndvd;
    a.modulus = l.modulus;
    a.body = linexpr_of_term(ctx, l.lhs);
    return normalize_atom(ctx, std::move(a));
  }
  a.sort = ctx.sort_of(l.lhs);
  if (ctx.sort(a.sort).interp == SortInterp::Free)
    throw ContractError("linear atom requested for an uninterpreted-sort literal");
  a.body = linexpr_of_term(ctx, l.lhs);
  a.body += Rat(-1) * linexpr_of_term(ctx, l.rhs);
  switch (l.rel) {
    case Rel::Eq: a.kind = l.pos ? LinAtom::Kind::Eq : LinAtom::Kind::Neq; break;
    case Rel::Le: a.kind = LinAtom::Kind::Le; break;
    case Rel::Lt: a.kind = LinAtom::Kind::Lt; break;
  }
  // Negated Le/Lt never reach here: Ctx::lit() rewrites them positively.
  if (!l.pos && l.rel != Rel::Eq) throw ContractError("unnormalized ordering literal");
  return normalize_atom(ctx, std::move(a));
}

TermId term_of_linexpr(Ctx & ctx, const LinExpr & e, SortId sort)
{
  std::vector<TermId> kids;
  for (const auto & [v, c] : e.coeffs) kids.push_back(ctx.mul(c, v));
  kids.push_back(ctx.numeral(e.abs, sort));
  return ctx.add(std::move(kids));
}

Literal lit_of_atom(Ctx & ctx, const LinAtom & a)
{
  SortId sort = a.sort == kNone ? ctx.int_sort() : a.sort;
  switch (a.kind) {
    case LinAtom::Kind::True: {
      TermId z = ctx.numeral(0, sort);
      return ctx.lit(Rel::Eq, z, z);
    }
    case LinAtom::Kind::False: {
      return ctx.lit(Rel::Eq, ctx.numeral(0, sort), ctx.numeral(1, sort));
    }
    case LinAtom::Kind::Dvd:
    case LinAtom::Kind::Ndvd:
      return ctx.dvd_lit(a.modulus, term_of_linexpr(ctx, a.body, sort),
                         a.kind == LinAtom::Kind::Dvd);
    default: break;
  }
  // body ⋈ 0 rendered as positive-part ⋈ negative-part
  LinExpr lhs, rhs;
  for (const auto & [v, c] : a.body.coeffs)
    (c > 0 ? lhs : rhs).coeffs.emplace(v, c > 0 ? c : -c);
  (a.body.abs > 0 ? lhs : rhs).abs = a.body.abs > 0 ? a.body.abs : -a.body.abs;
  TermId tl = term_of_linexpr(ctx, lhs, sort);
  TermId tr = term_of_linexpr(ctx, rhs, sort);
  switch (a.kind) {
    case LinAtom::Kind::Eq: return ctx.lit(Rel::Eq, tl, tr);
    case LinAtom::Kind::Neq: return ctx.lit(Rel::Eq, tl, tr, false);
    case LinAtom::Kind::Le: return ctx.lit(Rel::Le, tl, tr);
    case LinAtom::Kind::Lt: return ctx.lit(Rel::Lt, tl, tr);
    default: break;
  }
  throw ContractError("unreachable atom kind");
}

static LinAtom constant_atom(bool truth, SortId sort)
{
  LinAtom a;
  a.kind = truth ? LinAtom::Kind::True : LinAtom::Kind::False;
  a.sort = sort;
  return a;
}

LinAtom normalize_atom(const Ctx & ctx, LinAtom a)
{
  using K = LinAtom::Kind;
  if (a.trivial()) return a;

  for (auto it = a.body.coeffs.begin(); it != a.body.coeffs.end();)
    it = it->second == 0 ? a.body.coeffs.erase(it) : std::next(it);

  // ground atoms decided immediately
  if (a.body.is_const()) {
    const Rat & d = a.body.abs;
    switch (a.kind) {
      case K::Le: return constant_atom(d <= 0, a.sort);
      case K::Lt: return constant_atom(d < 0, a.sort);
      case K::Eq: return constant_atom(d == 0, a.sort);
      case K::Neq: return constant_atom(d != 0, a.sort);
      default: {
        bool divides = is_integer(d) && emod(num(d), a.modulus) == 0;
        return constant_atom(a.kind == K::Dvd ? divides : !divides, a.sort);
      }
    }
  }

  if (a.kind == K::Dvd || a.kind == K::Ndvd) {
    // pseudo-variables hold integers: a fractional part can never vanish
    bool all_int = is_integer(a.body.abs);
    for (const auto & [v, c] : a.body.coeffs) all_int = all_int && is_integer(c);
    if (!all_int) return constant_atom(a.kind == K::Ndvd, a.sort);
    if (a.modulus == 1) return constant_atom(a.kind == K::Dvd, a.sort);
    for (auto it = a.body.coeffs.begin(); it != a.body.coeffs.end();) {
      it->second = Rat(emod(num(it->second), a.modulus));
      it = it->second == 0 ? a.body.coeffs.erase(it) : std::next(it);
    }
    a.body.abs = Rat(emod(num(a.body.abs), a.modulus));
    if (a.body.is_const())
      return constant_atom((a.body.abs == 0) == (a.kind == K::Dvd), a.sort);
    return a;
  }

  bool integral = ctx.sort(a.sort).interp == SortInterp::Int;
  if (!integral) {
    Rat lead = a.body.coeffs.begin()->second;
    if (a.kind == K::Eq || a.kind == K::Neq) {
      a.body *= Rat(1) / lead;  // Eq/Neq tolerate sign flips
    } else {
      a.body *= Rat(1) / (lead < 0 ? -lead : lead);
    }
    return a;
  }

  // integer sort: clear denominators, then gcd-reduce with tightening
  Int scale = den(a.body.abs);
  for (const auto & [v, c] : a.body.coeffs) scale = lcm(scale, den(c));
  if (scale != 1) a.body *= Rat(scale);

  Int g = 0;
  for (const auto & [v, c] : a.body.coeffs) g = gcd(g, num(c));
  Rat d = a.body.abs;
  if ((a.kind == K::Eq || a.kind == K::Neq) && a.body.coeffs.begin()->second < 0) {
    a.body *= Rat(-1);
    d = a.body.abs;
  }
  switch (a.kind) {
    case K::Eq:
    case K::Neq: {
      if (num(d) % g != 0) return constant_atom(a.kind == K::Neq, a.sort);
      a.body *= Rat(1, g);
      return a;
    }
    case K::Le:
    case K::Lt: {
      // g*(sum) + d ⋈ 0  ⇔  sum <= q for the right integer q
      Rat bound = -d / g;  // sum <= bound (Le) or sum < bound (Lt)
      Int q = floor_rat(bound);
      if (a.kind == K::Lt && is_integer(bound)) q -= 1;
      for (auto & [v, c] : a.body.coeffs) c /= g;
      a.body.abs = Rat(-q);
      a.kind = K::Le;
      return a;
    }
    default: break;
  }
  return a;
}

LinAtom negate_atom(const Ctx & ctx, const LinAtom & a)
{
  using K = LinAtom::Kind;
  LinAtom n = a;
  switch (a.kind) {
    case K::True: n.kind = K::False; return n;
    case K::False: n.kind = K::True; return n;
    case K::Eq: n.kind = K::Neq; break;
    case K::Neq: n.kind = K::Eq; break;
    case K::Dvd: n.kind = K::Ndvd; break;
    case K::Ndvd: n.kind = K::Dvd; break;
    case K::Le:  // !(body <= 0)  ⇔  -body < 0
      n.kind = K::Lt;
      n.body *= Rat(-1);
      break;
    case K::Lt:
      n.kind = K::Le;
      n.body *= Rat(-1);
      break;
  }
  return normalize_atom(ctx, std::move(n));
}

Rat eval_linexpr(const LinExpr & e, const std::map<TermId, Rat> & asgn)
{
  Rat acc = e.abs;
  for (const auto & [v, c] : e.coeffs) acc += c * asgn.at(v);
  return acc;
}

bool eval_atom(const LinAtom & a, const std::map<TermId, Rat> & asgn)
{
  using K = LinAtom::Kind;
  if (a.kind == K::True) return true;
  if (a.kind == K::False) return false;
  Rat v = eval_linexpr(a.body, asgn);
  switch (a.kind) {
    case K::Le: return v <= 0;
    case K::Lt: return v < 0;
    case K::Eq: return v == 0;
    case K::Neq: return v != 0;
    case K::Dvd: return is_integer(v) && emod(num(v), a.modulus) == 0;
    case K::Ndvd: return !is_integer(v) || emod(num(v), a.modulus) != 0;
    default: return false;
  }
}

}  // namespace invsyn
