/* SPDX-License-Identifier: Apache-2.0 */

#include "invsyn/bexpr.hpp"

#include <algorithm>

namespace invsyn {

BExpr BExpr::mk_and(std::vector<BExpr> kids)
{
  std::vector<BExpr> flat;
  for (BExpr & k : kids) {
    if (k.kind == Kind::False) return mk_false();
    if (k.kind == Kind::True) continue;
    if (k.kind == Kind::And) {
      for (BExpr & g : k.kids) flat.push_back(std::move(g));
    } else
      flat.push_back(std::move(k));
  }
  if (flat.empty()) return mk_true();
  if (flat.size() == 1) return std::move(flat[0]);
  BExpr e;
  e.kind = Kind::And;
  e.kids = std::move(flat);
  return e;
}

BExpr BExpr::mk_or(std::vector<BExpr> kids)
{
  std::vector<BExpr> flat;
  for (BExpr & k : kids) {
    if (k.kind == Kind::True) return mk_true();
    if (k.kind == Kind::False) continue;
    if (k.kind == Kind::Or) {
      for (BExpr & g : k.kids) flat.push_back(std::move(g));
    } else
      flat.push_back(std::move(k));
  }
  if (flat.empty()) return mk_false();
  if (flat.size() == 1) return std::move(flat[0]);
  BExpr e;
  e.kind = Kind::Or;
  e.kids = std::move(flat);
  return e;
}

BExpr BExpr::mk_not(BExpr kid)
{
  if (kid.kind == Kind::True) return mk_false();
  if (kid.kind == Kind::False) return mk_true();
  if (kid.kind == Kind::Not) return std::move(kid.kids[0]);
  BExpr e;
  e.kind = Kind::Not;
  e.kids.push_back(std::move(kid));
  return e;
}

bool tidy_cube(const Ctx & ctx, Cube & cube)
{
  std::sort(cube.begin(), cube.end());
  cube.erase(std::unique(cube.begin(), cube.end()), cube.end());
  Cube kept;
  kept.reserve(cube.size());
  for (const Literal & l : cube) {
    auto v = ctx.eval_lit(l);
    if (v) {
      if (!*v) return false;
      continue;  // trivially true, drop
    }
    kept.push_back(l);
  }
  for (const Literal & l : kept) {
    Literal neg = ctx.negate(l);
    if (std::binary_search(cube.begin(), cube.end(), neg)) return false;
  }
  cube = std::move(kept);
  return true;
}

// negation normal form: Not nodes pushed onto literals
static BExpr nnf(const Ctx & ctx, const BExpr & e, bool pos)
{
  using K = BExpr::Kind;
  switch (e.kind) {
    case K::True: return pos ? BExpr::mk_true() : BExpr::mk_false();
    case K::False: return pos ? BExpr::mk_false() : BExpr::mk_true();
    case K::Lit: return BExpr::mk_lit(pos ? e.lit : ctx.negate(e.lit));
    case K::Not: return nnf(ctx, e.kids[0], !pos);
    case K::And:
    case K::Or: {
      std::vector<BExpr> kids;
      kids.reserve(e.kids.size());
      for (const BExpr & k : e.kids) kids.push_back(nnf(ctx, k, pos));
      bool conj = (e.kind == K::And) == pos;
      return conj ? BExpr::mk_and(std::move(kids)) : BExpr::mk_or(std::move(kids));
    }
  }
  return BExpr::mk_true();
}

static std::vector<Cube> dnf_rec(const Ctx & ctx, const BExpr & e, size_t cap,
                                 const std::function<bool(const Cube &)> & prune)
{
  using K = BExpr::Kind;
  auto admit = [&](Cube cube, std::vector<Cube> & out) {
    if (!tidy_cube(ctx, cube)) return;
    if (prune && prune(cube)) return;
    if (out.size() >= cap)
      throw ContractError("disjunct budget exceeded (" + std::to_string(cap) +
                          ") while flattening to DNF");
    out.push_back(std::move(cube));
  };
  std::vector<Cube> out;
  switch (e.kind) {
    case K::True: out.push_back({}); break;
    case K::False: break;
    case K::Lit: admit({e.lit}, out); break;
    case K::Or:
      for (const BExpr & k : e.kids) {
        auto sub = dnf_rec(ctx, k, cap, prune);
        for (Cube & c : sub) admit(std::move(c), out);
      }
      break;
    case K::And: {
      out.push_back({});
      for (const BExpr & k : e.kids) {
        auto sub = dnf_rec(ctx, k, cap, prune);
        std::vector<Cube> next;
        for (const Cube & a : out)
          for (const Cube & b : sub) {
            Cube merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            admit(std::move(merged), next);
          }
        out = std::move(next);
        if (out.empty()) break;
      }
      break;
    }
    case K::Not: throw ContractError("DNF expects negation normal form input");
  }
  return out;
}

std::vector<Cube> to_dnf(const Ctx & ctx, const BExpr & e, size_t cap,
                         const std::function<bool(const Cube &)> & prune)
{
  return dnf_rec(ctx, nnf(ctx, e, true), cap, prune);
}

Clause negate_cube(const Ctx & ctx, const Cube & cube)
{
  Clause c;
  c.lits.reserve(cube.size());
  for (const Literal & l : cube) c.lits.push_back(ctx.negate(l));
  return c;
}

}  // namespace invsyn
