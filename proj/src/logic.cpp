/* SPDX-License-Identifier: Apache-2.0 */

#include "invsyn/logic.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace invsyn {

Ctx::Ctx()
{
  int_sort_ = add_sort("Int", SortInterp::Int);
  real_sort_ = add_sort("Real", SortInterp::Real);
}

// ---------------------------------------------------------------------------
// sorts / symbols

SortId Ctx::add_sort(const std::string & name, SortInterp interp)
{
  auto it = sort_names_.find(name);
  if (it != sort_names_.end()) {
    if (sorts_[it->second].interp != interp)
      throw SpecError("sort '" + name + "' redeclared with a different interpretation");
    return it->second;
  }
  SortId id = static_cast<SortId>(sorts_.size());
  sorts_.push_back({name, interp});
  sort_names_.emplace(name, id);
  return id;
}

SortId Ctx::sort_by_name(const std::string & name) const
{
  auto it = sort_names_.find(name);
  return it == sort_names_.end() ? kNone : it->second;
}

SymId Ctx::add_func(FuncDecl d)
{
  auto it = func_names_.find(d.name);
  if (it != func_names_.end()) throw SpecError("symbol '" + d.name + "' declared twice");
  SymId id = static_cast<SymId>(funcs_.size());
  func_names_.emplace(d.name, id);
  funcs_.push_back(std::move(d));
  return id;
}

SymId Ctx::func_by_name(const std::string & name) const
{
  auto it = func_names_.find(name);
  return it == func_names_.end() ? kNone : it->second;
}

SymId Ctx::fresh_func(const std::string & base, FuncDecl proto)
{
  std::string name = base;
  for (unsigned k = 2; func_names_.count(name); ++k) name = base + "_" + std::to_string(k);
  proto.name = name;
  return add_func(std::move(proto));
}

// ---------------------------------------------------------------------------
// term interning

static uint64_t node_hash(const TermNode & n)
{
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(static_cast<uint64_t>(n.kind));
  mix(n.sort);
  mix(n.sym);
  mix(n.num);
  for (TermId k : n.kids) mix(k);
  return h;
}

static bool node_eq(const TermNode & a, const TermNode & b)
{
  return a.kind == b.kind && a.sort == b.sort && a.sym == b.sym && a.num == b.num &&
         a.kids == b.kids;
}

TermId Ctx::intern(TermNode n)
{
  uint64_t h = node_hash(n);
  auto & bucket = term_index_[h];
  for (TermId cand : bucket)
    if (node_eq(terms_[cand], n)) return cand;
  TermId id = static_cast<TermId>(terms_.size());
  terms_.push_back(std::move(n));
  bucket.push_back(id);
  return id;
}

uint32_t Ctx::intern_num(const Rat & v)
{
  auto it = numeral_index_.find(v);
  if (it != numeral_index_.end()) return it->second;
  uint32_t id = static_cast<uint32_t>(numerals_.size());
  numerals_.push_back(v);
  numeral_index_.emplace(v, id);
  return id;
}

TermId Ctx::var(const std::string & name, SortId sort)
{
  auto key = std::make_pair(name, sort);
  auto it = var_index_.find(key);
  if (it != var_index_.end()) return it->second;
  TermNode n;
  n.kind = TermKind::Var;
  n.sort = sort;
  n.sym = static_cast<SymId>(var_names_.size());
  var_names_.push_back(name);
  TermId id = intern(std::move(n));
  var_index_.emplace(key, id);
  return id;
}

TermId Ctx::numeral(const Rat & value, SortId sort)
{
  if (sorts_.at(sort).interp == SortInterp::Int && !is_integer(value))
    throw SpecError("non-integer numeral " + to_string(value) + " at integer sort");
  if (sorts_.at(sort).interp == SortInterp::Free)
    throw SpecError("numeral at uninterpreted sort '" + sorts_.at(sort).name + "'");
  TermNode n;
  n.kind = TermKind::Num;
  n.sort = sort;
  n.num = intern_num(value);
  return intern(std::move(n));
}

TermId Ctx::app(SymId f, std::vector<TermId> args)
{
  const FuncDecl & d = funcs_.at(f);
  if (args.size() != d.args.size())
    throw SpecError("symbol '" + d.name + "' expects " + std::to_string(d.args.size()) +
                    " argument(s), got " + std::to_string(args.size()));
  for (size_t i = 0; i < args.size(); ++i)
    if (terms_.at(args[i]).sort != d.args[i])
      throw SpecError("argument " + std::to_string(i + 1) + " of '" + d.name +
                      "' has sort '" + sorts_.at(terms_.at(args[i]).sort).name +
                      "', expected '" + sorts_.at(d.args[i]).name + "'");
  TermNode n;
  n.kind = TermKind::App;
  n.sort = d.result;
  n.sym = f;
  n.kids = std::move(args);
  return intern(std::move(n));
}

// Linear-form canonicalization.  Every arithmetic term is kept as
//   c1*b1 + ... + ck*bk + c0
// with numerically folded c0 (last summand), distinct non-arithmetic bases
// b_i in first-seen order, and coefficients c_i not in {0}.  Mul nodes carry
// a coefficient != 0,1 over a Var/App base; bare bases stand for coefficient 1.

TermId Ctx::add(std::vector<TermId> summands)
{
  if (summands.empty()) throw ContractError("empty sum");
  SortId sort = terms_.at(summands[0]).sort;
  Rat cnum = 0;
  std::map<TermId, Rat> coeff;  // base -> coefficient
  std::vector<TermId> order;    // first-seen order of bases (for determinism)

  auto take = [&](TermId base, const Rat & c) {
    auto it = coeff.find(base);
    if (it == coeff.end()) {
      coeff.emplace(base, c);
      order.push_back(base);
    } else
      it->second += c;
  };

  std::vector<TermId> work(summands.rbegin(), summands.rend());
  while (!work.empty()) {
    TermId t = work.back();
    work.pop_back();
    const TermNode & n = terms_.at(t);
    if (n.sort != sort) throw SpecError("mixed-sort arithmetic in sum");
    switch (n.kind) {
      case TermKind::Num: cnum += numerals_[n.num]; break;
      case TermKind::Add:
        for (auto it = n.kids.rbegin(); it != n.kids.rend(); ++it) work.push_back(*it);
        break;
      case TermKind::Mul: take(n.kids[0], numerals_[n.num]); break;
      default: take(t, 1); break;
    }
  }

  std::vector<TermId> kids;
  for (TermId base : order) {
    const Rat & c = coeff[base];
    if (c == 0) continue;
    kids.push_back(c == 1 ? base : mul(c, base));
  }
  if (kids.empty()) return numeral(cnum, sort);
  if (cnum != 0) kids.push_back(numeral(cnum, sort));
  if (kids.size() == 1) return kids[0];

  TermNode n;
  n.kind = TermKind::Add;
  n.sort = sort;
  n.kids = std::move(kids);
  return intern(std::move(n));
}

TermId Ctx::mul(const Rat & c, TermId t)
{
  const TermNode & n = terms_.at(t);
  SortId sort = n.sort;
  if (sorts_.at(sort).interp == SortInterp::Free)
    throw SpecError("arithmetic over uninterpreted sort '" + sorts_.at(sort).name + "'");
  if (c == 0) return numeral(0, sort);
  if (c == 1) return t;
  switch (n.kind) {
    case TermKind::Num: return numeral(c * numerals_[n.num], sort);
    case TermKind::Mul: return mul(c * numerals_[n.num], n.kids[0]);
    case TermKind::Add: {
      std::vector<TermId> kids;
      kids.reserve(n.kids.size());
      for (TermId k : n.kids) kids.push_back(mul(c, k));
      return add(std::move(kids));
    }
    default: break;
  }
  if (sorts_.at(sort).interp == SortInterp::Int && !is_integer(c))
    throw SpecError("non-integer coefficient at integer sort");
  TermNode m;
  m.kind = TermKind::Mul;
  m.sort = sort;
  m.num = intern_num(c);
  m.kids = {t};
  return intern(std::move(m));
}

std::optional<Rat> Ctx::eval_const(TermId t) const
{
  const TermNode & n = terms_.at(t);
  switch (n.kind) {
    case TermKind::Num: return numerals_[n.num];
    case TermKind::Add: {
      Rat acc = 0;
      for (TermId k : n.kids) {
        auto v = eval_const(k);
        if (!v) return std::nullopt;
        acc += *v;
      }
      return acc;
    }
    case TermKind::Mul: {
      auto v = eval_const(n.kids[0]);
      if (!v) return std::nullopt;
      return numerals_[n.num] * *v;
    }
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// literals

Literal Ctx::lit(Rel rel, TermId lhs, TermId rhs, bool pos) const
{
  bool arith = sorts_.at(terms_.at(lhs).sort).interp != SortInterp::Free;
  Literal l;
  l.rel = rel;
  l.lhs = lhs;
  l.rhs = rhs;
  l.pos = pos;
  if (arith && !pos && rel != Rel::Eq) {
    // !(a <= b)  ~>  b < a      !(a < b)  ~>  b <= a
    l.pos = true;
    l.rel = rel == Rel::Le ? Rel::Lt : Rel::Le;
    std::swap(l.lhs, l.rhs);
  }
  if (l.rel == Rel::Eq && l.rhs < l.lhs) std::swap(l.lhs, l.rhs);
  return l;
}

Literal Ctx::dvd_lit(const Int & modulus, TermId arg, bool pos) const
{
  if (modulus <= 0) throw ContractError("divisibility literal needs a positive modulus");
  if (sorts_.at(terms_.at(arg).sort).interp != SortInterp::Int)
    throw ContractError("divisibility literal over a non-integer term");
  Literal l;
  l.dvd = true;
  l.pos = pos;
  l.modulus = modulus;
  l.lhs = arg;
  l.rhs = kNone;
  return l;
}

Literal Ctx::negate(const Literal & l) const
{
  if (l.dvd) {
    Literal m = l;
    m.pos = !m.pos;
    return m;
  }
  return lit(l.rel, l.lhs, l.rhs, !l.pos);
}

std::optional<bool> Ctx::eval_lit(const Literal & l) const
{
  if (l.dvd) {
    auto v = eval_const(l.lhs);
    if (!v || !is_integer(*v)) return std::nullopt;
    bool holds = num(*v) % l.modulus == 0;
    return l.pos ? holds : !holds;
  }
  auto a = eval_const(l.lhs), b = eval_const(l.rhs);
  if (!a || !b) return std::nullopt;
  bool holds = l.rel == Rel::Eq ? *a == *b : l.rel == Rel::Le ? *a <= *b : *a < *b;
  return l.pos ? holds : !holds;
}

// ---------------------------------------------------------------------------
// printing

std::string Ctx::show(TermId t) const
{
  const TermNode & n = terms_.at(t);
  switch (n.kind) {
    case TermKind::Var: return var_names_[n.sym];
    case TermKind::Num: return to_string(numerals_[n.num]);
    case TermKind::App: {
      std::string s = funcs_[n.sym].name;
      if (n.kids.empty()) return s;
      s += "(";
      for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) s += ", ";
        s += show(n.kids[i]);
      }
      return s + ")";
    }
    case TermKind::Mul: {
      const Rat & c = numerals_[n.num];
      if (c == -1) return "-" + show(n.kids[0]);
      return to_string(c) + "*" + show(n.kids[0]);
    }
    case TermKind::Add: {
      std::string s;
      for (size_t i = 0; i < n.kids.size(); ++i) {
        const TermNode & k = terms_.at(n.kids[i]);
        Rat lead = k.kind == TermKind::Num  ? numerals_[k.num]
                   : k.kind == TermKind::Mul ? numerals_[k.num]
                                             : Rat(1);
        if (i == 0) {
          s += show(n.kids[i]);
        } else if (lead < 0) {
          // render "a + -2*b" as "a - 2*b"
          std::string inner =
              k.kind == TermKind::Num
                  ? to_string(-numerals_[k.num])
                  : (-lead == 1 ? show(k.kids[0]) : to_string(-lead) + "*" + show(k.kids[0]));
          s += " - " + inner;
        } else {
          s += " + " + show(n.kids[i]);
        }
      }
      return s;
    }
  }
  return "?";
}

std::string Ctx::show(const Literal & l) const
{
  if (l.dvd) {
    std::string core = l.modulus.str() + " | " + show(l.lhs);
    return l.pos ? core : "~(" + core + ")";
  }
  const char * op = l.rel == Rel::Eq ? (l.pos ? " = " : " != ")
                    : l.rel == Rel::Le ? " <= "
                                       : " < ";
  return show(l.lhs) + op + show(l.rhs);
}

std::string Ctx::show(const Clause & c) const
{
  if (c.lits.empty()) return "false";
  std::string s;
  for (size_t i = 0; i < c.lits.size(); ++i) {
    if (i) s += " || ";
    s += show(c.lits[i]);
  }
  return s;
}

std::string Ctx::show_conj(const std::vector<Literal> & lits) const
{
  if (lits.empty()) return "true";
  std::string s;
  for (size_t i = 0; i < lits.size(); ++i) {
    if (i) s += " && ";
    s += show(lits[i]);
  }
  return s;
}

std::string Ctx::show_set(const ClauseSet & cs) const
{
  std::string s;
  for (const Clause & c : cs) {
    s += show(c);
    s += "\n";
  }
  return s;
}

}  // namespace invsyn
