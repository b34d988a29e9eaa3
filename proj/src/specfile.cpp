/* SPDX-License-Identifier: Apache-2.0 */

#include "invsyn/specfile.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "invsyn/bexpr.hpp"
#include "invsyn/qelim.hpp"
#include "invsyn/transforms.hpp"

namespace invsyn {

const char * to_string(BaseTheory b)
{
  switch (b) {
    case BaseTheory::Lia: return "lia";
    case BaseTheory::Lra: return "lra";
    case BaseTheory::Mixed: return "mixed";
  }
  return "?";
}

const char * to_string(Closure c)
{
  return c == Closure::Apf ? "apf" : "identity";
}

const char * to_string(LocalityClass c)
{
  switch (c) {
    case LocalityClass::FreeFunctions: return "free-functions";
    case LocalityClass::Monotone: return "monotone";
    case LocalityClass::CaseDefinition: return "case-definition";
    case LocalityClass::Apf: return "array-property";
    case LocalityClass::Unverified: return "unverified";
  }
  return "?";
}

const char * to_string(DiagKind k)
{
  switch (k) {
    case DiagKind::Lexical: return "lexical";
    case DiagKind::Syntax: return "syntax";
    case DiagKind::SortCheck: return "sort-check";
    case DiagKind::Undeclared: return "undeclared-symbol";
    case DiagKind::RoleConflict: return "role-conflict";
    case DiagKind::Version: return "version";
  }
  return "?";
}

const char * to_string(A3Status s)
{
  switch (s) {
    case A3Status::Pass: return "pass";
    case A3Status::Fail: return "fail";
    case A3Status::Unknown: return "unknown";
  }
  return "?";
}

std::string Diagnostic::to_string() const
{
  return std::to_string(line) + ":" + std::to_string(col) + ": " + invsyn::to_string(kind) +
         " error: " + message;
}

const UpdateSpec * ProblemSpec::update_for(SymId f) const
{
  for (const UpdateSpec & u : updates)
    if (u.function == f) return &u;
  return nullptr;
}

// ===========================================================================
// lexer
// ===========================================================================

namespace {

struct Token {
  enum class K : uint8_t { Ident, Num, Punct, Eof } kind = K::Eof;
  std::string text;
  Int num;
  int line = 0, col = 0;
};

struct ParseAbort {
  Diagnostic d;
};

[[noreturn]] void fail(DiagKind kind, int line, int col, std::string msg)
{
  throw ParseAbort{Diagnostic{kind, line, col, std::move(msg)}};
}

bool ident_start(char c)
{
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

std::vector<Token> lex(const std::string & text)
{
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      if (j < text.size() && text[j] == '\'') ++j;  // primed symbol
      t.kind = Token::K::Ident;
      t.text = text.substr(i, j - i);
      advance(j - i);
    } else if (c >= '0' && c <= '9') {
      size_t j = i;
      while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
      if (j + 1 < text.size() && text[j] == '.' && text[j + 1] >= '0' && text[j + 1] <= '9')
        fail(DiagKind::Lexical, line, col, "decimal literals are not supported; write p/q");
      t.kind = Token::K::Num;
      t.text = text.substr(i, j - i);
      t.num = Int(t.text);
      advance(j - i);
    } else {
      auto two = [&](const char * p) {
        return i + 1 < text.size() && text[i] == p[0] && text[i + 1] == p[1];
      };
      t.kind = Token::K::Punct;
      if (two("=>") || two("->") || two("||") || two("&&") || two("<=") || two(">=") ||
          two("!=")) {
        t.text = text.substr(i, 2);
        advance(2);
      } else if (std::string("{}()[],:.+-*/=<>").find(c) != std::string::npos) {
        t.text = std::string(1, c);
        advance(1);
      } else {
        fail(DiagKind::Lexical, line, col, std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back(std::move(t));
  }
  Token eof;
  eof.kind = Token::K::Eof;
  eof.text = "<end of file>";
  eof.line = line;
  eof.col = col;
  out.push_back(std::move(eof));
  return out;
}

// ===========================================================================
// parser
// ===========================================================================

// untyped term tree; numerals are typed during elaboration
struct PT {
  enum class K : uint8_t { Num, Name, App, Add, Neg, Mul, Div } k = K::Num;
  Int num;
  std::string name;
  int line = 0, col = 0;
  std::vector<PT> kids;
};

// elaboration result: a typed term, or a still-flexible numeral value
struct EV {
  std::optional<TermId> term;
  Rat num;
};

const std::set<std::string> kTopKeywords = {"version", "system", "sorts",  "signature",
                                            "theory",  "init",   "update", "property",
                                            "options"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ParseResult run()
  {
    ParseResult result;
    parse_version();
    while (!at_end()) {
      size_t before = pos_;
      try {
        parse_block();
      } catch (ParseAbort & a) {
        result.diags.push_back(std::move(a.d));
        recover(before);
      }
      if (result.diags.size() >= 20) break;
    }
    if (result.diags.empty()) {
      finalize();
      result.spec = std::move(spec_);
    }
    return result;
  }

  std::vector<Diagnostic> version_failure_;  // set when the header is bad

 private:
  ProblemSpec spec_;
  std::vector<Token> toks_;
  size_t pos_ = 0;

  std::vector<std::pair<std::string, TermId>> binders_;
  bool allow_primed_ = false;
  bool in_guard_ = false;
  std::set<std::string> seen_blocks_;
  std::set<std::string> level_names_;

  // --- token plumbing

  const Token & peek(size_t ahead = 0) const
  {
    size_t k = pos_ + ahead;
    return k < toks_.size() ? toks_[k] : toks_.back();
  }
  const Token & next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::K::Eof; }

  bool is_punct(const std::string & p, size_t ahead = 0) const
  {
    return peek(ahead).kind == Token::K::Punct && peek(ahead).text == p;
  }
  bool is_word(const std::string & w, size_t ahead = 0) const
  {
    return peek(ahead).kind == Token::K::Ident && peek(ahead).text == w;
  }
  bool eat_punct(const std::string & p)
  {
    if (!is_punct(p)) return false;
    ++pos_;
    return true;
  }
  bool eat_word(const std::string & w)
  {
    if (!is_word(w)) return false;
    ++pos_;
    return true;
  }
  void expect_punct(const std::string & p, const std::string & where)
  {
    if (!eat_punct(p))
      fail(DiagKind::Syntax, peek().line, peek().col,
           "expected '" + p + "' " + where + ", got '" + peek().text + "'");
  }
  std::string expect_ident(const std::string & what)
  {
    if (peek().kind != Token::K::Ident)
      fail(DiagKind::Syntax, peek().line, peek().col,
           "expected " + what + ", got '" + peek().text + "'");
    return next().text;
  }
  Int expect_num(const std::string & what)
  {
    if (peek().kind != Token::K::Num)
      fail(DiagKind::Syntax, peek().line, peek().col,
           "expected " + what + ", got '" + peek().text + "'");
    return next().num;
  }

  // on error: skip past the current block (to the '}' closing any brace we
  // entered, or to the next top-level keyword)
  void recover(size_t error_start)
  {
    pos_ = std::max(pos_, error_start + 1);
    int depth = 0;
    for (size_t k = error_start; k < pos_ && k < toks_.size(); ++k) {
      if (toks_[k].kind == Token::K::Punct) {
        if (toks_[k].text == "{") ++depth;
        if (toks_[k].text == "}") --depth;
      }
    }
    while (!at_end()) {
      if (depth <= 0 && peek().kind == Token::K::Ident && kTopKeywords.count(peek().text))
        return;
      if (is_punct("{")) ++depth;
      if (is_punct("}")) --depth;
      ++pos_;
      if (depth == 0 && toks_[pos_ - 1].text == "}") return;
    }
  }

  // --- header and blocks

  void parse_version()
  {
    try {
      if (!eat_word("version"))
        fail(DiagKind::Version, peek().line, peek().col,
             "specification must start with 'version 1'");
      Int v = expect_num("a version number");
      if (v != 1)
        fail(DiagKind::Version, peek().line, peek().col,
             "unsupported grammar version " + v.str() + " (this tool reads version 1)");
    } catch (ParseAbort & a) {
      version_failure_.push_back(std::move(a.d));
      pos_ = toks_.size() - 1;  // nothing else is meaningful
    }
  }

  void parse_block()
  {
    const Token & t = peek();
    if (t.kind != Token::K::Ident || !kTopKeywords.count(t.text))
      fail(DiagKind::Syntax, t.line, t.col,
           "expected a block keyword (sorts, signature, theory, init, update, property, "
           "options), got '" +
               t.text + "'");
    if (t.text == "version")
      fail(DiagKind::Syntax, t.line, t.col, "duplicate version header");
    if (t.text != "theory" && t.text != "update" && !seen_blocks_.insert(t.text).second)
      fail(DiagKind::RoleConflict, t.line, t.col, "duplicate '" + t.text + "' block");

    if (eat_word("system")) {
      spec_.name = expect_ident("a system name");
    } else if (eat_word("sorts")) {
      parse_sorts();
    } else if (eat_word("signature")) {
      parse_signature();
    } else if (eat_word("theory")) {
      parse_theory();
    } else if (eat_word("init")) {
      parse_clause_block(spec_.init, "clause");
    } else if (eat_word("update")) {
      parse_update();
    } else if (eat_word("property")) {
      parse_clause_block(spec_.property, "clause");
    } else if (eat_word("options")) {
      parse_options();
    }
  }

  void parse_sorts()
  {
    expect_punct("{", "after 'sorts'");
    while (!eat_punct("}")) {
      const Token & t = peek();
      std::string name = expect_ident("a sort name");
      if (name == "int" || name == "real")
        fail(DiagKind::RoleConflict, t.line, t.col, "sort '" + name + "' is built in");
      if (spec_.ctx.sort_by_name(name) != kNone)
        fail(DiagKind::RoleConflict, t.line, t.col, "sort '" + name + "' redeclared");
      spec_.ctx.add_sort(name, SortInterp::Free);
      spec_.free_sorts.push_back(name);
    }
  }

  SortId parse_base_sort()
  {
    const Token & t = peek();
    std::string name = expect_ident("a sort");
    if (name == "int") return spec_.ctx.int_sort();
    if (name == "real") return spec_.ctx.real_sort();
    SortId s = spec_.ctx.sort_by_name(name);
    if (s == kNone || spec_.ctx.sort(s).interp != SortInterp::Free)
      fail(DiagKind::Undeclared, t.line, t.col, "unknown sort '" + name + "'");
    return s;
  }

  void parse_signature()
  {
    expect_punct("{", "after 'signature'");
    while (!eat_punct("}")) {
      const Token & role_tok = peek();
      std::string role = expect_ident("a role keyword (param, state, func)");
      if (role != "param" && role != "state" && role != "func")
        fail(DiagKind::Syntax, role_tok.line, role_tok.col,
             "expected 'param', 'state' or 'func', got '" + role + "'");
      const Token & name_tok = peek();
      std::string name = expect_ident("a symbol name");
      if (name.back() == '\'')
        fail(DiagKind::RoleConflict, name_tok.line, name_tok.col,
             "cannot declare the primed symbol '" + name + "'; primes are derived from "
             "state symbols");
      expect_punct(":", "after the symbol name");

      FuncDecl d;
      d.name = name;
      if (eat_punct("(")) {
        if (!eat_punct(")")) {
          d.args.push_back(parse_base_sort());
          while (eat_punct(",")) d.args.push_back(parse_base_sort());
          expect_punct(")", "after the argument sorts");
        }
        expect_punct("->", "after the argument sorts");
      }
      d.result = parse_base_sort();
      d.is_param = role == "param";
      d.is_state = role == "state";
      if (spec_.ctx.func_by_name(name) != kNone)
        fail(DiagKind::RoleConflict, name_tok.line, name_tok.col,
             "symbol '" + name + "' redeclared");
      SymId f = spec_.ctx.add_func(d);
      if (d.is_state) {
        FuncDecl p;
        p.name = name + "'";
        p.args = d.args;
        p.result = d.result;
        p.is_primed = true;
        p.partner = f;
        SymId fp = spec_.ctx.add_func(std::move(p));
        spec_.ctx.func_mut(f).partner = fp;
      }
    }
  }

  void parse_theory()
  {
    if (!eat_word("level"))
      fail(DiagKind::Syntax, peek().line, peek().col, "expected 'level' after 'theory'");
    TheoryLevel level;
    const Token & name_tok = peek();
    level.name = expect_ident("a level name");
    if (!level_names_.insert(level.name).second)
      fail(DiagKind::RoleConflict, name_tok.line, name_tok.col,
           "theory level '" + level.name + "' redeclared");
    if (!eat_word("closure"))
      fail(DiagKind::Syntax, peek().line, peek().col, "expected 'closure' after the level name");
    std::string kind = expect_ident("a closure kind (identity or apf)");
    if (kind == "identity")
      level.closure = Closure::Identity;
    else if (kind == "apf")
      level.closure = Closure::Apf;
    else
      fail(DiagKind::Syntax, peek().line, peek().col,
           "expected 'identity' or 'apf', got '" + kind + "'");
    parse_clause_block(level.clauses, "axiom");
    spec_.levels.push_back(std::move(level));
  }

  void parse_clause_block(ClauseSet & out, const std::string & keyword)
  {
    expect_punct("{", "to open the block");
    while (!eat_punct("}")) {
      if (!eat_word(keyword))
        fail(DiagKind::Syntax, peek().line, peek().col,
             "expected '" + keyword + "' or '}', got '" + peek().text + "'");
      out.push_back(parse_clause());
    }
  }

  void parse_update()
  {
    const Token & name_tok = peek();
    std::string name = expect_ident("a state symbol name");
    SymId f = spec_.ctx.func_by_name(name);
    if (f == kNone)
      fail(DiagKind::Undeclared, name_tok.line, name_tok.col,
           "undeclared symbol '" + name + "'");
    if (!spec_.ctx.func(f).is_state)
      fail(DiagKind::RoleConflict, name_tok.line, name_tok.col,
           "only state symbols can be updated; '" + name + "' is not declared 'state'");
    for (const UpdateSpec & u : spec_.updates)
      if (u.function == f)
        fail(DiagKind::RoleConflict, name_tok.line, name_tok.col,
             "duplicate update block for '" + name + "'");

    UpdateSpec u;
    u.function = f;
    expect_punct("{", "after the update symbol");
    while (!eat_punct("}")) {
      if (!eat_word("case"))
        fail(DiagKind::Syntax, peek().line, peek().col,
             "expected 'case' or '}', got '" + peek().text + "'");
      u.cases.push_back(parse_case(u, name_tok));
    }
    spec_.updates.push_back(std::move(u));
  }

  UpdateCase parse_case(const UpdateSpec & u, const Token & name_tok)
  {
    UpdateCase c;
    binders_.clear();
    if (eat_word("forall")) parse_binders(c.vars);

    // binder lists must agree across the cases of one update so the
    // signature-condition queries can share their witness constants
    if (!u.cases.empty()) {
      const UpdateCase & first = u.cases.front();
      bool same = first.vars.size() == c.vars.size();
      for (size_t k = 0; same && k < c.vars.size(); ++k) same = first.vars[k] == c.vars[k];
      if (!same)
        fail(DiagKind::Syntax, name_tok.line, name_tok.col,
             "all cases of one update must quantify the same variables");
    }

    in_guard_ = true;
    if (eat_word("true")) {
      // unconditional case
    } else {
      c.guard.push_back(parse_atom());
      while (eat_punct("&&")) c.guard.push_back(parse_atom());
    }
    in_guard_ = false;
    expect_punct("=>", "between the guard and the effect");

    allow_primed_ = true;
    c.effect.push_back(parse_atom());
    while (eat_punct("&&")) c.effect.push_back(parse_atom());
    allow_primed_ = false;

    SymId prime = spec_.ctx.func(u.function).partner;
    std::set<SymId> syms;
    for (const Literal & l : c.effect) {
      collect_syms(spec_.ctx, l.lhs, syms);
      if (!l.dvd && l.rhs != kNone) collect_syms(spec_.ctx, l.rhs, syms);
    }
    if (!syms.count(prime))
      fail(DiagKind::RoleConflict, name_tok.line, name_tok.col,
           "effect does not constrain '" + spec_.ctx.func(prime).name + "'");
    binders_.clear();
    return c;
  }

  void parse_binders(std::vector<TermId> & vars)
  {
    do {
      const Token & t = peek();
      std::string name = expect_ident("a variable name");
      if (name.back() == '\'')
        fail(DiagKind::Syntax, t.line, t.col, "variables cannot be primed");
      expect_punct(":", "after the variable name");
      SortId s = parse_base_sort();
      TermId v = spec_.ctx.var(name, s);
      binders_.emplace_back(name, v);
      vars.push_back(v);
    } while (eat_punct(","));
    expect_punct(".", "after the quantifier binders");
  }

  Clause parse_clause()
  {
    binders_.clear();
    std::vector<TermId> vars;
    if (eat_word("forall")) parse_binders(vars);
    Clause c;
    c.lits = parse_clause_lits();
    binders_.clear();
    return c;
  }

  std::vector<Literal> parse_clause_lits()
  {
    std::vector<Literal> lits;
    const Token & t0 = peek();
    if (eat_word("true"))
      fail(DiagKind::Syntax, t0.line, t0.col, "tautological clause");
    if (eat_word("false")) return lits;  // empty disjunction

    std::vector<Literal> first{parse_atom()};
    if (eat_punct("&&")) {
      // antecedent conjunction: a1 && a2 ... => consequent
      first.push_back(parse_atom());
      while (eat_punct("&&")) first.push_back(parse_atom());
      expect_punct("=>", "after the antecedent conjunction");
      for (const Literal & l : first) lits.push_back(spec_.ctx.negate(l));
      append_consequent(lits);
      return lits;
    }
    if (eat_punct("=>")) {
      lits.push_back(spec_.ctx.negate(first[0]));
      append_consequent(lits);
      return lits;
    }
    lits = std::move(first);
    while (eat_punct("||")) lits.push_back(parse_atom());
    return lits;
  }

  void append_consequent(std::vector<Literal> & lits)
  {
    if (eat_word("false")) return;
    lits.push_back(parse_atom());
    while (eat_punct("||")) lits.push_back(parse_atom());
  }

  // --- atoms and terms

  Literal parse_atom()
  {
    if (is_word("true") || is_word("false"))
      fail(DiagKind::Syntax, peek().line, peek().col,
           "'" + peek().text + "' cannot appear inside a compound formula");
    if (eat_word("not")) return spec_.ctx.negate(parse_atom());
    PT lhs = parse_expr();
    const Token & op = peek();
    if (eat_word("divides")) {
      EV mod = elab(lhs);
      if (mod.term || !is_integer(mod.num) || mod.num <= 0)
        fail(DiagKind::SortCheck, lhs.line, lhs.col,
             "the divisibility modulus must be a positive integer numeral");
      TermId arg = materialize(elab(parse_expr_at(op)), spec_.ctx.int_sort(), op);
      if (spec_.ctx.sort_of(arg) != spec_.ctx.int_sort())
        fail(DiagKind::SortCheck, op.line, op.col, "divisibility applies to integer terms");
      return spec_.ctx.dvd_lit(num(mod.num), arg);
    }
    if (op.kind != Token::K::Punct ||
        (op.text != "<=" && op.text != "<" && op.text != ">=" && op.text != ">" &&
         op.text != "=" && op.text != "!="))
      fail(DiagKind::Syntax, op.line, op.col,
           "expected a relational operator (<=, <, >=, >, =, !=, divides), got '" + op.text +
               "'");
    ++pos_;
    PT rhs = parse_expr();

    EV a = elab(lhs), b = elab(rhs);
    TermId ta, tb;
    if (a.term && b.term) {
      if (spec_.ctx.sort_of(*a.term) != spec_.ctx.sort_of(*b.term))
        fail(DiagKind::SortCheck, op.line, op.col, "comparison between different sorts");
      ta = *a.term;
      tb = *b.term;
    } else if (a.term) {
      ta = *a.term;
      tb = materialize(b, spec_.ctx.sort_of(ta), op);
    } else if (b.term) {
      tb = *b.term;
      ta = materialize(a, spec_.ctx.sort_of(tb), op);
    } else {
      ta = materialize(a, spec_.ctx.int_sort(), op);
      tb = materialize(b, spec_.ctx.int_sort(), op);
    }

    bool arith = spec_.ctx.sort(spec_.ctx.sort_of(ta)).interp != SortInterp::Free;
    if (!arith && op.text != "=" && op.text != "!=")
      fail(DiagKind::SortCheck, op.line, op.col,
           "ordering comparisons need an arithmetic sort");

    if (op.text == "<=") return spec_.ctx.lit(Rel::Le, ta, tb);
    if (op.text == "<") return spec_.ctx.lit(Rel::Lt, ta, tb);
    if (op.text == ">=") return spec_.ctx.lit(Rel::Le, tb, ta);
    if (op.text == ">") return spec_.ctx.lit(Rel::Lt, tb, ta);
    if (op.text == "=") return spec_.ctx.lit(Rel::Eq, ta, tb);
    return spec_.ctx.lit(Rel::Eq, ta, tb, false);
  }

  PT parse_expr_at(const Token &) { return parse_expr(); }

  PT parse_expr()
  {
    PT e = parse_term();
    while (is_punct("+") || is_punct("-")) {
      bool plus = next().text == "+";
      PT rhs = parse_term();
      if (!plus) {
        PT neg;
        neg.k = PT::K::Neg;
        neg.line = rhs.line;
        neg.col = rhs.col;
        neg.kids.push_back(std::move(rhs));
        rhs = std::move(neg);
      }
      if (e.k == PT::K::Add) {
        e.kids.push_back(std::move(rhs));
      } else {
        PT sum;
        sum.k = PT::K::Add;
        sum.line = e.line;
        sum.col = e.col;
        sum.kids.push_back(std::move(e));
        sum.kids.push_back(std::move(rhs));
        e = std::move(sum);
      }
    }
    return e;
  }

  PT parse_term()
  {
    PT e = parse_factor();
    while (is_punct("*") || is_punct("/")) {
      bool mul = next().text == "*";
      PT rhs = parse_factor();
      PT node;
      node.k = mul ? PT::K::Mul : PT::K::Div;
      node.line = e.line;
      node.col = e.col;
      node.kids.push_back(std::move(e));
      node.kids.push_back(std::move(rhs));
      e = std::move(node);
    }
    return e;
  }

  PT parse_factor()
  {
    const Token & t = peek();
    PT e;
    e.line = t.line;
    e.col = t.col;
    if (t.kind == Token::K::Num) {
      e.k = PT::K::Num;
      e.num = next().num;
      return e;
    }
    if (eat_punct("-")) {
      e.k = PT::K::Neg;
      e.kids.push_back(parse_factor());
      return e;
    }
    if (eat_punct("(")) {
      e = parse_expr();
      expect_punct(")", "to close the parenthesized term");
      return e;
    }
    if (t.kind == Token::K::Ident) {
      std::string name = next().text;
      if (is_punct("(") || is_punct("[")) {
        bool bracket = next().text == "[";
        e.k = PT::K::App;
        e.name = name;
        const char * close = bracket ? "]" : ")";
        if (!(is_punct(close))) {
          e.kids.push_back(parse_expr());
          while (eat_punct(",")) e.kids.push_back(parse_expr());
        }
        expect_punct(close, "to close the argument list");
        return e;
      }
      e.k = PT::K::Name;
      e.name = name;
      return e;
    }
    fail(DiagKind::Syntax, t.line, t.col, "expected a term, got '" + t.text + "'");
  }

  // --- elaboration

  SymId resolve_func(const std::string & name, const PT & at)
  {
    SymId f = spec_.ctx.func_by_name(name);
    if (f == kNone)
      fail(DiagKind::Undeclared, at.line, at.col, "undeclared symbol '" + name + "'");
    if (spec_.ctx.func(f).is_primed && !allow_primed_) {
      if (in_guard_)
        fail(DiagKind::RoleConflict, at.line, at.col, "primed symbol in guard");
      fail(DiagKind::RoleConflict, at.line, at.col,
           "primed symbol '" + name + "' outside an update effect");
    }
    return f;
  }

  TermId materialize(const EV & v, SortId sort, const Token & at)
  {
    return materialize(v, sort, at.line, at.col);
  }
  TermId materialize(const EV & v, SortId sort, int line, int col)
  {
    if (v.term) {
      if (spec_.ctx.sort_of(*v.term) != sort)
        fail(DiagKind::SortCheck, line, col, "sort mismatch");
      return *v.term;
    }
    try {
      return spec_.ctx.numeral(v.num, sort);
    } catch (const SpecError & e) {
      fail(DiagKind::SortCheck, line, col, e.what());
    }
  }

  EV elab(const PT & p)
  {
    switch (p.k) {
      case PT::K::Num: return EV{std::nullopt, Rat(p.num)};
      case PT::K::Name: {
        for (auto it = binders_.rbegin(); it != binders_.rend(); ++it)
          if (it->first == p.name) return EV{it->second, 0};
        SymId f = resolve_func(p.name, p);
        if (!spec_.ctx.func(f).nullary())
          fail(DiagKind::SortCheck, p.line, p.col,
               "symbol '" + p.name + "' expects " +
                   std::to_string(spec_.ctx.func(f).args.size()) + " argument(s)");
        return EV{spec_.ctx.app(f), 0};
      }
      case PT::K::App: {
        SymId f = resolve_func(p.name, p);
        const FuncDecl & d = spec_.ctx.func(f);
        if (d.args.size() != p.kids.size())
          fail(DiagKind::SortCheck, p.line, p.col,
               "symbol '" + p.name + "' expects " + std::to_string(d.args.size()) +
                   " argument(s), got " + std::to_string(p.kids.size()));
        std::vector<TermId> args;
        for (size_t i = 0; i < p.kids.size(); ++i)
          args.push_back(materialize(elab(p.kids[i]), d.args[i], p.kids[i].line, p.kids[i].col));
        return EV{spec_.ctx.app(f, std::move(args)), 0};
      }
      case PT::K::Add: {
        std::vector<EV> kids;
        std::optional<SortId> sort;
        for (const PT & k : p.kids) {
          kids.push_back(elab(k));
          if (kids.back().term) {
            SortId s = spec_.ctx.sort_of(*kids.back().term);
            if (sort && *sort != s)
              fail(DiagKind::SortCheck, k.line, k.col, "sum mixes different sorts");
            sort = s;
          }
        }
        if (!sort) {
          Rat total = 0;
          for (const EV & k : kids) total += k.num;
          return EV{std::nullopt, total};
        }
        std::vector<TermId> terms;
        for (size_t i = 0; i < kids.size(); ++i)
          terms.push_back(materialize(kids[i], *sort, p.kids[i].line, p.kids[i].col));
        return EV{spec_.ctx.add(std::move(terms)), 0};
      }
      case PT::K::Neg: {
        EV k = elab(p.kids[0]);
        if (!k.term) return EV{std::nullopt, -k.num};
        try {
          return EV{spec_.ctx.mul(-1, *k.term), 0};
        } catch (const SpecError & e) {
          fail(DiagKind::SortCheck, p.line, p.col, e.what());
        }
      }
      case PT::K::Mul: {
        EV a = elab(p.kids[0]), b = elab(p.kids[1]);
        if (!a.term && !b.term) return EV{std::nullopt, a.num * b.num};
        if (a.term && b.term)
          fail(DiagKind::SortCheck, p.line, p.col, "nonlinear product of two symbols");
        const Rat & c = a.term ? b.num : a.num;
        TermId t = a.term ? *a.term : *b.term;
        try {
          return EV{spec_.ctx.mul(c, t), 0};
        } catch (const SpecError & e) {
          fail(DiagKind::SortCheck, p.line, p.col, e.what());
        }
      }
      case PT::K::Div: {
        EV a = elab(p.kids[0]), b = elab(p.kids[1]);
        if (b.term)
          fail(DiagKind::SortCheck, p.kids[1].line, p.kids[1].col,
               "division by a symbol is not supported");
        if (b.num == 0)
          fail(DiagKind::SortCheck, p.kids[1].line, p.kids[1].col, "division by zero");
        if (!a.term) return EV{std::nullopt, a.num / b.num};
        try {
          return EV{spec_.ctx.mul(Rat(1) / b.num, *a.term), 0};
        } catch (const SpecError & e) {
          fail(DiagKind::SortCheck, p.line, p.col, e.what());
        }
      }
    }
    fail(DiagKind::Syntax, p.line, p.col, "malformed term");
  }

  // --- options

  void parse_options()
  {
    expect_punct("{", "after 'options'");
    std::set<std::string> seen;
    while (!eat_punct("}")) {
      const Token & t = peek();
      std::string key = expect_ident("an option key");
      if (!seen.insert(key).second)
        fail(DiagKind::RoleConflict, t.line, t.col, "option '" + key + "' repeated");
      if (key == "keep") {
        do
          spec_.options.keep.push_back(expect_declared_name());
        while (eat_punct(","));
      } else if (key == "eliminate") {
        do {
          EliminateSpec e;
          e.name = expect_declared_name();
          if (eat_punct("(")) {
            expect_punct("*", "inside f(*)");
            expect_punct(")", "after f(*");
            e.star = true;
          }
          spec_.options.eliminate.push_back(std::move(e));
        } while (eat_punct(","));
      } else if (key == "max_iters") {
        Int n = expect_num("an iteration bound");
        if (n <= 0)
          fail(DiagKind::Syntax, t.line, t.col, "max_iters must be positive");
        spec_.options.max_iters = static_cast<int>(n);
      } else if (key == "mode") {
        std::string m = expect_ident("'naive' or 'refined'");
        if (m == "naive")
          spec_.options.mode = LoopMode::Naive;
        else if (m == "refined")
          spec_.options.mode = LoopMode::Refined;
        else
          fail(DiagKind::Syntax, t.line, t.col, "expected 'naive' or 'refined', got '" + m + "'");
      } else if (key == "apf_guard") {
        std::string m = expect_ident("'on' or 'off'");
        if (m == "on")
          spec_.options.apf_guard = true;
        else if (m == "off")
          spec_.options.apf_guard = false;
        else
          fail(DiagKind::Syntax, t.line, t.col, "expected 'on' or 'off', got '" + m + "'");
      } else {
        fail(DiagKind::Syntax, t.line, t.col, "unknown option '" + key + "'");
      }
    }
  }

  std::string expect_declared_name()
  {
    const Token & t = peek();
    std::string name = expect_ident("a symbol name");
    if (spec_.ctx.func_by_name(name) == kNone)
      fail(DiagKind::Undeclared, t.line, t.col, "undeclared symbol '" + name + "'");
    return name;
  }

  // --- post-parse analysis

  void scan_sorts(TermId t, bool & has_int, bool & has_real)
  {
    const TermNode & n = spec_.ctx.term(t);
    switch (spec_.ctx.sort(n.sort).interp) {
      case SortInterp::Int: has_int = true; break;
      case SortInterp::Real: has_real = true; break;
      case SortInterp::Free: break;
    }
    for (TermId k : n.kids) scan_sorts(k, has_int, has_real);
  }

  void finalize()
  {
    bool has_int = false, has_real = false;
    for (SymId f = 0; f < spec_.ctx.num_funcs(); ++f) {
      const FuncDecl & d = spec_.ctx.func(f);
      std::vector<SortId> all = d.args;
      all.push_back(d.result);
      for (SortId s : all) {
        if (spec_.ctx.sort(s).interp == SortInterp::Int) has_int = true;
        if (spec_.ctx.sort(s).interp == SortInterp::Real) has_real = true;
      }
    }
    auto scan_lit = [&](const Literal & l) {
      scan_sorts(l.lhs, has_int, has_real);
      if (!l.dvd && l.rhs != kNone) scan_sorts(l.rhs, has_int, has_real);
    };
    for (const TheoryLevel & lv : spec_.levels)
      for (const Clause & c : lv.clauses)
        for (const Literal & l : c.lits) scan_lit(l);
    for (const Clause & c : spec_.init)
      for (const Literal & l : c.lits) scan_lit(l);
    for (const Clause & c : spec_.property)
      for (const Literal & l : c.lits) scan_lit(l);
    for (const UpdateSpec & u : spec_.updates)
      for (const UpdateCase & c : u.cases) {
        for (const Literal & l : c.guard) scan_lit(l);
        for (const Literal & l : c.effect) scan_lit(l);
      }
    spec_.base = has_int && has_real ? BaseTheory::Mixed
                 : has_real          ? BaseTheory::Lra
                                     : BaseTheory::Lia;

    std::set<SymId> seen;
    for (TheoryLevel & lv : spec_.levels) {
      std::set<SymId> here;
      for (const Clause & c : lv.clauses)
        for (const Literal & l : c.lits) {
          collect_syms(spec_.ctx, l.lhs, here);
          if (!l.dvd && l.rhs != kNone) collect_syms(spec_.ctx, l.rhs, here);
        }
      for (SymId f : here)
        if (!spec_.ctx.func(f).nullary() && seen.insert(f).second)
          lv.new_syms.push_back(f);
      lv.locality = check_locality_class(spec_.ctx, lv);
    }
  }
};

}  // namespace

ParseResult parse_spec(const std::string & text)
{
  try {
    Parser parser(lex(text));
    ParseResult r = parser.run();
    if (!parser.version_failure_.empty()) {
      r.spec.reset();
      r.diags = std::move(parser.version_failure_);
    }
    return r;
  } catch (ParseAbort & a) {  // lexical failure
    ParseResult r;
    r.diags.push_back(std::move(a.d));
    return r;
  }
}

ParseResult parse_spec_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in.good()) {
    ParseResult r;
    r.diags.push_back(Diagnostic{DiagKind::Lexical, 0, 0, "cannot open '" + path + "'"});
    return r;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

// ===========================================================================
// rendering
// ===========================================================================

namespace {

std::string sort_name_tcs(const Ctx & ctx, SortId s)
{
  switch (ctx.sort(s).interp) {
    case SortInterp::Int: return "int";
    case SortInterp::Real: return "real";
    case SortInterp::Free: return ctx.sort(s).name;
  }
  return "?";
}

std::string lit_tcs(const Ctx & ctx, const Literal & l)
{
  if (l.dvd) {
    std::string core = l.modulus.str() + " divides " + ctx.show(l.lhs);
    return l.pos ? core : "not " + core;
  }
  if (l.rel == Rel::Eq)
    return ctx.show(l.lhs) + (l.pos ? " = " : " != ") + ctx.show(l.rhs);
  return ctx.show(l.lhs) + (l.rel == Rel::Le ? " <= " : " < ") + ctx.show(l.rhs);
}

std::string binders_tcs(const Ctx & ctx, const std::set<TermId> & vars)
{
  std::vector<TermId> sorted(vars.begin(), vars.end());
  std::sort(sorted.begin(), sorted.end(), [&](TermId a, TermId b) {
    return ctx.var_name(a) != ctx.var_name(b) ? ctx.var_name(a) < ctx.var_name(b) : a < b;
  });
  std::string out = "forall ";
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (i) out += ", ";
    out += ctx.var_name(sorted[i]) + " : " + sort_name_tcs(ctx, ctx.sort_of(sorted[i]));
  }
  return out + " . ";
}

std::string clause_tcs(const Ctx & ctx, const Clause & c)
{
  std::string out;
  std::set<TermId> vars = vars_of(ctx, c);
  if (!vars.empty()) out += binders_tcs(ctx, vars);
  if (c.lits.empty()) return out + "false";
  for (size_t i = 0; i < c.lits.size(); ++i) {
    if (i) out += " || ";
    out += lit_tcs(ctx, c.lits[i]);
  }
  return out;
}

std::string conj_tcs(const Ctx & ctx, const Cube & c, const char * if_empty)
{
  if (c.empty()) return if_empty;
  std::string out;
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) out += " && ";
    out += lit_tcs(ctx, c[i]);
  }
  return out;
}

}  // namespace

std::string render_spec(const ProblemSpec & spec)
{
  const Ctx & ctx = spec.ctx;
  std::string out = "version 1\n";
  if (!spec.name.empty()) out += "\nsystem " + spec.name + "\n";

  if (!spec.free_sorts.empty()) {
    out += "\nsorts {\n";
    for (const std::string & s : spec.free_sorts) out += "  " + s + "\n";
    out += "}\n";
  }

  out += "\nsignature {\n";
  for (SymId f = 0; f < ctx.num_funcs(); ++f) {
    const FuncDecl & d = ctx.func(f);
    if (d.is_primed || d.is_skolem || d.is_def) continue;
    out += d.is_param ? "  param " : d.is_state ? "  state " : "  func ";
    out += d.name + " : ";
    if (!d.args.empty()) {
      out += "(";
      for (size_t i = 0; i < d.args.size(); ++i)
        out += std::string(i ? ", " : "") + sort_name_tcs(ctx, d.args[i]);
      out += ") -> ";
    }
    out += sort_name_tcs(ctx, d.result) + "\n";
  }
  out += "}\n";

  for (const TheoryLevel & lv : spec.levels) {
    out += "\ntheory level " + lv.name + " closure " + to_string(lv.closure) + " {\n";
    for (const Clause & c : lv.clauses) out += "  axiom " + clause_tcs(ctx, c) + "\n";
    out += "}\n";
  }

  if (!spec.init.empty()) {
    out += "\ninit {\n";
    for (const Clause & c : spec.init) out += "  clause " + clause_tcs(ctx, c) + "\n";
    out += "}\n";
  }

  for (const UpdateSpec & u : spec.updates) {
    out += "\nupdate " + ctx.func(u.function).name + " {\n";
    for (const UpdateCase & c : u.cases) {
      out += "  case ";
      if (!c.vars.empty()) {
        out += "forall ";
        for (size_t i = 0; i < c.vars.size(); ++i) {
          if (i) out += ", ";
          out += ctx.var_name(c.vars[i]) + " : " + sort_name_tcs(ctx, ctx.sort_of(c.vars[i]));
        }
        out += " . ";
      }
      out += conj_tcs(ctx, c.guard, "true");
      out += " => ";
      out += conj_tcs(ctx, c.effect, "true");
      out += "\n";
    }
    out += "}\n";
  }

  if (!spec.property.empty()) {
    out += "\nproperty {\n";
    for (const Clause & c : spec.property) out += "  clause " + clause_tcs(ctx, c) + "\n";
    out += "}\n";
  }

  const SpecOptions & o = spec.options;
  bool any = !o.keep.empty() || !o.eliminate.empty() || o.max_iters || o.mode || o.apf_guard;
  if (any) {
    out += "\noptions {\n";
    if (!o.keep.empty()) {
      out += "  keep ";
      for (size_t i = 0; i < o.keep.size(); ++i)
        out += std::string(i ? ", " : "") + o.keep[i];
      out += "\n";
    }
    if (!o.eliminate.empty()) {
      out += "  eliminate ";
      for (size_t i = 0; i < o.eliminate.size(); ++i) {
        if (i) out += ", ";
        out += o.eliminate[i].name + (o.eliminate[i].star ? "(*)" : "");
      }
      out += "\n";
    }
    if (o.max_iters) out += "  max_iters " + std::to_string(*o.max_iters) + "\n";
    if (o.mode)
      out += std::string("  mode ") + (*o.mode == LoopMode::Naive ? "naive" : "refined") + "\n";
    if (o.apf_guard) out += std::string("  apf_guard ") + (*o.apf_guard ? "on" : "off") + "\n";
    out += "}\n";
  }
  return out;
}

std::string describe_spec(const ProblemSpec & spec)
{
  const Ctx & ctx = spec.ctx;
  std::string out;
  out += "system: " + (spec.name.empty() ? "(unnamed)" : spec.name) + "\n";
  out += "base: " + std::string(to_string(spec.base)) + "\n";
  for (SymId f = 0; f < ctx.num_funcs(); ++f) {
    const FuncDecl & d = ctx.func(f);
    if (d.is_primed || d.is_skolem || d.is_def) continue;
    out += std::string("  ") + (d.is_param ? "param" : d.is_state ? "state" : "func") + " " +
           d.name + "/" + std::to_string(d.args.size()) + "\n";
  }
  for (const TheoryLevel & lv : spec.levels) {
    out += "level " + lv.name + " closure " + to_string(lv.closure) + " locality " +
           to_string(lv.locality) + " syms";
    for (SymId f : lv.new_syms) out += " " + ctx.func(f).name;
    out += "\n";
    for (const Clause & c : lv.clauses) out += "  " + clause_tcs(ctx, c) + "\n";
  }
  out += "init:\n";
  for (const Clause & c : spec.init) out += "  " + clause_tcs(ctx, c) + "\n";
  for (const UpdateSpec & u : spec.updates) {
    out += "update " + ctx.func(u.function).name + " (" + std::to_string(u.cases.size()) +
           " cases):\n";
    for (const UpdateCase & c : u.cases)
      out += "  [" + conj_tcs(ctx, c.guard, "true") + "] -> " +
             conj_tcs(ctx, c.effect, "true") + "\n";
  }
  out += "property:\n";
  for (const Clause & c : spec.property) out += "  " + clause_tcs(ctx, c) + "\n";
  out += "options:";
  for (const std::string & k : spec.options.keep) out += " keep=" + k;
  for (const EliminateSpec & e : spec.options.eliminate)
    out += " eliminate=" + e.name + (e.star ? "(*)" : "");
  if (spec.options.max_iters) out += " max_iters=" + std::to_string(*spec.options.max_iters);
  if (spec.options.mode)
    out += std::string(" mode=") + (*spec.options.mode == LoopMode::Naive ? "naive" : "refined");
  if (spec.options.apf_guard)
    out += std::string(" apf_guard=") + (*spec.options.apf_guard ? "on" : "off");
  out += "\n";
  return out;
}

// ===========================================================================
// locality classification
// ===========================================================================

namespace {

void collect_lit_syms(const Ctx & ctx, const Literal & l, std::set<SymId> & out)
{
  collect_syms(ctx, l.lhs, out);
  if (!l.dvd && l.rhs != kNone) collect_syms(ctx, l.rhs, out);
}

// true if an application of a symbol in `heads` occurs strictly inside
// another such application
bool has_nested_app(const Ctx & ctx, TermId t, const std::set<SymId> & heads, bool inside)
{
  const TermNode & n = ctx.term(t);
  bool here = n.kind == TermKind::App && heads.count(n.sym) && !n.kids.empty();
  if (here && inside) return true;
  for (TermId k : n.kids)
    if (has_nested_app(ctx, k, heads, inside || here)) return true;
  return false;
}

bool lit_each_side(const Ctx & ctx, const Literal & l, bool (*pred)(const Ctx &, TermId))
{
  if (!pred(ctx, l.lhs)) return false;
  return l.dvd || l.rhs == kNone || pred(ctx, l.rhs);
}

bool is_var(const Ctx & ctx, TermId t) { return ctx.term(t).kind == TermKind::Var; }

bool is_ground(const Ctx & ctx, TermId t)
{
  std::set<TermId> vars;
  collect_vars(ctx, t, vars);
  return vars.empty();
}

// one clause of the monotonicity shape: an ordering over two variables and
// an ordering over the same unary symbol applied to those variables
bool monotone_clause(const Ctx & ctx, const Clause & c, const std::set<SymId> & ext)
{
  if (c.lits.size() != 2) return false;
  for (int which = 0; which < 2; ++which) {
    const Literal & guard = c.lits[which];
    const Literal & body = c.lits[1 - which];
    if (!guard.pos || guard.dvd || guard.rel == Rel::Eq) continue;
    if (!is_var(ctx, guard.lhs) || !is_var(ctx, guard.rhs)) continue;
    if (!body.pos || body.dvd || body.rel == Rel::Eq) continue;
    const TermNode & a = ctx.term(body.lhs);
    const TermNode & b = ctx.term(body.rhs);
    if (a.kind != TermKind::App || b.kind != TermKind::App) continue;
    if (a.sym != b.sym || !ext.count(a.sym)) continue;
    if (a.kids.size() != 1 || b.kids.size() != 1) continue;
    TermId u = a.kids[0], v = b.kids[0];
    if (u == v || !is_var(ctx, u) || !is_var(ctx, v)) continue;
    bool same = (guard.lhs == u && guard.rhs == v) || (guard.lhs == v && guard.rhs == u);
    if (same) return true;
  }
  return false;
}

// one clause of the guarded-definition shape: some symbol occurs in exactly
// one positive ordering/equality literal, alone on one side, applied to
// distinct variables
bool case_def_clause(const Ctx & ctx, const Clause & c, const std::set<SymId> & ext)
{
  for (SymId s : ext) {
    size_t mentions = 0;
    const Literal * hit = nullptr;
    for (const Literal & l : c.lits) {
      std::set<SymId> syms;
      collect_lit_syms(ctx, l, syms);
      if (syms.count(s)) {
        ++mentions;
        hit = &l;
      }
    }
    if (mentions != 1 || !hit->pos || hit->dvd) continue;
    for (int side = 0; side < 2; ++side) {
      TermId own = side ? hit->rhs : hit->lhs;
      TermId other = side ? hit->lhs : hit->rhs;
      const TermNode & n = ctx.term(own);
      if (n.kind != TermKind::App || n.sym != s) continue;
      if (contains_sym(ctx, other, s)) continue;
      bool vars_ok = true;
      std::set<TermId> distinct;
      for (TermId k : n.kids) {
        if (!is_var(ctx, k) || !distinct.insert(k).second) vars_ok = false;
      }
      if (vars_ok) return true;
    }
  }
  return false;
}

// array-property shape: reads apply the extension symbols to variables or
// ground index terms, never nested; literals without reads are either ground
// or positive-guard material (orderings / disequalities); variables occur in
// read-bearing literals only inside the reads themselves
bool apf_term_ok(const Ctx & ctx, TermId t, const std::set<SymId> & ext, bool & saw_read)
{
  const TermNode & n = ctx.term(t);
  if (n.kind == TermKind::App && ext.count(n.sym) && !n.kids.empty()) {
    saw_read = true;
    for (TermId k : n.kids) {
      if (is_var(ctx, k)) continue;
      if (!is_ground(ctx, k)) return false;               // compound var index
      std::set<SymId> inner;
      collect_syms(ctx, k, inner);
      for (SymId f : inner)
        if (!ctx.func(f).nullary() && ext.count(f)) return false;  // nested read
    }
    return true;
  }
  if (n.kind == TermKind::Var) return false;  // variable outside a read
  for (TermId k : n.kids)
    if (!apf_term_ok(ctx, k, ext, saw_read)) return false;
  return true;
}

bool apf_clause(const Ctx & ctx, const Clause & c, const std::set<SymId> & ext)
{
  for (const Literal & l : c.lits) {
    std::set<SymId> syms;
    collect_lit_syms(ctx, l, syms);
    bool has_read = false;
    for (SymId s : syms)
      if (ext.count(s) && !ctx.func(s).nullary()) has_read = true;
    if (!has_read) {
      bool ground = lit_each_side(ctx, l, is_ground);
      if (ground) continue;
      if (l.dvd) return false;
      // negated guard material: any ordering, or a disequality
      if (l.rel == Rel::Eq && l.pos) return false;
      continue;
    }
    bool saw = false;
    if (!apf_term_ok(ctx, l.lhs, ext, saw)) return false;
    if (!l.dvd && l.rhs != kNone && !apf_term_ok(ctx, l.rhs, ext, saw)) return false;
  }
  return true;
}

}  // namespace

LocalityClass check_locality_class(const Ctx & ctx, const TheoryLevel & level)
{
  if (level.clauses.empty()) return LocalityClass::FreeFunctions;

  std::set<SymId> ext;
  for (const Clause & c : level.clauses)
    for (const Literal & l : c.lits) {
      std::set<SymId> syms;
      collect_lit_syms(ctx, l, syms);
      for (SymId s : syms)
        if (!ctx.func(s).nullary()) ext.insert(s);
    }
  if (ext.empty()) return LocalityClass::FreeFunctions;  // constraints on constants only

  for (const Clause & c : level.clauses)
    for (const Literal & l : c.lits) {
      if (has_nested_app(ctx, l.lhs, ext, false)) return LocalityClass::Unverified;
      if (!l.dvd && l.rhs != kNone && has_nested_app(ctx, l.rhs, ext, false))
        return LocalityClass::Unverified;
    }

  auto all = [&](bool (*pred)(const Ctx &, const Clause &, const std::set<SymId> &)) {
    for (const Clause & c : level.clauses)
      if (!pred(ctx, c, ext)) return false;
    return true;
  };

  bool flat = true;
  for (const Clause & c : level.clauses)
    if (!is_flat(ctx, c, ext)) flat = false;

  // a declared apf closure prefers the array-property reading (a sortedness
  // axiom is also a monotonicity axiom; the closure kind disambiguates)
  if (level.closure == Closure::Apf && all(apf_clause)) return LocalityClass::Apf;
  if (flat && all(monotone_clause)) return LocalityClass::Monotone;
  if (flat && all(case_def_clause)) return LocalityClass::CaseDefinition;
  if (all(apf_clause)) return LocalityClass::Apf;
  return LocalityClass::Unverified;
}

// ===========================================================================
// signature-condition validation
// ===========================================================================

bool A3Report::all_pass() const
{
  for (const A3Obligation & o : obligations)
    if (o.status != A3Status::Pass) return false;
  return true;
}

bool A3Report::exhaustiveness_ok() const
{
  for (const A3Obligation & o : obligations)
    if (o.kind == A3Obligation::Kind::Exhaustiveness && o.status == A3Status::Fail)
      return false;
  return true;
}

namespace {

A3Status status_of(const SolverVerdict & v, std::string & detail)
{
  if (v.unsat()) return A3Status::Pass;
  if (v.sat()) return A3Status::Fail;
  detail = std::string("solver: ") + to_string(v.status);
  return A3Status::Unknown;
}

}  // namespace

A3Report validate_a3(const UpdateSpec & u, const ProblemSpec & spec, SmtClient & client)
{
  A3Report rep;
  rep.function = u.function;
  Ctx ctx = spec.ctx;  // scratch copy: witness constants stay out of the spec

  std::vector<const ClauseSet *> levels;
  for (const TheoryLevel & lv : spec.levels) levels.push_back(&lv.clauses);

  // shared witness constants for the case variables (binder lists agree
  // across cases by construction)
  Subst ground;
  for (const UpdateCase & c : u.cases) {
    if (c.vars.empty()) continue;
    for (TermId v : c.vars) {
      FuncDecl d;
      d.name = "w_" + ctx.var_name(v);
      d.result = ctx.sort_of(v);
      d.is_skolem = true;
      ground.emplace(v, ctx.app(ctx.fresh_func(d.name, d)));
    }
    break;
  }
  auto grounded = [&](const Cube & c) { return replace_cube(ctx, c, ground); };

  size_t n = u.cases.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      A3Obligation o;
      o.kind = A3Obligation::Kind::Exclusivity;
      o.case_i = i;
      o.case_j = j;
      ScriptBuilder sb(ctx);
      for (const ClauseSet * cs : levels) sb.assert_clauses(*cs);
      sb.assert_cube(grounded(u.cases[i].guard));
      sb.assert_cube(grounded(u.cases[j].guard));
      o.status = status_of(client.check(sb), o.detail);
      rep.obligations.push_back(std::move(o));
    }
  }

  {
    A3Obligation o;
    o.kind = A3Obligation::Kind::Exhaustiveness;
    ScriptBuilder sb(ctx);
    for (const ClauseSet * cs : levels) sb.assert_clauses(*cs);
    for (const UpdateCase & c : u.cases) sb.assert_clause(negate_cube(ctx, grounded(c.guard)));
    o.status = status_of(client.check(sb), o.detail);
    rep.obligations.push_back(std::move(o));
  }

  SymId prime = ctx.func(u.function).partner;
  SortId value_sort = ctx.func(u.function).result;
  for (size_t i = 0; i < n; ++i) {
    A3Obligation o;
    o.kind = A3Obligation::Kind::EffectSat;
    o.case_i = i;
    Cube guard = grounded(u.cases[i].guard);
    Cube effect = grounded(u.cases[i].effect);

    std::set<TermId> targets;
    collect_apps_of(ctx, effect, {prime}, targets);
    if (targets.empty()) {
      o.status = A3Status::Pass;
      o.detail = "effect has no primed occurrence after grounding";
      rep.obligations.push_back(std::move(o));
      continue;
    }

    if (ctx.sort(value_sort).interp == SortInterp::Free) {
      // no arithmetic elimination on an uninterpreted value sort: quantify
      // the negated effect over fresh variables standing for the new values
      Subst to_var;
      size_t k = 0;
      for (TermId t : targets)
        to_var.emplace(t, ctx.var("y" + std::to_string(k++), ctx.sort_of(t)));
      Cube with_vars = replace_cube(ctx, effect, to_var);
      ScriptBuilder sb(ctx);
      for (const ClauseSet * cs : levels) sb.assert_clauses(*cs);
      sb.assert_cube(guard);
      sb.assert_clause(negate_cube(ctx, with_vars));
      o.status = status_of(client.check(sb), o.detail);
      rep.obligations.push_back(std::move(o));
      continue;
    }

    try {
      std::vector<Cube> exists = eliminate_cube(ctx, effect, targets);
      ScriptBuilder sb(ctx);
      for (const ClauseSet * cs : levels) sb.assert_clauses(*cs);
      sb.assert_cube(guard);
      for (const Cube & d : exists) sb.assert_clause(negate_cube(ctx, d));
      o.status = status_of(client.check(sb), o.detail);
    } catch (const ContractError & e) {
      o.status = A3Status::Unknown;
      o.detail = std::string("elimination refused: ") + e.what();
    }
    rep.obligations.push_back(std::move(o));
  }

  return rep;
}

}  // namespace invsyn
