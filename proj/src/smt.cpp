/* SPDX-License-Identifier: Apache-2.0 */

#include "invsyn/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstring>

#include "invsyn/transforms.hpp"

namespace invsyn {

const char * to_string(SolverStatus s)
{
  switch (s) {
    case SolverStatus::Sat: return "sat";
    case SolverStatus::Unsat: return "unsat";
    case SolverStatus::Unknown: return "unknown";
    case SolverStatus::Timeout: return "timeout";
    case SolverStatus::ProcessError: return "process-error";
  }
  return "?";
}

SolverConfig SolverConfig::from_env()
{
  SolverConfig cfg;
  if (const char * cmd = std::getenv("INVSYN_SOLVER")) cfg.command = cmd;
  const char * shim = std::getenv("INVSYN_SOLVER_SHIM");
  cfg.args = {shim ? shim : "tools/solver/z3shim.mjs"};
  return cfg;
}

// ===========================================================================
// script rendering
// ===========================================================================

namespace {

const std::set<std::string> kReserved = {
    "true",   "false", "and", "or",  "not",    "ite",    "let",   "as",     "forall",
    "exists", "Int",   "Real", "Bool", "to_real", "to_int", "div",  "mod",    "abs",
    "select", "store", "assert", "+",  "-",      "*",      "/",    "=",      "<",
    "<=",     ">",     ">=",
};

bool simple_symbol(const std::string & s)
{
  if (s.empty() || kReserved.count(s)) return false;
  auto ok = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           std::strchr("~!@$%^&*_-+=<>.?/", c) != nullptr;
  };
  if (s[0] >= '0' && s[0] <= '9') return false;
  for (char c : s)
    if (!ok(c)) return false;
  return true;
}

std::string smt_name(const std::string & s)
{
  if (simple_symbol(s)) return s;
  if (s.find('|') != std::string::npos || s.find('\\') != std::string::npos)
    throw ContractError("symbol name not expressible in SMT-LIB: " + s);
  return "|" + s + "|";
}

struct RenderState {
  const Ctx & ctx;
  bool mixed = false;           // Int and Real both present: wrap Real numerals
  size_t aux_counter = 0;       // fresh quotient/remainder constants
  std::vector<std::string> aux_decls;
  bool in_binder = false;       // under a quantifier: inline exists for dvd
};

std::string smt_sort(const Ctx & ctx, SortId s)
{
  switch (ctx.sort(s).interp) {
    case SortInterp::Int: return "Int";
    case SortInterp::Real: return "Real";
    case SortInterp::Free: return smt_name(ctx.sort(s).name);
  }
  return "?";
}

std::string int_num(const Int & v)
{
  if (v < 0) {
    Int a = -v;
    return "(- " + a.str() + ")";
  }
  return v.str();
}

std::string smt_num(const RenderState & st, const Rat & v, SortId sort)
{
  bool real = st.ctx.sort(sort).interp == SortInterp::Real;
  Rat a = v < 0 ? Rat(-v) : v;
  std::string body;
  if (!real) {
    body = num(a).str();
  } else {
    auto wrap = [&](const Int & n) {
      return st.mixed ? "(to_real " + n.str() + ")" : n.str();
    };
    body = den(a) == 1 ? wrap(num(a)) : "(/ " + wrap(num(a)) + " " + wrap(den(a)) + ")";
  }
  return v < 0 ? "(- " + body + ")" : body;
}

std::string smt_term(RenderState & st, TermId t)
{
  const TermNode & n = st.ctx.term(t);
  switch (n.kind) {
    case TermKind::Var: return smt_name(st.ctx.var_name(t));
    case TermKind::Num: return smt_num(st, st.ctx.num_value(n.num), n.sort);
    case TermKind::App: {
      std::string s = smt_name(st.ctx.func(n.sym).name);
      if (n.kids.empty()) return s;
      std::string out = "(" + s;
      for (TermId k : n.kids) out += " " + smt_term(st, k);
      return out + ")";
    }
    case TermKind::Add: {
      std::string out = "(+";
      for (TermId k : n.kids) out += " " + smt_term(st, k);
      return out + ")";
    }
    case TermKind::Mul:
      return "(* " + smt_num(st, st.ctx.num_value(n.num), n.sort) + " " +
             smt_term(st, n.kids[0]) + ")";
  }
  return "?";
}

std::string smt_lit(RenderState & st, const Literal & l)
{
  if (l.dvd) {
    if (l.modulus == 1) return l.pos ? "true" : "false";
    std::string arg = smt_term(st, l.lhs);
    std::string k = int_num(l.modulus);
    if (st.in_binder) {
      // under a quantifier fresh constants would change meaning; nest instead
      std::string body = "(exists ((%q Int)) (= " + arg + " (* " + k + " %q)))";
      return l.pos ? body : "(not " + body + ")";
    }
    if (l.pos) {
      std::string q = "%q" + std::to_string(st.aux_counter++);
      st.aux_decls.push_back("(declare-fun " + q + " () Int)");
      return "(= " + arg + " (* " + k + " " + q + "))";
    }
    std::string q = "%q" + std::to_string(st.aux_counter);
    std::string r = "%r" + std::to_string(st.aux_counter++);
    st.aux_decls.push_back("(declare-fun " + q + " () Int)");
    st.aux_decls.push_back("(declare-fun " + r + " () Int)");
    return "(and (= " + arg + " (+ (* " + k + " " + q + ") " + r + ")) (<= 1 " + r +
           ") (<= " + r + " " + int_num(l.modulus - 1) + "))";
  }
  std::string a = smt_term(st, l.lhs), b = smt_term(st, l.rhs);
  std::string body;
  switch (l.rel) {
    case Rel::Eq: body = "(= " + a + " " + b + ")"; break;
    case Rel::Le: body = "(<= " + a + " " + b + ")"; break;
    case Rel::Lt: body = "(< " + a + " " + b + ")"; break;
  }
  return l.pos ? body : "(not " + body + ")";
}

std::string smt_cube(RenderState & st, const Cube & c)
{
  if (c.empty()) return "true";
  if (c.size() == 1) return smt_lit(st, c[0]);
  std::string out = "(and";
  for (const Literal & l : c) out += " " + smt_lit(st, l);
  return out + ")";
}

std::string smt_disjunction(RenderState & st, const std::vector<Literal> & lits)
{
  if (lits.empty()) return "false";
  if (lits.size() == 1) return smt_lit(st, lits[0]);
  std::string out = "(or";
  for (const Literal & l : lits) out += " " + smt_lit(st, l);
  return out + ")";
}

std::string smt_clause(RenderState & st, const Clause & c)
{
  std::set<TermId> var_set = vars_of(st.ctx, c);
  if (var_set.empty()) return smt_disjunction(st, c.lits);
  std::vector<TermId> vars(var_set.begin(), var_set.end());
  std::sort(vars.begin(), vars.end(), [&](TermId a, TermId b) {
    const std::string & na = st.ctx.var_name(a);
    const std::string & nb = st.ctx.var_name(b);
    return na != nb ? na < nb : a < b;
  });
  std::string out = "(forall (";
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i) out += " ";
    out += "(" + smt_name(st.ctx.var_name(vars[i])) + " " +
           smt_sort(st.ctx, st.ctx.sort_of(vars[i])) + ")";
  }
  out += ") ";
  bool saved = st.in_binder;
  st.in_binder = true;
  out += smt_disjunction(st, c.lits);
  st.in_binder = saved;
  return out + ")";
}

// occurrence scan for declarations and logic choice

struct Usage {
  std::set<SymId> syms;
  std::set<SortId> sorts;  // sorts of terms, vars and function signatures
  bool has_dvd = false;
  std::set<TermId> seen;
};

void scan_term(const Ctx & ctx, TermId t, Usage & u)
{
  if (!u.seen.insert(t).second) return;
  const TermNode & n = ctx.term(t);
  u.sorts.insert(n.sort);
  if (n.kind == TermKind::App) {
    u.syms.insert(n.sym);
    const FuncDecl & d = ctx.func(n.sym);
    u.sorts.insert(d.result);
    for (SortId s : d.args) u.sorts.insert(s);
  }
  for (TermId k : n.kids) scan_term(ctx, k, u);
}

void scan_lit(const Ctx & ctx, const Literal & l, Usage & u)
{
  scan_term(ctx, l.lhs, u);
  if (!l.dvd && l.rhs != kNone) scan_term(ctx, l.rhs, u);
  if (l.dvd) u.has_dvd = true;
}

}  // namespace

void ScriptBuilder::assert_lit(const Literal & l) { assert_cube(Cube{l}); }

void ScriptBuilder::assert_cube(const Cube & c)
{
  Assertion a;
  a.kind = Assertion::Kind::Cube;
  a.cube = c;
  asserts_.push_back(std::move(a));
}

void ScriptBuilder::assert_clause(const Clause & c)
{
  Assertion a;
  a.kind = Assertion::Kind::Clause;
  a.clause = c;
  if (!vars_of(ctx_, c).empty()) quantified_ = true;
  asserts_.push_back(std::move(a));
}

void ScriptBuilder::assert_clauses(const ClauseSet & cs)
{
  for (const Clause & c : cs) assert_clause(c);
}

void ScriptBuilder::assert_dnf(const std::vector<Cube> & dnf)
{
  Assertion a;
  a.kind = Assertion::Kind::Dnf;
  a.dnf = dnf;
  asserts_.push_back(std::move(a));
}

void ScriptBuilder::assert_ground(const GroundConj & g) { assert_cube(g.lits); }

std::string ScriptBuilder::render(bool want_model) const
{
  Usage u;
  for (const Assertion & a : asserts_) {
    switch (a.kind) {
      case Assertion::Kind::Cube:
        for (const Literal & l : a.cube) scan_lit(ctx_, l, u);
        break;
      case Assertion::Kind::Clause:
        for (const Literal & l : a.clause.lits) scan_lit(ctx_, l, u);
        break;
      case Assertion::Kind::Dnf:
        for (const Cube & c : a.dnf)
          for (const Literal & l : c) scan_lit(ctx_, l, u);
        break;
    }
  }

  bool has_int = u.has_dvd, has_real = false, has_free = false, has_fun = false;
  for (SortId s : u.sorts) {
    switch (ctx_.sort(s).interp) {
      case SortInterp::Int: has_int = true; break;
      case SortInterp::Real: has_real = true; break;
      case SortInterp::Free: has_free = true; break;
    }
  }
  for (SymId f : u.syms)
    if (!ctx_.func(f).nullary()) has_fun = true;

  RenderState st{ctx_, has_int && has_real, 0, {}, false};

  // assertion bodies first: they may add quotient constants
  std::vector<std::string> bodies;
  bodies.reserve(asserts_.size());
  for (const Assertion & a : asserts_) {
    switch (a.kind) {
      case Assertion::Kind::Cube: bodies.push_back(smt_cube(st, a.cube)); break;
      case Assertion::Kind::Clause: bodies.push_back(smt_clause(st, a.clause)); break;
      case Assertion::Kind::Dnf: {
        if (a.dnf.empty()) {
          bodies.push_back("false");
          break;
        }
        if (a.dnf.size() == 1) {
          bodies.push_back(smt_cube(st, a.dnf[0]));
          break;
        }
        std::string out = "(or";
        for (const Cube & c : a.dnf) out += " " + smt_cube(st, c);
        bodies.push_back(out + ")");
        break;
      }
    }
  }

  std::string logic = quantified_ ? "" : "QF_";
  if (has_free || has_fun) logic += "UF";
  logic += has_int && has_real ? "LIRA" : has_real ? "LRA" : "LIA";

  std::string out = "(set-logic " + logic + ")\n";
  for (SortId s = 0; s < ctx_.num_sorts(); ++s)
    if (u.sorts.count(s) && ctx_.sort(s).interp == SortInterp::Free)
      out += "(declare-sort " + smt_name(ctx_.sort(s).name) + " 0)\n";
  for (SymId f = 0; f < ctx_.num_funcs(); ++f) {
    if (!u.syms.count(f)) continue;
    const FuncDecl & d = ctx_.func(f);
    out += "(declare-fun " + smt_name(d.name) + " (";
    for (size_t i = 0; i < d.args.size(); ++i)
      out += std::string(i ? " " : "") + smt_sort(ctx_, d.args[i]);
    out += ") " + smt_sort(ctx_, d.result) + ")\n";
  }
  for (const std::string & d : st.aux_decls) out += d + "\n";
  for (const std::string & b : bodies) out += "(assert " + b + ")\n";
  out += "(check-sat)\n";
  if (want_model) out += "(get-model)\n";
  return out;
}

// ===========================================================================
// verdict parsing
// ===========================================================================

namespace {

std::vector<std::string> sexp_tokens(const std::string & s)
{
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '(' || c == ')') {
      out.emplace_back(1, c);
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '|') {
      size_t j = s.find('|', i + 1);
      if (j == std::string::npos) break;
      out.push_back(s.substr(i, j - i + 1));
      i = j + 1;
    } else if (c == '"') {
      size_t j = i + 1;
      while (j < s.size() && s[j] != '"') ++j;
      out.push_back(s.substr(i, j - i + 1));
      i = j + 1;
    } else {
      size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' &&
             s[j] != ')')
        ++j;
      out.push_back(s.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

// parses one value s-expression starting at pos; advances pos
std::optional<Rat> parse_value(const std::vector<std::string> & tk, size_t & pos,
                               std::string & text)
{
  if (pos >= tk.size()) return std::nullopt;
  const std::string t = tk[pos];
  if (t == "(") {
    size_t start = pos++;
    if (pos >= tk.size()) return std::nullopt;
    std::string op = tk[pos++];
    std::optional<Rat> result;
    if (op == "-") {
      std::string sub;
      auto v = parse_value(tk, pos, sub);
      if (v) result = -*v;
    } else if (op == "/") {
      std::string sa, sb;
      auto a = parse_value(tk, pos, sa);
      auto b = parse_value(tk, pos, sb);
      if (a && b && *b != 0) result = *a / *b;
    }
    // skip to the matching close paren
    int depth = 1;
    size_t scan = pos;
    for (; scan < tk.size() && depth > 0; ++scan) {
      if (tk[scan] == "(") ++depth;
      if (tk[scan] == ")") --depth;
    }
    pos = scan;
    std::string raw;
    for (size_t i = start; i < pos; ++i) raw += (raw.empty() ? "" : " ") + tk[i];
    text = raw;
    return result;
  }
  ++pos;
  text = t;
  // integer or decimal literal
  bool digits = !t.empty() && std::all_of(t.begin(), t.end(), [](char c) {
    return (c >= '0' && c <= '9') || c == '.';
  });
  if (!digits || t == ".") return std::nullopt;
  size_t dot = t.find('.');
  if (dot == std::string::npos) return Rat(Int(t));
  std::string whole = t.substr(0, dot), frac = t.substr(dot + 1);
  if (frac.empty()) frac = "0";
  Int scale = 1;
  for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
  return Rat(Int(whole.empty() ? "0" : whole) * scale + Int(frac), scale);
}

std::string strip_pipes(const std::string & s)
{
  if (s.size() >= 2 && s.front() == '|' && s.back() == '|') return s.substr(1, s.size() - 2);
  return s;
}

void parse_model(const std::string & text, std::map<std::string, ModelEntry> & model)
{
  std::vector<std::string> tk = sexp_tokens(text);
  for (size_t i = 0; i + 1 < tk.size(); ++i) {
    if (tk[i] != "define-fun") continue;
    std::string name = strip_pipes(tk[i + 1]);
    // only nullary constants: expect "( )" right after the name
    if (i + 3 >= tk.size() || tk[i + 2] != "(" || tk[i + 3] != ")") continue;
    size_t pos = i + 4;
    if (pos >= tk.size()) continue;
    ++pos;  // skip the result sort (a single atom for our scripts)
    ModelEntry e;
    e.value = parse_value(tk, pos, e.text);
    model.emplace(std::move(name), std::move(e));
  }
}

SolverVerdict parse_output(const std::string & out, bool expect_model)
{
  SolverVerdict v;
  v.raw = out;
  size_t pos = 0, status_end = std::string::npos;
  bool found = false;
  while (pos < out.size() && !found) {
    size_t eol = out.find('\n', pos);
    if (eol == std::string::npos) eol = out.size();
    std::string line = out.substr(pos, eol - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line == "sat") {
      v.status = SolverStatus::Sat;
      found = true;
    } else if (line == "unsat") {
      v.status = SolverStatus::Unsat;
      found = true;
    } else if (line == "unknown") {
      v.status = SolverStatus::Unknown;
      found = true;
    }
    status_end = eol;
    pos = eol + 1;
  }
  if (!found) {
    v.status = SolverStatus::ProcessError;
    return v;
  }
  if (v.status == SolverStatus::Sat && expect_model && status_end != std::string::npos)
    parse_model(out.substr(status_end), v.model);
  return v;
}

}  // namespace

// ===========================================================================
// process client
// ===========================================================================

namespace {

constexpr const char * kCheckSentinel = "@@CHECK@@\n";
constexpr const char * kDoneSentinel = "@@DONE@@\n";

void ignore_sigpipe()
{
  static bool done = false;
  if (!done) {
    ::signal(SIGPIPE, SIG_IGN);
    done = true;
  }
}

bool write_all(int fd, const std::string & data)
{
  size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n <= 0) return false;
    off += static_cast<size_t>(n);
  }
  return true;
}

double now_ms()
{
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

struct SpawnResult {
  long long pid = -1;
  int to_child = -1;
  int from_child = -1;
};

bool spawn(const SolverConfig & cfg, bool server, SpawnResult & r, std::string & error)
{
  int p2c[2], c2p[2];
  if (::pipe(p2c) != 0 || ::pipe(c2p) != 0) {
    error = "pipe failed";
    return false;
  }
  pid_t pid = ::fork();
  if (pid < 0) {
    error = "fork failed";
    return false;
  }
  if (pid == 0) {
    ::dup2(p2c[0], 0);
    ::dup2(c2p[1], 1);
    ::close(p2c[0]);
    ::close(p2c[1]);
    ::close(c2p[0]);
    ::close(c2p[1]);
    std::vector<std::string> args = cfg.args;
    if (server) args.push_back("--server");
    std::vector<char *> argv;
    argv.push_back(const_cast<char *>(cfg.command.c_str()));
    for (std::string & a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    ::execvp(cfg.command.c_str(), argv.data());
    ::_exit(127);
  }
  ::close(p2c[0]);
  ::close(c2p[1]);
  r.pid = pid;
  r.to_child = p2c[1];
  r.from_child = c2p[0];
  return true;
}

}  // namespace

SmtClient::SmtClient(SolverConfig cfg) : cfg_(std::move(cfg)) { ignore_sigpipe(); }

SmtClient::~SmtClient() { shutdown(); }

void SmtClient::kill_process()
{
  if (pid_ > 0) {
    ::kill(static_cast<pid_t>(pid_), SIGKILL);
    int st = 0;
    ::waitpid(static_cast<pid_t>(pid_), &st, 0);
  }
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  pid_ = -1;
  to_child_ = -1;
  from_child_ = -1;
  rdbuf_.clear();
}

void SmtClient::shutdown()
{
  if (pid_ > 0 && to_child_ >= 0) {
    ::close(to_child_);  // EOF lets an idle server exit on its own
    to_child_ = -1;
    for (int waited = 0; waited < 2000; waited += 20) {
      int st = 0;
      if (::waitpid(static_cast<pid_t>(pid_), &st, WNOHANG) != 0) {
        pid_ = -1;
        break;
      }
      ::usleep(20000);
    }
  }
  kill_process();
}

bool SmtClient::ensure_process(std::string & error)
{
  if (pid_ > 0) {
    int st = 0;
    if (::waitpid(static_cast<pid_t>(pid_), &st, WNOHANG) == 0) return true;  // alive
    pid_ = -1;
    kill_process();
  }
  SpawnResult r;
  if (!spawn(cfg_, true, r, error)) return false;
  pid_ = r.pid;
  to_child_ = r.to_child;
  from_child_ = r.from_child;
  rdbuf_.clear();
  return true;
}

SolverVerdict SmtClient::roundtrip(const std::string & script, bool expect_model)
{
  SolverVerdict v;
  v.query_bytes = script.size();
  double start = now_ms();
  double deadline = start + cfg_.timeout_ms + cfg_.grace_ms;

  auto finish = [&](SolverVerdict out) {
    out.query_bytes = script.size();
    out.wall_ms = now_ms() - start;
    return out;
  };
  auto read_with_deadline = [&](int fd, std::string & sink, auto done_pred) -> int {
    // 1 = done_pred satisfied, 0 = EOF, -1 = deadline
    char buf[65536];
    while (!done_pred()) {
      double remain = deadline - now_ms();
      if (remain <= 0) return -1;
      struct pollfd p{fd, POLLIN, 0};
      int pr = ::poll(&p, 1, static_cast<int>(remain) + 1);
      if (pr <= 0) return -1;
      ssize_t n = ::read(fd, buf, sizeof buf);
      if (n <= 0) return 0;
      sink.append(buf, static_cast<size_t>(n));
    }
    return 1;
  };

  if (cfg_.server) {
    std::string error;
    if (!ensure_process(error)) {
      v.raw = error;
      return finish(v);
    }
    if (!write_all(to_child_, script + kCheckSentinel)) {
      // child died between queries: one respawn attempt
      kill_process();
      if (!ensure_process(error) || !write_all(to_child_, script + kCheckSentinel)) {
        v.raw = "cannot write to solver process";
        return finish(v);
      }
    }
    size_t mark = std::string::npos;
    int rc = read_with_deadline(from_child_, rdbuf_, [&] {
      mark = rdbuf_.find(kDoneSentinel);
      return mark != std::string::npos;
    });
    if (rc != 1) {
      std::string partial = rdbuf_;
      kill_process();
      if (rc == -1) {
        v.status = SolverStatus::Timeout;
        v.raw = partial;
        return finish(v);
      }
      v.raw = "solver process exited mid-query: " + partial;
      return finish(v);
    }
    std::string out = rdbuf_.substr(0, mark);
    rdbuf_.erase(0, mark + std::strlen(kDoneSentinel));
    SolverVerdict parsed = parse_output(out, expect_model);
    if (parsed.status == SolverStatus::Unknown && now_ms() - start >= cfg_.timeout_ms)
      parsed.status = SolverStatus::Timeout;
    return finish(parsed);
  }

  // one-shot
  SpawnResult r;
  std::string error;
  if (!spawn(cfg_, false, r, error)) {
    v.raw = error;
    return finish(v);
  }
  bool wrote = write_all(r.to_child, script);
  ::close(r.to_child);
  std::string out;
  int rc = wrote ? read_with_deadline(r.from_child, out, [] { return false; }) : -2;
  // rc == 0 means EOF: the normal one-shot completion
  ::close(r.from_child);
  if (rc == -1 || rc == -2) ::kill(static_cast<pid_t>(r.pid), SIGKILL);
  int st = 0;
  ::waitpid(static_cast<pid_t>(r.pid), &st, 0);
  if (rc == -1) {
    v.status = SolverStatus::Timeout;
    v.raw = out;
    return finish(v);
  }
  if (!wrote) {
    v.raw = "cannot write to solver process";
    return finish(v);
  }
  if (WIFEXITED(st) && WEXITSTATUS(st) == 127) {
    v.raw = "cannot execute solver: " + cfg_.command;
    return finish(v);
  }
  SolverVerdict parsed = parse_output(out, expect_model);
  if (parsed.status == SolverStatus::Unknown && now_ms() - start >= cfg_.timeout_ms)
    parsed.status = SolverStatus::Timeout;
  return finish(parsed);
}

SolverVerdict SmtClient::check_raw(const std::string & body, bool expect_model)
{
  std::string script = "(set-option :timeout " + std::to_string(cfg_.timeout_ms) + ")\n" + body;
  return roundtrip(script, expect_model);
}

SolverVerdict SmtClient::check(const ScriptBuilder & script)
{
  return check_raw(script.render(cfg_.models), cfg_.models);
}

// ===========================================================================
// query helpers
// ===========================================================================

SolverVerdict check_sat(SmtClient & client, const Ctx & ctx, const Cube & cube,
                        const std::vector<const ClauseSet *> & background)
{
  ScriptBuilder sb(ctx);
  for (const ClauseSet * cs : background) sb.assert_clauses(*cs);
  sb.assert_cube(cube);
  return client.check(sb);
}

SolverVerdict check_entailment(SmtClient & client, Ctx & ctx,
                               const std::vector<const ClauseSet *> & hypotheses,
                               const ClauseSet & goal)
{
  ScriptBuilder sb(ctx);
  for (const ClauseSet * cs : hypotheses) sb.assert_clauses(*cs);
  std::vector<Cube> negated;
  for (GroundConj & g : skolemize_negation(ctx, goal)) negated.push_back(std::move(g.lits));
  sb.assert_dnf(negated);
  return client.check(sb);
}

EquivResult check_equivalence(SmtClient & client, Ctx & ctx, const ClauseSet & a,
                              const ClauseSet & b,
                              const std::vector<const ClauseSet *> & background)
{
  EquivResult r;
  std::vector<const ClauseSet *> hyp_a = background;
  hyp_a.push_back(&a);
  r.forward = check_entailment(client, ctx, hyp_a, b);
  std::vector<const ClauseSet *> hyp_b = background;
  hyp_b.push_back(&b);
  r.backward = check_entailment(client, ctx, hyp_b, a);
  if (r.forward.sat() || r.backward.sat())
    r.verdict = Equiv::Inequivalent;
  else if (r.forward.unsat() && r.backward.unsat())
    r.verdict = Equiv::Equivalent;
  else
    r.verdict = Equiv::Unknown;
  return r;
}

}  // namespace invsyn
