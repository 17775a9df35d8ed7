#include "aeq/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "aeq/errors.hpp"

namespace aeq {
namespace {

enum class Tok { ident, number, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double value = 0.0;
  int line = 1;
  int col = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    const char c = s[i];
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && (ident_char(s[j]) || (s[j] == '.' && j + 1 < s.size() && ident_start(s[j + 1])))) ++j;
      if (s.substr(i, j - i) == "aeq" && s.substr(j, 8) == "-version") j += 8;
      t.kind = Tok::ident;
      t.text = std::string(s.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      t.kind = Tok::number;
      t.text = std::string(s.substr(i, j - i));
      const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
      if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
        throw InputError("malformed number '" + t.text + "'", line, col);
      advance(j - i);
    } else if (std::string_view("=[];,{}()+-*^").find(c) != std::string_view::npos) {
      t.kind = Tok::punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw InputError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

struct Loc {
  int line = 0;
  int col = 0;
};

/// A parsed term of a sum; `state` is set for terms of f.
struct ParsedTerm {
  Term term;
  std::optional<StateTerm> state;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  Scenario run();

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_punct(char c, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::punct && t.text[0] == c;
  }
  bool is_ident(std::string_view s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::ident && t.text == s;
  }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw InputError(msg, t.line, t.col); }
  static std::string describe(const Token& t) { return t.kind == Tok::end ? "end of input" : "'" + t.text + "'"; }
  const Token& expect_punct(char c, const std::string& context) {
    if (!is_punct(c)) fail(peek(), std::string("expected '") + c + "' " + context + ", found " + describe(peek()));
    return next();
  }
  void close_paren(const Token& open) {
    if (!is_punct(')')) fail(open, "unclosed '(' (found " + describe(peek()) + ")");
    next();
  }
  const Token& expect_ident(const std::string& context) {
    if (peek().kind != Tok::ident) fail(peek(), "expected " + context + ", found " + describe(peek()));
    return next();
  }

  double real_atom();
  double real_product();
  double signed_real();
  int signed_int();
  bool boolean();
  int state_index(const Token& t);
  std::vector<ParsedTerm> sum(bool state_mode);
  ParsedTerm term(bool state_mode);
  void factor(ParsedTerm& pt, bool state_mode, bool& has_trig);
  void exp_factor(Term& term, const Token& open);

  template <class Item>
  std::vector<std::vector<Item>> bracket(Item (Parser::*item)());
  std::vector<ParsedTerm> time_sum() { return sum(false); }
  std::vector<ParsedTerm> state_sum() { return sum(true); }
  Expr expr_from(const std::vector<ParsedTerm>& terms);

  void parse_cert(Scenario& s);
  void parse_ap(Scenario& s);
  void parse_run(Scenario& s);
  void validate(Scenario& s);

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, Loc> locs_;
  std::map<std::string, Loc> cert_locs_, ap_locs_;
  std::vector<std::vector<std::vector<ParsedTerm>>> a_raw_, b_raw_, f_raw_;
  std::vector<std::vector<double>> c_raw_, init_raw_;
  std::optional<Parity> a_parity_, b_parity_;
};

double Parser::real_atom() {
  const Token& t = peek();
  if (t.kind == Tok::number) return next().value;
  if (is_ident("pi")) {
    next();
    return std::numbers::pi;
  }
  if (is_ident("sqrt")) {
    next();
    const Token& open = expect_punct('(', "after sqrt");
    const double v = signed_real();
    close_paren(open);
    if (v < 0.0) fail(t, "sqrt of a negative number");
    return std::sqrt(v);
  }
  fail(t, "expected a number, found " + describe(t));
}

double Parser::real_product() {
  double v = real_atom();
  while (is_punct('*') && (peek(1).kind == Tok::number || is_ident("pi", 1) || is_ident("sqrt", 1))) {
    next();
    v *= real_atom();
  }
  return v;
}

double Parser::signed_real() {
  double sign = 1.0;
  if (is_punct('-')) {
    next();
    sign = -1.0;
  } else if (is_punct('+')) {
    next();
  }
  return sign * real_product();
}

int Parser::signed_int() {
  const Token& start = peek();
  double sign = 1.0;
  if (is_punct('-')) {
    next();
    sign = -1.0;
  } else if (is_punct('+')) {
    next();
  }
  const double v = sign * real_atom();
  if (v != std::floor(v) || std::fabs(v) > 1e6) fail(start, "expected an integer");
  return static_cast<int>(v);
}

bool Parser::boolean() {
  const Token& t = expect_ident("true or false");
  if (t.text == "true") return true;
  if (t.text == "false") return false;
  fail(t, "expected true or false, found '" + t.text + "'");
}

int Parser::state_index(const Token& t) {
  if (t.kind != Tok::ident || t.text.size() < 2 || t.text[0] != 'y' ||
      !std::all_of(t.text.begin() + 1, t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    fail(t, "expected a state component y1, y2, ..., found " + describe(t));
  const int k = std::stoi(t.text.substr(1));
  if (k < 1) fail(t, "state components are numbered from 1");
  return k - 1;
}

void Parser::exp_factor(Term& term, const Token& open) {
  double coeff = 1.0;
  if (is_punct('-')) {
    next();
    coeff = -1.0;
  } else if (is_punct('+')) {
    next();
  }
  if (!is_ident("t") && !is_ident("abs")) {
    coeff *= real_product();
    expect_punct('*', "before t in exp(...)");
  }
  if (is_ident("t")) {
    next();
    term.rate += coeff;
  } else if (is_ident("abs")) {
    next();
    const Token& inner = expect_punct('(', "after abs");
    if (!is_ident("t")) fail(peek(), "abs(...) takes only t");
    next();
    close_paren(inner);
    term.abs_rate += coeff;
  } else {
    fail(peek(), "expected t or abs(t) in exp(...), found " + describe(peek()));
  }
  close_paren(open);
}

void Parser::factor(ParsedTerm& pt, bool state_mode, bool& has_trig) {
  const Token& t = peek();
  if (t.kind == Tok::number || is_ident("pi") || is_ident("sqrt")) {
    pt.term.coeff *= real_atom();
    return;
  }
  if (is_punct('(')) {
    const Token& open = next();
    if (!is_ident("t") || !is_punct('+', 1) || peek(2).kind != Tok::number || peek(2).value != 1.0)
      fail(open, "only (t+1)^k groups may appear in parentheses");
    next();
    next();
    next();
    close_paren(open);
    expect_punct('^', "after (t+1)");
    pt.term.power += signed_int();
    return;
  }
  if (t.kind != Tok::ident) fail(t, "expected a factor, found " + describe(t));
  if (t.text == "exp") {
    next();
    const Token& open = expect_punct('(', "after exp");
    exp_factor(pt.term, open);
    return;
  }
  if (t.text == "sin" || t.text == "cos" || t.text == "tanh") {
    next();
    const Token& open = expect_punct('(', "after " + t.text);
    if (peek().kind == Tok::ident && peek().text[0] == 'y' && peek().text != "y" && t.text != "cos") {
      if (!state_mode) fail(peek(), "state components may only appear in f");
      if (pt.state) fail(t, "a term of f carries exactly one state factor");
      const int idx = state_index(next());
      close_paren(open);
      pt.state = StateTerm{Expr{}, t.text == "sin" ? StateFactor::sin : StateFactor::tanh, idx};
      return;
    }
    if (t.text == "tanh") fail(peek(), "tanh(...) takes a state component");
    if (has_trig) fail(t, "at most one sin/cos factor per term");
    has_trig = true;
    double omega = 1.0;
    if (!is_ident("t")) {
      omega = real_product();
      expect_punct('*', "before t in " + t.text + "(...)");
    }
    if (!is_ident("t")) fail(peek(), "expected t in " + t.text + "(...), found " + describe(peek()));
    next();
    close_paren(open);
    if (omega < 0.0) fail(t, "frequencies must be nonnegative");
    pt.term.trig = t.text == "sin" ? Trig::sin : Trig::cos;
    pt.term.omega = omega;
    return;
  }
  if (t.text.size() >= 2 && t.text[0] == 'y') {
    if (!state_mode) fail(t, "state components may only appear in f");
    if (pt.state) fail(t, "a term of f carries exactly one state factor");
    const int idx = state_index(next());
    pt.state = StateTerm{Expr{}, StateFactor::linear, idx};
    return;
  }
  fail(t, "unknown factor '" + t.text + "'");
}

ParsedTerm Parser::term(bool state_mode) {
  ParsedTerm pt;
  const Token& start = peek();
  bool has_trig = false;
  factor(pt, state_mode, has_trig);
  while (is_punct('*')) {
    next();
    factor(pt, state_mode, has_trig);
  }
  if (state_mode && !pt.state) fail(start, "each term of f needs one state factor (y1, sin(y1), tanh(y1))");
  return pt;
}

std::vector<ParsedTerm> Parser::sum(bool state_mode) {
  std::vector<ParsedTerm> out;
  double sign = 1.0;
  if (is_punct('-')) {
    next();
    sign = -1.0;
  } else if (is_punct('+')) {
    next();
  }
  while (true) {
    ParsedTerm pt = term(state_mode);
    pt.term.coeff *= sign;
    if (pt.term.coeff != 0.0) out.push_back(std::move(pt));
    if (is_punct('+')) {
      sign = 1.0;
    } else if (is_punct('-')) {
      sign = -1.0;
    } else {
      break;
    }
    next();
    if (is_punct('-')) {
      next();
      sign = -sign;
    } else if (is_punct('+')) {
      next();
    }
  }
  return out;
}

Expr Parser::expr_from(const std::vector<ParsedTerm>& terms) {
  std::vector<Term> out;
  for (const auto& t : terms) out.push_back(t.term);
  return Expr(std::move(out));
}

template <class Item>
std::vector<std::vector<Item>> Parser::bracket(Item (Parser::*item)()) {
  const Token& open = expect_punct('[', "to open a matrix or vector");
  std::vector<std::vector<Item>> rows(1);
  if (is_punct(']')) {
    next();
    return {};
  }
  while (true) {
    rows.back().push_back((this->*item)());
    if (is_punct(',')) {
      next();
    } else if (is_punct(';')) {
      next();
      rows.emplace_back();
    } else if (is_punct(']')) {
      next();
      break;
    } else if (peek().kind == Tok::end) {
      fail(open, "unclosed '['");
    } else {
      fail(peek(), "expected ',', ';' or ']', found " + describe(peek()));
    }
  }
  const std::size_t width = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != width) fail(open, "rows of different lengths");
  return rows;
}

void Parser::parse_cert(Scenario& s) {
  const Token& name = expect_ident("a certificate name");
  if (s.cert(name.text)) fail(name, "certificate '" + name.text + "' defined twice");
  cert_locs_[name.text] = {name.line, name.col};
  CertDef def;
  def.name = name.text;
  expect_punct('{', "to open the certificate");
  std::set<std::string> seen;
  while (!is_punct('}')) {
    const Token& key = expect_ident("a certificate field");
    if (!seen.insert(key.text).second) fail(key, "duplicate field '" + key.text + "'");
    expect_punct('=', "after " + key.text);
    if (key.text == "K") {
      if (is_ident("auto")) {
        next();
        def.auto_K = true;
        def.cert.K = 1.0;
      } else {
        def.cert.K = signed_real();
      }
    } else if (key.text == "m") {
      def.cert.m = signed_int();
    } else if (key.text == "lambda") {
      def.cert.lambda = signed_real();
    } else if (key.text == "t_star") {
      def.cert.t_star = signed_real();
    } else {
      fail(key, "unknown certificate field '" + key.text + "'");
    }
    if (is_punct(',')) next();
  }
  next();
  for (const char* k : {"K", "m", "lambda", "t_star"})
    if (!seen.count(k)) fail(name, std::string("certificate '") + name.text + "' lacks field " + k);
  try {
    def.cert.check();
  } catch (const InputError& e) {
    fail(name, e.message());
  }
  s.certs.push_back(std::move(def));
}

void Parser::parse_ap(Scenario& s) {
  const Token& name = expect_ident("an AP signal name");
  if (s.signal(name.text)) fail(name, "AP signal '" + name.text + "' defined twice");
  ap_locs_[name.text] = {name.line, name.col};
  APDef def;
  def.name = name.text;
  expect_punct('{', "to open the AP signal");
  while (!is_punct('}')) {
    const Token& kw = expect_ident("'term'");
    if (kw.text != "term") fail(kw, "unknown AP signal field '" + kw.text + "'");
    expect_punct('{', "to open the term");
    std::optional<double> omega;
    std::optional<Vector> a, b;
    while (!is_punct('}')) {
      const Token& key = expect_ident("omega, a or b");
      expect_punct('=', "after " + key.text);
      auto vec = [&]() {
        const auto rows = bracket(&Parser::signed_real);
        if (rows.size() != 1) fail(key, "expected a vector (one row)");
        return Vector(Eigen::Map<const Vector>(rows[0].data(), static_cast<Eigen::Index>(rows[0].size())));
      };
      if (key.text == "omega") {
        if (omega) fail(key, "duplicate field 'omega'");
        omega = signed_real();
        if (*omega < 0.0) fail(key, "frequencies must be nonnegative");
      } else if (key.text == "a") {
        if (a) fail(key, "duplicate field 'a'");
        a = vec();
      } else if (key.text == "b") {
        if (b) fail(key, "duplicate field 'b'");
        b = vec();
      } else {
        fail(key, "unknown AP term field '" + key.text + "'");
      }
      if (is_punct(',')) next();
    }
    next();
    if (!omega || !a || !b) fail(kw, "an AP term needs omega, a and b");
    def.signal.frequencies.push_back(*omega);
    def.signal.a.push_back(*a);
    def.signal.b.push_back(*b);
  }
  next();
  if (def.signal.frequencies.empty()) fail(name, "AP signal '" + name.text + "' has no terms");
  s.signals.push_back(std::move(def));
}

void Parser::parse_run(Scenario& s) {
  expect_punct('{', "to open the run block");
  std::set<std::string> seen;
  while (!is_punct('}')) {
    const Token& key = expect_ident("a run directive");
    if (!seen.insert(key.text).second) fail(key, "duplicate directive '" + key.text + "'");
    locs_["run." + key.text] = {key.line, key.col};
    expect_punct('=', "after " + key.text);
    auto& r = s.run;
    if (key.text == "horizon") {
      r.horizon = signed_real();
      if (!(*r.horizon > 0.0)) fail(key, "horizon must be positive");
    } else if (key.text == "tol") {
      r.tol = signed_real();
      if (!(r.tol > 0.0)) fail(key, "tol must be positive");
    } else if (key.text == "eps") {
      r.eps = signed_real();
      if (!(r.eps > 0.0 && r.eps < 1.0)) fail(key, "eps must lie in (0, 1)");
    } else if (key.text == "kmax") {
      r.kmax = signed_int();
      if (r.kmax < 1) fail(key, "kmax must be at least 1");
    } else if (key.text == "two_sided") {
      r.two_sided = boolean();
    } else if (key.text == "t_start") {
      r.t_start = signed_real();
    } else if (key.text == "p_cert") {
      r.p_cert = expect_ident("a certificate name").text;
    } else if (key.text == "eta_cert") {
      r.eta_cert = expect_ident("a certificate name").text;
    } else if (key.text == "ap") {
      r.ap = expect_ident("an AP signal name").text;
    } else {
      fail(key, "unknown run directive '" + key.text + "'");
    }
    if (is_punct(',')) next();
  }
  next();
}

Scenario Parser::run() {
  Scenario s;
  const Token& first = peek();
  if (!is_ident("aeq-version")) fail(first, "a scenario starts with 'aeq-version = 1'");
  next();
  expect_punct('=', "after aeq-version");
  const Token& ver = peek();
  if (ver.kind != Tok::number || ver.value != 1.0) fail(ver, "unsupported aeq-version (expected 1)");
  next();

  std::set<std::string> seen;
  while (peek().kind != Tok::end) {
    const Token& key = expect_ident("a key");
    const bool block = key.text == "cert" || key.text == "ap" || key.text == "run";
    if (!block || key.text == "run") {
      if (!seen.insert(key.text).second) fail(key, "duplicate key '" + key.text + "'");
      locs_[key.text] = {key.line, key.col};
    }
    if (key.text == "cert") {
      parse_cert(s);
      continue;
    }
    if (key.text == "ap") {
      parse_ap(s);
      continue;
    }
    if (key.text == "run") {
      parse_run(s);
      continue;
    }
    expect_punct('=', "after " + key.text);
    if (key.text == "name") {
      s.name = expect_ident("a scenario name").text;
    } else if (key.text == "dim") {
      const Token& t = peek();
      s.dim = signed_int();
      if (s.dim < 1) fail(t, "dim must be positive");
    } else if (key.text == "A") {
      a_raw_ = bracket(&Parser::time_sum);
    } else if (key.text == "B") {
      b_raw_ = bracket(&Parser::time_sum);
    } else if (key.text == "C") {
      c_raw_ = bracket(&Parser::signed_real);
    } else if (key.text == "f") {
      f_raw_ = bracket(&Parser::state_sum);
    } else if (key.text == "initial") {
      init_raw_ = bracket(&Parser::signed_real);
    } else if (key.text == "eta") {
      s.eta = expr_from(sum(false));
    } else if (key.text == "A.parity" || key.text == "B.parity") {
      const Token& v = expect_ident("even, odd or none");
      Parity p;
      if (v.text == "even")
        p = Parity::even;
      else if (v.text == "odd")
        p = Parity::odd;
      else if (v.text == "none")
        p = Parity::none;
      else
        fail(v, "parity must be even, odd or none");
      (key.text[0] == 'A' ? a_parity_ : b_parity_) = p;
    } else {
      fail(key, "unknown key '" + key.text + "'");
    }
  }
  validate(s);
  return s;
}

void Parser::validate(Scenario& s) {
  auto at = [&](const std::string& key) {
    auto it = locs_.find(key);
    return it == locs_.end() ? Loc{} : it->second;
  };
  auto fail_at = [&](const std::string& key, const std::string& msg) {
    const Loc l = at(key);
    throw InputError(msg, l.line, l.col);
  };
  if (!locs_.count("name")) throw InputError("missing key 'name'", 1, 1);
  if (!locs_.count("dim")) throw InputError("missing key 'dim'", 1, 1);
  const int n = s.dim;
  auto square = [&](const auto& rows, const std::string& key) {
    if (static_cast<int>(rows.size()) != n || static_cast<int>(rows.front().size()) != n)
      fail_at(key, key + " must be " + std::to_string(n) + "x" + std::to_string(n) + " (dim = " + std::to_string(n) +
                       ")");
  };
  auto matrix_function = [&](const auto& rows, const std::string& key, std::optional<Parity> parity) {
    if (rows.empty()) fail_at(key, key + " is empty");
    square(rows, key);
    std::vector<Expr> entries;
    for (const auto& r : rows)
      for (const auto& e : r) entries.push_back(expr_from(e));
    return MatrixFunction(n, std::move(entries), parity.value_or(Parity::none));
  };
  if (locs_.count("A")) s.A = matrix_function(a_raw_, "A", a_parity_);
  if (locs_.count("B")) s.B = matrix_function(b_raw_, "B", b_parity_);
  if (a_parity_ && !s.A) fail_at("A.parity", "A.parity given without A");
  if (b_parity_ && !s.B) fail_at("B.parity", "B.parity given without B");
  if (locs_.count("C")) {
    if (c_raw_.empty()) fail_at("C", "C is empty");
    square(c_raw_, "C");
    Matrix c(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c(i, j) = c_raw_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    s.C = c;
  }
  if (locs_.count("f")) {
    if (static_cast<int>(f_raw_.size()) != n || (!f_raw_.empty() && f_raw_.front().size() != 1))
      fail_at("f", "f needs one row per component (" + std::to_string(n) + " rows separated by ';')");
    std::vector<std::vector<StateTerm>> rows;
    for (const auto& r : f_raw_) {
      std::vector<StateTerm> terms;
      for (const auto& pt : r.front()) {
        StateTerm st = *pt.state;
        if (st.index >= n) fail_at("f", "state component y" + std::to_string(st.index + 1) + " exceeds dim");
        st.scalar = Expr({pt.term});
        terms.push_back(std::move(st));
      }
      rows.push_back(std::move(terms));
    }
    s.f = StateMap(n, std::move(rows));
  }
  if (s.B && !s.A) fail_at("B", "B given without A");
  if (!s.A && !s.C) throw InputError("a scenario needs A (linear) or C (quasilinear)", 1, 1);
  if (s.f && !s.C) fail_at("f", "f given without C");
  if (locs_.count("initial")) {
    for (const auto& r : init_raw_) {
      if (static_cast<int>(r.size()) != n)
        fail_at("initial", "initial vectors must have " + std::to_string(n) + " entries");
      s.initial.emplace_back(Eigen::Map<const Vector>(r.data(), n));
    }
  }
  for (const auto& ap : s.signals) {
    for (std::size_t k = 0; k < ap.signal.frequencies.size(); ++k)
      if (ap.signal.a[k].size() != n || ap.signal.b[k].size() != n) {
        const Loc l = ap_locs_[ap.name];
        throw InputError("AP signal '" + ap.name + "' vectors must have " + std::to_string(n) + " entries", l.line,
                         l.col);
      }
  }
  auto check_ref = [&](const std::optional<std::string>& ref, const std::string& key, bool cert) {
    if (!ref) return;
    if (cert ? s.cert(*ref) == nullptr : s.signal(*ref) == nullptr)
      fail_at("run." + key, std::string(cert ? "undefined certificate '" : "undefined AP signal '") + *ref + "'");
  };
  check_ref(s.run.p_cert, "p_cert", true);
  check_ref(s.run.eta_cert, "eta_cert", true);
  check_ref(s.run.ap, "ap", false);
  const double horizon = s.nominal_horizon();
  auto check_parity = [&](const std::optional<MatrixFunction>& m, const std::string& key) {
    if (!m || m->parity() == Parity::none) return;
    try {
      m->validate_parity(horizon);
    } catch (const InputError& e) {
      fail_at(key + ".parity", e.message());
    }
  };
  check_parity(s.A, "A");
  check_parity(s.B, "B");
}

// ---------------------------------------------------------------- output

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string term_body(const Term& t, bool with_state) {
  std::vector<std::string> parts;
  const double mag = std::fabs(t.coeff);
  const bool bare = t.power == 0 && t.rate == 0.0 && t.abs_rate == 0.0 && t.trig == Trig::none;
  if (mag != 1.0 || (bare && !with_state)) parts.push_back(num(mag));
  if (t.power != 0) parts.push_back("(t+1)^" + std::to_string(t.power));
  if (t.rate != 0.0) parts.push_back("exp(" + num(t.rate) + "*t)");
  if (t.abs_rate != 0.0) parts.push_back("exp(" + num(t.abs_rate) + "*abs(t))");
  if (t.trig != Trig::none) parts.push_back(std::string(t.trig == Trig::sin ? "sin(" : "cos(") + num(t.omega) + "*t)");
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "*") + p;
  return out;
}

void append_term(std::string& out, const Term& t, const std::string& state_factor) {
  const bool neg = t.coeff < 0.0;
  if (out.empty())
    out += neg ? "-" : "";
  else
    out += neg ? " - " : " + ";
  std::string body = term_body(t, !state_factor.empty());
  if (!state_factor.empty()) body += (body.empty() ? "" : "*") + state_factor;
  out += body;
}

std::string expr_text(const Expr& e) {
  std::string out;
  for (const auto& t : e.terms()) append_term(out, t, "");
  return out.empty() ? "0" : out;
}

std::string matrix_text(const MatrixFunction& m) {
  std::string out = "[";
  for (int i = 0; i < m.dim(); ++i) {
    if (i) out += "; ";
    for (int j = 0; j < m.dim(); ++j) out += (j ? ", " : "") + expr_text(m.entry(i, j));
  }
  return out + "]";
}

std::string rows_text(const std::vector<Vector>& rows) {
  std::string out = "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out += "; ";
    for (Eigen::Index j = 0; j < rows[i].size(); ++j) out += (j ? ", " : "") + num(rows[i](j));
  }
  return out + "]";
}

std::string vector_text(const Vector& v) { return rows_text({v}); }

std::string state_factor_text(const StateTerm& st) {
  const std::string y = "y" + std::to_string(st.index + 1);
  switch (st.factor) {
    case StateFactor::sin:
      return "sin(" + y + ")";
    case StateFactor::tanh:
      return "tanh(" + y + ")";
    case StateFactor::linear:
      break;
  }
  return y;
}

}  // namespace

const CertDef* Scenario::cert(std::string_view n) const {
  for (const auto& c : certs)
    if (c.name == n) return &c;
  return nullptr;
}

const APDef* Scenario::signal(std::string_view n) const {
  for (const auto& s : signals)
    if (s.name == n) return &s;
  return nullptr;
}

bool Scenario::operator==(const Scenario& o) const {
  auto same_matrix = [](const std::optional<Matrix>& a, const std::optional<Matrix>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->rows() == b->rows() && a->cols() == b->cols() && *a == *b;
  };
  if (initial.size() != o.initial.size()) return false;
  for (std::size_t i = 0; i < initial.size(); ++i)
    if (initial[i].size() != o.initial[i].size() || initial[i] != o.initial[i]) return false;
  return name == o.name && dim == o.dim && A == o.A && B == o.B && same_matrix(C, o.C) && f == o.f && eta == o.eta &&
         certs == o.certs && signals == o.signals && run == o.run;
}

Scenario parse_scenario(std::string_view text) { return Parser(text).run(); }

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize(const Scenario& s) {
  std::string out = "aeq-version = 1\n";
  out += "name = " + s.name + "\n";
  out += "dim = " + std::to_string(s.dim) + "\n";
  if (s.A) {
    out += "A = " + matrix_text(*s.A) + "\n";
    if (s.A->parity() != Parity::none) out += "A.parity = " + std::string(to_string(s.A->parity())) + "\n";
  }
  if (s.B) {
    out += "B = " + matrix_text(*s.B) + "\n";
    if (s.B->parity() != Parity::none) out += "B.parity = " + std::string(to_string(s.B->parity())) + "\n";
  }
  if (s.C) {
    std::vector<Vector> rows;
    for (Eigen::Index i = 0; i < s.C->rows(); ++i) rows.emplace_back(s.C->row(i).transpose());
    out += "C = " + rows_text(rows) + "\n";
  }
  if (s.f) {
    out += "f = [";
    for (std::size_t i = 0; i < s.f->rows().size(); ++i) {
      if (i) out += "; ";
      std::string row;
      for (const auto& st : s.f->rows()[i])
        for (const auto& t : st.scalar.terms()) append_term(row, t, state_factor_text(st));
      if (row.empty()) row = "0*y" + std::to_string(i + 1);
      out += row;
    }
    out += "]\n";
  }
  if (s.eta) out += "eta = " + expr_text(*s.eta) + "\n";
  for (const auto& c : s.certs)
    out += "cert " + c.name + " { K = " + (c.auto_K ? std::string("auto") : num(c.cert.K)) +
           ", m = " + std::to_string(c.cert.m) + ", lambda = " + num(c.cert.lambda) + ", t_star = " + num(c.cert.t_star) +
           " }\n";
  for (const auto& ap : s.signals) {
    out += "ap " + ap.name + " {\n";
    for (std::size_t k = 0; k < ap.signal.frequencies.size(); ++k)
      out += "  term { omega = " + num(ap.signal.frequencies[k]) + ", a = " + vector_text(ap.signal.a[k]) +
             ", b = " + vector_text(ap.signal.b[k]) + " }\n";
    out += "}\n";
  }
  const auto& r = s.run;
  out += "run {";
  std::string sep = " ";
  auto field = [&](const std::string& k, const std::string& v) {
    out += sep + k + " = " + v;
    sep = ", ";
  };
  if (r.horizon) field("horizon", num(*r.horizon));
  field("tol", num(r.tol));
  field("eps", num(r.eps));
  field("kmax", std::to_string(r.kmax));
  field("two_sided", r.two_sided ? "true" : "false");
  if (r.t_start) field("t_start", num(*r.t_start));
  if (r.p_cert) field("p_cert", *r.p_cert);
  if (r.eta_cert) field("eta_cert", *r.eta_cert);
  if (r.ap) field("ap", *r.ap);
  out += " }\n";
  if (!s.initial.empty()) out += "initial = " + rows_text(s.initial) + "\n";
  return out;
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"example1",       "example2",     "example3",      "example3_odd",
                                              "scalar_oracle", "quasi_scalar", "weaker_witness"};
  return names;
}

Scenario builtin(std::string_view name, const BuiltinParams& p) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(what) + " must be positive");
    return v;
  };
  std::string text;
  if (name == "example1") {
    const double alpha = positive(p.alpha.value_or(3.0), "alpha");
    const double k1 = positive(p.K1.value_or(1.0), "K1");
    if (!(alpha > 0.5))
      throw InputError("example1: the certificate uses the rate alpha - 1/2, so alpha > 0.5 is required");
    text = "aeq-version = 1\nname = example1\ndim = 2\n"
           "A = [0, 1; 2*(t+1)^-2, 0]\n"
           "B = [0, 0; " + num(k1) + "*exp(" + num(-alpha) + "*t), 0]\n"
           "cert P { K = auto, m = 0, lambda = " + num(alpha - 0.5) + ", t_star = 0 }\n"
           "run { horizon = 20, tol = 1e-8, p_cert = P }\n"
           "initial = [1, 0; 0, 1]\n";
  } else if (name == "example2") {
    const double alpha = positive(p.alpha.value_or(1.0), "alpha");
    const double beta = positive(p.beta.value_or(0.1), "beta");
    if (!(alpha - 2.0 * beta > 0.0))
      throw InputError("example2: violated constraint alpha - 2 beta > 0 (alpha - 2 beta = " +
                       num(alpha - 2.0 * beta) + ")");
    const double k1 = positive(p.K1.value_or(1.0), "K1");
    std::string b = "[";
    for (int i = 0; i < 5; ++i) {
      if (i) b += "; ";
      for (int j = 0; j < 5; ++j) b += (j ? ", " : "") + num(k1) + "*exp(" + num(-alpha) + "*t)";
    }
    b += "]";
    text = "aeq-version = 1\nname = example2\ndim = 5\n"
           "A = [0, 1, 0, 0, 0; -1, 0, 0, 0, 0; 0, 0, 0, pi, 0; 0, 0, -pi, 0, 0; 0, 0, 0, 0, " + num(beta) + "]\n"
           "B = " + b + "\n"
           "cert P { K = auto, m = 0, lambda = " + num(alpha - beta) + ", t_star = 0 }\n"
           "ap rotation { term { omega = 1, a = [1, 0, 0, 0, 0], b = [0, -1, 0, 0, 0] } }\n"
           "run { horizon = 60, tol = 1e-8, p_cert = P }\n"
           "initial = [1, 0, 0, 0, 0; 0, 1, 0, 0, 0; 0, 0, 1, 0, 0; 0, 0, 0, 1, 0]\n";
  } else if (name == "example3" || name == "example3_odd") {
    const double alpha = positive(p.alpha.value_or(2.0), "alpha");
    const bool odd = name == "example3_odd";
    text = "aeq-version = 1\nname = " + std::string(name) + "\ndim = 2\n"
           "A = [sin(pi*t), 0; 0, sin(sqrt(5)*t)]\nA.parity = odd\n"
           "B = [0, 0; " + std::string(odd ? "sin(t)" : "cos(t)") + "*exp(" + num(-alpha) + "*abs(t)), 0]\n"
           "B.parity = " + (odd ? "odd" : "even") + "\n"
           "cert P { K = " + num(std::exp(2.0 / std::numbers::pi)) + ", m = 0, lambda = " + num(alpha) +
           ", t_star = 0 }\n"
           "run { horizon = 30, tol = 1e-8, two_sided = true, p_cert = P }\n"
           "initial = [1, 0; 0, 1]\n";
  } else if (name == "scalar_oracle") {
    text = "aeq-version = 1\nname = scalar_oracle\ndim = 1\n"
           "A = [0]\nB = [exp(-t)]\n"
           "cert P { K = 1, m = 0, lambda = 1, t_star = 0 }\n"
           "run { tol = 1e-8, t_start = 0, p_cert = P }\n"
           "initial = [1]\n";
  } else if (name == "quasi_scalar") {
    text = "aeq-version = 1\nname = quasi_scalar\ndim = 1\n"
           "C = [0]\nf = [exp(-t)*y1]\neta = exp(-t)\n"
           "cert eta { K = 1, m = 0, lambda = 1, t_star = 0 }\n"
           "run { horizon = 25, tol = 1e-10, eta_cert = eta }\n"
           "initial = [1]\n";
  } else if (name == "weaker_witness") {
    text = "aeq-version = 1\nname = weaker_witness\ndim = 1\n"
           "C = [1]\nf = [exp(-t)*(t+1)^-1*y1]\neta = exp(-t)*(t+1)^-1\n"
           "cert eta { K = 1, m = 0, lambda = 1, t_star = 0 }\n"
           "run { horizon = 20000, tol = 1e-8, eta_cert = eta }\n"
           "initial = [1]\n";
  } else {
    std::string known;
    for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
    throw InputError("unknown built-in scenario '" + std::string(name) + "' (known: " + known + ")");
  }
  return parse_scenario(text);
}

}  // namespace aeq
