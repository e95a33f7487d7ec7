#include <cctype>
#include <regex>
#include <set>

#include "pssforge/jet_expr.hpp"

namespace pssforge {

ParseError::ParseError(const std::string& message, std::size_t position)
    : ExprError(message + " at position " + std::to_string(position)), position_(position) {}

namespace {

const std::set<std::string, std::less<>> kUnsupportedBuiltins = {
    "tan", "cot", "sec", "csc", "log", "ln", "sqrt", "atan", "asin", "acos", "tanh", "abs", "arctan"};

std::optional<Builtin> builtin_from_name(std::string_view s) {
  if (s == "sin") return Builtin::Sin;
  if (s == "cos") return Builtin::Cos;
  if (s == "sinh") return Builtin::Sinh;
  if (s == "cosh") return Builtin::Cosh;
  if (s == "exp") return Builtin::Exp;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    while (true) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(-term());
      } else {
        break;
      }
    }
    return Expr::sum(std::move(terms));
  }

  Expr term() {
    Expr acc = unary();
    while (true) {
      if (accept('*')) {
        acc = Expr::product({acc, unary()});
      } else if (accept('/')) {
        acc = Expr::product({acc, Expr::power(unary(), -1)});
      } else {
        break;
      }
    }
    return acc;
  }

  Expr unary() {
    if (accept('-')) return -unary();
    return power();
  }

  long integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    try {
      return std::stol(std::string(s_.substr(start, pos_ - start)));
    } catch (const std::out_of_range&) {
      pos_ = start;
      fail("integer out of range");
    }
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      bool paren = accept('(');
      bool negative = accept('-');
      long e = integer();
      if (paren) expect(')');
      return Expr::power(base, static_cast<int>(negative ? -e : e));
    }
    return base;
  }

  std::vector<Expr> arguments() {
    expect('(');
    std::vector<Expr> args{expr()};
    while (accept(',')) args.push_back(expr());
    expect(')');
    return args;
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      mpz_class v(std::string(s_.substr(start, pos_ - start)));
      return Expr::constant(mpq_class(v));
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    std::string name(s_.substr(start, pos_ - start));

    static const std::regex jet_re("^z([1-9][0-9]*)?(t?)$");
    std::smatch m;
    if (std::regex_match(name, m, jet_re)) {
      if (peek('(') || peek('\'') || peek('['))
        throw ParseError("jet variable '" + name + "' cannot be applied", start);
      int order = m[1].matched ? std::stoi(m[1].str()) : 0;
      return Expr::jet({order, m[2].length() > 0});
    }
    if (name.size() >= 2 && name[0] == 'z' &&
        (std::isdigit(static_cast<unsigned char>(name[1])) || name[1] == 't'))
      throw ParseError("malformed jet variable '" + name + "'", start);

    if (auto fn = builtin_from_name(name)) {
      if (!peek('(')) throw ParseError("builtin '" + name + "' needs an argument", start);
      auto args = arguments();
      if (args.size() != 1) throw ParseError("builtin '" + name + "' takes one argument", start);
      return Expr::apply(*fn, args[0]);
    }
    if (kUnsupportedBuiltins.count(name)) throw ParseError("unknown builtin '" + name + "'", start);

    int primes = 0;
    while (accept('\'')) ++primes;
    std::vector<int> index;
    if (primes == 0 && accept('[')) {
      index.push_back(static_cast<int>(integer()));
      while (accept(',')) index.push_back(static_cast<int>(integer()));
      expect(']');
    }
    if (!peek('(')) {
      if (primes > 0 || !index.empty()) fail("expected '(' after derivative marks of '" + name + "'");
      return Expr::param(name);
    }
    std::size_t call = pos_;
    auto args = arguments();
    if (primes > 0 && args.size() != 1)
      throw ParseError("primes are only allowed on single-argument functions", call);
    if (!index.empty() && index.size() != args.size())
      throw ParseError("derivative index of '" + name + "' does not match its arguments", call);
    if (index.empty()) index.assign(args.size(), 0);
    if (primes > 0) index[0] = primes;
    return Expr::atom(name, std::move(args), std::move(index));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printing

struct Style {
  bool latex = false;
};

std::string constant_text(const mpq_class& q, const Style& st) {
  if (st.latex && q.get_den() != 1) {
    mpz_class n = abs(q.get_num());
    return std::string(sgn(q) < 0 ? "-" : "") + "\\frac{" + n.get_str() + "}{" + q.get_den().get_str() + "}";
  }
  return q.get_str();
}

std::string latex_name(const std::string& name) {
  static const std::set<std::string> greek = {"alpha", "beta",  "gamma", "delta", "epsilon", "eta",
                                              "theta", "kappa", "mu",    "nu",    "rho",     "sigma",
                                              "tau",   "phi",   "psi",   "omega", "chi",     "xi",
                                              "zeta",  "Phi",   "Psi",   "Omega", "Gamma",   "Delta"};
  if (name == "lam") return "\\lambda";
  if (name == "ell") return "\\ell";
  if (greek.count(name)) return "\\" + name;
  auto us = name.find('_');
  if (us == std::string::npos) {
    // trailing digits become a subscript: sigma2 -> \sigma_{2}
    std::size_t d = name.size();
    while (d > 0 && std::isdigit(static_cast<unsigned char>(name[d - 1]))) --d;
    if (d > 0 && d < name.size()) return latex_name(name.substr(0, d)) + "_{" + name.substr(d) + "}";
    if (name.size() > 1) return "\\mathrm{" + name + "}";
    return name;
  }
  return latex_name(name.substr(0, us)) + "_{" + name.substr(us + 1) + "}";
}

std::string render(const Expr& e, const Style& st);

bool negative_lead(const Expr& e) {
  if (e.kind() == NodeKind::Constant) return sgn(e.value()) < 0;
  if (e.kind() == NodeKind::Product) {
    // render_product folds every constant factor into one coefficient
    int sign = 1;
    for (const auto& f : e.children())
      if (f.kind() == NodeKind::Constant) sign *= sgn(f.value());
    return sign < 0;
  }
  return false;
}

Expr strip_sign(const Expr& e) {
  if (e.kind() == NodeKind::Constant) return Expr::constant(-e.value());
  std::vector<Expr> f{Expr::integer(-1)};
  f.insert(f.end(), e.children().begin(), e.children().end());
  return Expr::product(std::move(f));
}

bool is_simple(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Param:
    case NodeKind::Jet:
    case NodeKind::Atom:
    case NodeKind::Apply:
      return true;
    case NodeKind::Constant:
      return sgn(e.value()) >= 0 && e.value().get_den() == 1;
    default:
      return false;
  }
}

std::string wrap(const std::string& s, const Style& st) {
  return st.latex ? "\\left(" + s + "\\right)" : "(" + s + ")";
}

std::string render_factor(const Expr& e, const Style& st) {
  if (e.kind() == NodeKind::Sum || negative_lead(e)) return wrap(render(e, st), st);
  if (!st.latex && e.kind() == NodeKind::Constant && e.value().get_den() != 1)
    return wrap(render(e, st), st);
  if (!st.latex && (e.kind() == NodeKind::Product || (e.kind() == NodeKind::Power && e.exponent() < 0)))
    return wrap(render(e, st), st);
  return render(e, st);
}

std::string render_power(const Expr& base, int exponent, const Style& st) {
  std::string b = is_simple(base) && !(st.latex && base.kind() == NodeKind::Atom && base.deriv().size() == 1 &&
                                       base.deriv()[0] > 0)
                      ? render(base, st)
                      : wrap(render(base, st), st);
  if (exponent == 1) return b;
  if (st.latex) return b + "^{" + std::to_string(exponent) + "}";
  return b + "^" + std::to_string(exponent);
}

std::string render_product(const Expr& e, const Style& st) {
  std::vector<Expr> num, den;
  mpq_class coeff = 1;
  for (const auto& f : e.children()) {
    if (f.kind() == NodeKind::Constant) {
      coeff *= f.value();
    } else if (f.kind() == NodeKind::Power && f.exponent() < 0) {
      den.push_back(Expr::power(f.children()[0], -f.exponent()));
    } else {
      num.push_back(f);
    }
  }
  std::string sign = sgn(coeff) < 0 ? "-" : "";
  mpq_class mag = abs(coeff);
  std::string mul = st.latex ? " " : "*";

  auto join = [&](const std::vector<Expr>& fs, const mpq_class& c) {
    std::vector<std::string> parts;
    if (c != 1 || fs.empty()) parts.push_back(c.get_str());
    for (const auto& f : fs) parts.push_back(render_factor(f, st));
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? mul : "") + parts[i];
    return out;
  };

  if (den.empty() && mag.get_den() == 1) return sign + join(num, mag);
  if (st.latex) {
    auto part = [&](const std::vector<Expr>& fs, const mpq_class& c) {
      if (fs.size() == 1 && c == 1 && fs[0].kind() == NodeKind::Sum) return render(fs[0], st);
      return join(fs, c);
    };
    return sign + "\\frac{" + part(num, mag.get_num()) + "}{" + part(den, mag.get_den()) + "}";
  }
  std::string top = join(num, mag.get_num());
  if (num.size() + (mag.get_num() != 1 ? 1 : 0) > 1) top = "(" + top + ")";
  std::string bottom = join(den, mag.get_den());
  if (den.size() + (mag.get_den() != 1 ? 1 : 0) > 1) bottom = "(" + bottom + ")";
  return sign + top + "/" + bottom;
}

std::string render(const Expr& e, const Style& st) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return constant_text(e.value(), st);
    case NodeKind::Param:
      return st.latex ? latex_name(e.name()) : e.name();
    case NodeKind::Jet: {
      if (!st.latex) return e.jet_var().name();
      JetVar v = e.jet_var();
      if (v.order == 0 && !v.t) return "z";
      std::string sub = (v.order > 0 ? std::to_string(v.order) : "") + (v.t ? "t" : "");
      return "z_{" + sub + "}";
    }
    case NodeKind::Atom: {
      std::string args;
      for (std::size_t i = 0; i < e.children().size(); ++i)
        args += (i ? "," : "") + render(e.children()[i], st);
      std::string name = st.latex ? latex_name(e.name()) : e.name();
      auto d = e.deriv();
      std::string marks;
      if (d.size() == 1) {
        if (st.latex && d[0] > 3)
          marks = "^{(" + std::to_string(d[0]) + ")}";
        else
          marks = std::string(static_cast<std::size_t>(d[0]), '\'');
      } else if (std::any_of(d.begin(), d.end(), [](int k) { return k != 0; })) {
        std::string idx;
        for (std::size_t i = 0; i < d.size(); ++i) idx += (i ? "," : "") + std::to_string(d[i]);
        marks = st.latex ? "^{(" + idx + ")}" : "[" + idx + "]";
      }
      return name + marks + wrap(args, st);
    }
    case NodeKind::Apply: {
      std::string fn = builtin_name(e.builtin());
      if (st.latex) fn = "\\" + fn;
      return fn + wrap(render(e.children()[0], st), st);
    }
    case NodeKind::Sum: {
      std::string out;
      bool first = true;
      for (const auto& t : e.children()) {
        if (negative_lead(t)) {
          out += first ? "-" : " - ";
          out += render(strip_sign(t), st);
        } else {
          if (!first) out += " + ";
          out += render(t, st);
        }
        first = false;
      }
      return out;
    }
    case NodeKind::Product:
      return render_product(e, st);
    case NodeKind::Power:
      if (e.exponent() < 0) return render_product(Expr::product({Expr::integer(1), e}), st);
      return render_power(e.children()[0], e.exponent(), st);
  }
  return "?";
}

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

std::string format(const Expr& e) { return render(e, Style{false}); }

std::string to_latex(const Expr& e) { return render(e, Style{true}); }

}  // namespace pssforge
