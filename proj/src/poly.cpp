#include <algorithm>

#include "pssforge/algebra.hpp"

namespace pssforge {

int degree(const Monomial& m) {
  int d = 0;
  for (const auto& [k, e] : m) d += e;
  return d;
}

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  int da = degree(a), db = degree(b);
  if (da != db) return da < db;
  std::size_t i = 0;
  for (; i < a.size() && i < b.size(); ++i) {
    auto c = compare(a[i].first, b[i].first);
    // The monomial holding the earlier kernel is the larger one.
    if (c < 0) return false;
    if (c > 0) return true;
    if (a[i].second != b[i].second) return a[i].second < b[i].second;
  }
  return a.size() < b.size();
}

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    auto c = compare(a[i].first, b[j].first);
    if (c < 0) {
      out.push_back(a[i++]);
    } else if (c > 0) {
      out.push_back(b[j++]);
    } else {
      int e = a[i].second + b[j].second;
      if (e != 0) out.emplace_back(a[i].first, e);
      ++i;
      ++j;
    }
  }
  for (; i < a.size(); ++i) out.push_back(a[i]);
  for (; j < b.size(); ++j) out.push_back(b[j]);
  return out;
}

std::optional<Monomial> divide(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0, j = 0;
  while (j < b.size()) {
    if (i == a.size()) return std::nullopt;
    auto c = compare(a[i].first, b[j].first);
    if (c < 0) {
      out.push_back(a[i++]);
    } else if (c > 0) {
      return std::nullopt;
    } else {
      int e = a[i].second - b[j].second;
      if (e < 0) return std::nullopt;
      if (e > 0) out.emplace_back(a[i].first, e);
      ++i;
      ++j;
    }
  }
  for (; i < a.size(); ++i) out.push_back(a[i]);
  return out;
}

Poly Poly::constant(const mpq_class& c) {
  Poly p;
  p.add_term({}, c);
  return p;
}

Poly Poly::kernel(const Expr& k, int exponent) {
  if (exponent == 0) return constant(1);
  return term({{k, exponent}}, 1);
}

Poly Poly::term(Monomial m, const mpq_class& c) {
  Poly p;
  p.add_term(m, c);
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

mpq_class Poly::constant_value() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? mpq_class(0) : it->second;
}

void Poly::add_term(const Monomial& m, const mpq_class& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(multiply(ma, mb), ca * cb);
  return out;
}

Poly Poly::scaled(const mpq_class& c) const {
  if (sgn(c) == 0) return {};
  Poly out = *this;
  for (auto& [m, v] : out.terms_) v *= c;
  return out;
}

Poly Poly::times(const Monomial& mono, const mpq_class& c) const {
  Poly out;
  if (sgn(c) == 0) return out;
  for (const auto& [m, v] : terms_) out.terms_.emplace_hint(out.terms_.end(), multiply(m, mono), v * c);
  return out;
}

Poly Poly::pow(int e) const {
  if (e < 0) throw ExprError("negative power of a polynomial");
  Poly result = constant(1);
  Poly base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

bool Poly::contains(const Expr& k) const { return degree_in(k) > 0; }

int Poly::degree_in(const Expr& k) const {
  int d = 0;
  for (const auto& [m, c] : terms_)
    for (const auto& [kk, e] : m)
      if (kk == k) d = std::max(d, e);
  return d;
}

Poly Poly::coefficient(const Expr& k, int e) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    int found = 0;
    Monomial rest;
    for (const auto& pe : m) {
      if (pe.first == k)
        found = pe.second;
      else
        rest.push_back(pe);
    }
    if (found == e) out.add_term(rest, c);
  }
  return out;
}

Poly Poly::partial(const Expr& k) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!(m[i].first == k)) continue;
      Monomial d = m;
      int e = d[i].second;
      if (e == 1)
        d.erase(d.begin() + static_cast<std::ptrdiff_t>(i));
      else
        d[i].second = e - 1;
      out.add_term(d, c * e);
    }
  }
  return out;
}

std::vector<Expr> Poly::kernels() const {
  std::vector<Expr> out;
  for (const auto& [m, c] : terms_)
    for (const auto& [k, e] : m) out.push_back(k);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

mpq_class Poly::content() const {
  if (terms_.empty()) return 1;
  mpz_class g = 0, l = 1;
  for (const auto& [m, c] : terms_) {
    g = gcd(g, c.get_num());
    l = lcm(l, c.get_den());
  }
  mpq_class out(g, l);
  out.canonicalize();
  if (sgn(leading().second) < 0) out = -out;
  return out;
}

Monomial Poly::monomial_gcd() const {
  if (terms_.empty()) return {};
  Monomial g = terms_.begin()->first;
  for (const auto& [m, c] : terms_) {
    Monomial next;
    std::size_t i = 0, j = 0;
    while (i < g.size() && j < m.size()) {
      auto cc = compare(g[i].first, m[j].first);
      if (cc < 0) {
        ++i;
      } else if (cc > 0) {
        ++j;
      } else {
        next.emplace_back(g[i].first, std::min(g[i].second, m[j].second));
        ++i;
        ++j;
      }
    }
    g = std::move(next);
    if (g.empty()) break;
  }
  return g;
}

std::optional<Poly> Poly::divide_exact(const Poly& d) const {
  if (d.is_zero()) throw ExprError("polynomial division by zero");
  Poly rem = *this;
  Poly q;
  const auto& [dm, dc] = d.leading();
  while (!rem.is_zero()) {
    const auto& [rm, rc] = rem.leading();
    auto qm = divide(rm, dm);
    if (!qm) return std::nullopt;
    mpq_class qc = rc / dc;
    Monomial qmono = *qm;
    q.add_term(qmono, qc);
    for (const auto& [m, c] : d.terms_) rem.add_term(multiply(m, qmono), -c * qc);
  }
  return q;
}

bool operator==(const Poly& a, const Poly& b) { return compare(a, b) == 0; }

std::strong_ordering compare(const Poly& a, const Poly& b) {
  auto ia = a.terms_.rbegin();
  auto ib = b.terms_.rbegin();
  MonomialLess less;
  for (; ia != a.terms_.rend() && ib != b.terms_.rend(); ++ia, ++ib) {
    if (less(ia->first, ib->first)) return std::strong_ordering::less;
    if (less(ib->first, ia->first)) return std::strong_ordering::greater;
    int c = cmp(ia->second, ib->second);
    if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return a.terms_.size() <=> b.terms_.size();
}

}  // namespace pssforge
