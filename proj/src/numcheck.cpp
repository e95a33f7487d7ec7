#include "pssforge/numcheck.hpp"

#include <boost/math/differentiation/autodiff.hpp>

#include <algorithm>
#include <cmath>

namespace pssforge {

namespace {

constexpr int kMaxOrder = 8;

/// z = Z(a x + b t) with Z^(n) from forward-mode Taylor arithmetic.
template <class Profile>
SolutionSampler travelling_wave(std::string name, double a, double b, Profile profile) {
  SolutionSampler s;
  s.name = std::move(name);
  s.max_order = kMaxOrder;
  s.partials = [a, b, profile](double x, double t) {
    using namespace boost::math::differentiation;
    auto xi = make_fvar<double, kMaxOrder>(a * x + b * t);
    auto Z = profile(xi);
    MixedPartials p(kMaxOrder + 1, std::vector<double>(kMaxOrder + 1, 0.0));
    for (int kx = 0; kx <= kMaxOrder; ++kx)
      for (int kt = 0; kx + kt <= kMaxOrder; ++kt)
        p[static_cast<std::size_t>(kx)][static_cast<std::size_t>(kt)] =
            std::pow(a, kx) * std::pow(b, kt) * static_cast<double>(Z.derivative(static_cast<std::size_t>(kx + kt)));
    return p;
  };
  return s;
}

Expr metric_entry(const Coframe& c, int which) {
  switch (which) {
    case 0: return c(1, 1) * c(1, 1) + c(2, 1) * c(2, 1);
    case 1: return c(1, 1) * c(1, 2) + c(2, 1) * c(2, 2);
    default: return c(1, 2) * c(1, 2) + c(2, 2) * c(2, 2);
  }
}

double det3(const double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

void Grid::validate() const {
  if (nx < 8 || nt < 8) throw NumericError("grid needs nx, nt >= 8");
  if (!(hx() > 0) || !(ht() > 0)) throw NumericError("grid spacings must be positive");
}

SolutionSampler sine_gordon_kink(double a) {
  if (a == 0) throw NumericError("kink speed parameter must be nonzero");
  return travelling_wave("kink", a, 1.0 / a, [](const auto& xi) { return 4 * atan(exp(xi)); });
}

SolutionSampler kdv_soliton(double c) {
  if (!(c > 0)) throw NumericError("soliton speed must be positive");
  double k = std::sqrt(c) / 2;
  return travelling_wave("soliton", 1.0, c, [c, k](const auto& xi) {
    auto ch = cosh(k * xi);
    return -c / (ch * ch);
  });
}

SolutionSampler zero_solution(int max_order) {
  SolutionSampler s;
  s.name = "zero";
  s.max_order = max_order;
  s.partials = [max_order](double, double) {
    return MixedPartials(static_cast<std::size_t>(max_order + 1), std::vector<double>(static_cast<std::size_t>(max_order + 1), 0.0));
  };
  return s;
}

void fill_jets(NumericEnv& env, const SolutionSampler& s, double x, double t) {
  MixedPartials p = s.partials(x, t);
  for (int k = 0; k <= s.max_order; ++k) {
    env.jets[JetVar::x(k)] = p[static_cast<std::size_t>(k)][0];
    if (k + 1 <= s.max_order) env.jets[JetVar::time(k)] = p[static_cast<std::size_t>(k)][1];
  }
}

namespace {

int needed_order(const Expr& e) {
  int n = 0;
  for (const auto& s : free_symbols(e))
    if (s.kind() == NodeKind::Jet) n = std::max(n, s.jet_var().order + (s.jet_var().t ? 1 : 0));
  return n;
}

Expr law_residual(const EquationSpec& eq) {
  switch (eq.cls) {
    case EquationClass::A:
      return zt(0) - eq.lambda * zt(2) - eq.A * z(3) - eq.B;
    case EquationClass::B:
      return zt(2) - eq.A * z(3) - eq.B;
    case EquationClass::Generic:
      if (eq.rules.empty()) throw NumericError("equation has no evolution rule");
      return Expr::jet(eq.rules.front().var) - eq.rules.front().rhs;
  }
  return {};
}

}  // namespace

CertifyReport certify_solution(const SolutionSampler& s, const EquationSpec& eq, const Grid& g, const NumericEnv& env,
                               double tol) {
  g.validate();
  Expr r = normalize(law_residual(eq), eq.context);
  if (needed_order(r) > s.max_order)
    throw NumericError("sampler '" + s.name + "' supplies derivatives up to order " + std::to_string(s.max_order) +
                       " but the equation needs " + std::to_string(needed_order(r)));
  CertifyReport rep;
  NumericEnv e = env;
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.nx; ++i) {
      fill_jets(e, s, g.x(i), g.t(j));
      rep.max_residual = std::max(rep.max_residual, std::abs(eval_numeric(r, e)));
    }
  rep.pass = rep.max_residual <= tol;
  return rep;
}

MetricSample metric(const Coframe& c, const SolutionSampler& s, const Grid& g, const NumericEnv& env) {
  g.validate();
  Expr entries[3];
  for (int k = 0; k < 3; ++k) {
    entries[k] = normalize(metric_entry(c, k), c.context);
    if (needed_order(entries[k]) > s.max_order)
      throw NumericError("sampler '" + s.name + "' lacks derivatives needed by the coframe");
  }
  MetricSample m;
  m.grid = g;
  m.E.resize(g.size());
  m.F.resize(g.size());
  m.G.resize(g.size());
  m.mask.resize(g.size());
  NumericEnv e = env;
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.nx; ++i) {
      fill_jets(e, s, g.x(i), g.t(j));
      std::size_t p = g.index(i, j);
      m.E[p] = eval_numeric(entries[0], e);
      m.F[p] = eval_numeric(entries[1], e);
      m.G[p] = eval_numeric(entries[2], e);
      m.mask[p] = m.E[p] * m.G[p] - m.F[p] * m.F[p] > m.threshold;
    }
  return m;
}

Grid fixture_grid(const std::string& name) {
  if (name == "flat") return {0.0, 1.0, 0.0, 1.0, 64, 64};
  if (name == "sphere") return {1.0, 2.2, 0.0, 0.1, 4001, 9};
  if (name == "hyperbolic") return {0.0, 1.0, 0.0, 0.1, 2001, 9};
  throw NumericError("unknown metric fixture '" + name + "'");
}

MetricSample metric_fixture(const std::string& name, const Grid& g) {
  g.validate();
  std::function<double(double)> G;
  if (name == "flat") G = [](double) { return 1.0; };
  else if (name == "sphere") G = [](double x) { return std::sin(x) * std::sin(x); };
  else if (name == "hyperbolic") G = [](double x) { return std::exp(2 * x); };
  else throw NumericError("unknown metric fixture '" + name + "'");
  MetricSample m;
  m.grid = g;
  m.E.assign(g.size(), 1.0);
  m.F.assign(g.size(), 0.0);
  m.G.resize(g.size());
  m.mask.resize(g.size());
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t p = g.index(i, j);
      m.G[p] = G(g.x(i));
      m.mask[p] = m.E[p] * m.G[p] - m.F[p] * m.F[p] > m.threshold;
    }
  return m;
}

CurvatureField brioschi_curvature(const MetricSample& m) {
  const Grid& g = m.grid;
  g.validate();
  const double hx = g.hx(), ht = g.ht();
  CurvatureField out;
  out.K.assign(g.size(), 0.0);
  out.valid.assign(g.size(), 0);
  for (int j = 2; j < g.nt - 2; ++j)
    for (int i = 2; i < g.nx - 2; ++i) {
      bool ok = true;
      for (int dj = -1; dj <= 1 && ok; ++dj)
        for (int di = -1; di <= 1 && ok; ++di) ok = m.mask[g.index(i + di, j + dj)];
      if (!ok) continue;
      auto v = [&](const std::vector<double>& f, int di, int dj) { return f[g.index(i + di, j + dj)]; };
      auto dx = [&](const std::vector<double>& f) { return (v(f, 1, 0) - v(f, -1, 0)) / (2 * hx); };
      auto dt = [&](const std::vector<double>& f) { return (v(f, 0, 1) - v(f, 0, -1)) / (2 * ht); };
      auto dxx = [&](const std::vector<double>& f) { return (v(f, 1, 0) - 2 * v(f, 0, 0) + v(f, -1, 0)) / (hx * hx); };
      auto dtt = [&](const std::vector<double>& f) { return (v(f, 0, 1) - 2 * v(f, 0, 0) + v(f, 0, -1)) / (ht * ht); };
      auto dxt = [&](const std::vector<double>& f) {
        return (v(f, 1, 1) - v(f, 1, -1) - v(f, -1, 1) + v(f, -1, -1)) / (4 * hx * ht);
      };
      const double E = v(m.E, 0, 0), F = v(m.F, 0, 0), G = v(m.G, 0, 0);
      const double Ex = dx(m.E), Et = dt(m.E), Fx = dx(m.F), Ft = dt(m.F), Gx = dx(m.G), Gt = dt(m.G);
      const double a[3][3] = {{-0.5 * dtt(m.E) + dxt(m.F) - 0.5 * dxx(m.G), 0.5 * Ex, Fx - 0.5 * Et},
                              {Ft - 0.5 * Gx, E, F},
                              {0.5 * Gt, F, G}};
      const double b[3][3] = {{0, 0.5 * Et, 0.5 * Gx}, {0.5 * Et, E, F}, {0.5 * Gx, F, G}};
      const double w = E * G - F * F;
      std::size_t p = g.index(i, j);
      out.K[p] = (det3(a) - det3(b)) / (w * w);
      out.valid[p] = 1;
      ++out.count;
    }
  if (out.count == 0) throw NumericError("curvature mask is empty on the grid interior");
  return out;
}

CurvatureReport curvature_report(const Coframe& c, const SolutionSampler& s, const Grid& g, const NumericEnv& env,
                                 const EquationSpec* eq, double tol) {
  if (eq) {
    CertifyReport cert = certify_solution(s, *eq, g, env);
    if (!cert.pass)
      throw NumericError("sampler '" + s.name + "' is not a solution (max residual " +
                         std::to_string(cert.max_residual) + ")");
  }
  MetricSample m = metric(c, s, g, env);
  CurvatureField K = brioschi_curvature(m);
  CurvatureReport r;
  r.nx = g.nx;
  r.nt = g.nt;
  r.hx = g.hx();
  r.ht = g.ht();
  r.threshold = m.threshold;
  std::size_t interior = static_cast<std::size_t>(g.nx - 4) * static_cast<std::size_t>(g.nt - 4);
  r.mask_fraction = static_cast<double>(K.count) / static_cast<double>(interior);
  for (std::size_t p = 0; p < K.K.size(); ++p)
    if (K.valid[p]) r.max_abs_K_plus_delta = std::max(r.max_abs_K_plus_delta, std::abs(K.K[p] + c.delta));
  r.pass = r.max_abs_K_plus_delta <= tol && r.hx <= 1e-2 && r.ht <= 1e-2;
  return r;
}

CurvaturePreset curvature_preset(const std::string& entry, const std::string& solution, int nx, int nt) {
  CurvaturePreset p;
  if (entry == "sine-gordon" && solution == "kink") {
    p.sampler = sine_gordon_kink(1.0);
    p.grid = {0.1, 2.1, 0.1, 2.1, nx, nt};
    p.env.set("eta", 1.0);
  } else if (entry == "kdv" && solution == "soliton") {
    p.sampler = kdv_soliton(1.0);
    p.grid = {1.0, 2.0, 1.0, 2.0, nx, nt};
    p.env.set("eta", 1.0).set("alpha", 1.0);
  } else if (solution == "zero") {
    p.sampler = zero_solution();
    p.grid = {0.0, 1.0, 0.0, 1.0, nx, nt};
    p.env.set("eta", 1.0).set("alpha", 1.0);
  } else {
    throw NumericError("no preset for '" + entry + "' with solution '" + solution + "'");
  }
  p.instance = catalog(entry);
  return p;
}

std::vector<std::pair<std::string, std::string>> curvature_presets() {
  return {{"sine-gordon", "kink"}, {"kdv", "soliton"}, {"sine-gordon", "zero"}, {"kdv", "zero"}};
}

}  // namespace pssforge
