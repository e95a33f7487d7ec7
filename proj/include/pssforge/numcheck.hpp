#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pssforge/families.hpp"

namespace pssforge {

/// Uniform grid on [x0,x1] x [t0,t1]; point (i, j) has index j*nx + i.
struct Grid {
  double x0 = 0, x1 = 1, t0 = 0, t1 = 1;
  int nx = 8, nt = 8;

  double hx() const { return (x1 - x0) / (nx - 1); }
  double ht() const { return (t1 - t0) / (nt - 1); }
  double x(int i) const { return x0 + i * hx(); }
  double t(int j) const { return t0 + j * ht(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(nt); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i); }
  /// Throws NumericError unless nx, nt >= 8 and the spacings are positive.
  void validate() const;
};

/// partials[kx][kt] = d^(kx+kt) z / dx^kx dt^kt.
using MixedPartials = std::vector<std::vector<double>>;

/// Closed-form solution with mixed partials up to total order max_order.
struct SolutionSampler {
  std::string name;
  int max_order = 0;
  std::function<MixedPartials(double x, double t)> partials;
};

/// z = 4 atan(exp(a x + t/a)) for z_1t = sin z.
SolutionSampler sine_gordon_kink(double a = 1.0);
/// z = -c sech^2(sqrt(c)/2 (x + c t)) for z_t = z3 - 3 z z1.
SolutionSampler kdv_soliton(double c = 1.0);
SolutionSampler zero_solution(int max_order = 8);

/// Jet values z, z1, ..., zt, z1t, ... at (x, t) written into env.
void fill_jets(NumericEnv& env, const SolutionSampler& s, double x, double t);

struct CertifyReport {
  double max_residual = 0;
  bool pass = false;
};

/// Max-norm of the evolution-law residual over the grid; pass iff <= tol.
CertifyReport certify_solution(const SolutionSampler& s, const EquationSpec& eq, const Grid& g,
                               const NumericEnv& env = {}, double tol = 1e-8);

struct MetricSample {
  Grid grid;
  std::vector<double> E, F, G;
  /// EG - F^2 > threshold.
  std::vector<std::uint8_t> mask;
  double threshold = 1e-10;
};

/// E = f11^2 + f21^2, F = f11 f12 + f21 f22, G = f12^2 + f22^2 on the grid.
MetricSample metric(const Coframe& c, const SolutionSampler& s, const Grid& g, const NumericEnv& env = {});

/// Analytic metrics: "flat" (E=G=1, F=0), "sphere" (E=1, F=0, G=sin^2 x),
/// "hyperbolic" (E=1, F=0, G=exp(2x)), sampled on g.
MetricSample metric_fixture(const std::string& name, const Grid& g);
/// Default grid for a named fixture.
Grid fixture_grid(const std::string& name);

struct CurvatureField {
  std::vector<double> K;
  /// Interior points (2-cell margin) whose whole stencil lies in the mask.
  std::vector<std::uint8_t> valid;
  std::size_t count = 0;
};

/// Brioschi formula with second-order central differences.
CurvatureField brioschi_curvature(const MetricSample& m);

struct CurvatureReport {
  double max_abs_K_plus_delta = 0;
  double mask_fraction = 0;
  int nx = 0, nt = 0;
  double hx = 0, ht = 0;
  double threshold = 1e-10;
  bool pass = false;
};

/// When eq is given the sampler is certified first (NumericError on failure).
CurvatureReport curvature_report(const Coframe& c, const SolutionSampler& s, const Grid& g, const NumericEnv& env = {},
                                 const EquationSpec* eq = nullptr, double tol = 1e-3);

/// Catalog entry, certified sampler, default grid window and numeric
/// bindings for a named curvature check ("kink", "soliton", "zero").
struct CurvaturePreset {
  FamilyInstance instance;
  SolutionSampler sampler;
  Grid grid;
  NumericEnv env;
};

CurvaturePreset curvature_preset(const std::string& entry, const std::string& solution, int nx = 400, int nt = 400);
std::vector<std::pair<std::string, std::string>> curvature_presets();

}  // namespace pssforge
