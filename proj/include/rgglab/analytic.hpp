#pragma once

// Closed-form and numerical evaluation of the threshold quantities: mu, the
// isolated-vertex mean, the area sandwich for a tight cluster, the I(beta)
// integral with its large-n form, the E_k bound shape and the Chernoff bound
// on box occupancy.
//
// Quantities whose hidden Theta(1) constants are unknown are returned as
// "shapes" with the constant set to 1; only ratios of shapes are meaningful.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rgglab {

// ---------------------------------------------------------------------------
// Threshold parametrisation

/// mu = n exp(-pi r^2 n), the limiting mean number of isolated vertices.
inline double mu_of(std::size_t n, double r) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (!(r >= 0.0)) throw std::invalid_argument("radius must be non-negative");
  const double nd = static_cast<double>(n);
  return nd * std::exp(-std::numbers::pi * r * r * nd);
}

/// Inverse of mu_of: r = sqrt((log n - log mu) / (pi n)), for mu in (0, n].
inline double r_of_mu(std::size_t n, double mu) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  const double nd = static_cast<double>(n);
  if (!(mu > 0.0) || mu > nd) throw std::domain_error("mu must lie in (0, n]");
  const double num = std::log(nd) - std::log(mu);
  return num <= 0.0 ? 0.0 : std::sqrt(num / (std::numbers::pi * nd));
}

struct ThresholdParams {
  std::size_t n = 2;
  double r = 0.0;
  double mu = 0.0;

  static ThresholdParams from_radius(std::size_t n, double r) { return checked(n, r, mu_of(n, r)); }
  static ThresholdParams from_mu(std::size_t n, double mu) { return checked(n, r_of_mu(n, mu), mu); }

 private:
  static ThresholdParams checked(std::size_t n, double r, double mu) {
    if (n < 2) throw std::invalid_argument("threshold parameters need n >= 2");
    const double rederived = mu_of(n, r);
    if (std::fabs(rederived - mu) > 1e-9 * mu) throw std::logic_error("mu and r are inconsistent");
    return ThresholdParams{n, r, mu};
  }
};

/// E K_1 = n (1 - pi r^2)^(n-1), exact on the torus while the disk does not
/// cover it.
inline double expected_k1_exact(std::size_t n, double r) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (n == 1) return 1.0;  // a lone vertex is isolated for every r
  const double disk = std::numbers::pi * r * r;
  if (disk >= 1.0) throw std::domain_error("disk covers torus");
  return static_cast<double>(n) * std::pow(1.0 - disk, static_cast<double>(n - 1));
}

// ---------------------------------------------------------------------------
// Area of the r-neighbourhood of a tight cluster

struct ClusterGeometry {
  double rho = 0.0;  // distance from the leftmost vertex to the farthest one
  double r = 0.0;
};

struct AreaBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// pi r^2 (1 + rho/(6r)) < area < min(pi r^2 (1 + 5 rho/(2r)), 9 pi r^2 / 4),
/// valid for 0 <= rho < r/2.
inline AreaBounds area_bounds(const ClusterGeometry& g) {
  if (!(g.r > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!(g.rho >= 0.0) || g.rho >= g.r / 2.0) throw std::domain_error("area bounds need 0 <= rho < r/2");
  const double disk = std::numbers::pi * g.r * g.r;
  const double t = g.rho / g.r;
  return AreaBounds{disk * (1.0 + t / 6.0), std::min(disk * (1.0 + 2.5 * t), 2.25 * disk)};
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature

struct QuadratureOptions {
  double rel_tol = 1e-10;
  std::size_t max_steps = 1'000'000;
};

namespace detail {

template <typename F>
struct SimpsonState {
  F& f;
  double abs_tol;
  std::size_t steps = 0;
  std::size_t max_steps;

  double simpson(double a, double fa, double b, double fb, double fm) const {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  double refine(double a, double fa, double b, double fb, double m, double fm, double whole, double tol,
                int depth) {
    if (++steps > max_steps) throw std::runtime_error("quadrature tolerance not reached");
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return refine(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           refine(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace detail

/// Adaptive Simpson with Richardson correction. The relative tolerance is
/// turned into an absolute one from a 256-panel composite estimate.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, QuadratureOptions opt = {}) {
  if (a == b) return 0.0;
  constexpr int kPanels = 256;
  const double h = (b - a) / kPanels;
  std::vector<double> fx(2 * kPanels + 1);
  for (int k = 0; k <= 2 * kPanels; ++k) fx[k] = f(a + 0.5 * h * k);
  double coarse = 0.0;
  for (int p = 0; p < kPanels; ++p) coarse += h / 6.0 * (fx[2 * p] + 4.0 * fx[2 * p + 1] + fx[2 * p + 2]);
  if (coarse == 0.0) return 0.0;

  detail::SimpsonState<F> st{f, opt.rel_tol * std::fabs(coarse), 0, opt.max_steps};
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + h * p;
    const double hi = lo + h;
    const double whole = st.simpson(lo, fx[2 * p], hi, fx[2 * p + 2], fx[2 * p + 1]);
    total += st.refine(lo, fx[2 * p], hi, fx[2 * p + 2], 0.5 * (lo + hi), fx[2 * p + 1], whole,
                       st.abs_tol / kPanels, 50);
  }
  return total;
}

// ---------------------------------------------------------------------------
// I(beta)

struct IBetaParams {
  double beta = 1.0 / 6.0;
  std::size_t ell = 2;
  double epsilon = 0.4;
  std::size_t n = 2;
  double r = 0.0;

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (ell < 2) throw std::invalid_argument("ell must be at least 2");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
  }

  /// (2/n) (pi r^2 / 2)^(l-1), the factor pulled out by rho = x r.
  [[nodiscard]] double prefactor() const {
    return 2.0 / static_cast<double>(n) *
           std::pow(std::numbers::pi * r * r / 2.0, static_cast<double>(ell) - 1.0);
  }
};

/// I(beta) = int_0^{eps r} pi rho (pi rho^2 / 2)^(l-2) n^(-1 - beta rho / r) d rho,
/// integrated in rho by adaptive Simpson.
inline double i_beta_quadrature(const IBetaParams& p, QuadratureOptions opt = {}) {
  p.validate();
  const double log_n = std::log(static_cast<double>(p.n));
  const double power = static_cast<double>(p.ell) - 2.0;
  const auto integrand = [&](double rho) {
    const double half_disk = std::numbers::pi * rho * rho / 2.0;
    return std::numbers::pi * rho * std::pow(half_disk, power) * std::exp(-(1.0 + p.beta * rho / p.r) * log_n);
  };
  return adaptive_simpson(integrand, 0.0, p.epsilon * p.r, opt);
}

/// Large-n form: prefactor * (2l-3)! / (beta log n)^(2l-2).
inline double i_beta_asymptotic(const IBetaParams& p) {
  p.validate();
  if (p.n < 3) throw std::invalid_argument("asymptotic form needs n >= 3");
  const double k = 2.0 * static_cast<double>(p.ell) - 2.0;
  const double log_n = std::log(static_cast<double>(p.n));
  return p.prefactor() * std::tgamma(k) / std::pow(p.beta * log_n, k);
}

// ---------------------------------------------------------------------------
// Bound shapes

/// log n ((e/2) log n/(k-2))^(k-2) eps ((2k-3)/((e/6) log n))^(2k-3), the
/// bound on the expected number of size-k tight clusters, constant 1.
inline double ek_shape(std::size_t k, double n, double epsilon) {
  if (k < 3) throw std::domain_error("ek_shape needs k >= 3");
  if (!(n >= 3.0)) throw std::invalid_argument("n must be at least 3");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
  const double log_n = std::log(n);
  const double kd = static_cast<double>(k);
  const double e = std::numbers::e;
  const double log_value = std::log(log_n) + (kd - 2.0) * std::log(e / 2.0 * log_n / (kd - 2.0)) +
                           std::log(epsilon) + (2.0 * kd - 3.0) * std::log((2.0 * kd - 3.0) / (e / 6.0 * log_n));
  return std::exp(log_value);
}

struct BoxOccupancyBound {
  double y = 0.0;      // cell side
  double ew = 0.0;     // expected vertices per 2x2 box
  double delta = 0.0;  // log n / (37 ew) - 1
  double bound = 1.0;  // Chernoff bound on Pr(W > log n / 37)
  double bound_power_form = 1.0;
  bool vacuous = true;  // delta <= 0: the bound says nothing
};

/// Chernoff tail (e^delta / (1+delta)^(1+delta))^mean, in log form.
inline double chernoff_upper_tail(double mean, double delta) {
  if (!(delta > -1.0)) throw std::domain_error("delta must exceed -1");
  return std::exp(mean * (delta - (1.0 + delta) * std::log1p(delta)));
}

/// Box bound for a given mean box count `ew`, with n real-valued.
inline BoxOccupancyBound chernoff_box_bound_for_mean(double n, double ew) {
  if (!(n > 1.0)) throw std::invalid_argument("n must exceed 1");
  if (!(ew > 0.0)) throw std::invalid_argument("mean box count must be positive");
  const double log_n = std::log(n);
  BoxOccupancyBound b;
  b.ew = ew;
  b.delta = log_n / (37.0 * ew) - 1.0;
  if (!(b.delta > 0.0)) return b;
  b.vacuous = false;
  b.bound = chernoff_upper_tail(ew, b.delta);
  b.bound_power_form = std::exp(-log_n * (std::log1p(b.delta) - b.delta / (1.0 + b.delta)) / 37.0);
  if (std::fabs(b.bound - b.bound_power_form) > 1e-12 * b.bound)
    throw std::logic_error("Chernoff forms disagree");
  return b;
}

/// Cells of side y = 1/floor(1/(eps r)), boxes of 2x2 cells, W ~ Bin(n, (2y)^2).
inline BoxOccupancyBound chernoff_box_bound(std::size_t n, double r, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
  const double cell = epsilon * r;
  if (!(cell > 0.0) || cell >= 1.0) throw std::domain_error("need 0 < eps r < 1");
  const double y = 1.0 / std::floor(1.0 / cell);
  const double nd = static_cast<double>(n);
  BoxOccupancyBound b = chernoff_box_bound_for_mean(nd, 4.0 * y * y * nd);
  b.y = y;
  return b;
}

struct KPrimeBracket {
  double lower_shape = 0.0;  // beta = 5/2
  double upper_shape = 0.0;  // beta = 1/6
};

/// n (n-1) C(n-2, l-2) I(beta) for beta = 5/2 and 1/6, constants set to 1.
inline KPrimeBracket k_prime_expectation_bracket(std::size_t n, double r, std::size_t ell, double epsilon) {
  if (ell < 2) throw std::invalid_argument("ell must be at least 2");
  if (ell > n) throw std::domain_error("ell exceeds n");
  const double nd = static_cast<double>(n);
  const double ld = static_cast<double>(ell);
  const double log_choices = std::log(nd) + std::log(nd - 1.0) + std::lgamma(nd - 1.0) - std::lgamma(ld - 1.0) -
                             std::lgamma(nd - ld + 1.0);
  const double choices = std::exp(log_choices);
  IBetaParams p{2.5, ell, epsilon, n, r};
  KPrimeBracket out;
  out.lower_shape = choices * i_beta_quadrature(p);
  p.beta = 1.0 / 6.0;
  out.upper_shape = choices * i_beta_quadrature(p);
  return out;
}

}  // namespace rgglab
