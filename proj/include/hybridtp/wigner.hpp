// wigner.hpp
// Wigner functions over (q, p): closed forms for coherent and cat states, a
// displaced-parity evaluator for any single-mode density matrix, and the
// conditional B-mode states of the hybrid channel.

#pragma once

#include "hybridtp/fidelity.hpp"
#include "hybridtp/fock_core.hpp"
#include "hybridtp/hybrid_states.hpp"
#include "hybridtp/measurement.hpp"

#include <cmath>

namespace hybridtp {

/// Printed: the widths exactly as tabulated for the closed forms
/// (coherent: exp[-(q-q0)^2/2] exp[-2(p-p0)^2], q0 = Re alpha).
/// Symmetric: X = (a + a^dag)/sqrt2, vacuum variance 1/2 in both quadratures,
/// q0 = sqrt2 Re alpha. The displaced-parity evaluator uses this one.
enum class Convention { Printed, Symmetric };

struct GridSpec {
  double q_min = -5.0, q_max = 5.0;
  double p_min = -5.0, p_max = 5.0;
  int points = 201;

  void validate() const {
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
    if (!(q_max > q_min) || !(p_max > p_min)) throw std::invalid_argument("grid range is empty");
  }
  double q(int i) const { return q_min + (q_max - q_min) * i / (points - 1); }
  double p(int j) const { return p_min + (p_max - p_min) * j / (points - 1); }
};

/// values(i, j) = W(q_i, p_j).
struct PhaseSpaceGrid {
  GridSpec spec;
  Eigen::MatrixXd values;

  /// Trapezoidal quadrature over the grid.
  double integral() const {
    const double hq = (spec.q_max - spec.q_min) / (spec.points - 1);
    const double hp = (spec.p_max - spec.p_min) / (spec.points - 1);
    double s = 0.0;
    for (int i = 0; i < spec.points; ++i) {
      const double wi = (i == 0 || i == spec.points - 1) ? 0.5 : 1.0;
      for (int j = 0; j < spec.points; ++j) {
        const double wj = (j == 0 || j == spec.points - 1) ? 0.5 : 1.0;
        s += wi * wj * values(i, j);
      }
    }
    return s * hq * hp;
  }
  double min() const { return values.minCoeff(); }
  double max() const { return values.maxCoeff(); }
};

template <class F>
PhaseSpaceGrid tabulate(const GridSpec& spec, F&& w) {
  spec.validate();
  PhaseSpaceGrid g{spec, Eigen::MatrixXd(spec.points, spec.points)};
  for (int i = 0; i < spec.points; ++i)
    for (int j = 0; j < spec.points; ++j) g.values(i, j) = w(spec.q(i), spec.p(j));
  return g;
}

inline double wigner_coherent(double q, double p, cplx alpha, Convention conv = Convention::Printed) {
  if (conv == Convention::Printed) {
    const double dq = q - alpha.real(), dp = p - alpha.imag();
    return std::exp(-dq * dq / 2.0) * std::exp(-2.0 * dp * dp) / kPi;
  }
  const double dq = q - std::sqrt(2.0) * alpha.real(), dp = p - std::sqrt(2.0) * alpha.imag();
  return std::exp(-dq * dq - dp * dp) / kPi;
}

/// Cat state of real amplitude alpha. Printed convention: two lobes of width
/// exp[-(q +- q0)^2 - 2 p^2] with weight N^2/(2 pi), interference
/// (N^2/pi) cos(2 p q0) exp(-q^2 - p^2), N^2 = 1/[1 + s exp(-q0^2)], q0 = alpha,
/// s = +1 for EVEN and -1 for ODD (the interference sign follows s).
inline double wigner_cat(double q, double p, double alpha, Parity parity, Convention conv = Convention::Printed) {
  if (!(alpha > 0.0)) throw std::invalid_argument("wigner_cat: alpha must be > 0");
  const double s = parity == Parity::Even ? 1.0 : -1.0;
  if (conv == Convention::Printed) {
    const double q0 = alpha;
    const double n2 = 1.0 / (1.0 + s * std::exp(-q0 * q0));
    const double lobes = (std::exp(-(q - q0) * (q - q0) - 2 * p * p) + std::exp(-(q + q0) * (q + q0) - 2 * p * p)) *
                         n2 / (2 * kPi);
    const double inter = s * n2 / kPi * std::cos(2 * p * q0) * std::exp(-q * q - p * p);
    return lobes + inter;
  }
  const double q0 = std::sqrt(2.0) * alpha;
  const double n2 = 1.0 / (2.0 * (1.0 + s * std::exp(-q0 * q0)));
  return n2 / kPi *
         (std::exp(-(q - q0) * (q - q0) - p * p) + std::exp(-(q + q0) * (q + q0) - p * p) +
          2.0 * s * std::exp(-q * q - p * p) * std::cos(2.0 * q0 * p));
}

/// Integral of the printed cat form over the plane: N^2 (1/sqrt2 + s e^{-q0^2}).
inline double wigner_cat_printed_integral(double alpha, Parity parity) {
  const double s = parity == Parity::Even ? 1.0 : -1.0;
  const double e = std::exp(-alpha * alpha);
  return (1.0 / std::sqrt(2.0) + s * e) / (1.0 + s * e);
}

namespace detail {

// <m|D(g)|n> for all m, n < dim via the associated Laguerre form.
inline Mat displacement_elements(cplx g, int dim) {
  const double x = std::norm(g), pre = std::exp(-x / 2.0);
  std::vector<double> lf(dim);
  lf[0] = 0.0;
  for (int k = 1; k < dim; ++k) lf[k] = lf[k - 1] + std::log(static_cast<double>(k));
  Mat d(dim, dim);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) {
      if (m >= n) {
        const unsigned k = static_cast<unsigned>(m - n);
        d(m, n) = std::exp(0.5 * (lf[n] - lf[m])) * std::pow(g, static_cast<int>(k)) * pre *
                  std::assoc_laguerre(static_cast<unsigned>(n), k, x);
      } else {
        const unsigned k = static_cast<unsigned>(n - m);
        d(m, n) = std::exp(0.5 * (lf[m] - lf[n])) * std::pow(-std::conj(g), static_cast<int>(k)) * pre *
                  std::assoc_laguerre(static_cast<unsigned>(m), k, x);
      }
    }
  return d;
}

}  // namespace detail

/// W(q, p) = (1/pi) Tr[rho D(beta) Pi D(beta)^dag], beta = (q + i p)/sqrt2 and
/// Pi the photon-number parity, in the symmetric convention. Uses
/// D(beta) Pi D(beta)^dag = D(2 beta) Pi.
inline double wigner_point(const Mat& rho, double q, double p) {
  const int dim = static_cast<int>(rho.rows());
  const Mat d = detail::displacement_elements(cplx(q, p) * std::sqrt(2.0), dim);
  cplx acc = 0.0;
  for (int n = 0; n < dim; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    for (int m = 0; m < dim; ++m) acc += sign * rho(n, m) * d(m, n);
  }
  return acc.real() / kPi;
}

/// Grid of the displaced-parity Wigner function for a single-mode operator.
/// The population of the top Fock level must stay below kMassTolerance.
inline PhaseSpaceGrid wigner_from_density(const DensityOperator& rho, const GridSpec& spec = {}) {
  if (rho.modes().size() != 1) throw std::invalid_argument("wigner_from_density: single-mode operator required");
  const Mat r = rho.matrix() / rho.trace().real();
  const int top = static_cast<int>(r.rows()) - 1;
  if (r(top, top).real() > kMassTolerance)
    throw InsufficientCutoff("wigner_from_density: population at the cutoff is " + detail::sci(r(top, top).real()));
  return tabulate(spec, [&](double q, double p) { return wigner_point(r, q, p); });
}

inline PhaseSpaceGrid wigner_from_state(const FockVector& v, const GridSpec& spec = {}) {
  return wigner_from_density(DensityOperator::from_pure(MultiModeState::single(Mode::A, v)), spec);
}

/// (sqrt zeta, sqrt(3 zeta)): EVEN- and ODD-cat amplitudes that approximate the
/// squeezed vacuum and its photon-subtracted version.
inline std::pair<double, double> cat_amplitude_from_squeezing(double zeta) {
  if (!(zeta >= 0.0 && zeta < 1.0)) throw std::invalid_argument("cat_amplitude_from_squeezing: need 0 <= zeta < 1");
  return {std::sqrt(zeta), std::sqrt(3.0 * zeta)};
}

/// Normalized a S(zeta)|0>.
inline FockVector photon_subtracted_squeezed(double zeta, int cutoff = kDefaultCutoff) {
  const Vec v = ModeOperator::annihilation(cutoff + 1).matrix() * make_squeezed_vacuum(zeta, cutoff).amps();
  if (v.norm() == 0.0) throw std::domain_error("photon_subtracted_squeezed: zeta must be > 0");
  return FockVector(v / v.norm(), true);
}

// ---------------------------------------------------------------------------
// Conditional B-mode states of the channel

enum class CBasis { Zero, One, Plus, Minus };

inline const char* cbasis_name(CBasis c) {
  switch (c) {
    case CBasis::Zero: return "0";
    case CBasis::One: return "1";
    case CBasis::Plus: return "+";
    case CBasis::Minus: return "-";
  }
  return "?";
}

inline Vec cbasis_vector(CBasis c) {
  Vec v(2);
  const double s = 1.0 / std::sqrt(2.0);
  switch (c) {
    case CBasis::Zero: v << 1, 0; break;
    case CBasis::One: v << 0, 1; break;
    case CBasis::Plus: v << s, s; break;
    case CBasis::Minus: v << s, -s; break;
  }
  return v;
}

enum class StateClass { Coherent, EvenCat, OddCat, Unmatched };

inline const char* state_class_name(StateClass c) {
  switch (c) {
    case StateClass::Coherent: return "coherent";
    case StateClass::EvenCat: return "EVEN cat";
    case StateClass::OddCat: return "ODD cat";
    case StateClass::Unmatched: return "unmatched";
  }
  return "?";
}

inline constexpr double kClassMatchThreshold = 0.98;

struct Classification {
  StateClass kind = StateClass::Unmatched;
  double fidelity = 0.0;
  cplx amplitude = 0.0;  // coherent amplitude, or cat amplitude times its direction
  double coherent_fidelity = 0.0;
  double even_fidelity = 0.0;
  double odd_fidelity = 0.0;
};

namespace detail {

// Golden-section maximization of f on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, int iters = 80) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi, c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

inline FockVector rotated_cat(double amp, double angle, Parity par, int cutoff) {
  const auto s = apply_mode_operator(MultiModeState::single(Mode::B, make_cat(amp, par, cutoff)),
                                     ModeOperator::phase_shift(cutoff + 1, angle), Mode::B);
  return FockVector(s.amps(), true);
}

}  // namespace detail

/// Best match among a coherent state at <a>, and EVEN/ODD cats oriented along
/// arg(<a^2>)/2 with the amplitude fitted by golden-section search.
inline Classification classify_single_mode(const FockVector& v) {
  const int n = v.cutoff();
  const Mat a = ModeOperator::annihilation(n + 1).matrix();
  const cplx mean_a = v.amps().dot(a * v.amps());
  const cplx mean_a2 = v.amps().dot(a * a * v.amps());
  const double angle = std::abs(mean_a2) > 1e-14 ? std::arg(mean_a2) / 2.0 : 0.0;

  Classification c;
  c.coherent_fidelity = fidelity(v, make_coherent(mean_a, n));
  double best_amp[2] = {0.0, 0.0};
  for (Parity par : {Parity::Even, Parity::Odd}) {
    auto f = [&](double amp) {
      try {
        return fidelity(v, detail::rotated_cat(amp, angle, par, n));
      } catch (const InsufficientCutoff&) {
        return -1.0;  // candidate does not fit the cutoff
      }
    };
    const double amp = detail::golden_max(f, 1e-3, 3.0);
    (par == Parity::Even ? c.even_fidelity : c.odd_fidelity) = f(amp);
    best_amp[par == Parity::Even ? 0 : 1] = amp;
  }
  c.kind = StateClass::Coherent;
  c.fidelity = c.coherent_fidelity;
  c.amplitude = mean_a;
  if (c.even_fidelity > c.fidelity) {
    c.kind = StateClass::EvenCat;
    c.fidelity = c.even_fidelity;
    c.amplitude = std::polar(best_amp[0], angle);
  }
  if (c.odd_fidelity > c.fidelity) {
    c.kind = StateClass::OddCat;
    c.fidelity = c.odd_fidelity;
    c.amplitude = std::polar(best_amp[1], angle);
  }
  if (c.fidelity < kClassMatchThreshold) c.kind = StateClass::Unmatched;
  return c;
}

struct ProjectionWigner {
  CBasis c;
  int d;
  double probability;
  FockVector state;
  PhaseSpaceGrid grid;
  Classification classification;
};

/// Condition C on `c` and D on |d>, then tabulate the Wigner function of B.
inline ProjectionWigner resource_projection_wigner(const MultiModeState& resource, CBasis c, int d,
                                                   const GridSpec& spec = {}) {
  if (resource.modes() != std::vector<Mode>{Mode::B, Mode::C, Mode::D})
    throw std::invalid_argument("resource_projection_wigner: resource must live on B,C,D");
  if (resource.dim(Mode::B) < 3) throw std::invalid_argument("resource_projection_wigner: mode B must be Fock-encoded");
  if (d != 0 && d != 1) throw std::out_of_range("resource_projection_wigner: D outcome must be 0 or 1");
  const auto r = project_mode(resource, Mode::C, cbasis_vector(c));
  if (!r.state) throw std::domain_error("resource_projection_wigner: zero-probability C outcome");
  const auto rd = project_fock(*r.state, Mode::D, d);
  if (!rd.state) throw std::domain_error("resource_projection_wigner: zero-probability D outcome");
  FockVector b(rd.state->amps(), true);
  auto grid = wigner_from_state(b, spec);
  auto cls = classify_single_mode(b);
  return {c, d, r.probability * rd.probability, std::move(b), std::move(grid), cls};
}

}  // namespace hybridtp
