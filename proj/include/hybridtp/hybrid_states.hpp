// hybrid_states.hpp
// Named states of the protocol: the B,C,D hybrid channel, the mode-A target
// and their four-mode product, in Fock or qubit encoding.

#pragma once

#include "hybridtp/fidelity.hpp"
#include "hybridtp/fock_core.hpp"

#include <optional>

namespace hybridtp {

/// Fock: mode B is a truncated bosonic mode. Qubit: |+-alpha> -> (|0> +- |1>)/sqrt2.
enum class Encoding { Fock, Qubit };

inline const char* encoding_name(Encoding e) { return e == Encoding::Fock ? "fock" : "qubit"; }

struct ResourceSpec {
  double alpha = 0.5;
  Encoding encoding = Encoding::Fock;
  int cutoff = kDefaultCutoff;
  double theta_b = 0.0;
  double theta_c = 0.0;
  double theta_d = 0.0;

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("resource: alpha must be > 0");
    if (cutoff < 1) throw std::invalid_argument("resource: cutoff must be >= 1");
  }
};

struct TargetSpec {
  enum class Kind { Coefficients, Phase };
  Kind kind = Kind::Phase;
  cplx x = 1.0;
  cplx y = 0.0;
  double phi = 0.0;
  double alpha = 0.5;
  Encoding encoding = Encoding::Qubit;
  int cutoff = kDefaultCutoff;

  static TargetSpec coefficients(cplx x, cplx y, double alpha, Encoding enc, int cutoff = kDefaultCutoff) {
    TargetSpec t;
    t.kind = Kind::Coefficients;
    t.x = x;
    t.y = y;
    t.alpha = alpha;
    t.encoding = enc;
    t.cutoff = cutoff;
    return t;
  }
  static TargetSpec phase(double phi, double alpha = 0.5, Encoding enc = Encoding::Qubit, int cutoff = kDefaultCutoff) {
    TargetSpec t;
    t.kind = Kind::Phase;
    t.phi = phi;
    t.alpha = alpha;
    t.encoding = enc;
    t.cutoff = cutoff;
    return t;
  }
};

/// x^2 = <alpha|-alpha> = e^{-2 alpha^2} for real alpha.
inline double overlap_x2(double alpha) { return std::exp(-2.0 * alpha * alpha); }

/// N_+ = 1/sqrt(2(1+x^2)), N_- = 1/sqrt(2(1-x^2)).
inline double cat_norm(double alpha, Parity p) {
  const double x2 = overlap_x2(alpha);
  return 1.0 / std::sqrt(2.0 * (1.0 + (p == Parity::Even ? x2 : -x2)));
}

/// Qubit-encoded |+alpha> (sign=+1) or |-alpha> (sign=-1).
inline FockVector qubit_coherent(int sign) {
  Vec v(2);
  v << 1.0, static_cast<double>(sign);
  return FockVector(v / std::sqrt(2.0), true);
}

/// Normalization of X|a> + Y|-a> in the given encoding. The qubit encoding
/// makes |+-a> orthogonal, so the cross term vanishes there.
inline double target_norm_squared(cplx x, cplx y, double alpha, Encoding enc) {
  const double ov = enc == Encoding::Fock ? overlap_x2(alpha) : 0.0;
  return std::norm(x) + std::norm(y) + 2.0 * ov * (std::conj(x) * y).real();
}

/// (A_+, A_-) with X|a> + Y|-a> = A_+ |EVEN,a> + A_- |ODD,a>.
inline std::pair<cplx, cplx> cat_coefficients(cplx x, cplx y, double alpha) {
  return {(x + y) / (2.0 * cat_norm(alpha, Parity::Even)), (x - y) / (2.0 * cat_norm(alpha, Parity::Odd))};
}

/// X and Y of the phase target: ((1+e^{i phi})/2, (1-e^{i phi})/2).
inline std::pair<cplx, cplx> phase_coefficients(double phi) {
  const cplx e = std::polar(1.0, phi);
  return {(1.0 + e) / 2.0, (1.0 - e) / 2.0};
}

/// Fidelity between |alpha e^{i phi}> and its two-level stand-in
/// (|0> + e^{i phi}|1>)/sqrt2. Equals e^{-a^2}(1+a)^2/2 analytically.
inline double phase_truncation_fidelity(double alpha, double phi, int cutoff = kDefaultCutoff) {
  const FockVector coh = make_coherent(alpha * std::polar(1.0, phi), cutoff);
  Vec two = Vec::Zero(cutoff + 1);
  two(0) = 1.0 / std::sqrt(2.0);
  two(1) = std::polar(1.0, phi) / std::sqrt(2.0);
  return fidelity(coh.amps(), two);
}

namespace detail {

// 1/2 ([|p>|0> - |m>|1>]|0> + [|p>|0> + |m>|1>]|1>) over B,C,D, with |p>,|m>
// the B-mode states standing in for |alpha>, |-alpha>.
inline MultiModeState channel_from_components(const Vec& p, const Vec& m) {
  const int d = static_cast<int>(p.size());
  Vec amps = Vec::Zero(d * 4);
  for (int b = 0; b < d; ++b) {
    amps(b * 4 + 0 * 2 + 0) = 0.5 * p(b);
    amps(b * 4 + 1 * 2 + 0) = -0.5 * m(b);
    amps(b * 4 + 0 * 2 + 1) = 0.5 * p(b);
    amps(b * 4 + 1 * 2 + 1) = 0.5 * m(b);
  }
  return {{Mode::B, Mode::C, Mode::D}, {d, 2, 2}, amps};
}

}  // namespace detail

/// Tripartite hybrid channel over B,C,D with the phase shifts of `spec` applied.
inline MultiModeState build_resource(const ResourceSpec& spec) {
  spec.validate();
  MultiModeState r = spec.encoding == Encoding::Fock
                         ? detail::channel_from_components(make_coherent(spec.alpha, spec.cutoff).amps(),
                                                           make_coherent(-spec.alpha, spec.cutoff).amps())
                         : detail::channel_from_components(qubit_coherent(+1).amps(), qubit_coherent(-1).amps());
  return phase_shift_all(r, spec.theta_b, spec.theta_c, spec.theta_d).normalized();
}

/// Channel with B components built from a squeezed resource:
/// |+-alpha> -> (S|0> +- a S|0>/|a S|0>|)/sqrt2. Projections onto C = (|0> +- |1>)/sqrt2
/// then give approximate cats of amplitude sqrt(3 zeta) and sqrt(zeta).
inline MultiModeState build_squeezed_resource(double zeta, int cutoff = kDefaultCutoff, double theta_b = 0.0,
                                              double theta_c = 0.0, double theta_d = 0.0) {
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("squeezed resource: need 0 < zeta < 1");
  const Vec even = make_squeezed_vacuum(zeta, cutoff).amps();
  Vec odd = ModeOperator::annihilation(cutoff + 1).matrix() * even;
  odd /= odd.norm();
  const Vec p = (even + odd) / std::sqrt(2.0), m = (even - odd) / std::sqrt(2.0);
  return phase_shift_all(detail::channel_from_components(p, m), theta_b, theta_c, theta_d);
}

/// Single-mode target over A.
inline MultiModeState build_target(const TargetSpec& spec) {
  if (!(spec.alpha > 0.0)) throw std::invalid_argument("target: alpha must be > 0");
  if (spec.kind == TargetSpec::Kind::Phase) {
    if (spec.encoding == Encoding::Fock)
      return MultiModeState::single(Mode::A, make_coherent(spec.alpha * std::polar(1.0, spec.phi), spec.cutoff));
    Vec v(2);
    v << 1.0, std::polar(1.0, spec.phi);
    return {{Mode::A}, {2}, v / std::sqrt(2.0)};
  }
  const double n2 = target_norm_squared(spec.x, spec.y, spec.alpha, spec.encoding);
  if (std::abs(n2 - 1.0) > 1e-8) throw std::invalid_argument("target: coefficients violate the normalization condition");
  Vec v = spec.encoding == Encoding::Fock
              ? Vec(spec.x * make_coherent(spec.alpha, spec.cutoff).amps() +
                    spec.y * make_coherent(-spec.alpha, spec.cutoff).amps())
              : Vec(spec.x * qubit_coherent(+1).amps() + spec.y * qubit_coherent(-1).amps());
  return {{Mode::A}, {static_cast<int>(v.size())}, v / v.norm()};
}

/// |target>_A (x) |resource>_BCD; A and B must share a dimension.
inline MultiModeState build_combined(const MultiModeState& target, const MultiModeState& resource) {
  if (target.modes() != std::vector<Mode>{Mode::A})
    throw std::invalid_argument("combined: target must live on mode A");
  if (resource.modes() != std::vector<Mode>{Mode::B, Mode::C, Mode::D})
    throw std::invalid_argument("combined: resource must live on modes B,C,D");
  if (target.dim(Mode::A) != resource.dim(Mode::B))
    throw DimensionMismatch("combined: modes A and B use different encodings or cutoffs");
  return tensor(target, resource).normalized();
}

}  // namespace hybridtp
