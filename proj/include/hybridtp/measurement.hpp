// measurement.hpp
// Quasi-Bell projections on (A,B), the inefficient photon-counter POVM, Fock
// projections and the triple-quadrature correlator.

#pragma once

#include "hybridtp/fock_core.hpp"
#include "hybridtp/hybrid_states.hpp"

#include <array>
#include <optional>

namespace hybridtp {

enum class BellLabel { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

inline constexpr std::array<BellLabel, 4> kBellLabels = {BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus,
                                                         BellLabel::PsiMinus};

inline const char* bell_name(BellLabel b) {
  switch (b) {
    case BellLabel::PhiPlus: return "phi+";
    case BellLabel::PhiMinus: return "phi-";
    case BellLabel::PsiPlus: return "psi+";
    case BellLabel::PsiMinus: return "psi-";
  }
  return "?";
}

/// One outcome of a measurement. `state` is normalized over the remaining
/// modes, or empty when the branch has zero probability.
struct ConditionalResult {
  std::string label;
  double probability = 0.0;
  std::optional<MultiModeState> state;
};

/// The four entangled-coherent analogues of the Bell states over (A,B):
///   phi+- = sqrt2 N+ N- (|a,a> +- |-a,-a>),  psi+- = sqrt2 N+ N- (|a,-a> +- |-a,a>).
/// Each vector is stored after numerical renormalization; `raw_norm_squared`
/// is its norm before that and `correction` the factor applied.
struct QuasiBellSet {
  double alpha = 0.0;
  Encoding encoding = Encoding::Fock;
  int dim = 0;
  std::array<Vec, 4> raw;
  std::array<Vec, 4> vectors;
  std::array<double, 4> raw_norm_squared{};
  std::array<double, 4> correction{};

  const Vec& operator[](BellLabel b) const { return vectors[static_cast<int>(b)]; }
};

inline QuasiBellSet quasi_bell_states(double alpha, Encoding enc = Encoding::Fock, int cutoff = kDefaultCutoff) {
  if (!(alpha > 0.0)) throw std::invalid_argument("quasi_bell_states: alpha must be > 0");
  QuasiBellSet q;
  q.alpha = alpha;
  q.encoding = enc;
  Vec p, m;
  double pref;
  if (enc == Encoding::Fock) {
    p = make_coherent(alpha, cutoff).amps();
    m = make_coherent(-alpha, cutoff).amps();
    pref = std::sqrt(2.0) * cat_norm(alpha, Parity::Even) * cat_norm(alpha, Parity::Odd);
  } else {
    p = qubit_coherent(+1).amps();
    m = qubit_coherent(-1).amps();
    pref = 1.0 / std::sqrt(2.0);  // N+- -> 1/sqrt2 once the components are orthogonal
  }
  q.dim = static_cast<int>(p.size());
  auto kron = [](const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
  };
  const Vec pp = kron(p, p), mm = kron(m, m), pm = kron(p, m), mp = kron(m, p);
  q.raw = {pref * (pp + mm), pref * (pp - mm), pref * (pm + mp), pref * (pm - mp)};
  for (int i = 0; i < 4; ++i) {
    q.raw_norm_squared[i] = q.raw[i].squaredNorm();
    q.correction[i] = 1.0 / std::sqrt(q.raw_norm_squared[i]);
    q.vectors[i] = q.raw[i] * q.correction[i];
  }
  return q;
}

/// Analytic pre-correction norm^2 for the Fock set: (1+x^4)/(1-x^4) for the
/// symmetric combinations and 1 for the antisymmetric ones.
inline double quasi_bell_raw_norm_squared(double alpha, BellLabel b) {
  const double x4 = std::pow(overlap_x2(alpha), 2);
  return (b == BellLabel::PhiPlus || b == BellLabel::PsiPlus) ? (1 + x4) / (1 - x4) : 1.0;
}

/// Analytic pre-correction <phi+|psi+> = 8 N+^2 N-^2 x^2.
inline double quasi_bell_phi_psi_overlap(double alpha) {
  const double np = cat_norm(alpha, Parity::Even), nm = cat_norm(alpha, Parity::Odd);
  return 8.0 * np * np * nm * nm * overlap_x2(alpha);
}

namespace detail {

inline ConditionalResult conditional(std::string label, const MultiModeState& unnormalized) {
  ConditionalResult r;
  r.label = std::move(label);
  r.probability = unnormalized.norm_squared();
  if (r.probability > 1e-300) r.state = unnormalized.normalized();
  return r;
}

}  // namespace detail

/// Project modes (A,B) of `state` onto one quasi-Bell vector.
inline ConditionalResult project_quasi_bell(const MultiModeState& state, const QuasiBellSet& set, BellLabel which) {
  if (state.dim(Mode::A) != set.dim || state.dim(Mode::B) != set.dim)
    throw DimensionMismatch("project_quasi_bell: basis and state dimensions differ");
  return detail::conditional(bell_name(which), contract(state, {Mode::A, Mode::B}, set[which]));
}

/// Project one mode onto an arbitrary (normalized) vector.
inline ConditionalResult project_mode(const MultiModeState& state, Mode mode, const Vec& bra, std::string label = "") {
  return detail::conditional(std::move(label), contract(state, {mode}, bra));
}

inline ConditionalResult project_fock(const MultiModeState& state, Mode mode, int n) {
  const int d = state.dim(mode);
  if (n < 0 || n >= d) throw std::out_of_range("project_fock: photon number outside the mode dimension");
  Vec bra = Vec::Zero(d);
  bra(n) = 1.0;
  return project_mode(state, mode, bra, std::string(1, mode_char(mode)) + "=" + std::to_string(n));
}

/// Successive Fock projections, e.g. {{A,1},{B,0}}.
inline ConditionalResult project_pattern(const MultiModeState& state, const std::vector<std::pair<Mode, int>>& pattern) {
  if (pattern.empty()) throw std::invalid_argument("project_pattern: empty pattern");
  std::vector<Mode> modes;
  Vec bra = Vec::Ones(1);
  std::string label;
  for (auto [m, n] : pattern) {
    const int d = state.dim(m);
    if (n < 0 || n >= d) throw std::out_of_range("project_pattern: photon number outside the mode dimension");
    Vec k = Vec::Zero(d);
    k(n) = 1.0;
    Vec next(bra.size() * d);
    for (Eigen::Index i = 0; i < bra.size(); ++i) next.segment(i * d, d) = bra(i) * k;
    bra = next;
    modes.push_back(m);
    if (!label.empty()) label += ",";
    label += std::string(1, mode_char(m)) + "=" + std::to_string(n);
  }
  return detail::conditional(label, contract(state, modes, bra));
}

/// Diagonal element sum_n [1 - (1-eta)^n] |n><n| of an inefficient click detector.
struct PovmElement {
  double eta = 1.0;
  Eigen::VectorXd diagonal;
};

inline PovmElement photon_counter_povm(double eta, int cutoff) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("photon_counter_povm: need 0 < eta <= 1");
  PovmElement p;
  p.eta = eta;
  p.diagonal.resize(cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) p.diagonal(n) = 1.0 - std::pow(1.0 - eta, n);
  return p;
}

/// Click outcome of `povm` on `mode`. The post-click state follows the Lueders
/// rule sqrt(Pi)|psi>, renormalized.
inline ConditionalResult apply_povm(const MultiModeState& state, const PovmElement& povm, Mode mode) {
  if (povm.diagonal.size() != state.dim(mode)) throw DimensionMismatch("apply_povm: cutoff mismatch");
  Mat root = Mat::Zero(povm.diagonal.size(), povm.diagonal.size());
  for (Eigen::Index n = 0; n < povm.diagonal.size(); ++n) root(n, n) = std::sqrt(povm.diagonal(n));
  const MultiModeState after = apply_mode_operator(state, ModeOperator::custom(root, "sqrt(Pi)"), mode);
  ConditionalResult r;
  r.label = std::string("click ") + mode_char(mode);
  r.probability = after.norm_squared();
  if (r.probability > 1e-300) r.state = after.normalized();
  return r;
}

/// <X_B X_C X_D> with X = (a + a^dag)/sqrt2 on every mode (2x2 truncation on
/// the single-photon modes).
inline double quadrature_expectation_xxx(const MultiModeState& resource) {
  MultiModeState s = resource;
  for (Mode m : {Mode::B, Mode::C, Mode::D}) s = apply_mode_operator(s, ModeOperator::quadrature(s.dim(m)), m);
  return inner(resource, s).real();
}

/// alpha sin(thB - thC) sin(thD), as printed for the correlator.
inline double quadrature_xxx_printed(double alpha, double theta_b, double theta_c, double theta_d) {
  return alpha * std::sin(theta_b - theta_c) * std::sin(theta_d);
}

/// Exact value of the correlator on the phased channel:
/// (alpha/sqrt2) e^{-2 alpha^2} sin(thB) cos(thC) sin(thD).
inline double quadrature_xxx_exact(double alpha, double theta_b, double theta_c, double theta_d) {
  return alpha / std::sqrt(2.0) * std::exp(-2.0 * alpha * alpha) * std::sin(theta_b) * std::cos(theta_c) *
         std::sin(theta_d);
}

}  // namespace hybridtp
