// cqt_protocol.hpp
// Controlled teleportation: Bell-outcome x photon-count branches with Bob's
// corrections, the first-order Fock pipeline, and the closed-form fidelities
// and density matrices of the first and second order.

#pragma once

#include "hybridtp/fidelity.hpp"
#include "hybridtp/fock_core.hpp"
#include "hybridtp/hybrid_states.hpp"
#include "hybridtp/measurement.hpp"

#include <array>

namespace hybridtp {

/// Bob's unitaries. U1 = sigma_z, U2 = i sigma_x, U3 = i sigma_y.
enum class Correction { I, U1, U2, U3, NegU2, NegU3 };

inline const char* correction_name(Correction c) {
  switch (c) {
    case Correction::I: return "I";
    case Correction::U1: return "U1";
    case Correction::U2: return "U2";
    case Correction::U3: return "U3";
    case Correction::NegU2: return "-U2";
    case Correction::NegU3: return "-U3";
  }
  return "?";
}

inline Mat correction_matrix(Correction c) {
  const cplx i(0, 1);
  Mat m(2, 2);
  switch (c) {
    case Correction::I: m << 1, 0, 0, 1; break;
    case Correction::U1: m << 1, 0, 0, -1; break;
    case Correction::U2: m << 0, i, i, 0; break;
    case Correction::U3: m << 0, 1, -1, 0; break;
    case Correction::NegU2: m << 0, -i, -i, 0; break;
    case Correction::NegU3: m << 0, -1, 1, 0; break;
  }
  return m;
}

struct CorrectionRow {
  int index;  // 1-based row number
  BellLabel bell;
  int count;
  Correction correction;
};

/// The eight (Bell outcome, Charlie count) -> correction rows.
inline const std::array<CorrectionRow, 8>& correction_table() {
  static const std::array<CorrectionRow, 8> rows = {{
      {1, BellLabel::PhiPlus, 0, Correction::U1},
      {2, BellLabel::PhiPlus, 1, Correction::I},
      {3, BellLabel::PhiMinus, 0, Correction::I},
      {4, BellLabel::PhiMinus, 1, Correction::U1},
      {5, BellLabel::PsiPlus, 0, Correction::NegU3},
      {6, BellLabel::PsiPlus, 1, Correction::U2},
      {7, BellLabel::PsiMinus, 0, Correction::NegU2},
      {8, BellLabel::PsiMinus, 1, Correction::U3},
  }};
  return rows;
}

inline Correction lookup_correction(BellLabel b, int count) {
  for (const auto& r : correction_table())
    if (r.bell == b && r.count == count) return r.correction;
  throw std::out_of_range("lookup_correction: count must be 0 or 1");
}

/// Charlie's count -> correction when Alice registers |10>: 0 -> U1, 1 -> I.
inline Correction first_order_correction(int count) {
  if (count == 0) return Correction::U1;
  if (count == 1) return Correction::I;
  throw std::out_of_range("first_order_correction: count must be 0 or 1");
}

struct ProtocolOutcome {
  BellLabel bell;
  int count;
  double probability;
  Correction correction;
  Vec output;  // normalized state of C after correction; empty if probability is 0
  double fidelity;
};

/// All eight branches for a qubit-encoded coefficient target X|a> + Y|-a>.
/// The reference output is X|0> + Y|1> on mode C.
inline std::vector<ProtocolOutcome> run_cqt_dv(const TargetSpec& target) {
  if (target.kind != TargetSpec::Kind::Coefficients || target.encoding != Encoding::Qubit)
    throw std::invalid_argument("run_cqt_dv: needs a qubit-encoded coefficient target");
  ResourceSpec rs;
  rs.alpha = target.alpha;
  rs.encoding = Encoding::Qubit;
  const auto psi = build_combined(build_target(target), build_resource(rs));
  const auto basis = quasi_bell_states(target.alpha, Encoding::Qubit);
  Vec ref(2);
  ref << target.x, target.y;

  std::vector<ProtocolOutcome> out;
  for (const auto& row : correction_table()) {
    const auto bell = project_quasi_bell(psi, basis, row.bell);
    ProtocolOutcome o{row.bell, row.count, 0.0, row.correction, Vec(), 0.0};
    if (bell.state) {
      const auto d = project_fock(*bell.state, Mode::D, row.count);
      o.probability = bell.probability * d.probability;
      if (d.state) {
        o.output = correction_matrix(row.correction) * d.state->amps();
        o.fidelity = fidelity(o.output, ref);
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

// ---------------------------------------------------------------------------
// First order in alpha

/// (|0> + e^{i phi}|1>)/sqrt2, the two-level form of the phase target.
inline Vec phase_input_qubit(double phi) {
  Vec v(2);
  v << 1.0, std::polar(1.0, phi);
  return v / std::sqrt(2.0);
}

/// (1/2)[(e^{i phi} + e^{i thB})|0> + (e^{i phi} - e^{i thB}) e^{i thC}|1>], unit norm.
inline Vec ideal_output_first_order(double phi, double theta_b, double theta_c) {
  const cplx ep = std::polar(1.0, phi), eb = std::polar(1.0, theta_b);
  Vec v(2);
  v << (ep + eb) / 2.0, (ep - eb) * std::polar(1.0, theta_c) / 2.0;
  return v;
}

/// (1/4)[2 + cos(thB - thC) - cos(2 phi - thB - thC)].
inline double fidelity_first_order_closed(double phi, double theta_b, double theta_c) {
  return 0.25 * (2.0 + std::cos(theta_b - theta_c) - std::cos(2.0 * phi - theta_b - theta_c));
}

enum class RhoForm {
  Printed,    // y = e^{2i(phi - thB)}/2
  Consistent  // y = e^{2i(phi - thB)}, equal to |out><out| when thB = thC
};

/// (1/2)[[1 + cos(phi - thB), x*(1 - y)], [x(1 - y*), 1 - cos(phi - thB)]] with x = e^{i phi}/2.
inline Mat rho_c_first_order_closed(double phi, double theta_b, RhoForm form = RhoForm::Consistent) {
  const cplx x = std::polar(1.0, phi) / 2.0;
  const cplx y = std::polar(form == RhoForm::Printed ? 0.5 : 1.0, 2.0 * (phi - theta_b));
  const double c = std::cos(phi - theta_b);
  Mat m(2, 2);
  m << 1.0 + c, std::conj(x) * (1.0 - y), x * (1.0 - std::conj(y)), 1.0 - c;
  return 0.5 * m;
}

struct FirstOrderResult {
  double phi, theta_b, theta_c, theta_d, alpha;
  int cutoff;
  double p_click;                 // probability of the |10>_AB outcome
  std::array<double, 2> p_count;  // Charlie's count given |10>_AB
  std::array<Vec, 2> corrected;   // C after each count and its correction, normalized
  Mat rho_c;                      // sum_d p_d |corrected_d><corrected_d|
  Vec ideal;                      // closed-form output state
  Vec input;                      // (|0> + e^{i phi}|1>)/sqrt2
  double fidelity_numeric;        // <input|rho_c|input>
  double fidelity_closed;
  double higher_order_weight;     // AB weight outside n_A + n_B <= 1 after the splitter
};

/// Combined Fock state -> 50:50 splitter on (A,B) -> |10>_AB projection ->
/// Charlie's count on D -> Bob's correction on C.
inline FirstOrderResult run_cqt_cv_first_order(double phi, double theta_b, double theta_c, double theta_d,
                                               double alpha, int cutoff = kDefaultCutoff) {
  ResourceSpec rs;
  rs.alpha = alpha;
  rs.cutoff = cutoff;
  rs.theta_b = theta_b;
  rs.theta_c = theta_c;
  rs.theta_d = theta_d;
  const auto combined = build_combined(build_target(TargetSpec::phase(phi, alpha, Encoding::Fock, cutoff)),
                                       build_resource(rs));
  const auto mixed = beam_splitter_5050(combined, Mode::A, Mode::B);

  FirstOrderResult r{phi, theta_b, theta_c, theta_d, alpha, cutoff, 0.0, {0.0, 0.0}, {}, Mat::Zero(2, 2),
                     ideal_output_first_order(phi, theta_b, theta_c), phase_input_qubit(phi), 0.0,
                     fidelity_first_order_closed(phi, theta_b, theta_c), 0.0};

  double low = 0.0;
  for (int na = 0; na <= 1; ++na)
    for (int nb = 0; na + nb <= 1; ++nb) low += project_pattern(mixed, {{Mode::A, na}, {Mode::B, nb}}).probability;
  r.higher_order_weight = std::max(0.0, 1.0 - low);

  const auto click = project_pattern(mixed, {{Mode::A, 1}, {Mode::B, 0}});
  if (!click.state) throw std::domain_error("first-order pipeline: the |10> outcome has zero probability");
  r.p_click = click.probability;
  for (int d = 0; d <= 1; ++d) {
    const auto branch = project_fock(*click.state, Mode::D, d);
    r.p_count[d] = branch.probability;
    if (!branch.state) continue;
    r.corrected[d] = correction_matrix(first_order_correction(d)) * branch.state->amps();
    r.rho_c += branch.probability * r.corrected[d] * r.corrected[d].adjoint();
  }
  r.fidelity_numeric = fidelity(r.rho_c, r.input);
  return r;
}

/// Phase angles 0, 2pi/(n-1), ..., 2pi.
inline std::vector<double> default_phase_grid(int points = 17) {
  if (points < 2) throw std::invalid_argument("phase grid needs at least 2 points");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = 2.0 * kPi * i / (points - 1);
  return g;
}

// ---------------------------------------------------------------------------
// Second order in alpha

/// Heralded C,D state at second order. `raw` is the matrix as assembled from
/// the a, b, c, d, e, f entries (overall factor 1/4, trace alpha^2);
/// `normalized` is raw / trace.
struct SecondOrderDensity {
  double phi, theta_b, theta_c, theta_d, alpha;
  cplx a, b, c, d, e, f;
  Mat raw;
  Mat normalized;
};

inline SecondOrderDensity rho_cd_second_order(double phi, double theta_b, double theta_c, double theta_d,
                                              double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("rho_cd_second_order: alpha must be > 0");
  const double del = phi - theta_b, a2 = alpha * alpha;
  const double k = 1.0 + a2 * (1.0 + std::cos(del));
  const cplx i(0, 1);
  SecondOrderDensity s{phi, theta_b, theta_c, theta_d, alpha, 0, 0, 0, 0, 0, 0, Mat(), Mat()};
  s.a = a2 * (1.0 + std::cos(del));
  s.b = a2 / 2.0 * std::exp(-i * del) * (1.0 - std::exp(2.0 * i * del)) * k;
  s.c = a2 / 2.0 * std::exp(i * del) * (1.0 - std::exp(-2.0 * i * del)) * k;
  s.d = a2 * (1.0 - std::cos(del));
  s.e = std::polar(1.0, theta_c);
  s.f = std::polar(1.0, theta_d);
  const cplx a = s.a, b = s.b, c = s.c, d = s.d, e = s.e, f = s.f;
  const cplx es = std::conj(e), fs = std::conj(f);
  Mat m(4, 4);
  m << a, a * fs, -b * es, b * es * fs,
       a * f, a, -b * es * f, b * es,
       -c * e, -c * e * fs, d, -d * fs,
       c * e * f, c * e, -d * f, d;
  s.raw = 0.25 * m;
  s.normalized = s.raw / s.raw.trace().real();
  return s;
}

/// Tr_D of the assembled matrix, with the raw scale.
inline Mat rho_c_second_order(double phi, double theta_b, double theta_c, double theta_d, double alpha) {
  const auto s = rho_cd_second_order(phi, theta_b, theta_c, theta_d, alpha);
  const DensityOperator cd({Mode::C, Mode::D}, {2, 2}, s.raw);
  return partial_trace(cd, {Mode::C}).matrix();
}

/// (alpha^2/2) diag(1 + cos(phi - thB), 1 - cos(phi - thB)).
inline Mat rho_c_second_order_closed(double phi, double theta_b, double alpha) {
  const double c = std::cos(phi - theta_b);
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = alpha * alpha / 2.0 * (1.0 + c);
  m(1, 1) = alpha * alpha / 2.0 * (1.0 - c);
  return m;
}

/// (1 + cos^2(phi - thB))/2.
inline double fidelity_second_order_closed(double phi, double theta_b) {
  const double c = std::cos(phi - theta_b);
  return (1.0 + c * c) / 2.0;
}

/// Fidelity of the trace-normalized second-order rho_C against the
/// first-order ideal output state.
inline double fidelity_second_order_numeric(double phi, double theta_b, double theta_c, double theta_d,
                                            double alpha) {
  return fidelity(rho_c_second_order(phi, theta_b, theta_c, theta_d, alpha),
                  ideal_output_first_order(phi, theta_b, theta_c));
}

// ---------------------------------------------------------------------------

struct PhaseOnlyFidelity {
  double printed;          // cos^2(phi)/2
  double fock_overlap;     // |<in|out>|^2 with |0>,|1> read as photon numbers
  double logical_overlap;  // |<in|out>|^2 with |0>_C, |1>_C read as |alpha>, |-alpha>
};

/// Fidelity of out = X|0> + Y|1>, X,Y = (1 +- e^{i phi})/2, against the phase target.
inline PhaseOnlyFidelity fidelity_phase_only(double phi) {
  auto [x, y] = phase_coefficients(phi);
  Vec out(2);
  out << x, y;
  PhaseOnlyFidelity f{};
  f.printed = std::pow(std::cos(phi), 2) / 2.0;
  f.fock_overlap = fidelity(out, phase_input_qubit(phi));
  // |0>_C -> |alpha> -> (|0>+|1>)/sqrt2 and |1>_C -> |-alpha> -> (|0>-|1>)/sqrt2
  const Vec logical = x * qubit_coherent(+1).amps() + y * qubit_coherent(-1).amps();
  f.logical_overlap = fidelity(logical, phase_input_qubit(phi));
  return f;
}

}  // namespace hybridtp
