// qubit_circuit.hpp
// Small statevector simulator over the labelled qubits A..D, the gate-level
// channel / target / teleportation circuits and seeded shot sampling.

#pragma once

#include "hybridtp/cqt_protocol.hpp"
#include "hybridtp/fock_core.hpp"
#include "hybridtp/measurement.hpp"

#include <array>
#include <optional>
#include <random>

namespace hybridtp {

enum class GateKind { H, X, Y, Z, S, Sdg, T, Tdg, P, CNOT, CZ };

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "Sdg";
    case GateKind::T: return "T";
    case GateKind::Tdg: return "Tdg";
    case GateKind::P: return "P";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
  }
  return "?";
}

inline GateKind gate_kind_from_name(const std::string& s) {
  for (GateKind k : {GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::S, GateKind::Sdg, GateKind::T,
                     GateKind::Tdg, GateKind::P, GateKind::CNOT, GateKind::CZ})
    if (s == gate_name(k)) return k;
  throw std::invalid_argument("unknown gate kind '" + s + "'");
}

inline bool is_two_qubit(GateKind k) { return k == GateKind::CNOT || k == GateKind::CZ; }

struct Gate {
  GateKind kind;
  Mode target;
  std::optional<Mode> control;
  std::optional<double> angle;

  static Gate single(GateKind k, Mode t) { return {k, t, std::nullopt, std::nullopt}; }
  static Gate phase(Mode t, double a) { return {GateKind::P, t, std::nullopt, a}; }
  static Gate cnot(Mode c, Mode t) { return {GateKind::CNOT, t, c, std::nullopt}; }
  static Gate cz(Mode c, Mode t) { return {GateKind::CZ, t, c, std::nullopt}; }
};

/// 2x2 for single-qubit gates; 4x4 over (control, target) for CNOT and CZ.
inline Mat gate_matrix(const Gate& g) {
  const cplx i(0, 1);
  const double r = 1.0 / std::sqrt(2.0);
  Mat m(2, 2);
  switch (g.kind) {
    case GateKind::H: m << r, r, r, -r; break;
    case GateKind::X: m << 0, 1, 1, 0; break;
    case GateKind::Y: m << 0, -i, i, 0; break;
    case GateKind::Z: m << 1, 0, 0, -1; break;
    case GateKind::S: m << 1, 0, 0, i; break;
    case GateKind::Sdg: m << 1, 0, 0, -i; break;
    case GateKind::T: m << 1, 0, 0, std::polar(1.0, kPi / 4); break;
    case GateKind::Tdg: m << 1, 0, 0, std::polar(1.0, -kPi / 4); break;
    case GateKind::P:
      if (!g.angle) throw std::invalid_argument("P gate needs an angle");
      m << 1, 0, 0, std::polar(1.0, *g.angle);
      break;
    case GateKind::CNOT:
      m = Mat::Identity(4, 4);
      m.bottomRightCorner(2, 2) << 0, 1, 1, 0;
      break;
    case GateKind::CZ:
      m = Mat::Identity(4, 4);
      m(3, 3) = -1;
      break;
  }
  return m;
}

struct QubitCircuit {
  std::vector<Mode> qubits;  // canonical order A < B < C < D
  std::vector<Gate> gates;

  explicit QubitCircuit(std::vector<Mode> q = {}) : qubits(std::move(q)) {
    std::sort(qubits.begin(), qubits.end());
    if (std::adjacent_find(qubits.begin(), qubits.end()) != qubits.end())
      throw std::invalid_argument("circuit qubits must be distinct");
  }

  bool has(Mode m) const { return std::find(qubits.begin(), qubits.end(), m) != qubits.end(); }

  QubitCircuit& add(const Gate& g) {
    if (!has(g.target)) throw std::invalid_argument(std::string("gate target ") + mode_char(g.target) + " not in circuit");
    if (is_two_qubit(g.kind)) {
      if (!g.control) throw std::invalid_argument(std::string(gate_name(g.kind)) + " needs a control");
      if (!has(*g.control))
        throw std::invalid_argument(std::string("gate control ") + mode_char(*g.control) + " not in circuit");
      if (*g.control == g.target) throw std::invalid_argument("control and target coincide");
    } else if (g.control) {
      throw std::invalid_argument(std::string(gate_name(g.kind)) + " takes no control");
    }
    if (g.kind == GateKind::P && !g.angle) throw std::invalid_argument("P gate needs an angle");
    gates.push_back(g);
    return *this;
  }
  QubitCircuit& h(Mode t) { return add(Gate::single(GateKind::H, t)); }
  QubitCircuit& x(Mode t) { return add(Gate::single(GateKind::X, t)); }
  QubitCircuit& z(Mode t) { return add(Gate::single(GateKind::Z, t)); }
  QubitCircuit& p(Mode t, double a) { return add(Gate::phase(t, a)); }
  QubitCircuit& cnot(Mode c, Mode t) { return add(Gate::cnot(c, t)); }
  QubitCircuit& cz(Mode c, Mode t) { return add(Gate::cz(c, t)); }

  /// Gates of `other` appended; its qubits must be a subset of ours.
  QubitCircuit& append(const QubitCircuit& other) {
    for (const auto& g : other.gates) add(g);
    return *this;
  }
};

inline MultiModeState zero_state(const std::vector<Mode>& qubits) {
  Vec v = Vec::Zero(Eigen::Index(1) << qubits.size());
  v(0) = 1.0;
  return {qubits, std::vector<int>(qubits.size(), 2), v};
}

inline MultiModeState apply_gate(const MultiModeState& state, const Gate& g) {
  for (Mode m : state.modes())
    if (state.dim(m) != 2) throw DimensionMismatch("apply_gate: every mode must be a qubit");
  if (!is_two_qubit(g.kind)) return apply_mode_operator(state, ModeOperator::custom(gate_matrix(g), gate_name(g.kind)), g.target);
  if (!g.control) throw std::invalid_argument("apply_gate: two-qubit gate without control");
  const int n = static_cast<int>(state.modes().size());
  const int cbit = n - 1 - state.position(*g.control), tbit = n - 1 - state.position(g.target);
  Vec out = state.amps();
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    if (!((k >> cbit) & 1)) continue;
    if (g.kind == GateKind::CZ) {
      if ((k >> tbit) & 1) out(k) = -out(k);
    } else if (!((k >> tbit) & 1)) {
      std::swap(out(k), out(k | (Eigen::Index(1) << tbit)));
    }
  }
  return {state.modes(), state.dims(), out};
}

/// States after each gate; element 0 is the input.
inline std::vector<MultiModeState> simulate_steps(const QubitCircuit& c, std::optional<MultiModeState> init = std::nullopt) {
  std::vector<MultiModeState> out{init ? *init : zero_state(c.qubits)};
  for (const auto& g : c.gates) out.push_back(apply_gate(out.back(), g));
  return out;
}

inline MultiModeState simulate_statevector(const QubitCircuit& c, std::optional<MultiModeState> init = std::nullopt) {
  MultiModeState s = init ? *init : zero_state(c.qubits);
  for (const auto& g : c.gates) s = apply_gate(s, g);
  return s;
}

// ---------------------------------------------------------------------------
// Protocol circuits

/// H(C), Z(C), CNOT(C->B), X(B), H(B), CNOT(C->D), H(D), Z(B).
inline QubitCircuit build_channel_circuit() {
  QubitCircuit c({Mode::B, Mode::C, Mode::D});
  c.h(Mode::C).z(Mode::C).cnot(Mode::C, Mode::B).x(Mode::B).h(Mode::B).cnot(Mode::C, Mode::D).h(Mode::D).z(Mode::B);
  return c;
}

/// H(A) followed by phase gates for a total phase phi. Multiples of pi/4 use
/// T/S combinations, anything else a single P(phi).
inline QubitCircuit build_target_circuit(double phi) {
  QubitCircuit c({Mode::A});
  c.h(Mode::A);
  const double steps = phi / (kPi / 4);
  const double k = std::round(steps);
  if (std::abs(steps - k) > 1e-12) return c.p(Mode::A, phi);
  const int q = ((static_cast<int>(k) % 8) + 8) % 8;
  using G = GateKind;
  static const std::vector<std::vector<G>> seq = {{}, {G::T}, {G::S}, {G::S, G::T}, {G::S, G::S}, {G::Sdg, G::Tdg}, {G::Sdg}, {G::Tdg}};
  for (G g : seq[q]) c.add(Gate::single(g, Mode::A));
  return c;
}

/// Bell-type rotation on (A,B): CNOT(A->B), H(A).
inline void add_bell_rotation(QubitCircuit& c) { c.cnot(Mode::A, Mode::B).h(Mode::A); }

/// Beam-splitter block on A,B: swap through three CNOTs, X(A), then CNOT(D->B).
/// Afterwards A holds 1 xor b and B holds a xor d, so the deferred block below
/// applies X^a then Z^(1 xor b xor d) to C, which is the correction table.
inline void add_beam_splitter_block(QubitCircuit& c) {
  c.cnot(Mode::A, Mode::B).cnot(Mode::B, Mode::A).cnot(Mode::A, Mode::B).x(Mode::A).cnot(Mode::D, Mode::B);
}

/// CNOT(B->C), CNOT(D->C), CZ(A,C), CZ(C,D).
inline void add_deferred_block(QubitCircuit& c) {
  c.cnot(Mode::B, Mode::C).cnot(Mode::D, Mode::C).cz(Mode::A, Mode::C).cz(Mode::C, Mode::D);
}

/// Target prep, channel prep, P(thB), P(thC), P(thD), Bell rotation,
/// beam-splitter block, deferred corrections, and a final H(C) returning Bob's
/// qubit from the computational to the |+->-encoding of the input.
inline QubitCircuit build_full_cqt_circuit(double phi, double theta_b, double theta_c, double theta_d) {
  QubitCircuit c({Mode::A, Mode::B, Mode::C, Mode::D});
  c.append(build_target_circuit(phi)).append(build_channel_circuit());
  c.p(Mode::B, theta_b).p(Mode::C, theta_c).p(Mode::D, theta_d);
  add_bell_rotation(c);
  add_beam_splitter_block(c);
  add_deferred_block(c);
  c.h(Mode::C);
  return c;
}

/// Phase choice theta_B = theta_C = phi - pi/2, theta_D = 0.
inline std::array<double, 3> criterion_phases(double phi) { return {phi - kPi / 2, phi - kPi / 2, 0.0}; }

inline std::vector<double> tabulated_phases() {
  std::vector<double> v;
  for (int k = 0; k < 8; ++k) v.push_back(k * kPi / 4);
  return v;
}

inline std::array<double, 2> qubit_marginal(const MultiModeState& s, Mode m) {
  const Mat rho = partial_trace(s, {m}).matrix();
  return {rho(0, 0).real(), rho(1, 1).real()};
}

inline Mat qubit_density(const MultiModeState& s, Mode m) { return partial_trace(s, {m}).matrix(); }

// ---------------------------------------------------------------------------
// Sampling

/// Uniform double in [0,1) from the top 53 bits of one mt19937_64 draw.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t sample_index(const std::vector<double>& cumulative, std::mt19937_64& rng) {
  const double u = uniform01(rng) * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

/// Counts per outcome bitstring (qubits in canonical order, first qubit leftmost).
struct ShotRecord {
  std::vector<Mode> qubits;
  std::map<std::string, long> counts;
  long shots = 0;
  std::uint64_t seed = 0;

  long total() const {
    long t = 0;
    for (const auto& [k, v] : counts) t += v;
    return t;
  }
  /// Empirical [P(0), P(1)] of one qubit.
  std::array<double, 2> marginal(Mode m) const {
    const auto pos = std::find(qubits.begin(), qubits.end(), m) - qubits.begin();
    if (pos == static_cast<long>(qubits.size())) throw std::invalid_argument("ShotRecord: qubit not measured");
    double ones = 0;
    for (const auto& [k, v] : counts)
      if (k[pos] == '1') ones += v;
    return {1.0 - ones / shots, ones / shots};
  }
};

inline std::string bitstring(std::size_t index, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t b = 0; b < n; ++b)
    if ((index >> (n - 1 - b)) & 1) s[b] = '1';
  return s;
}

inline ShotRecord sample_state(const MultiModeState& s, long shots, std::mt19937_64& rng, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  std::vector<double> cum(static_cast<std::size_t>(s.amps().size()));
  double acc = 0.0;
  for (std::size_t k = 0; k < cum.size(); ++k) cum[k] = acc += std::norm(s.amps()(static_cast<Eigen::Index>(k)));
  ShotRecord r{s.modes(), {}, shots, seed};
  for (long i = 0; i < shots; ++i) ++r.counts[bitstring(sample_index(cum, rng), s.modes().size())];
  return r;
}

inline ShotRecord sample_shots(const QubitCircuit& c, long shots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_state(simulate_statevector(c), shots, rng, seed);
}

struct MidcircuitBranch {
  int a, b, d;
  BellLabel bell;
  Correction correction;
  double probability;
  Vec output;  // C after correction and H, normalized; empty if probability is 0
};

/// Mid-circuit version of the teleportation: run up to the Bell rotation,
/// measure A, B and D, apply the tabulated correction for (Bell label, count)
/// to C, then H(C). Eight branches in the order (a, b, d).
inline std::vector<MidcircuitBranch> midcircuit_branches(double phi, double theta_b, double theta_c, double theta_d) {
  QubitCircuit pre({Mode::A, Mode::B, Mode::C, Mode::D});
  pre.append(build_target_circuit(phi)).append(build_channel_circuit());
  pre.p(Mode::B, theta_b).p(Mode::C, theta_c).p(Mode::D, theta_d);
  add_bell_rotation(pre);
  const MultiModeState s = simulate_statevector(pre);

  // (a, b) after the rotation identify the Bell label in the qubit encoding.
  static const BellLabel label[2][2] = {{BellLabel::PhiPlus, BellLabel::PhiMinus}, {BellLabel::PsiPlus, BellLabel::PsiMinus}};
  const Mat h = gate_matrix(Gate::single(GateKind::H, Mode::C));
  std::vector<MidcircuitBranch> out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int d = 0; d < 2; ++d) {
        const auto r = project_pattern(s, {{Mode::A, a}, {Mode::B, b}, {Mode::D, d}});
        MidcircuitBranch br{a, b, d, label[a][b], lookup_correction(label[a][b], d), r.probability, Vec()};
        if (r.state) br.output = h * correction_matrix(br.correction) * r.state->amps();
        out.push_back(std::move(br));
      }
  return out;
}

/// Branch-averaged density matrix of C for the mid-circuit version.
inline Mat midcircuit_density(double phi, double theta_b, double theta_c, double theta_d) {
  Mat rho = Mat::Zero(2, 2);
  for (const auto& br : midcircuit_branches(phi, theta_b, theta_c, theta_d))
    if (br.output.size()) rho += br.probability * br.output * br.output.adjoint();
  return rho;
}

/// Shots of the mid-circuit version: draw a branch, then C within it.
/// Returns counts of C only.
inline ShotRecord sample_midcircuit(double phi, double theta_b, double theta_c, double theta_d, long shots,
                                    std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  std::vector<double> branch_cum, p_one;
  double acc = 0.0;
  for (const auto& br : midcircuit_branches(phi, theta_b, theta_c, theta_d)) {
    branch_cum.push_back(acc += br.probability);
    p_one.push_back(br.output.size() ? std::norm(br.output(1)) : 0.0);
  }
  std::mt19937_64 rng(seed);
  ShotRecord rec{{Mode::C}, {}, shots, seed};
  for (long i = 0; i < shots; ++i) {
    const std::size_t k = sample_index(branch_cum, rng);
    ++rec.counts[uniform01(rng) < p_one[k] ? "1" : "0"];
  }
  return rec;
}

struct PhaseTableRow {
  double phi;
  double theta;  // theta_B = theta_C
  std::array<double, 2> exact;
  std::array<double, 2> empirical;
  Mat rho_c;
  ShotRecord record;
};

/// For each phi: full circuit under the criterion phases, exact qubit-C
/// marginal and density matrix, and `shots` samples. One generator seeded
/// once serves all rows in order.
inline std::vector<PhaseTableRow> phase_table_experiment(const std::vector<double>& phis, long shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<PhaseTableRow> rows;
  for (double phi : phis) {
    const auto th = criterion_phases(phi);
    const auto s = simulate_statevector(build_full_cqt_circuit(phi, th[0], th[1], th[2]));
    auto rec = sample_state(s, shots, rng, seed);
    rows.push_back({phi, th[0], qubit_marginal(s, Mode::C), rec.marginal(Mode::C), qubit_density(s, Mode::C), std::move(rec)});
  }
  return rows;
}

}  // namespace hybridtp
