// fock_core.hpp
// Truncated bosonic Hilbert-space kernel: Fock-basis state constructors,
// single-mode operators, multi-mode tensors, beam splitter and partial trace.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hybridtp {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr int kDefaultCutoff = 24;
// Largest probability mass a truncated constructor may discard.
inline constexpr double kMassTolerance = 1e-8;

/// Raised when the Fock cutoff cannot hold a state to within kMassTolerance.
class InsufficientCutoff : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mode labels in their global order. Every tensor is laid out A, B, C, D.
enum class Mode { A = 0, B = 1, C = 2, D = 3 };

inline char mode_char(Mode m) { return static_cast<char>('A' + static_cast<int>(m)); }

inline Mode mode_from_char(char c) {
  if (c < 'A' || c > 'D') throw std::invalid_argument(std::string("unknown mode label '") + c + "'");
  return static_cast<Mode>(c - 'A');
}

inline std::string mode_string(const std::vector<Mode>& modes) {
  std::string s;
  for (Mode m : modes) s += mode_char(m);
  return s;
}

enum class Parity { Even, Odd };

// ---------------------------------------------------------------------------
// Single-mode states

/// Amplitudes of one bosonic mode over |0>..|cutoff>. A qubit-encoded mode is
/// simply a FockVector with cutoff 1.
class FockVector {
 public:
  FockVector(Vec amps, bool normalized) : amps_(std::move(amps)), normalized_(normalized) {
    if (amps_.size() < 2) throw std::invalid_argument("FockVector needs cutoff >= 1");
    if (normalized_ && std::abs(amps_.squaredNorm() - 1.0) > 1e-10)
      throw std::invalid_argument("FockVector flagged normalized but norm deviates from 1");
  }

  int cutoff() const { return static_cast<int>(amps_.size()) - 1; }
  int dim() const { return static_cast<int>(amps_.size()); }
  const Vec& amps() const { return amps_; }
  cplx operator[](int n) const { return amps_(n); }
  bool normalized() const { return normalized_; }
  double norm_squared() const { return amps_.squaredNorm(); }

  FockVector normalized_copy() const {
    const double n = amps_.norm();
    if (n == 0.0) throw std::domain_error("cannot normalize the zero vector");
    return FockVector(amps_ / n, true);
  }

 private:
  Vec amps_;
  bool normalized_;
};

inline FockVector fock_basis(int n, int cutoff) {
  if (n < 0 || n > cutoff) throw std::out_of_range("Fock index outside [0, cutoff]");
  Vec v = Vec::Zero(cutoff + 1);
  v(n) = 1.0;
  return FockVector(std::move(v), true);
}

namespace detail {

// e^{-|a|^2/2} a^n / sqrt(n!) for n = 0..cutoff, without renormalization.
inline Vec coherent_coefficients(cplx alpha, int cutoff) {
  Vec c(cutoff + 1);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= cutoff; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline void check_mass(double kept, const char* what) {
  if (1.0 - kept > kMassTolerance)
    throw InsufficientCutoff(std::string(what) + ": truncation discards " + sci(1.0 - kept) +
                             " of the probability mass");
}

}  // namespace detail

/// Coherent state |alpha>, truncated at `cutoff` and renormalized.
inline FockVector make_coherent(cplx alpha, int cutoff = kDefaultCutoff) {
  if (cutoff < 1) throw std::invalid_argument("make_coherent: cutoff must be >= 1");
  Vec c = detail::coherent_coefficients(alpha, cutoff);
  const double kept = c.squaredNorm();
  detail::check_mass(kept, "make_coherent");
  return FockVector(c / std::sqrt(kept), true);
}

/// N_+ (|a> + |-a>) for EVEN, N_- (|a> - |-a>) for ODD.
inline FockVector make_cat(double alpha, Parity parity, int cutoff = kDefaultCutoff) {
  if (!(alpha > 0.0)) throw std::invalid_argument("make_cat: alpha must be > 0");
  if (cutoff < 1) throw std::invalid_argument("make_cat: cutoff must be >= 1");
  const double sign = parity == Parity::Even ? 1.0 : -1.0;
  Vec c = detail::coherent_coefficients(alpha, cutoff) + sign * detail::coherent_coefficients(-alpha, cutoff);
  const double exact = 2.0 * (1.0 + sign * std::exp(-2.0 * alpha * alpha));
  const double kept = c.squaredNorm();
  detail::check_mass(kept / exact, "make_cat");
  return FockVector(c / std::sqrt(kept), true);
}

/// Squeezed vacuum in the even-Fock expansion
///   (1/sqrt(cosh z)) sum_n sqrt((2n)!)/(2^n n!) tanh^n(z) |2n>.
inline FockVector make_squeezed_vacuum(double zeta, int cutoff = kDefaultCutoff) {
  if (!(zeta >= 0.0 && zeta < 1.0)) throw std::invalid_argument("make_squeezed_vacuum: need 0 <= zeta < 1");
  if (cutoff < 1) throw std::invalid_argument("make_squeezed_vacuum: cutoff must be >= 1");
  const double t = std::tanh(zeta);
  Vec c = Vec::Zero(cutoff + 1);
  double term = 1.0 / std::sqrt(std::cosh(zeta));
  for (int n = 0; 2 * n <= cutoff; ++n) {
    if (n > 0) term *= t * std::sqrt((2.0 * n - 1.0) / (2.0 * n));
    c(2 * n) = term;
  }
  const double kept = c.squaredNorm();
  detail::check_mass(kept, "make_squeezed_vacuum");
  return FockVector(c / std::sqrt(kept), true);
}

// ---------------------------------------------------------------------------
// Single-mode operators

class ModeOperator {
 public:
  enum class Kind { Annihilation, Creation, Number, Quadrature, PhaseShift, Custom };

  ModeOperator(Kind kind, Mat matrix, std::string label)
      : kind_(kind), matrix_(std::move(matrix)), label_(std::move(label)) {
    if (matrix_.rows() != matrix_.cols()) throw DimensionMismatch("mode operator must be square");
  }

  static ModeOperator annihilation(int dim) {
    Mat a = Mat::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {Kind::Annihilation, a, "a"};
  }
  static ModeOperator creation(int dim) { return {Kind::Creation, annihilation(dim).matrix().adjoint(), "a^dag"}; }
  static ModeOperator number(int dim) {
    Mat n = Mat::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return {Kind::Number, n, "n"};
  }
  /// X = (a + a^dag)/sqrt(2). On a qubit-encoded mode this is the 2x2 truncation.
  static ModeOperator quadrature(int dim) {
    const Mat a = annihilation(dim).matrix();
    return {Kind::Quadrature, (a + a.adjoint()) / std::sqrt(2.0), "X"};
  }
  /// exp(+i n theta).
  static ModeOperator phase_shift(int dim, double theta) {
    Mat u = Mat::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) u(k, k) = std::polar(1.0, k * theta);
    return {Kind::PhaseShift, u, "R(" + std::to_string(theta) + ")"};
  }
  static ModeOperator custom(Mat m, std::string label = "custom") {
    return {Kind::Custom, std::move(m), std::move(label)};
  }

  Kind kind() const { return kind_; }
  const Mat& matrix() const { return matrix_; }
  const std::string& label() const { return label_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

 private:
  Kind kind_;
  Mat matrix_;
  std::string label_;
};

inline FockVector apply(const ModeOperator& op, const FockVector& v) {
  if (op.dim() != v.dim()) throw DimensionMismatch("operator and state dimensions differ");
  return FockVector(op.matrix() * v.amps(), false);
}

// ---------------------------------------------------------------------------
// Multi-mode states

/// Amplitude tensor over an ordered subset of {A,B,C,D}, stored row-major
/// with the first listed mode most significant. Modes are always in global
/// order. Conditional states may be sub-normalized.
class MultiModeState {
 public:
  MultiModeState(std::vector<Mode> modes, std::vector<int> dims, Vec amps)
      : modes_(std::move(modes)), dims_(std::move(dims)), amps_(std::move(amps)) {
    if (modes_.size() != dims_.size()) throw DimensionMismatch("one dimension per mode required");
    for (std::size_t i = 1; i < modes_.size(); ++i)
      if (static_cast<int>(modes_[i - 1]) >= static_cast<int>(modes_[i]))
        throw std::invalid_argument("modes must be distinct and in A,B,C,D order");
    std::size_t total = 1;
    for (int d : dims_) {
      if (d < 2) throw DimensionMismatch("every mode needs dimension >= 2");
      total *= static_cast<std::size_t>(d);
    }
    if (static_cast<std::size_t>(amps_.size()) != total)
      throw DimensionMismatch("amplitude count does not match the product of dimensions");
  }

  static MultiModeState single(Mode m, const FockVector& v) { return {{m}, {v.dim()}, v.amps()}; }

  const std::vector<Mode>& modes() const { return modes_; }
  const std::vector<int>& dims() const { return dims_; }
  const Vec& amps() const { return amps_; }
  std::size_t size() const { return static_cast<std::size_t>(amps_.size()); }

  bool has(Mode m) const { return std::find(modes_.begin(), modes_.end(), m) != modes_.end(); }
  int position(Mode m) const {
    auto it = std::find(modes_.begin(), modes_.end(), m);
    if (it == modes_.end()) throw std::invalid_argument(std::string("mode ") + mode_char(m) + " not present");
    return static_cast<int>(it - modes_.begin());
  }
  int dim(Mode m) const { return dims_[position(m)]; }

  /// Amplitude at per-mode indices (one index per mode, in mode order).
  cplx at(const std::vector<int>& idx) const {
    if (idx.size() != dims_.size()) throw DimensionMismatch("index rank mismatch");
    std::size_t lin = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) lin = lin * dims_[i] + idx[i];
    return amps_(static_cast<Eigen::Index>(lin));
  }

  double norm_squared() const { return amps_.squaredNorm(); }
  MultiModeState normalized() const {
    const double n = amps_.norm();
    if (n == 0.0) throw std::domain_error("cannot normalize the zero state");
    return {modes_, dims_, amps_ / n};
  }
  MultiModeState scaled(cplx s) const { return {modes_, dims_, amps_ * s}; }

 private:
  std::vector<Mode> modes_;
  std::vector<int> dims_;
  Vec amps_;
};

/// Hermitian operator over a mode subset.
class DensityOperator {
 public:
  DensityOperator(std::vector<Mode> modes, std::vector<int> dims, Mat matrix)
      : modes_(std::move(modes)), dims_(std::move(dims)), matrix_(std::move(matrix)) {
    std::size_t total = 1;
    for (int d : dims_) total *= static_cast<std::size_t>(d);
    if (modes_.size() != dims_.size() || static_cast<std::size_t>(matrix_.rows()) != total ||
        matrix_.rows() != matrix_.cols())
      throw DimensionMismatch("density matrix shape does not match mode dimensions");
  }

  static DensityOperator from_pure(const MultiModeState& s) {
    return {s.modes(), s.dims(), s.amps() * s.amps().adjoint()};
  }

  const std::vector<Mode>& modes() const { return modes_; }
  const std::vector<int>& dims() const { return dims_; }
  const Mat& matrix() const { return matrix_; }

  cplx trace() const { return matrix_.trace(); }
  double purity() const { return (matrix_ * matrix_).trace().real() / std::norm(trace()); }
  double hermiticity_error() const { return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (matrix_ + matrix_.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
  /// Von Neumann entropy in bits of the trace-normalized operator.
  double entropy_bits() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (matrix_ + matrix_.adjoint()) / trace().real(),
                                          Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (double l : es.eigenvalues())
      if (l > 1e-15) s -= l * std::log2(l);
    return s;
  }

  /// Throws std::domain_error if Hermiticity, positivity or the trace bound fail.
  void check_invariants() const {
    if (hermiticity_error() > 1e-10) throw std::domain_error("density operator is not Hermitian");
    if (min_eigenvalue() < -1e-9) throw std::domain_error("density operator has a negative eigenvalue");
    const cplx t = trace();
    if (std::abs(t.imag()) > 1e-10 || !(t.real() > 0.0) || t.real() > 1.0 + 1e-10)
      throw std::domain_error("density operator trace outside (0, 1]");
  }

  DensityOperator normalized() const { return {modes_, dims_, matrix_ / trace().real()}; }

 private:
  std::vector<Mode> modes_;
  std::vector<int> dims_;
  Mat matrix_;
};

namespace detail {

// For a tensor with `modes`/`dims`, returns old linear index for each linear
// index of the permuted layout whose mode order is `order`.
inline std::vector<std::size_t> permutation_map(const std::vector<Mode>& modes, const std::vector<int>& dims,
                                                const std::vector<Mode>& order) {
  const std::size_t rank = modes.size();
  std::vector<std::size_t> old_stride(rank);
  std::size_t s = 1;
  for (std::size_t i = rank; i-- > 0;) {
    old_stride[i] = s;
    s *= dims[i];
  }
  std::vector<std::size_t> src(rank);
  std::vector<int> new_dims(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    auto it = std::find(modes.begin(), modes.end(), order[i]);
    src[i] = static_cast<std::size_t>(it - modes.begin());
    new_dims[i] = dims[src[i]];
  }
  std::vector<std::size_t> map(s);
  std::vector<int> idx(rank, 0);
  for (std::size_t lin = 0; lin < s; ++lin) {
    std::size_t old = 0;
    for (std::size_t i = 0; i < rank; ++i) old += idx[i] * old_stride[src[i]];
    map[lin] = old;
    for (std::size_t i = rank; i-- > 0;) {
      if (++idx[i] < new_dims[i]) break;
      idx[i] = 0;
    }
  }
  return map;
}

inline std::vector<Mode> with_leading(const std::vector<Mode>& modes, const std::vector<Mode>& lead) {
  std::vector<Mode> order = lead;
  for (Mode m : modes)
    if (std::find(lead.begin(), lead.end(), m) == lead.end()) order.push_back(m);
  return order;
}

// State amplitudes reshaped to (prod dims of `lead`) x (rest), lead in given order.
inline Mat leading_matrix(const MultiModeState& s, const std::vector<Mode>& lead, std::size_t lead_dim) {
  const auto order = with_leading(s.modes(), lead);
  const auto map = permutation_map(s.modes(), s.dims(), order);
  const std::size_t rest = s.size() / lead_dim;
  Mat m(lead_dim, rest);
  for (std::size_t i = 0; i < lead_dim; ++i)
    for (std::size_t j = 0; j < rest; ++j) m(i, j) = s.amps()(map[i * rest + j]);
  return m;
}

inline MultiModeState from_leading_matrix(const MultiModeState& like, const std::vector<Mode>& lead, const Mat& m) {
  const auto order = with_leading(like.modes(), lead);
  const auto map = permutation_map(like.modes(), like.dims(), order);
  const std::size_t rest = static_cast<std::size_t>(m.cols());
  Vec out(like.size());
  for (std::size_t i = 0; i < static_cast<std::size_t>(m.rows()); ++i)
    for (std::size_t j = 0; j < rest; ++j) out(map[i * rest + j]) = m(i, j);
  return {like.modes(), like.dims(), out};
}

inline std::size_t product_dim(const MultiModeState& s, const std::vector<Mode>& modes) {
  std::size_t d = 1;
  for (Mode m : modes) d *= static_cast<std::size_t>(s.dim(m));
  return d;
}

}  // namespace detail

/// Tensor product; the result is reordered into A,B,C,D order.
inline MultiModeState tensor(const MultiModeState& u, const MultiModeState& v) {
  for (Mode m : v.modes())
    if (u.has(m)) throw std::invalid_argument(std::string("tensor: mode ") + mode_char(m) + " appears twice");
  std::vector<Mode> modes = u.modes();
  modes.insert(modes.end(), v.modes().begin(), v.modes().end());
  std::vector<int> dims = u.dims();
  dims.insert(dims.end(), v.dims().begin(), v.dims().end());
  Vec amps(u.size() * v.size());
  for (std::size_t i = 0; i < u.size(); ++i) amps.segment(i * v.size(), v.size()) = u.amps()(i) * v.amps();

  std::vector<Mode> sorted = modes;
  std::sort(sorted.begin(), sorted.end());
  const auto map = detail::permutation_map(modes, dims, sorted);
  Vec out(amps.size());
  for (std::size_t i = 0; i < map.size(); ++i) out(i) = amps(map[i]);
  std::vector<int> sorted_dims;
  for (Mode m : sorted) sorted_dims.push_back(dims[std::find(modes.begin(), modes.end(), m) - modes.begin()]);
  return {sorted, sorted_dims, out};
}

inline MultiModeState tensor(std::initializer_list<MultiModeState> states) {
  if (states.size() == 0) throw std::invalid_argument("tensor of nothing");
  auto it = states.begin();
  MultiModeState acc = *it;
  for (++it; it != states.end(); ++it) acc = tensor(acc, *it);
  return acc;
}

/// <u|v>; both states must be over the same modes with the same dimensions.
inline cplx inner(const MultiModeState& u, const MultiModeState& v) {
  if (u.modes() != v.modes() || u.dims() != v.dims()) throw DimensionMismatch("inner: incompatible states");
  return u.amps().dot(v.amps());
}

inline cplx inner(const FockVector& u, const FockVector& v) {
  if (u.dim() != v.dim()) throw DimensionMismatch("inner: incompatible Fock vectors");
  return u.amps().dot(v.amps());
}

/// (op (x) identity elsewhere) |state>; not renormalized.
inline MultiModeState apply_mode_operator(const MultiModeState& state, const ModeOperator& op, Mode mode) {
  const int d = state.dim(mode);
  if (op.dim() != d) throw DimensionMismatch("operator dimension does not match the mode");
  const Mat m = detail::leading_matrix(state, {mode}, static_cast<std::size_t>(d));
  return detail::from_leading_matrix(state, {mode}, op.matrix() * m);
}

/// exp[i (n_B thB + n_C thC + n_D thD)].
inline MultiModeState phase_shift_all(const MultiModeState& state, double theta_b, double theta_c, double theta_d) {
  MultiModeState s = state;
  const std::pair<Mode, double> shifts[] = {{Mode::B, theta_b}, {Mode::C, theta_c}, {Mode::D, theta_d}};
  for (auto [m, th] : shifts) s = apply_mode_operator(s, ModeOperator::phase_shift(s.dim(m), th), m);
  return s;
}

/// Apply a two-mode operator given on the (x, y) product space, x major.
inline MultiModeState apply_two_mode_operator(const MultiModeState& state, const Mat& op, Mode x, Mode y) {
  const std::size_t d = detail::product_dim(state, {x, y});
  if (static_cast<std::size_t>(op.rows()) != d) throw DimensionMismatch("two-mode operator dimension mismatch");
  const Mat m = detail::leading_matrix(state, {x, y}, d);
  return detail::from_leading_matrix(state, {x, y}, op * m);
}

/// Symmetric beam splitter on two Fock modes with equal cutoff N, exact on
/// the truncated space. Acts as |a>_X |b>_Y -> |(a+b)/sqrt2>_X |(a-b)/sqrt2>_Y.
/// Realized as e^{i pi n_Y} exp[(pi/4)(a^dag b - a b^dag)]; the generator
/// conserves total photon number so the unitary is stored per number block.
class BeamSplitter5050 {
 public:
  explicit BeamSplitter5050(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 1) throw std::invalid_argument("beam splitter needs cutoff >= 1");
    const int dim = cutoff + 1;
    for (int n = 0; n <= 2 * cutoff; ++n) {
      Block b;
      const int k_lo = std::max(0, n - cutoff), k_hi = std::min(n, cutoff);
      for (int k = k_lo; k <= k_hi; ++k) b.index.push_back(static_cast<std::size_t>(k * dim + (n - k)));
      const int size = k_hi - k_lo + 1;
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size, size);
      for (int i = 0; i < size; ++i) {
        const int k = k_lo + i;
        // a^dag b |k, n-k> = sqrt(k+1) sqrt(n-k) |k+1, n-k-1>
        if (i + 1 < size) g(i + 1, i) += std::sqrt((k + 1.0) * (n - k));
        // a b^dag |k, n-k> = sqrt(k) sqrt(n-k+1) |k-1, n-k+1>
        if (i > 0) g(i - 1, i) -= std::sqrt(k * (n - k + 1.0));
      }
      Eigen::MatrixXd u = (0.25 * kPi * g).exp();
      b.unitary = u.cast<cplx>();
      for (int i = 0; i < size; ++i)
        if ((n - (k_lo + i)) % 2 != 0) b.unitary.row(i) *= -1.0;
      blocks_.push_back(std::move(b));
    }
  }

  int cutoff() const { return cutoff_; }

  /// Dense (N+1)^2 x (N+1)^2 matrix, X index major.
  Mat matrix() const {
    const std::size_t d = static_cast<std::size_t>(cutoff_ + 1) * (cutoff_ + 1);
    Mat u = Mat::Zero(d, d);
    for (const auto& b : blocks_)
      for (std::size_t i = 0; i < b.index.size(); ++i)
        for (std::size_t j = 0; j < b.index.size(); ++j) u(b.index[i], b.index[j]) = b.unitary(i, j);
    return u;
  }

  MultiModeState apply(const MultiModeState& state, Mode x, Mode y) const {
    if (state.dim(x) != cutoff_ + 1 || state.dim(y) != cutoff_ + 1)
      throw DimensionMismatch("beam splitter: both modes must be Fock modes with the splitter's cutoff");
    const std::size_t d = static_cast<std::size_t>(cutoff_ + 1) * (cutoff_ + 1);
    const Mat m = detail::leading_matrix(state, {x, y}, d);

    // Photons beyond the cutoff in total would be mishandled by the truncated generator.
    double overflow = 0.0;
    for (std::size_t bi = static_cast<std::size_t>(cutoff_) + 1; bi < blocks_.size(); ++bi)
      for (std::size_t r : blocks_[bi].index) overflow += m.row(r).squaredNorm();
    if (overflow > kMassTolerance * std::max(1.0, m.squaredNorm()))
      throw InsufficientCutoff("beam splitter: total photon number exceeds the cutoff with mass " +
                               detail::sci(overflow));

    Mat out = Mat::Zero(m.rows(), m.cols());
    for (const auto& b : blocks_) {
      Mat sub(b.index.size(), m.cols());
      for (std::size_t i = 0; i < b.index.size(); ++i) sub.row(i) = m.row(b.index[i]);
      const Mat res = b.unitary * sub;
      for (std::size_t i = 0; i < b.index.size(); ++i) out.row(b.index[i]) = res.row(i);
    }
    return detail::from_leading_matrix(state, {x, y}, out);
  }

 private:
  struct Block {
    std::vector<std::size_t> index;
    Mat unitary;
  };
  int cutoff_;
  std::vector<Block> blocks_;
};

/// Shared splitter for a cutoff; built once and immutable afterwards.
inline const BeamSplitter5050& beam_splitter_for(int cutoff) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const BeamSplitter5050>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[cutoff];
  if (!slot) slot = std::make_unique<const BeamSplitter5050>(cutoff);
  return *slot;
}

inline MultiModeState beam_splitter_5050(const MultiModeState& state, Mode x, Mode y) {
  if (state.dim(x) != state.dim(y)) throw DimensionMismatch("beam splitter: cutoffs differ");
  return beam_splitter_for(state.dim(x) - 1).apply(state, x, y);
}

/// <bra| contracted over `modes` (in the given order); the rest keeps its order.
inline MultiModeState contract(const MultiModeState& state, const std::vector<Mode>& modes, const Vec& bra) {
  const std::size_t d = detail::product_dim(state, modes);
  if (static_cast<std::size_t>(bra.size()) != d) throw DimensionMismatch("contract: bra dimension mismatch");
  if (modes.size() >= state.modes().size()) throw std::invalid_argument("contract: no modes would remain");
  const Mat m = detail::leading_matrix(state, modes, d);
  Vec rest = (bra.adjoint() * m).transpose();
  std::vector<Mode> rm;
  std::vector<int> rd;
  for (std::size_t i = 0; i < state.modes().size(); ++i)
    if (std::find(modes.begin(), modes.end(), state.modes()[i]) == modes.end()) {
      rm.push_back(state.modes()[i]);
      rd.push_back(state.dims()[i]);
    }
  return {rm, rd, rest};
}

/// Reduced density operator over `keep` (returned in A,B,C,D order).
inline DensityOperator partial_trace(const MultiModeState& state, std::vector<Mode> keep) {
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw std::invalid_argument("partial_trace: repeated label");
  std::vector<int> dims;
  for (Mode m : keep) dims.push_back(state.dim(m));
  const std::size_t d = detail::product_dim(state, keep);
  const Mat m = detail::leading_matrix(state, keep, d);
  return {keep, dims, m * m.adjoint()};
}

inline DensityOperator partial_trace(const DensityOperator& rho, std::vector<Mode> keep) {
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw std::invalid_argument("partial_trace: repeated label");
  std::vector<int> dims;
  std::size_t kd = 1;
  for (Mode m : keep) {
    auto it = std::find(rho.modes().begin(), rho.modes().end(), m);
    if (it == rho.modes().end()) throw std::invalid_argument("partial_trace: mode not present");
    dims.push_back(rho.dims()[it - rho.modes().begin()]);
    kd *= static_cast<std::size_t>(dims.back());
  }
  const auto order = detail::with_leading(rho.modes(), keep);
  const auto map = detail::permutation_map(rho.modes(), rho.dims(), order);
  const std::size_t rest = map.size() / kd;
  Mat out = Mat::Zero(kd, kd);
  for (std::size_t i = 0; i < kd; ++i)
    for (std::size_t j = 0; j < kd; ++j) {
      cplx acc = 0.0;
      for (std::size_t r = 0; r < rest; ++r) acc += rho.matrix()(map[i * rest + r], map[j * rest + r]);
      out(i, j) = acc;
    }
  return {keep, dims, out};
}

}  // namespace hybridtp
