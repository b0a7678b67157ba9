// fidelity.hpp
// State fidelity against a pure reference, and trace distance.

#pragma once

#include "hybridtp/fock_core.hpp"

namespace hybridtp {

/// |<a|b>|^2 / (<a|a><b|b>).
inline double fidelity(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionMismatch("fidelity: dimension mismatch");
  const double na = a.squaredNorm(), nb = b.squaredNorm();
  if (na == 0.0 || nb == 0.0) throw std::domain_error("fidelity: zero vector");
  return std::clamp(std::norm(a.dot(b)) / (na * nb), 0.0, 1.0);
}

/// <in|rho|in> with rho trace-normalized and |in> normalized.
inline double fidelity(const Mat& rho, const Vec& in) {
  if (rho.rows() != in.size()) throw DimensionMismatch("fidelity: dimension mismatch");
  const double t = rho.trace().real();
  return std::clamp(in.dot(rho * in).real() / (t * in.squaredNorm()), 0.0, 1.0);
}

inline double fidelity(const FockVector& a, const FockVector& b) { return fidelity(a.amps(), b.amps()); }
inline double fidelity(const MultiModeState& a, const MultiModeState& b) {
  if (a.modes() != b.modes() || a.dims() != b.dims()) throw DimensionMismatch("fidelity: incompatible states");
  return fidelity(a.amps(), b.amps());
}
inline double fidelity(const DensityOperator& rho, const MultiModeState& in) {
  if (rho.modes() != in.modes() || rho.dims() != in.dims()) throw DimensionMismatch("fidelity: incompatible states");
  return fidelity(rho.matrix(), in.amps());
}

/// (1/2) sum |eigenvalues(r - s)|.
inline double trace_distance(const Mat& r, const Mat& s) {
  if (r.rows() != s.rows()) throw DimensionMismatch("trace_distance: dimension mismatch");
  const Mat d = r - s;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace hybridtp
