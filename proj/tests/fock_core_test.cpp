#include "hybridtp/fidelity.hpp"
#include "hybridtp/fock_core.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hybridtp;

namespace {

Vec random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST(FockVector, RejectsBadNormalizationFlag) {
  Vec v = Vec::Zero(3);
  v(0) = 2.0;
  EXPECT_THROW(FockVector(v, true), std::invalid_argument);
  EXPECT_NO_THROW(FockVector(v, false));
  EXPECT_THROW(FockVector(Vec::Zero(1), false), std::invalid_argument);
}

TEST(MakeCoherent, VacuumAtZeroAmplitude) {
  const FockVector v = make_coherent(0.0, 8);
  EXPECT_EQ(v.cutoff(), 8);
  EXPECT_NEAR(std::abs(v[0] - 1.0), 0.0, 1e-15);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(v[n], cplx(0.0));
}

TEST(MakeCoherent, OppositeAmplitudeOverlap) {
  const double ov = std::norm(inner(make_coherent(1.0, 30), make_coherent(-1.0, 30)));
  EXPECT_NEAR(ov, std::exp(-4.0), 1e-10);
  EXPECT_NEAR(ov, 0.018316, 1e-6);
}

TEST(MakeCoherent, PoissonRatio) {
  const FockVector v = make_coherent(0.5, 20);
  EXPECT_NEAR(std::norm(v[1]) / std::norm(v[0]), 0.25, 1e-14);
  // |a|^{2n}/n! for a few more n
  for (int n = 2; n <= 5; ++n)
    EXPECT_NEAR(std::norm(v[n]) / std::norm(v[0]), std::pow(0.25, n) / factorial(n), 1e-14);
}

TEST(MakeCoherent, CutoffTooSmallThrows) {
  EXPECT_THROW(make_coherent(1.0, 4), InsufficientCutoff);
  EXPECT_THROW(make_coherent(3.0, 24), InsufficientCutoff);
  EXPECT_THROW(make_coherent(0.1, 0), std::invalid_argument);
}

TEST(MakeCoherent, OverlapLawOnDisc) {
  const std::vector<cplx> pts = {0.0, 0.3, cplx(0, -0.7), cplx(0.5, 0.5), -1.0, cplx(0.6, -0.8)};
  for (cplx a : pts)
    for (cplx b : pts) {
      const double num = std::norm(inner(make_coherent(a, 20), make_coherent(b, 20)));
      EXPECT_NEAR(num, std::exp(-std::norm(a - b)), 1e-8);
    }
}

TEST(MakeCat, ParitySelection) {
  const FockVector e = make_cat(0.8, Parity::Even);
  const FockVector o = make_cat(0.8, Parity::Odd);
  for (int n = 1; n <= e.cutoff(); n += 2) EXPECT_EQ(e[n], cplx(0.0));
  for (int n = 0; n <= o.cutoff(); n += 2) EXPECT_EQ(o[n], cplx(0.0));
  EXPECT_NEAR(e.norm_squared(), 1.0, 1e-12);
  EXPECT_NEAR(o.norm_squared(), 1.0, 1e-12);
}

TEST(MakeCat, NormalizationConstant) {
  for (double a : {0.2, 0.5, 1.0}) {
    const double x2 = std::exp(-2 * a * a);
    const FockVector c = make_coherent(a, 30), m = make_coherent(-a, 30);
    for (auto [par, s] : {std::pair{Parity::Even, 1.0}, std::pair{Parity::Odd, -1.0}}) {
      const double n = 1.0 / std::sqrt(2.0 * (1.0 + s * x2));
      const Vec direct = n * (c.amps() + s * m.amps());
      EXPECT_NEAR(direct.squaredNorm(), 1.0, 1e-12);
      EXPECT_NEAR((direct - make_cat(a, par, 30).amps()).norm(), 0.0, 1e-12);
    }
  }
}

TEST(MakeCat, OddLeadingComponents) {
  const double a = 0.3;
  const FockVector o = make_cat(a, Parity::Odd);
  EXPECT_NEAR((o[3] / o[1]).real(), a * a / std::sqrt(6.0), 1e-15);
  EXPECT_NEAR((o[5] / o[1]).real(), std::pow(a, 4) / std::sqrt(120.0), 1e-15);
}

TEST(MakeCat, RejectsNonPositiveAlpha) {
  EXPECT_THROW(make_cat(0.0, Parity::Even), std::invalid_argument);
  EXPECT_THROW(make_cat(-0.1, Parity::Odd), std::invalid_argument);
}

TEST(MakeSqueezedVacuum, ZeroIsVacuum) {
  const FockVector s = make_squeezed_vacuum(0.0, 10);
  EXPECT_NEAR(std::abs(s[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(s.amps().tail(10).norm(), 0.0, 1e-15);
}

TEST(MakeSqueezedVacuum, SmallZetaLeadingTerms) {
  for (double z : {0.01, 0.03}) {
    const FockVector s = make_squeezed_vacuum(z);
    const cplx r2 = s[2] / s[0], r4 = s[4] / s[0];
    EXPECT_NEAR(r2.real(), z / std::sqrt(2.0), z * z * z);
    EXPECT_NEAR(r4.real(), std::sqrt(3.0 / 8.0) * z * z, z * z * z * z);
    for (int n = 1; n <= s.cutoff(); n += 2) EXPECT_EQ(s[n], cplx(0.0));
  }
}

TEST(MakeSqueezedVacuum, ExactExpansion) {
  const double z = 0.6, t = std::tanh(z);
  const FockVector s = make_squeezed_vacuum(z, 60);
  for (int n = 0; 2 * n <= 12; ++n) {
    const double expect = std::sqrt(factorial(2 * n)) / (std::pow(2.0, n) * factorial(n)) * std::pow(t, n) /
                          std::sqrt(std::cosh(z));
    EXPECT_NEAR(s[2 * n].real(), expect, 1e-9);
  }
}

TEST(MakeSqueezedVacuum, ApproximatesEvenCat) {
  EXPECT_GT(fidelity(make_squeezed_vacuum(0.18), make_cat(0.42, Parity::Even)), 0.99);
}

TEST(MakeSqueezedVacuum, RangeChecked) {
  EXPECT_THROW(make_squeezed_vacuum(1.0), std::invalid_argument);
  EXPECT_THROW(make_squeezed_vacuum(-0.1), std::invalid_argument);
  EXPECT_THROW(make_squeezed_vacuum(0.9, 4), InsufficientCutoff);
}

TEST(ModeOperator, AnnihilationAction) {
  const int d = 7;
  const Mat a = ModeOperator::annihilation(d).matrix();
  for (int n = 0; n < d; ++n) {
    const Vec out = a * fock_basis(n, d - 1).amps();
    if (n == 0) {
      EXPECT_EQ(out.norm(), 0.0);
    } else {
      EXPECT_NEAR(out(n - 1).real(), std::sqrt(static_cast<double>(n)), 1e-15);
      EXPECT_NEAR(out.norm(), std::sqrt(static_cast<double>(n)), 1e-15);
    }
  }
  const Mat x = ModeOperator::quadrature(d).matrix();
  EXPECT_EQ((x - x.adjoint()).norm(), 0.0);
  EXPECT_EQ((ModeOperator::creation(d).matrix() - a.adjoint()).norm(), 0.0);
}

TEST(ApplyModeOperator, AnnihilateVacuum) {
  const auto s = MultiModeState::single(Mode::B, make_coherent(0.0, 6));
  const auto out = apply_mode_operator(s, ModeOperator::annihilation(7), Mode::B);
  EXPECT_EQ(out.norm_squared(), 0.0);
}

TEST(ApplyModeOperator, PhotonSubtractedSqueezed) {
  const double z = 0.02;
  const auto s = MultiModeState::single(Mode::A, make_squeezed_vacuum(z));
  const auto out = apply_mode_operator(s, ModeOperator::annihilation(kDefaultCutoff + 1), Mode::A);
  const Vec& v = out.amps();
  EXPECT_EQ(v(0), cplx(0.0));
  EXPECT_EQ(v(2), cplx(0.0));
  EXPECT_NEAR(v(1).real(), z, z * z);
  EXPECT_NEAR((v(3) / v(1)).real(), std::sqrt(1.5) * z, z * z);
}

TEST(ApplyModeOperator, PhaseShiftRotatesCoherent) {
  const cplx a(0.7, 0.2);
  for (double th : {0.3, 1.2, -2.0, kPi}) {
    const auto s = MultiModeState::single(Mode::C, make_coherent(a));
    const auto r = apply_mode_operator(s, ModeOperator::phase_shift(kDefaultCutoff + 1, th), Mode::C);
    EXPECT_GE(fidelity(r.amps(), make_coherent(a * std::polar(1.0, th)).amps()), 1 - 1e-10);
  }
}

TEST(ApplyModeOperator, DimensionMismatch) {
  const auto s = MultiModeState::single(Mode::A, make_coherent(0.1, 6));
  EXPECT_THROW(apply_mode_operator(s, ModeOperator::number(5), Mode::A), DimensionMismatch);
  EXPECT_THROW(apply_mode_operator(s, ModeOperator::number(7), Mode::B), std::invalid_argument);
}

TEST(MultiModeState, RejectsBadLayout) {
  EXPECT_THROW(MultiModeState({Mode::B, Mode::A}, {2, 2}, Vec::Zero(4)), std::invalid_argument);
  EXPECT_THROW(MultiModeState({Mode::A, Mode::B}, {2, 2}, Vec::Zero(5)), DimensionMismatch);
  EXPECT_THROW(MultiModeState({Mode::A}, {2, 2}, Vec::Zero(4)), DimensionMismatch);
}

TEST(Tensor, SortsModesAndKeepsAmplitudes) {
  std::mt19937_64 rng(3);
  const FockVector u(random_vec(rng, 3), true), v(random_vec(rng, 2), true), w(random_vec(rng, 4), true);
  const auto t = tensor({MultiModeState::single(Mode::D, w), MultiModeState::single(Mode::A, u),
                         MultiModeState::single(Mode::C, v)});
  ASSERT_EQ(t.modes(), (std::vector<Mode>{Mode::A, Mode::C, Mode::D}));
  ASSERT_EQ(t.dims(), (std::vector<int>{3, 2, 4}));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(t.at({i, j, k}) - u[i] * v[j] * w[k]), 0.0, 1e-15);
  EXPECT_THROW(tensor(MultiModeState::single(Mode::A, u), MultiModeState::single(Mode::A, u)), std::invalid_argument);
}

TEST(Tensor, OrthonormalBasisInner) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 2; ++l) {
          const auto x = tensor(MultiModeState::single(Mode::A, fock_basis(i, 2)),
                                MultiModeState::single(Mode::B, fock_basis(j, 1)));
          const auto y = tensor(MultiModeState::single(Mode::A, fock_basis(k, 2)),
                                MultiModeState::single(Mode::B, fock_basis(l, 1)));
          EXPECT_EQ(inner(x, y), cplx(i == k && j == l ? 1.0 : 0.0));
        }
}

TEST(PhaseShiftAll, ZeroIsIdentity) {
  std::mt19937_64 rng(5);
  const MultiModeState s({Mode::B, Mode::C, Mode::D}, {5, 2, 2}, random_vec(rng, 20));
  EXPECT_EQ((phase_shift_all(s, 0, 0, 0).amps() - s.amps()).norm(), 0.0);
}

TEST(PhaseShiftAll, PiOnBFlipsCoherent) {
  const auto s = tensor({MultiModeState::single(Mode::B, make_coherent(0.6)),
                         MultiModeState::single(Mode::C, fock_basis(0, 1)),
                         MultiModeState::single(Mode::D, fock_basis(1, 1))});
  const auto r = phase_shift_all(s, kPi, 0, 0);
  const auto ref = tensor({MultiModeState::single(Mode::B, make_coherent(-0.6)),
                           MultiModeState::single(Mode::C, fock_basis(0, 1)),
                           MultiModeState::single(Mode::D, fock_basis(1, 1))});
  EXPECT_NEAR(fidelity(r, ref), 1.0, 1e-12);
}

TEST(PhaseShiftAll, EqualAnglesConserveTotalNumber) {
  std::mt19937_64 rng(11);
  const MultiModeState s({Mode::B, Mode::C, Mode::D}, {6, 2, 2}, random_vec(rng, 24));
  auto total_n = [](const MultiModeState& st) {
    double acc = 0.0;
    for (Mode m : st.modes()) acc += inner(st, apply_mode_operator(st, ModeOperator::number(st.dim(m)), m)).real();
    return acc;
  };
  const auto r = phase_shift_all(s, 0.77, 0.77, 0.77);
  EXPECT_NEAR(total_n(r), total_n(s), 1e-12);
}

TEST(BeamSplitter, VacuumStaysVacuum) {
  const auto s = tensor(MultiModeState::single(Mode::A, fock_basis(0, 8)),
                        MultiModeState::single(Mode::B, fock_basis(0, 8)));
  const auto r = beam_splitter_5050(s, Mode::A, Mode::B);
  EXPECT_NEAR(std::abs(r.amps()(0) - 1.0), 0.0, 1e-14);
}

TEST(BeamSplitter, CoherentAmplitudeRule) {
  const double a = 0.6;
  for (auto [ph, th] : {std::pair{0.0, 0.0}, std::pair{0.4, 1.9}, std::pair{kPi / 2, -0.3}}) {
    const cplx x = a * std::polar(1.0, ph), y = a * std::polar(1.0, th);
    const auto s = tensor(MultiModeState::single(Mode::A, make_coherent(x)),
                          MultiModeState::single(Mode::B, make_coherent(y)));
    const auto r = beam_splitter_5050(s, Mode::A, Mode::B);
    const auto ref = tensor(MultiModeState::single(Mode::A, make_coherent((x + y) / std::sqrt(2.0))),
                            MultiModeState::single(Mode::B, make_coherent((x - y) / std::sqrt(2.0))));
    EXPECT_NEAR(std::abs(inner(ref, r)), 1.0, 1e-10);
    EXPECT_NEAR(r.norm_squared(), 1.0, 1e-10);
  }
  // |a>|a> -> |sqrt2 a>|0>
  const auto s = tensor(MultiModeState::single(Mode::A, make_coherent(a)),
                        MultiModeState::single(Mode::B, make_coherent(a)));
  const auto r = beam_splitter_5050(s, Mode::A, Mode::B);
  const auto ref = tensor(MultiModeState::single(Mode::A, make_coherent(std::sqrt(2.0) * a)),
                          MultiModeState::single(Mode::B, fock_basis(0, kDefaultCutoff)));
  EXPECT_NEAR(fidelity(r, ref), 1.0, 1e-10);
}

TEST(BeamSplitter, UnitaryOnRetainedBlocks) {
  const BeamSplitter5050 bs(10);
  const Mat u = bs.matrix();
  const Mat id = Mat::Identity(u.rows(), u.cols());
  EXPECT_LE((u.adjoint() * u - id).norm(), 1e-8);

  std::mt19937_64 rng(17);
  // random states confined to total photon number <= cutoff
  auto low = [&]() {
    Vec v = Vec::Zero(121);
    for (int i = 0; i <= 10; ++i)
      for (int j = 0; i + j <= 10; ++j) v(i * 11 + j) = random_vec(rng, 1)(0) * (1.0 / (1 + i + j));
    return MultiModeState({Mode::A, Mode::B}, {11, 11}, v / v.norm());
  };
  for (int t = 0; t < 10; ++t) {
    const auto u1 = low(), v1 = low();
    EXPECT_NEAR(std::abs(inner(bs.apply(u1, Mode::A, Mode::B), bs.apply(v1, Mode::A, Mode::B)) - inner(u1, v1)),
                0.0, 1e-10);
  }
}

TEST(BeamSplitter, OverflowSignalsInsufficientCutoff) {
  const auto s = tensor(MultiModeState::single(Mode::A, fock_basis(4, 5)),
                        MultiModeState::single(Mode::B, fock_basis(3, 5)));
  EXPECT_THROW(beam_splitter_5050(s, Mode::A, Mode::B), InsufficientCutoff);
  const auto q = tensor(MultiModeState::single(Mode::A, fock_basis(1, 1)),
                        MultiModeState::single(Mode::B, fock_basis(1, 3)));
  EXPECT_THROW(beam_splitter_5050(q, Mode::A, Mode::B), DimensionMismatch);
}

TEST(BeamSplitter, SinglePhotonSplits) {
  const auto s = tensor(MultiModeState::single(Mode::A, fock_basis(1, 3)),
                        MultiModeState::single(Mode::B, fock_basis(0, 3)));
  const auto r = beam_splitter_5050(s, Mode::A, Mode::B);
  EXPECT_NEAR(r.at({1, 0}).real(), 1 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(r.at({0, 1}).real(), 1 / std::sqrt(2.0), 1e-14);
}

TEST(PartialTrace, ProductStateIsPure) {
  const auto s = tensor({MultiModeState::single(Mode::A, make_coherent(0.4)),
                         MultiModeState::single(Mode::B, make_cat(0.5, Parity::Odd)),
                         MultiModeState::single(Mode::D, fock_basis(1, 1))});
  for (auto keep : std::vector<std::vector<Mode>>{{Mode::A}, {Mode::B}, {Mode::D, Mode::A}}) {
    const auto rho = partial_trace(s, keep);
    EXPECT_NEAR(rho.purity(), 1.0, 1e-10);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
    EXPECT_NO_THROW(rho.check_invariants());
  }
  EXPECT_EQ(partial_trace(s, {Mode::D, Mode::A}).modes(), (std::vector<Mode>{Mode::A, Mode::D}));
  EXPECT_THROW(partial_trace(s, {Mode::A, Mode::A}), std::invalid_argument);
}

TEST(PartialTrace, DensityRouteMatchesStateRoute) {
  std::mt19937_64 rng(23);
  const MultiModeState s({Mode::A, Mode::C, Mode::D}, {3, 2, 2}, random_vec(rng, 12));
  const auto full = DensityOperator::from_pure(s);
  for (auto keep : std::vector<std::vector<Mode>>{{Mode::C}, {Mode::A, Mode::D}, {Mode::C, Mode::D}}) {
    const auto r1 = partial_trace(s, keep), r2 = partial_trace(full, keep);
    EXPECT_LE((r1.matrix() - r2.matrix()).norm(), 1e-14);
    EXPECT_NEAR(r1.trace().real(), 1.0, 1e-10);
    EXPECT_NO_THROW(r1.check_invariants());
  }
}

TEST(PartialTrace, BellPairIsMaximallyMixed) {
  Vec v = Vec::Zero(4);
  v(0) = v(3) = 1 / std::sqrt(2.0);
  const MultiModeState s({Mode::C, Mode::D}, {2, 2}, v);
  const auto r = partial_trace(s, {Mode::D});
  EXPECT_NEAR(r.purity(), 0.5, 1e-15);
  EXPECT_NEAR(r.entropy_bits(), 1.0, 1e-12);
}

TEST(DensityOperator, InvariantChecks) {
  Mat m(2, 2);
  m << 0.5, 0.6, 0.6, 0.5;
  EXPECT_THROW(DensityOperator({Mode::C}, {2}, m).check_invariants(), std::domain_error);
  m << 0.5, cplx(0, 0.1), 0.0, 0.5;
  EXPECT_THROW(DensityOperator({Mode::C}, {2}, m).check_invariants(), std::domain_error);
  m << 0.7, 0.0, 0.0, 0.6;
  EXPECT_THROW(DensityOperator({Mode::C}, {2}, m).check_invariants(), std::domain_error);
  EXPECT_THROW(DensityOperator({Mode::C}, {3}, m), DimensionMismatch);
}

TEST(Contract, ProjectsLeadingModes) {
  std::mt19937_64 rng(29);
  const MultiModeState s({Mode::A, Mode::B, Mode::C}, {3, 4, 2}, random_vec(rng, 24));
  const Vec bra = fock_basis(2, 3).amps();
  const auto r = contract(s, {Mode::B}, bra);
  ASSERT_EQ(r.modes(), (std::vector<Mode>{Mode::A, Mode::C}));
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 2; ++k) EXPECT_EQ(r.at({i, k}), s.at({i, 2, k}));
}
