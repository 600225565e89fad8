#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ecs/fock.hpp"
#include "ecs/gram.hpp"
#include "ecs/optics.hpp"

using namespace ecs;
using namespace ecs::optics;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double rayFidelity(const SuperposedState& a, const SuperposedState& b) {
  return std::norm(innerProduct(a, b)) / (innerProduct(a, a).real() * innerProduct(b, b).real());
}

SuperposedState qubit(double a, cplx c0, cplx c1) {
  return normalize(SuperposedState(1, {{c0, CoherentLabel{a}}, {c1, CoherentLabel{-a}}}));
}

}  // namespace

TEST(BeamSplitter, SameSignCombines) {
  const double a = 1.3;
  const auto out = beamSplitter(SuperposedState::coherent({a, a}), 0, 1);
  EXPECT_NEAR(std::abs(out[0].label[0] - kSqrt2 * a), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out[0].label[1]), 0.0, 1e-15);
}

TEST(BeamSplitter, OppositeSignRoutesToSecondPort) {
  const double a = 1.3;
  const auto out = beamSplitter(SuperposedState::coherent({a, -a}), 0, 1);
  EXPECT_NEAR(std::abs(out[0].label[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out[0].label[1] - kSqrt2 * a), 0.0, 1e-15);
}

TEST(BeamSplitter, EvenCatFromPhiPlus) {
  // |Φ₊⟩ through the splitter becomes an even cat on the first port and vacuum on the second.
  const double a = 0.9;
  const auto out = beamSplitter(makeQuasiBell(a, QuasiBell::PhiPlus), 0, 1);
  const auto expected = tensor(makeCat(kSqrt2 * a, +1), SuperposedState::vacuum(1));
  EXPECT_NEAR(rayFidelity(out, expected), 1.0, 1e-14);
}

TEST(BeamSplitter, BothConventionsAgreeWithFock) {
  const SuperposedState s(2, {{cplx(0.6, 0.1), CoherentLabel{cplx(0.5, -0.4), 1.0}},
                              {cplx(-0.2, 0.5), CoherentLabel{-0.8, cplx(0.0, 0.7)}}});
  const int n = fock::cutoffFor(1.5);
  const auto v = fock::fromSuperposed(s, n);
  for (int sign : {1, -1}) {
    const auto analytic = fock::fromSuperposed(beamSplitter(s, 0, 1, {sign}), n);
    const auto oracle = fock::beamSplitterFock(v, 0, 1, sign);
    EXPECT_NEAR((analytic.amplitudes - oracle.amplitudes).norm(), 0.0, 1e-9) << "sign " << sign;
  }
}

TEST(Displace, ZeroIsIdentity) {
  const auto s = makeCat(cplx(0.4, 0.9), -1);
  const auto d = displace(s, 0, 0.0);
  EXPECT_NEAR(std::abs(innerProduct(s, d) - 1.0), 0.0, 1e-15);
}

TEST(Displace, CompositionPhase) {
  const cplx beta(0.3, -0.2), alpha(0.7, 0.4), delta(-0.5, 1.1);
  const auto s = SuperposedState::coherent({beta});
  const auto twice = displace(displace(s, 0, delta), 0, alpha);
  const auto once = displace(s, 0, alpha + delta);
  const cplx phase = std::exp(0.5 * (alpha * std::conj(delta) - std::conj(alpha) * delta));
  // D(α)D(δ) = e^{(αδ*−α*δ)/2} D(α+δ)
  EXPECT_NEAR(std::abs(innerProduct(once, twice) - phase), 0.0, 1e-14);
}

TEST(Displace, MatchesFockMatrixElement) {
  // ⟨n|D(δ)|β⟩ via the number basis: D(δ)|β⟩ = e^{(δβ*−δ*β)/2}|β+δ⟩.
  const cplx beta(0.6, 0.2), delta(-0.3, 0.5);
  const int n = fock::cutoffFor(1.0);
  const auto out = fock::fromSuperposed(displace(SuperposedState::coherent({beta}), 0, delta), n);
  const auto expected = fock::coherentFock(beta + delta, n);
  const cplx phase = std::exp(0.5 * (delta * std::conj(beta) - std::conj(delta) * beta));
  EXPECT_NEAR((out.amplitudes - phase * expected.amplitudes).norm(), 0.0, 1e-12);
}

TEST(Rotation, PhysicalMatchesExactUpToGaussianFactor) {
  for (double a : {5.0, 10.0}) {
    for (double eps : {0.01, 0.05}) {
      const auto s = qubit(a, cplx(0.6, 0.2), cplx(-0.3, 0.7));
      const auto p = RotationParams::fromEpsilon(a, eps);
      const auto exact = rotateZ(s, 0, p, RotationMode::Exact);
      const auto physical = rotateZ(s, 0, p, RotationMode::Physical);
      EXPECT_NEAR(rayFidelity(exact, physical), std::exp(-eps * eps), 1e-6) << a << " " << eps;
    }
  }
}

TEST(Rotation, ZeroAngleAndBz) {
  const auto s = qubit(2.0, 0.8, cplx(0.0, 0.6));
  EXPECT_NEAR(rayFidelity(rotateZ(s, 0, RotationParams::fromTheta(2.0, 0.0)), s), 1.0, 1e-15);
  const auto p = RotationParams::fromTheta(2.0, std::numbers::pi / 2);
  EXPECT_NEAR(p.epsilon, std::numbers::pi / (8.0 * 2.0), 1e-15);
}

TEST(Rotation, SigmaZFlipsRelativeSign) {
  const double a = 1.5;
  const auto s = qubit(a, 0.8, 0.6);
  const auto z = sigmaZ(s, 0);
  EXPECT_NEAR(rayFidelity(z, qubit(a, 0.8, -0.6)), 1.0, 1e-14);
}

TEST(Kerr, SquareIsBitFlip) {
  const double a = 1.2;
  const auto s = qubit(a, cplx(0.7, 0.1), cplx(0.2, -0.5));
  const auto twice = kerrBx(kerrBx(s, 0), 0);
  EXPECT_NEAR(rayFidelity(twice, qubit(a, cplx(0.2, -0.5), cplx(0.7, 0.1))), 1.0, 1e-14);
}

TEST(Kerr, EvenCatIsEigenvector) {
  const double a = 0.8;
  const auto cat = makeCat(a, +1);
  const auto out = kerrBx(cat, 0);
  const cplx eig = innerProduct(cat, out);
  EXPECT_NEAR(std::abs(eig - cplx(1.0, 1.0) / kSqrt2), 0.0, 1e-14);
}

TEST(Rotation, ByFourthPowerIsIdentity) {
  const auto s = qubit(1.0, cplx(0.3, 0.4), cplx(0.5, -0.2));
  auto t = s;
  for (int i = 0; i < 4; ++i) t = bY(t, 0);
  EXPECT_NEAR(rayFidelity(t, s), 1.0, 1e-13);
}

TEST(Hadamard, InvolutionAndParity) {
  const double a = 1.1;
  const auto s = qubit(a, cplx(0.3, 0.4), cplx(0.5, -0.2));
  EXPECT_NEAR(rayFidelity(hadamard(hadamard(s, 0), 0), s), 1.0, 1e-13);

  const auto h = hadamard(SuperposedState::coherent({a}), 0);
  const auto det = detect(MixedState::pure(h), 0, {DetectorKind::Parity});
  for (const auto& o : det) {
    if (o.outcome == Outcome::Even) EXPECT_NEAR(o.probability, 1.0, 1e-14);
  }
}

TEST(Detect, VacuumAndOutcomeSets) {
  const auto vac = detect(MixedState::pure(SuperposedState::vacuum(1)), 0, {DetectorKind::OnOff});
  ASSERT_EQ(vac.size(), 2u);
  EXPECT_EQ(vac[0].outcome, Outcome::Vacuum);
  EXPECT_NEAR(vac[0].probability, 1.0, 1e-15);
  EXPECT_EQ(outcomesOf({DetectorKind::Parity}), (std::vector<Outcome>{Outcome::Even, Outcome::Odd}));
}

TEST(Detect, EvenCatVacuumProbability) {
  // |U⟩ is the even cat of amplitude √2α.
  for (double a : {0.5, 1.0, 2.0}) {
    const auto u = makeCat(kSqrt2 * a, +1);
    const auto out = detect(MixedState::pure(u), 0, {DetectorKind::OnOff});
    const double derived = 2.0 * std::exp(-2.0 * a * a) / (1.0 + std::exp(-4.0 * a * a));
    EXPECT_NEAR(out[0].probability, derived, 1e-14);
    const auto v = fock::fromSuperposed(u, fock::cutoffFor(kSqrt2 * a));
    EXPECT_NEAR(out[0].probability, std::norm(v.amplitudes(0)), 1e-10);
  }
}

TEST(Detect, ConditionedStatesAndSums) {
  const double a = 0.9;
  const auto rho = MixedState::pure(makeQuasiBell(a, QuasiBell::PsiMinus));
  for (auto kind : {DetectorKind::OnOff, DetectorKind::Parity}) {
    double total = 0.0;
    for (const auto& o : detect(rho, 1, {kind})) {
      total += o.probability;
      if (o.conditionedState) {
        double w = 0.0;
        for (const auto& c : o.conditionedState->components()) {
          w += c.weight;
          EXPECT_NEAR(innerProduct(c.state, c.state).real(), 1.0, 1e-12);
        }
        EXPECT_NEAR(w, 1.0, 1e-12);
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(Detect, ParityAgainstFock) {
  const SuperposedState s(2, {{cplx(0.5, 0.2), CoherentLabel{cplx(1.1, 0.3), 0.4}},
                              {cplx(-0.4, 0.3), CoherentLabel{-0.6, cplx(0.2, -0.9)}}});
  const auto ns = normalize(s);
  const auto v = fock::fromSuperposed(ns, fock::cutoffFor(1.2));
  const auto pf = fock::parityProbabilitiesFock(v, 1);
  for (const auto& o : detect(MixedState::pure(ns), 1, {DetectorKind::Parity})) {
    EXPECT_NEAR(o.probability, o.outcome == Outcome::Even ? pf.even : pf.odd, 1e-9);
  }
}

TEST(SampleDetect, FrequenciesWithinBinomialBound) {
  const auto rho = MixedState::pure(normalize(SuperposedState::coherent({0.8})));
  const double p = std::exp(-0.64);
  RandomStream stream(2024);
  const int trials = 100000;
  int vac = 0;
  for (int i = 0; i < trials; ++i) {
    if (sampleDetect(rho, 0, {DetectorKind::OnOff}, stream).outcome == Outcome::Vacuum) ++vac;
  }
  const double sigma = std::sqrt(p * (1 - p) / trials);
  EXPECT_LE(std::abs(static_cast<double>(vac) / trials - p), 4 * sigma);
}

TEST(SampleDetect, DegenerateAndReproducible) {
  const auto odd = MixedState::pure(makeCat(1.0, -1));
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    RandomStream s(seed);
    EXPECT_EQ(sampleDetect(odd, 0, {DetectorKind::Parity}, s).outcome, Outcome::Odd);
  }
  const auto rho = MixedState::pure(makeCat(0.7, +1));
  RandomStream a(5), b(5);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(sampleDetect(rho, 0, {DetectorKind::OnOff}, a).outcome,
              sampleDetect(rho, 0, {DetectorKind::OnOff}, b).outcome);
  }
}
