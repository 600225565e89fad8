#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ecs/entanglement.hpp"
#include "ecs/fock.hpp"

using namespace ecs;

namespace {

constexpr double kPi = std::numbers::pi;

SuperposedState randomTwoMode(RandomStream& rng, double maxAmp) {
  std::vector<Term> t;
  for (int k = 0; k < 3; ++k) {
    const cplx a = std::polar(maxAmp * std::sqrt(rng.uniform()), 2 * kPi * rng.uniform());
    const cplx b = std::polar(maxAmp * std::sqrt(rng.uniform()), 2 * kPi * rng.uniform());
    t.push_back({cplx(rng.uniform() - 0.5, rng.uniform() - 0.5), CoherentLabel{a, b}});
  }
  return normalize(SuperposedState(2, std::move(t)));
}

}  // namespace

TEST(LogicalBasis, Orthonormal) {
  for (double a : {0.2, 1.0, 2.5}) {
    const LogicalBasis b(a);
    const SuperposedState u(1, {{b.uCoeffs(0), CoherentLabel{a}}, {b.uCoeffs(1), CoherentLabel{-a}}});
    const SuperposedState v(1, {{b.vCoeffs(0), CoherentLabel{a}}, {b.vCoeffs(1), CoherentLabel{-a}}});
    EXPECT_NEAR(std::abs(innerProduct(u, u) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(innerProduct(v, v) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(innerProduct(u, v)), 0.0, 1e-12);
  }
}

TEST(ReducedDensity, ProductIsRankOne) {
  const std::size_t keep[] = {0};
  const auto rho = reducedDensity(SuperposedState::coherent({0.8, -0.4}), keep);
  auto ev = rho.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size());
  EXPECT_NEAR(ev(ev.size() - 1), 1.0, 1e-12);
  EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
}

TEST(ReducedDensity, PhiZeroIsDiagonalInLogicalBasis) {
  // Weights (1+x)²/(2(1+x²)) on u and (1−x)²/(2(1+x²)) on v, x = e^{−2α²}.
  const double a = 0.7;
  const double x = std::exp(-2 * a * a);
  const std::size_t keep[] = {0};
  const auto rho = reducedDensity(makeQuasiBell(a, QuasiBell::PhiPlus), keep);
  ASSERT_TRUE(rho.logical);
  EXPECT_NEAR(rho.matrix(0, 0).real(), (1 + x) * (1 + x) / (2 * (1 + x * x)), 1e-14);
  EXPECT_NEAR(rho.matrix(1, 1).real(), (1 - x) * (1 - x) / (2 * (1 + x * x)), 1e-14);
  EXPECT_NEAR(std::abs(rho.matrix(0, 1)), 0.0, 1e-14);
}

TEST(ReducedDensity, RandomStatesMatchFock) {
  RandomStream root(11);
  const std::size_t keep[] = {0};
  for (int i = 0; i < 6; ++i) {
    RandomStream rng = root.child(i);
    const auto s = randomTwoMode(rng, 1.5);
    auto ev = reducedDensity(s, keep).eigenvalues();
    const auto v = fock::fromSuperposed(s, fock::cutoffFor(1.5));
    auto evf = fock::densityEigenvalues(fock::reducedDensity(v, keep));
    std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
    std::sort(evf.data(), evf.data() + evf.size(), std::greater<>());
    for (int k = 0; k < ev.size(); ++k) EXPECT_NEAR(ev(k), evf(k), 1e-6);
  }
}

TEST(Entropy, SingletMaximalForAnyAmplitude) {
  for (double a : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(entropyOfEntanglement(makeQuasiBell(a, QuasiBell::PhiMinus)), 1.0, 1e-9);
  }
}

TEST(Entropy, LargeAmplitudeNearOne) {
  EXPECT_NEAR(entropyOfEntanglement(makeEntangledCoherent(2.0, 0.0, EcsKind::Phi)), 0.9999997, 1e-7);
  EXPECT_GE(entropyOfEntanglement(makeEntangledCoherent(3.0, 0.0, EcsKind::Phi)), 1.0 - 1e-9);
}

TEST(Entropy, ClosedFormMatchesGramAndFock) {
  const std::size_t keep[] = {0};
  for (double a : {0.8, 1.0, 1.2}) {
    for (int k = 0; k < 16; ++k) {
      const double phi = 2 * kPi * k / 16;
      const auto s = makeEntangledCoherent(a, phi, EcsKind::Phi);
      const double closed = entropyClosedForm(a, phi);
      EXPECT_NEAR(entropyOfEntanglement(s), closed, 1e-12);
      EXPECT_NEAR(fock::entropyFock(fock::fromSuperposed(s, fock::cutoffFor(a)), keep), closed, 1e-6);
    }
  }
}

TEST(Entropy, MinimumAtZeroPhase) {
  double best = 2.0, argmin = -1.0;
  for (int k = 0; k < 64; ++k) {
    const double phi = 2 * kPi * k / 64;
    const double e = entropyClosedForm(1.2, phi);
    if (e < best) {
      best = e;
      argmin = phi;
    }
  }
  EXPECT_EQ(argmin, 0.0);
}

TEST(QuasiBellMeasurement, OddOutcomesAreCertain) {
  for (double a : {0.6, 1.5}) {
    const auto pm = quasiBellDistribution(makeQuasiBell(a, QuasiBell::PhiMinus));
    EXPECT_NEAR(pm[static_cast<int>(BellOutcome::PhiMinus)].probability, 1.0, 1e-12);
    const auto sm = quasiBellDistribution(makeQuasiBell(a, QuasiBell::PsiMinus));
    EXPECT_NEAR(sm[static_cast<int>(BellOutcome::PsiMinus)].probability, 1.0, 1e-12);
  }
}

TEST(QuasiBellMeasurement, PhiPlusFailsOnVacuum) {
  const double a = 0.8;
  const auto d = quasiBellDistribution(makeQuasiBell(a, QuasiBell::PhiPlus));
  const double vac = 2 * std::exp(-2 * a * a) / (1 + std::exp(-4 * a * a));
  EXPECT_NEAR(d[static_cast<int>(BellOutcome::Fail)].probability, vac, 1e-12);
  EXPECT_NEAR(d[static_cast<int>(BellOutcome::PhiPlus)].probability, 1 - vac, 1e-12);
  double total = 0;
  for (const auto& r : d) total += r.probability;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(QuasiBellMeasurement, SampledOutcomeIsSupported) {
  RandomStream stream(3);
  const auto rho = MixedState::pure(makeQuasiBell(1.0, QuasiBell::PsiMinus));
  for (int i = 0; i < 20; ++i) EXPECT_EQ(quasiBellMeasure(rho, stream).outcome, BellOutcome::PsiMinus);
}

TEST(Logical, RoundTrip) {
  const double a = 1.1;
  const MixedState rho(2, {{0.6, makeQuasiBell(a, QuasiBell::PhiMinus)}, {0.4, makeQuasiBell(a, QuasiBell::PsiPlus)}});
  const auto m = toLogical(rho, a);
  EXPECT_NEAR(m.trace().real(), 1.0, 1e-12);
  const auto back = fromLogical(m, a);
  EXPECT_NEAR(fidelity(back, makeQuasiBell(a, QuasiBell::PhiMinus)), 0.6, 1e-12);
  EXPECT_NEAR(fidelity(back, makeQuasiBell(a, QuasiBell::PsiPlus)), 0.4, 1e-12);
}

TEST(Logical, SingletVector) {
  const auto v = logicalVector(makeQuasiBell(0.9, QuasiBell::PhiMinus), 0.9);
  EXPECT_NEAR(std::abs(v(0)), 1 / std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(std::abs(v(0) + v(3)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(v(1)) + std::abs(v(2)), 0.0, 1e-12);
}
