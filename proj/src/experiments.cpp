#include "ecs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ecs/entanglement.hpp"
#include "ecs/fock.hpp"
#include "ecs/gram.hpp"

namespace ecs::experiments {

using purification::DecoherenceParams;

std::vector<EntropyRow> entropyScan(std::span<const double> alphas, std::span<const double> phis) {
  if (alphas.empty() || phis.empty()) throw std::invalid_argument("entropy scan needs nonempty grids");
  std::vector<EntropyRow> rows;
  for (double a : alphas) {
    if (!(a > 0.0)) throw std::invalid_argument("alpha must be positive");
    for (double phi : phis) {
      if (phi < 0.0 || phi >= 2.0 * std::numbers::pi) throw std::invalid_argument("phi must lie in [0, 2pi)");
      const auto s = makeEntangledCoherent(a, phi, EcsKind::Phi);
      rows.push_back({a, phi, entropyOfEntanglement(s), entropyClosedForm(a, phi)});
    }
  }
  return rows;
}

std::vector<DecoherenceRow> decoherenceTable(std::span<const double> alphas, std::span<const double> gammaTaus) {
  if (alphas.empty() || gammaTaus.empty()) throw std::invalid_argument("decoherence table needs nonempty grids");
  std::vector<DecoherenceRow> rows;
  for (double a : alphas) {
    const double threshold = purification::purificationThreshold(a);
    const auto phi = makeQuasiBell(a, QuasiBell::PhiMinus);
    for (double gt : gammaTaus) {
      if (!(gt >= 0.0)) throw std::invalid_argument("gammaTau must be non-negative");
      const DecoherenceParams p{gt, a};
      const double f = purification::decoheredFidelity(p);
      const double fs = fidelity(purification::decohere(phi, gt), purification::dynamicQuasiBell(p, QuasiBell::PhiMinus));
      rows.push_back({a, gt, f, fs, f > 0.5, threshold});
    }
  }
  return rows;
}

std::vector<MultimodeRow> multimodeTable(double alpha, double f0, int iterations,
                                         const purification::ProbeOptions& probe,
                                         optics::BeamSplitterConvention convention, MixedState* finalState) {
  if (!(f0 > 0.5 && f0 <= 1.0)) throw std::invalid_argument("multimode ensemble needs F0 > G0");
  if (iterations < 0) throw std::invalid_argument("iterations must be non-negative");
  auto rho = purification::makeMultimodeEnsemble(alpha, f0);
  double amp = alpha;
  std::vector<MultimodeRow> rows;
  for (int r = 1; r <= iterations; ++r) {
    const double before = purification::componentWeight(rho, purification::makeB1(amp));
    auto out = purification::multimodePurify(tensor(rho, rho), probe, convention);
    if (!out.conditioned) throw std::runtime_error("no four-mode pair survives");
    amp *= std::numbers::sqrt2;
    const double after = purification::componentWeight(*out.conditioned, purification::makeB1(amp));
    rows.push_back({r, before, after, purification::fidelityRecursion(before), out.keepProbability, amp});
    rho = std::move(*out.conditioned);
  }
  if (finalState) *finalState = std::move(rho);
  return rows;
}

namespace {

struct Tracker {
  std::string name;
  double tolerance;
  double worst = 0.0;

  void add(double deviation) {
    worst = std::isfinite(deviation) ? std::max(worst, deviation) : std::numeric_limits<double>::infinity();
  }
  Check result() const { return {name, worst <= tolerance, worst, tolerance}; }
};

SuperposedState randomState(RandomStream& rng, std::size_t modes, double maxAmp) {
  const std::size_t terms = 1 + static_cast<std::size_t>(rng.next() % 3);
  std::vector<Term> t;
  for (std::size_t k = 0; k < terms; ++k) {
    std::vector<cplx> amps;
    for (std::size_t m = 0; m < modes; ++m) {
      amps.push_back(std::polar(maxAmp * std::sqrt(rng.uniform()), 2.0 * std::numbers::pi * rng.uniform()));
    }
    const cplx c(rng.uniform() - 0.5, rng.uniform() - 0.5);
    t.push_back({c, CoherentLabel(std::move(amps))});
  }
  return normalize(SuperposedState(modes, std::move(t)));
}

double vectorDistance(const fock::FockVector& a, const fock::FockVector& b) {
  return (a.amplitudes - b.amplitudes).norm();
}

}  // namespace

std::vector<Check> verifyP1Parties(double alpha, optics::BeamSplitterConvention convention) {
  Tracker vec{"p1_party_state", 1e-6};
  Tracker click{"p1_party_clicks", 1e-6};
  const double probe = std::numbers::sqrt2 * alpha;
  for (double a : {alpha, -alpha}) {
    for (double b : {alpha, -alpha}) {
      const auto in = SuperposedState::coherent({a, b, probe});
      auto s = optics::beamSplitter(in, 0, 1, convention);
      s = optics::beamSplitter(s, 1, 2, convention);
      const int n = fock::cutoffFor(std::max(2.0 * alpha, s.maxMagnitude()) * (1.0 + 1e-9));
      auto v = fock::fromSuperposed(in, n);
      v = fock::beamSplitterFock(v, 0, 1);
      v = fock::beamSplitterFock(v, 1, 2);
      vec.add(vectorDistance(fock::fromSuperposed(s, n), v));
      const ModeProjection both[] = {{1, Projector::Click}, {2, Projector::Click}};
      const double pa = projectionProbability(s, both);
      const double pf = fock::occupationProbability(v, [](std::span<const int> k) { return k[1] > 0 && k[2] > 0; });
      click.add(std::abs(pa - pf));
    }
  }
  return {vec.result(), click.result()};
}

std::vector<Check> verifySuite(const VerifyOptions& options) {
  RandomStream root(options.seed);
  Tracker overlap{"overlap", 1e-6};
  Tracker split{"beam_splitter", 1e-6};
  Tracker detector{"detector_probability", 1e-6};
  Tracker entropy{"entropy", 1e-6};

  for (int i = 0; i < options.randomStates; ++i) {
    RandomStream rng = root.child(static_cast<std::uint64_t>(i));
    const std::size_t modes = 1 + static_cast<std::size_t>(i % 3);
    const auto a = randomState(rng, modes, options.maxAmplitude);
    const auto b = randomState(rng, modes, options.maxAmplitude);
    const double reach = std::max(a.maxMagnitude(), b.maxMagnitude()) * (modes > 1 ? std::numbers::sqrt2 : 1.0);
    const int n = fock::cutoffFor(reach);
    const auto fa = fock::fromSuperposed(a, n);
    const auto fb = fock::fromSuperposed(b, n);
    overlap.add(std::abs(innerProduct(a, b) - fock::inner(fa, fb)));

    const auto rho = MixedState::pure(a);
    for (auto kind : {optics::DetectorKind::OnOff, optics::DetectorKind::Parity}) {
      for (const auto& o : optics::detect(rho, 0, {kind})) {
        double pf = 0.0;
        switch (o.outcome) {
          case optics::Outcome::Vacuum:
            pf = fock::occupationProbability(fa, [](std::span<const int> k) { return k[0] == 0; });
            break;
          case optics::Outcome::Click:
            pf = fock::occupationProbability(fa, [](std::span<const int> k) { return k[0] > 0; });
            break;
          case optics::Outcome::Even: pf = fock::parityProbabilitiesFock(fa, 0).even; break;
          case optics::Outcome::Odd: pf = fock::parityProbabilitiesFock(fa, 0).odd; break;
        }
        detector.add(std::abs(o.probability - pf));
      }
    }

    if (modes >= 2) {
      const auto out = optics::beamSplitter(a, 0, 1, options.convention);
      split.add(vectorDistance(fock::fromSuperposed(out, n), fock::beamSplitterFock(fa, 0, 1)));
    }
    if (modes == 2) {
      const std::size_t keep[] = {0};
      entropy.add(std::abs(entropyOfEntanglement(a) - fock::entropyFock(fa, keep)));
    }
  }

  std::vector<Check> checks{overlap.result(), split.result(), detector.result(), entropy.result()};

  Tracker closed{"entropy_closed_form", 1e-9};
  Tracker closedFock{"entropy_closed_form_fock", 1e-6};
  for (double alpha : {0.5, 0.8, 1.0, 1.2}) {
    for (int k = 0; k < 8; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / 8.0;
      const auto s = makeEntangledCoherent(alpha, phi, EcsKind::Phi);
      const double e = entropyClosedForm(alpha, phi);
      closed.add(std::abs(entropyOfEntanglement(s) - e));
      const std::size_t keep[] = {0};
      closedFock.add(std::abs(fock::entropyFock(fock::fromSuperposed(s, fock::cutoffFor(alpha)), keep) - e));
    }
  }
  checks.push_back(closed.result());
  checks.push_back(closedFock.result());

  Tracker vac{"vacuum_overlap_even_cat", 1e-9};
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto u = makeCat(std::numbers::sqrt2 * alpha, +1);
    const double derived = 2.0 * std::exp(-2.0 * alpha * alpha) / (1.0 + std::exp(-4.0 * alpha * alpha));
    const auto v = fock::fromSuperposed(u, fock::cutoffFor(std::numbers::sqrt2 * alpha));
    vac.add(std::abs(std::norm(v.amplitudes(0)) - derived));
  }
  checks.push_back(vac.result());

  Tracker bell{"quasi_bell_measurement", 1e-6};
  for (double alpha : {1.0, 2.0}) {
    for (auto q : {QuasiBell::PhiPlus, QuasiBell::PhiMinus, QuasiBell::PsiPlus, QuasiBell::PsiMinus}) {
      const auto s = makeQuasiBell(alpha, q);
      const auto dist = quasiBellDistribution(s);
      auto v = fock::beamSplitterFock(fock::fromSuperposed(s, fock::cutoffFor(std::numbers::sqrt2 * alpha)), 0, 1);
      auto prob = [&](auto pred) { return fock::occupationProbability(v, pred); };
      const double phiMinus = prob([](std::span<const int> k) { return k[0] % 2 == 1 && k[1] == 0; });
      const double phiPlus = prob([](std::span<const int> k) { return k[0] > 0 && k[0] % 2 == 0 && k[1] == 0; });
      const double psiMinus = prob([](std::span<const int> k) { return k[1] % 2 == 1 && k[0] == 0; });
      const double psiPlus = prob([](std::span<const int> k) { return k[1] > 0 && k[1] % 2 == 0 && k[0] == 0; });
      bell.add(std::abs(dist[0].probability - phiPlus));
      bell.add(std::abs(dist[1].probability - phiMinus));
      bell.add(std::abs(dist[2].probability - psiPlus));
      bell.add(std::abs(dist[3].probability - psiMinus));
    }
  }
  checks.push_back(bell.result());

  Tracker damp{"decoherence_lindblad", 1e-5};
  for (double alpha : {0.5, 1.0}) {
    const auto s = makeQuasiBell(alpha, QuasiBell::PhiMinus);
    const int n = fock::cutoffFor(alpha);
    const auto rho0 = fock::densityOf(fock::fromSuperposed(s, n));
    for (double gt : {0.3, std::numbers::ln2, 1.5}) {
      const auto evolved = fock::lindbladEvolve(rho0, gt);
      const auto analytic = fock::densityOf(purification::decohere(s, gt), n);
      damp.add(fock::traceDistance(evolved.matrix, analytic.matrix));
    }
  }
  checks.push_back(damp.result());

  for (auto& c : verifyP1Parties(1.0, options.convention)) checks.push_back(std::move(c));
  return checks;
}

std::vector<Check> verifyEntropy(std::span<const double> alphas, std::span<const double> phis) {
  Tracker gram{"entropy_gram_vs_fock", 1e-6};
  Tracker closed{"entropy_closed_form_vs_fock", 1e-6};
  const std::size_t keep[] = {0};
  for (double a : alphas) {
    const int n = fock::cutoffFor(a);
    for (double phi : phis) {
      const auto s = makeEntangledCoherent(a, phi, EcsKind::Phi);
      const double e = fock::entropyFock(fock::fromSuperposed(s, n), keep);
      gram.add(std::abs(entropyOfEntanglement(s) - e));
      closed.add(std::abs(entropyClosedForm(a, phi) - e));
    }
  }
  return {gram.result(), closed.result()};
}

std::vector<Check> verifyDecoherence(std::span<const double> alphas, std::span<const double> gammaTaus) {
  Tracker damp{"decoherence_lindblad", 1e-5};
  Tracker form{"decoherence_fidelity_form", 1e-9};
  for (double a : alphas) {
    const auto s = makeQuasiBell(a, QuasiBell::PhiMinus);
    for (double gt : gammaTaus) {
      const DecoherenceParams p{gt, a};
      form.add(std::abs(purification::decoheredFidelity(p) -
                        fidelity(purification::decohere(s, gt), purification::dynamicQuasiBell(p, QuasiBell::PhiMinus))));
    }
    if (a > 2.0) continue;
    const int n = fock::cutoffFor(a);
    const auto rho0 = fock::densityOf(fock::fromSuperposed(s, n));
    for (double gt : gammaTaus) {
      if (gt > 2.0) continue;
      const auto evolved = fock::lindbladEvolve(rho0, gt);
      damp.add(fock::traceDistance(evolved.matrix, fock::densityOf(purification::decohere(s, gt), n).matrix));
    }
  }
  return {damp.result(), form.result()};
}

bool allPassed(std::span<const Check> checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

}  // namespace ecs::experiments
