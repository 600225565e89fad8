// Acceptance criteria.  One PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ecs/entanglement.hpp"
#include "ecs/experiments.hpp"
#include "ecs/fock.hpp"
#include "ecs/optics.hpp"
#include "ecs/purification.hpp"

using namespace ecs;
using namespace ecs::purification;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLn2 = std::numbers::ln2;
const double kFGrid[] = {0.55, 0.667, 0.75, 0.9};

double recursion(double f) { return f * f / (f * f + (1 - f) * (1 - f)); }

struct Verdict {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Entropy of the entangled coherent states.
Verdict entropy() {
  double worstPi = 0.0;
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    const auto s = makeEntangledCoherent(a, std::numbers::pi, EcsKind::Phi);
    worstPi = std::max({worstPi, std::abs(entropyOfEntanglement(s) - 1.0), std::abs(entropyClosedForm(a, std::numbers::pi) - 1.0)});
  }
  const double e2 = entropyOfEntanglement(makeEntangledCoherent(2.0, 0.0, EcsKind::Phi));
  const double e3 = entropyOfEntanglement(makeEntangledCoherent(3.0, 0.0, EcsKind::Phi));
  const bool ok = worstPi <= 1e-9 && std::abs(e2 - 0.9999997) <= 1e-7 && e3 >= 1.0 - 1e-9;
  return {ok, fmt("max|E(a,pi)-1|=%.2e, E(2,0)=%.10f, E(3,0)=%.16f", worstPi, e2, e3)};
}

// 2. Overlap of the two non-orthogonal quasi-Bell states.
Verdict quasiBellOverlap() {
  double worst = 0.0;
  for (double a : {0.5, 1.0, 2.0}) {
    const cplx v = innerProduct(makeQuasiBell(a, QuasiBell::PsiPlus), makeQuasiBell(a, QuasiBell::PhiPlus));
    worst = std::max(worst, std::abs(v - 1.0 / std::cosh(2 * a * a)));
  }
  return {worst <= 1e-12, fmt("max deviation from sech(2a^2) = %.2e", worst)};
}

// 3. End-to-end fidelity recursion with exact conditioning.
Verdict fidelityRecursionEndToEnd() {
  // Finite-amplitude envelope: the two-member ensemble stays two-member through
  // both stages with orthogonal survivors, so the derived correction is zero.
  constexpr double kEnvelopeAlpha1 = 1e-10;
  double worstLarge = 0.0, worstOne = 0.0;
  for (double a : {1.0, 2.0, 3.0}) {
    for (double f : kFGrid) {
      const auto rho = makeEnsemble(a, f, QuasiBell::PhiMinus);
      const auto p1 = p1Round(tensor(rho, rho));
      const auto p2 = p2Round(*p1.conditioned, QuasiBell::PhiMinus);
      const double dev = std::abs(fidelity(*p2.conditioned, makeQuasiBell(a, QuasiBell::PhiMinus)) - recursion(f));
      (a >= 2.0 ? worstLarge : worstOne) = std::max(a >= 2.0 ? worstLarge : worstOne, dev);
    }
  }
  return {worstLarge <= 1e-10 && worstOne <= kEnvelopeAlpha1,
          fmt("max|F'-recursion| alpha>=2: %.2e, alpha=1: %.2e (envelope %.0e)", worstLarge, worstOne, kEnvelopeAlpha1)};
}

// 4. Keep probability against the printed closed form, and large-amplitude limits.
Verdict successProbabilityFormula() {
  double worst = 0.0, worstAlpha = 0.0, worstF = 0.0;
  for (double a : {1.0, 2.0, 3.0}) {
    for (double f : kFGrid) {
      const auto rho = makeEnsemble(a, f, QuasiBell::PhiMinus);
      const double exact = protocolRound(rho, Scheme::Full, QuasiBell::PhiMinus).keepProbability;
      const double dev = std::abs(exact - successProbability(f, a, Scheme::Full));
      if (dev > worst) worst = dev, worstAlpha = a, worstF = f;
    }
  }
  bool limits = true;
  for (double f : {0.1, 0.3, 0.55, 0.75, 0.9}) {
    const double full = exactSuccessProbability(f, 8.0, Scheme::Full);
    const double simple = exactSuccessProbability(f, 8.0, Scheme::SimpleP1, QuasiBell::PhiPlus);
    limits = limits && full >= 0.125 && full <= 0.25 && simple > 0.25 && simple < 0.5;
  }
  return {worst <= 1e-9 && limits,
          fmt("max|exact-closed form|=%.4f at alpha=%g F=%g (tol 1e-9); large-alpha limits %s", worst, worstAlpha,
              worstF, limits ? "in range" : "OUT OF RANGE")};
}

// 5. Monte Carlo against exact values.
Verdict monteCarlo() {
  int points = 0, agree = 0;
  const RandomStream seeds(20240601);
  for (auto scheme : {Scheme::Full, Scheme::SimpleP1}) {
    const QuasiBell target = scheme == Scheme::Full ? QuasiBell::PhiMinus : QuasiBell::PhiPlus;
    for (double a : {1.0, 1.5, 2.0}) {
      for (double f : kFGrid) {
        const auto rho = makeEnsemble(a, f, target);
        const auto exact = protocolRound(rho, scheme, target);
        const double fExact = fidelity(*exact.conditioned, makeQuasiBell(scheme == Scheme::Full ? a : kSqrt2 * a, target));
        const auto mc = monteCarloRound(rho, scheme, target, 100000, seeds.child(points).seed());
        const double p = exact.keepProbability;
        const double rateSigma = std::sqrt(p * (1 - p) / mc.trials);
        const double fidSigma = std::sqrt(fExact * (1 - fExact) / std::max<std::uint64_t>(mc.kept, 1));
        ++points;
        if (std::abs(mc.rate - p) <= 4 * rateSigma && std::abs(mc.keptFidelity - fExact) <= 4 * fidSigma) ++agree;
      }
    }
  }
  const double share = static_cast<double>(agree) / points;
  return {share >= 0.95, fmt("%d/%d grid points within 4 sigma (%.1f%%, need 95%%), 1e5 trials each", agree, points, 100 * share)};
}

// 6. Decoherence threshold and the damping channel against the master equation.
Verdict decoherence() {
  double worstThreshold = 0.0;
  for (double a : {0.5, 1.0, 2.0, 3.0}) worstThreshold = std::max(worstThreshold, std::abs(purificationThreshold(a) - kLn2));
  double worstTrace = 0.0;
  for (double a : {0.5, 1.0, 2.0}) {
    const auto s = makeQuasiBell(a, QuasiBell::PhiMinus);
    const int n = fock::cutoffFor(a);
    const auto rho0 = fock::densityOf(fock::fromSuperposed(s, n));
    for (double gt : {0.1, 0.5, kLn2, 1.0, 2.0}) {
      const auto oracle = fock::lindbladEvolve(rho0, gt);
      worstTrace = std::max(worstTrace, fock::traceDistance(oracle.matrix, fock::densityOf(decohere(s, gt), n).matrix));
    }
  }
  return {worstThreshold <= 1e-9 && worstTrace <= 1e-5,
          fmt("max|threshold-ln2|=%.2e, max trace distance to master equation=%.2e", worstThreshold, worstTrace)};
}

// 7. Randomized equivalence with the number basis.
Verdict oracleEquivalence() {
  experiments::VerifyOptions o;
  o.randomStates = 200;
  o.maxAmplitude = 3.0;
  o.seed = 7;
  const auto checks = experiments::verifySuite(o);
  std::string failed;
  double worst = 0.0;
  for (const auto& c : checks) {
    worst = std::max(worst, c.deviation);
    if (!c.passed) failed += " " + c.name;
  }
  return {experiments::allPassed(checks),
          fmt("%zu checks over 200 random states, worst deviation %.2e%s%s", checks.size(), worst,
              failed.empty() ? "" : ", failed:", failed.c_str())};
}

// 8. Displacement-based rotation and the displacement composition law.
Verdict rotation() {
  double worst = 0.0;
  for (double a : {5.0, 10.0}) {
    for (double eps : {0.01, 0.05}) {
      const auto s = normalize(SuperposedState(1, {{cplx(0.6, 0.2), CoherentLabel{a}}, {cplx(-0.3, 0.7), CoherentLabel{-a}}}));
      const auto p = optics::RotationParams::fromEpsilon(a, eps);
      const auto exact = optics::rotateZ(s, 0, p, optics::RotationMode::Exact);
      const auto physical = optics::rotateZ(s, 0, p, optics::RotationMode::Physical);
      const double f = std::norm(innerProduct(exact, physical)) /
                       (innerProduct(exact, exact).real() * innerProduct(physical, physical).real());
      worst = std::max(worst, std::abs(f - std::exp(-eps * eps)));
    }
  }
  double phaseDev = 0.0;
  RandomStream rng(99);
  for (int i = 0; i < 20; ++i) {
    auto c = [&] { return cplx(4 * rng.uniform() - 2, 4 * rng.uniform() - 2); };
    const cplx beta = c(), alpha = c(), delta = c();
    const auto s = SuperposedState::coherent({beta});
    const auto composed = optics::displace(optics::displace(s, 0, delta), 0, alpha);
    const auto direct = optics::displace(s, 0, alpha + delta);
    const cplx phase = std::exp(0.5 * (alpha * std::conj(delta) - std::conj(alpha) * delta));
    phaseDev = std::max(phaseDev, std::abs(composed[0].coefficient - phase * direct[0].coefficient));
  }
  return {worst <= 1e-6 && phaseDev <= 1e-13,
          fmt("max|fidelity-exp(-eps^2)|=%.2e, composition phase deviation %.2e", worst, phaseDev)};
}

// 9. Four-mode recursion.
Verdict multimode() {
  double worst = 0.0;
  for (double a : {2.0, 3.0}) {
    for (double f : kFGrid) {
      const auto rho = makeMultimodeEnsemble(a, f);
      const auto out = multimodePurify(tensor(rho, rho));
      worst = std::max(worst, std::abs(fidelity(*out.conditioned, makeB1(kSqrt2 * a)) - recursion(f)));
    }
  }
  return {worst <= 1e-9, fmt("max|F'-F^2/(F^2+(1-F)^2)|=%.2e", worst)};
}

// 10. Known discrepancies: derived values, each confirmed independently and documented.
Verdict discrepancies() {
  std::string readme;
  {
    std::ifstream in(ECS_SOURCE_DIR "/README.md");
    std::stringstream ss;
    ss << in.rdbuf();
    readme = ss.str();
  }
  const auto section = readme.find("## Known discrepancies");
  auto documented = [&](const char* tag) {
    return section != std::string::npos && readme.find(tag, section) != std::string::npos;
  };
  std::vector<std::string> notes;
  bool ok = true;

  // Vacuum overlap of the even cat |U⟩ at amplitude √2α.
  {
    double dev = 0.0, printedGap = 0.0;
    for (double a : {0.5, 1.0, 2.0}) {
      const double x = std::exp(-2 * a * a);
      const double derived = 2 * x / (1 + x * x);
      const double printed = x / ((1 + x * x) * (1 + x * x));
      const auto u = makeCat(kSqrt2 * a, +1);
      const double engine = optics::detect(MixedState::pure(u), 0, {optics::DetectorKind::OnOff})[0].probability;
      const double oracle = std::norm(fock::fromSuperposed(u, fock::cutoffFor(kSqrt2 * a)).amplitudes(0));
      dev = std::max({dev, std::abs(engine - derived), std::abs(oracle - derived)});
      printedGap = std::max(printedGap, std::abs(oracle - printed));
    }
    const bool pass = dev <= 1e-9 && printedGap > 1e-3 && documented("[vacuum-overlap]");
    ok = ok && pass;
    notes.push_back(fmt("vacuum-overlap %s (dev %.1e, printed form off by %.3f)", pass ? "ok" : "FAIL", dev, printedGap));
  }

  // Decohered fidelity: derived weights against the master equation; the
  // minus-sign denominator exceeds one.
  {
    double dev = 0.0, printedMin = 1e9;
    for (double a : {0.5, 1.0, 2.0}) {
      const auto s = makeQuasiBell(a, QuasiBell::PhiMinus);
      const int n = fock::cutoffFor(a);
      const auto rho0 = fock::densityOf(fock::fromSuperposed(s, n));
      for (double gt : {0.3, 1.0}) {
        const DecoherenceParams p{gt, a};
        const auto target = fock::fromSuperposed(dynamicQuasiBell(p, QuasiBell::PhiMinus), n).amplitudes;
        const auto evolved = fock::lindbladEvolve(rho0, gt);
        const double oracle = (target.adjoint() * evolved.matrix * target)(0, 0).real();
        dev = std::max(dev, std::abs(decoheredFidelity(p) - oracle));
        const double np = 1 / (2 * (1 + p.k())), nm = 1 / (2 * (1 - p.k()));
        const double g = p.capitalGamma();
        const double printed = np * (1 + g) / (np * (1 + g) - nm * (1 - g));
        printedMin = std::min(printedMin, std::abs(printed - oracle));
      }
    }
    const bool pass = dev <= 1e-6 && printedMin > 1e-3 && documented("[decoherence-fidelity]");
    ok = ok && pass;
    notes.push_back(fmt("decoherence-fidelity %s (dev %.1e, printed form off by >= %.3f)", pass ? "ok" : "FAIL", dev, printedMin));
  }

  // Four-mode denominator: exact conditioning gives F²/(F²+(1−F)²).
  {
    const double f = 0.7;
    const auto rho = makeMultimodeEnsemble(2.0, f);
    const auto out = multimodePurify(tensor(rho, rho));
    const double exact = fidelity(*out.conditioned, makeB1(2 * kSqrt2));
    const double printed = f * f / (f * f + (1 - f * f));
    const bool pass = std::abs(exact - 0.49 / 0.58) <= 1e-9 && std::abs(exact - printed) > 0.1 &&
                      documented("[multimode-denominator]");
    ok = ok && pass;
    notes.push_back(fmt("multimode-denominator %s (F'=%.6f, printed %.2f)", pass ? "ok" : "FAIL", exact, printed));
  }

  // Three-round P1-only example from G1 = 2/3 at α = 2.
  {
    ProtocolConfig c;
    c.alpha = 2.0;
    c.scheme = Scheme::SimpleP1;
    c.target = QuasiBell::PhiPlus;
    c.iterations = 3;
    MixedState last = makeEnsemble(2.0, 2.0 / 3.0, QuasiBell::PhiPlus);
    const auto reports = runProtocol(c, 2.0 / 3.0, &last);
    const double amp = reports.back().amplitudeAfter;
    const double f = reports.back().fidelityAfter;
    // Fidelity of the final ensemble re-evaluated in the number basis.
    const int n = fock::cutoffFor(amp);
    const auto t = fock::fromSuperposed(makeQuasiBell(amp, QuasiBell::PhiPlus), n).amplitudes;
    double oracle = 0.0;
    for (const auto& comp : last.components()) {
      oracle += comp.weight * std::norm(t.dot(fock::fromSuperposed(comp.state, n).amplitudes));
    }
    const double fExpected = recursion(recursion(0.8));
    const bool pass = std::abs(f - fExpected) <= 1e-9 && std::abs(oracle - f) <= 1e-6 &&
                      std::abs(amp - 4 * kSqrt2) <= 1e-12 && std::abs(f - 0.99999) > 1e-3 && std::abs(amp - 8.0) > 1 &&
                      documented("[simple-scheme-example]");
    ok = ok && pass;
    notes.push_back(fmt("simple-scheme-example %s (F=%.5f amplitude=%.3f vs printed 0.99999 / 8)", pass ? "ok" : "FAIL", f, amp));
  }

  std::string detail;
  for (const auto& s : notes) detail += (detail.empty() ? "" : "; ") + s;
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"entropy closed form", entropy},
      {"quasi-Bell overlap", quasiBellOverlap},
      {"fidelity recursion end-to-end", fidelityRecursionEndToEnd},
      {"success probability", successProbabilityFormula},
      {"Monte Carlo consistency", monteCarlo},
      {"decoherence threshold", decoherence},
      {"oracle equivalence", oracleEquivalence},
      {"rotation fidelity", rotation},
      {"multimode recursion", multimode},
      {"known-discrepancy ledger", discrepancies},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s [%zu] %s: %s (%.2f s)\n", v.passed ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.passed) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
