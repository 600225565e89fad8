#include "ecs/purification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "ecs/entanglement.hpp"
#include "ecs/gram.hpp"

namespace ecs::purification {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSummaryTolerance = 1e-8;

using optics::BeamSplitterConvention;

double p1ProbeAmplitude(const SuperposedState& pair, const ProbeOptions& probe) {
  const double a = probe.amplitude ? *probe.amplitude : kSqrt2 * std::abs(optics::qubitAmplitude(pair, 0));
  return probe.sign >= 0 ? a : -a;
}

MixedState fromParts(std::size_t modes, std::vector<MixedState::Component> parts) {
  return MixedState::fromUnnormalized(modes, std::move(parts)).compressed();
}

}  // namespace

const char* toString(Scheme s) { return s == Scheme::Full ? "full" : "simple"; }

const char* toString(QuasiBell q) {
  switch (q) {
    case QuasiBell::PhiPlus: return "PhiPlus";
    case QuasiBell::PhiMinus: return "PhiMinus";
    case QuasiBell::PsiPlus: return "PsiPlus";
    case QuasiBell::PsiMinus: return "PsiMinus";
  }
  return "?";
}

void ProtocolConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
  if (iterations < 0) throw std::invalid_argument("iterations must be non-negative");
  if (mode == RunMode::MonteCarlo && trials < 1) throw std::invalid_argument("Monte Carlo mode needs trials >= 1");
  if (scheme == Scheme::SimpleP1 && !keepsSameParity(target)) {
    throw std::invalid_argument("the P1-only scheme distils PhiPlus or PsiPlus");
  }
  if (probe.amplitude && !(*probe.amplitude > 0.0)) throw std::invalid_argument("probe amplitude must be positive");
}

QuasiBell partnerOf(QuasiBell target) {
  switch (target) {
    case QuasiBell::PhiPlus: return QuasiBell::PsiPlus;
    case QuasiBell::PhiMinus: return QuasiBell::PsiMinus;
    case QuasiBell::PsiPlus: return QuasiBell::PhiPlus;
    case QuasiBell::PsiMinus: return QuasiBell::PhiMinus;
  }
  throw std::invalid_argument("unknown quasi-Bell state");
}

MixedState makeEnsemble(double alpha, double f, QuasiBell target) {
  if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("fidelity must lie in [0, 1]");
  std::vector<MixedState::Component> c;
  if (f > 0.0) c.push_back({f, makeQuasiBell(alpha, target)});
  if (f < 1.0) c.push_back({1.0 - f, makeQuasiBell(alpha, partnerOf(target))});
  return MixedState(2, std::move(c));
}

double componentWeight(const MixedState& rho, const SuperposedState& target) {
  double w = 0.0;
  for (const auto& c : rho.components()) {
    if (rayOverlap(c.state, target) > 1.0 - 1e-9) w += c.weight;
  }
  return w;
}

SuperposedState p1Setup(const SuperposedState& pairState, std::size_t pairModes, const ProbeOptions& probe,
                        BeamSplitterConvention convention) {
  const std::size_t n = pairModes;
  if (n == 0 || pairState.modeCount() != 2 * n) throw std::invalid_argument("P1 input must hold two copies");
  const double p = p1ProbeAmplitude(pairState, probe);
  auto s = pairState;
  for (std::size_t i = 0; i < n; ++i) s = optics::beamSplitter(s, i, n + i, convention);
  s = tensor(s, SuperposedState::coherent(std::vector<cplx>(n, cplx(p, 0.0))));
  for (std::size_t i = 0; i < n; ++i) s = optics::beamSplitter(s, n + i, 2 * n + i, convention);
  return s;
}

RoundOutput p1RoundModes(const MixedState& rhoPair, std::size_t pairModes, const ProbeOptions& probe,
                         BeamSplitterConvention convention) {
  const std::size_t n = pairModes;
  if (rhoPair.modeCount() != 2 * n) throw std::invalid_argument("P1 input must hold two copies");
  std::vector<ModeProjection> clicks;
  for (std::size_t m = n; m < 3 * n; ++m) clicks.push_back({m, Projector::Click});

  RoundOutput out;
  std::vector<MixedState::Component> parts;
  for (const auto& c : rhoPair.components()) {
    const auto op = projectAndTrace(p1Setup(c.state, n, probe, convention), clicks);
    const double p = op.trace();
    if (p <= 1e-16) continue;
    out.keepProbability += c.weight * p;
    for (auto& part : diagonalize(op)) parts.push_back({c.weight * part.weight, std::move(part.state)});
  }
  out.keepProbability = std::clamp(out.keepProbability, 0.0, 1.0);
  if (!parts.empty()) out.conditioned = fromParts(n, std::move(parts));
  return out;
}

RoundOutput p1Round(const MixedState& rhoPair, const ProbeOptions& probe, BeamSplitterConvention convention) {
  if (rhoPair.modeCount() != 4) throw std::invalid_argument("P1 acts on (a, b, a', b')");
  return p1RoundModes(rhoPair, 2, probe, convention);
}

SuperposedState p2Setup(const SuperposedState& s, BeamSplitterConvention convention) {
  if (s.modeCount() != 2) throw std::invalid_argument("P2 acts on two modes");
  auto t = tensor(s, SuperposedState::vacuum(2));
  t = optics::beamSplitter(t, 0, 2, convention);
  return optics::beamSplitter(t, 1, 3, convention);
}

bool keepsSameParity(QuasiBell target) { return target == QuasiBell::PhiPlus || target == QuasiBell::PsiPlus; }

namespace {

std::vector<std::pair<Projector, Projector>> keptParities(QuasiBell target) {
  if (keepsSameParity(target)) return {{Projector::Even, Projector::Even}, {Projector::Odd, Projector::Odd}};
  return {{Projector::Even, Projector::Odd}, {Projector::Odd, Projector::Even}};
}

}  // namespace

RoundOutput p2Round(const MixedState& rho, QuasiBell target, BeamSplitterConvention convention) {
  if (rho.modeCount() != 2) throw std::invalid_argument("P2 acts on two modes");
  RoundOutput out;
  std::vector<MixedState::Component> parts;
  for (const auto& c : rho.components()) {
    const auto s = p2Setup(c.state, convention);
    for (auto [pk, pl] : keptParities(target)) {
      const ModeProjection proj[] = {{2, pk}, {3, pl}};
      const auto op = projectAndTrace(s, proj);
      const double p = op.trace();
      if (p <= 1e-16) continue;
      out.keepProbability += c.weight * p;
      for (auto& part : diagonalize(op)) parts.push_back({c.weight * part.weight, std::move(part.state)});
    }
  }
  out.keepProbability = std::clamp(out.keepProbability, 0.0, 1.0);
  if (!parts.empty()) out.conditioned = fromParts(2, std::move(parts));
  return out;
}

double fidelityRecursion(double f) {
  const double d = f * f + (1.0 - f) * (1.0 - f);
  return f * f / d;
}

double successProbability(double f, double alpha, Scheme scheme) {
  const double a2 = alpha * alpha;
  const double e4 = std::exp(-4.0 * a2);
  const double e8 = std::exp(-8.0 * a2);
  const double base = f * f + (1.0 - f) * (1.0 - f);
  const double p1 = 1.0 - 2.0 * e4 / (1.0 + e8);
  if (scheme == Scheme::SimpleP1) return base / 2.0 * p1;
  return base / 4.0 * p1 * ((1.0 - e4) / (1.0 + e8));
}

double p2DifferentParityProbability(double alpha) {
  const double a2 = alpha * alpha;
  const double e4 = -std::expm1(-4.0 * a2);
  return e4 * e4 / (2.0 * (1.0 + std::exp(-8.0 * a2)));
}

double exactSuccessProbability(double f, double alpha, Scheme scheme, QuasiBell target) {
  const double a2 = alpha * alpha;
  const double base = f * f + (1.0 - f) * (1.0 - f);
  const double click = -std::expm1(-a2);
  const double sign = keepsSameParity(target) ? 1.0 : -1.0;
  const double n2 = 1.0 / (2.0 * (1.0 + sign * std::exp(-4.0 * a2)));
  const double p1 = base * n2 * n2 * 2.0 * (1.0 + std::exp(-8.0 * a2)) * std::pow(click, 4);
  if (scheme == Scheme::SimpleP1) return p1;
  const double p = p2DifferentParityProbability(alpha);
  return p1 * (keepsSameParity(target) ? 1.0 - p : p);
}

RoundOutput protocolRound(const MixedState& rho, Scheme scheme, QuasiBell target, const ProbeOptions& probe,
                          BeamSplitterConvention convention) {
  if (rho.modeCount() != 2) throw std::invalid_argument("protocol rounds act on two-mode ensembles");
  auto r1 = p1Round(tensor(rho, rho), probe, convention);
  if (scheme == Scheme::SimpleP1 || !r1.conditioned) return r1;
  auto r2 = p2Round(*r1.conditioned, target, convention);
  r2.keepProbability *= r1.keepProbability;
  return r2;
}

namespace {

// Sequential detection program walked by the Monte Carlo sampler.
struct Step {
  enum class Kind { Detect, Transform } kind;
  std::size_t mode = 0;
  optics::DetectorModel model;
  std::vector<optics::Outcome> allowed;
  std::function<MixedState(const MixedState&)> transform;
};

struct Node {
  bool leaf = false;
  bool keep = false;
  double fidelity = 0.0;
  std::vector<double> cumulative;
  std::vector<std::size_t> children;
};

class DetectionTree {
 public:
  DetectionTree(const std::vector<Step>& steps, std::function<bool(const std::vector<optics::Outcome>&)> accept,
                const SuperposedState& target)
      : steps_(steps), accept_(std::move(accept)), target_(target) {
    nodes_.push_back({true, false, 0.0, {}, {}});
  }

  std::size_t build(const MixedState& state) {
    std::vector<optics::Outcome> seen;
    return build(state, 0, seen);
  }

  // Returns the leaf reached.
  const Node& walk(std::size_t root, RandomStream& rng) const {
    std::size_t at = root;
    while (!nodes_[at].leaf) {
      const auto& n = nodes_[at];
      const double u = rng.uniform() * n.cumulative.back();
      auto it = std::upper_bound(n.cumulative.begin(), n.cumulative.end(), u);
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - n.cumulative.begin()),
                                           n.children.size() - 1);
      at = n.children[k];
    }
    return nodes_[at];
  }

 private:
  std::size_t build(const MixedState& state, std::size_t step, std::vector<optics::Outcome>& seen) {
    if (step == steps_.size()) {
      Node leaf;
      leaf.leaf = true;
      leaf.keep = accept_(seen);
      if (leaf.keep) leaf.fidelity = fidelity(state, target_);
      nodes_.push_back(std::move(leaf));
      return nodes_.size() - 1;
    }
    const auto& st = steps_[step];
    if (st.kind == Step::Kind::Transform) return build(st.transform(state), step + 1, seen);

    Node node;
    double acc = 0.0;
    std::vector<std::size_t> children;
    for (auto& o : optics::detect(state, st.mode, st.model)) {
      if (o.probability <= 0.0) continue;
      std::size_t child = 0;
      const bool allowed = std::find(st.allowed.begin(), st.allowed.end(), o.outcome) != st.allowed.end();
      if (allowed && o.conditionedState) {
        seen.push_back(o.outcome);
        child = build(*o.conditionedState, step + 1, seen);
        seen.pop_back();
      }
      acc += o.probability;
      node.cumulative.push_back(acc);
      node.children.push_back(child);
    }
    if (node.children.empty()) return 0;
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
  }

  const std::vector<Step>& steps_;
  std::function<bool(const std::vector<optics::Outcome>&)> accept_;
  SuperposedState target_;
  std::vector<Node> nodes_;
};

struct ChunkTally {
  std::uint64_t trials = 0;
  std::uint64_t kept = 0;
  double sumF = 0.0;
  double sumF2 = 0.0;
};

}  // namespace

MonteCarloStats monteCarloRound(const MixedState& rho, Scheme scheme, QuasiBell target, std::uint64_t trials,
                                std::uint64_t rootSeed, const ProbeOptions& probe,
                                BeamSplitterConvention convention, double z) {
  if (trials < 1) throw std::invalid_argument("Monte Carlo needs at least one trial");
  const double a = std::abs(optics::qubitAmplitude(rho[0].state, 0));
  const auto pair = tensor(rho, rho);

  std::vector<Step> steps;
  for (int i = 0; i < 4; ++i) {
    steps.push_back({Step::Kind::Detect, 2, {optics::DetectorKind::OnOff}, {optics::Outcome::Click}, {}});
  }
  const optics::Outcome parities[] = {optics::Outcome::Even, optics::Outcome::Odd};
  if (scheme == Scheme::Full) {
    Step t{Step::Kind::Transform, 0, {}, {}, {}};
    t.transform = [convention](const MixedState& m) {
      std::vector<MixedState::Component> c;
      for (const auto& x : m.components()) c.push_back({x.weight, p2Setup(x.state, convention)});
      return MixedState(4, std::move(c));
    };
    steps.push_back(std::move(t));
    for (int i = 0; i < 2; ++i) {
      steps.push_back({Step::Kind::Detect, 2, {optics::DetectorKind::Parity}, {parities[0], parities[1]}, {}});
    }
  }
  const bool same = keepsSameParity(target);
  auto accept = [scheme, same](const std::vector<optics::Outcome>& seen) {
    if (scheme == Scheme::SimpleP1) return true;
    const bool equal = seen[seen.size() - 1] == seen[seen.size() - 2];
    return equal == same;
  };
  const double outAmp = scheme == Scheme::Full ? a : kSqrt2 * a;
  DetectionTree tree(steps, accept, makeQuasiBell(outAmp, target));

  std::vector<std::size_t> roots;
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& c : pair.components()) {
    roots.push_back(tree.build(MixedState::pure(p1Setup(c.state, 2, probe, convention))));
    acc += c.weight;
    cumulative.push_back(acc);
  }

  constexpr std::uint64_t kChunk = 8192;
  const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<ChunkTally> tallies(chunks);
  const RandomStream root(rootSeed);
  auto runChunk = [&](std::uint64_t c) {
    RandomStream rng = root.child(c);
    ChunkTally t;
    t.trials = std::min(kChunk, trials - c * kChunk);
    for (std::uint64_t i = 0; i < t.trials; ++i) {
      const double u = rng.uniform() * cumulative.back();
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      const auto src = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), roots.size() - 1);
      const auto& leaf = tree.walk(roots[src], rng);
      if (!leaf.keep) continue;
      ++t.kept;
      t.sumF += leaf.fidelity;
      t.sumF2 += leaf.fidelity * leaf.fidelity;
    }
    tallies[c] = t;
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                           static_cast<unsigned>(chunks)));
  if (workers == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) runChunk(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < chunks; c += workers) runChunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }

  MonteCarloStats s;
  double sumF = 0.0;
  double sumF2 = 0.0;
  for (const auto& t : tallies) {
    s.trials += t.trials;
    s.kept += t.kept;
    sumF += t.sumF;
    sumF2 += t.sumF2;
  }
  const double n = static_cast<double>(s.trials);
  s.rate = static_cast<double>(s.kept) / n;
  s.halfWidth = z * std::sqrt(std::max(s.rate * (1.0 - s.rate), 0.0) / n);
  if (s.kept > 0) {
    const double k = static_cast<double>(s.kept);
    s.keptFidelity = sumF / k;
    const double var = std::max(sumF2 / k - s.keptFidelity * s.keptFidelity, 0.0);
    s.keptFidelitySigma = std::sqrt(var / k);
  }
  return s;
}

std::vector<RoundReport> iterateRounds(MixedState rho, const ProtocolConfig& config, MixedState* finalState) {
  config.validate();
  double amp = std::abs(optics::qubitAmplitude(rho[0].state, 0));
  auto target = makeQuasiBell(amp, config.target);
  double summary = componentWeight(rho, target);
  const bool twoMember =
      std::abs(summary + componentWeight(rho, makeQuasiBell(amp, partnerOf(config.target))) - 1.0) < 1e-9;

  std::vector<RoundReport> reports;
  const RandomStream seeds(config.rootSeed);
  for (int r = 1; r <= config.iterations; ++r) {
    RoundReport rep;
    rep.round = r;
    rep.fidelityBefore = componentWeight(rho, target);
    rep.fidelityRecursion = fidelityRecursion(rep.fidelityBefore);
    rep.successFormula = successProbability(rep.fidelityBefore, amp, config.scheme);

    auto out = protocolRound(rho, config.scheme, config.target, config.probe, config.convention);
    if (!out.conditioned) throw std::runtime_error("no pair survives the round");
    rep.successProbability = out.keepProbability;
    if (config.mode == RunMode::MonteCarlo) {
      rep.monteCarlo = monteCarloRound(rho, config.scheme, config.target, config.trials,
                                       seeds.child(static_cast<std::uint64_t>(r)).seed(), config.probe,
                                       config.convention);
    }

    const double nextAmp = config.scheme == Scheme::Full ? amp : kSqrt2 * amp;
    target = makeQuasiBell(nextAmp, config.target);
    rep.fidelityAfter = componentWeight(*out.conditioned, target);
    rep.overlapFidelity = fidelity(*out.conditioned, target);
    rep.amplitudeAfter = nextAmp;

    if (twoMember) {
      summary = fidelityRecursion(summary);
      if (std::abs(summary - rep.fidelityAfter) > kSummaryTolerance) {
        throw std::logic_error("tracked fidelity and conditioned state disagree");
      }
    }
    reports.push_back(rep);
    rho = std::move(*out.conditioned);
    amp = nextAmp;
  }
  if (finalState) *finalState = std::move(rho);
  return reports;
}

std::vector<RoundReport> runProtocol(const ProtocolConfig& config, double f0, MixedState* finalState) {
  config.validate();
  if (!(f0 > 0.0 && f0 < 1.0)) throw std::invalid_argument("initial fidelity must lie in (0, 1)");
  return iterateRounds(makeEnsemble(config.alpha, f0, config.target), config, finalState);
}

std::vector<RoundReport> simpleP1Scheme(const MixedState& rho, int iterations, const ProtocolConfig& config) {
  auto c = config;
  c.scheme = Scheme::SimpleP1;
  c.iterations = iterations;
  return iterateRounds(rho, c);
}

// ---- bilateral twirl ----

namespace {

Eigen::Matrix2cd logicalBx() {
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd m;
  m << 1.0, i, i, 1.0;
  return m / kSqrt2;
}

Eigen::Matrix2cd logicalRz(double theta) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::polar(1.0, theta / 2);
  m(1, 1) = std::polar(1.0, -theta / 2);
  return m;
}

}  // namespace

std::vector<Eigen::Matrix2cd> twirlGroup() {
  const auto bx = logicalBx();
  const auto bz = logicalRz(std::numbers::pi / 2);
  const Eigen::Matrix2cd by = -logicalRz(std::numbers::pi) * bx * bz * bx;
  const Eigen::Matrix2cd c = bx * by;
  const Eigen::Matrix2cd paulis[] = {Eigen::Matrix2cd::Identity(), bx * bx, by * by, bz * bz};
  const Eigen::Matrix2cd cycles[] = {Eigen::Matrix2cd::Identity(), c, c * c};
  std::vector<Eigen::Matrix2cd> g;
  for (const auto& p : paulis)
    for (const auto& q : cycles) g.push_back(p * q);
  return g;
}

Eigen::Matrix4cd bilateral(const Eigen::Matrix2cd& u) {
  Eigen::Matrix2cd x;
  x << 0, 1, 1, 0;
  const Eigen::Matrix2cd v = x * u * x;
  Eigen::Matrix4cd k;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k(2 * a + b, 2 * i + j) = u(a, i) * v(b, j);
  return k;
}

namespace {

cplx twoModeAmplitude(const MixedState& rho) {
  if (rho.modeCount() != 2) throw std::invalid_argument("twirl acts on two-mode states");
  const cplx a = optics::qubitAmplitude(rho[0].state, 0);
  for (const auto& c : rho.components()) {
    for (std::size_t m = 0; m < 2; ++m) {
      const cplx b = optics::qubitAmplitude(c.state, m);
      if (std::abs(b - a) >= kDedupTolerance && std::abs(b + a) >= kDedupTolerance) {
        throw std::invalid_argument("twirl needs one qubit amplitude on both modes");
      }
    }
  }
  return a;
}

}  // namespace

MixedState wernerTwirl(const MixedState& rho, std::size_t sampleCount, RandomStream& stream) {
  if (sampleCount == 0) throw std::invalid_argument("twirl needs at least one sample");
  const cplx a = twoModeAmplitude(rho);
  const auto m = toLogical(rho, a);
  const auto group = twirlGroup();
  Eigen::Matrix4cd avg = Eigen::Matrix4cd::Zero();
  for (std::size_t s = 0; s < sampleCount; ++s) {
    const auto idx = static_cast<std::size_t>(stream.next() % group.size());
    const auto k = bilateral(group[idx]);
    avg += k * m * k.adjoint();
  }
  return fromLogical(avg / static_cast<double>(sampleCount), a);
}

MixedState wernerTwirlExact(const MixedState& rho) {
  const cplx a = twoModeAmplitude(rho);
  const auto m = toLogical(rho, a);
  const auto group = twirlGroup();
  Eigen::Matrix4cd avg = Eigen::Matrix4cd::Zero();
  for (const auto& g : group) {
    const auto k = bilateral(g);
    avg += k * m * k.adjoint();
  }
  return fromLogical(avg / static_cast<double>(group.size()), a);
}

// ---- vacuum decoherence ----

double DecoherenceParams::t() const { return std::exp(-gammaTau / 2.0); }

double DecoherenceParams::capitalGamma() const {
  return std::exp(-4.0 * -std::expm1(-gammaTau) * alpha * alpha);
}

double DecoherenceParams::k() const { return std::exp(-4.0 * std::exp(-gammaTau) * alpha * alpha); }

MixedState decohere(const MixedState& rho, double gammaTau) {
  if (!(gammaTau >= 0.0)) throw std::invalid_argument("decay time must be non-negative");
  if (gammaTau == 0.0) return rho;
  const double t = std::exp(-gammaTau / 2.0);
  const double loss = -std::expm1(-gammaTau);
  std::vector<OperatorForm> parts;
  std::vector<double> weights;
  for (const auto& c : rho.components()) {
    const auto& s = c.state;
    OperatorForm op;
    op.modeCount = s.modeCount();
    const auto n = static_cast<Eigen::Index>(s.size());
    op.coeffs.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      std::vector<cplx> amps(s[static_cast<std::size_t>(i)].label.amplitudes().begin(),
                             s[static_cast<std::size_t>(i)].label.amplitudes().end());
      for (auto& x : amps) x *= t;
      op.labels.emplace_back(std::move(amps));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto& ket = s[static_cast<std::size_t>(i)];
        const auto& bra = s[static_cast<std::size_t>(j)];
        cplx e = 0.0;
        for (std::size_t m = 0; m < s.modeCount(); ++m) {
          const cplx b = ket.label[m];
          const cplx g = bra.label[m];
          e += -0.5 * std::norm(b) - 0.5 * std::norm(g) + std::conj(g) * b;
        }
        op.coeffs(i, j) = ket.coefficient * std::conj(bra.coefficient) * std::exp(loss * e);
      }
    }
    parts.push_back(std::move(op));
    weights.push_back(c.weight);
  }
  return fromParts(rho.modeCount(), diagonalize(sum(parts, weights)));
}

MixedState decohere(const SuperposedState& s, double gammaTau) {
  return decohere(MixedState::pure(normalize(s)), gammaTau);
}

double decoheredFidelity(const DecoherenceParams& p) {
  const double g = p.capitalGamma();
  const double k = p.k();
  return (1.0 + g) * (1.0 - k) / (2.0 * (1.0 - g * k));
}

double decoheredFidelityExcess(const DecoherenceParams& p) {
  const double g = p.capitalGamma();
  const double k = p.k();
  return (g - k) / (2.0 * (1.0 - g * k));
}

SuperposedState dynamicQuasiBell(const DecoherenceParams& p, QuasiBell which) {
  return makeQuasiBell(p.t() * p.alpha, which);
}

MixedState preRotate(const MixedState& rho, PreRotation gate) {
  if (rho.modeCount() != 2) throw std::invalid_argument("pre-rotation acts on two modes");
  std::vector<MixedState::Component> out;
  for (const auto& c : rho.components()) {
    auto s = c.state;
    for (std::size_t m = 0; m < 2; ++m) {
      s = gate == PreRotation::BxBx ? optics::kerrBx(s, m) : optics::hadamardUnnormalized(s, m);
    }
    out.push_back({c.weight * s.squaredNorm(), normalize(s)});
  }
  return fromParts(2, std::move(out));
}

double hadamardNormalization(const DecoherenceParams& p) {
  const double k = p.k();
  const double r = (1.0 + k) / (1.0 - k);
  const double f = decoheredFidelity(p);
  return 1.0 / (f * r + 1.0 - f);
}

double purificationThreshold(double alpha, double tolerance) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  double lo = 0.0;
  double hi = 10.0;
  auto g = [alpha](double gt) { return decoheredFidelityExcess({gt, alpha}); };
  double glo = g(lo);
  if (glo * g(hi) > 0.0) throw std::runtime_error("threshold not bracketed");
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---- four-mode states ----

SuperposedState makeB1(double alpha) {
  const cplx a(alpha, 0.0);
  return canonicalPhase(normalize(SuperposedState(
      4, {{1.0, CoherentLabel{a, a, a, a}}, {1.0, CoherentLabel{-a, -a, -a, -a}}})));
}

SuperposedState makeB2(double alpha) {
  const cplx a(alpha, 0.0);
  return canonicalPhase(normalize(SuperposedState(
      4, {{1.0, CoherentLabel{a, -a, a, -a}}, {1.0, CoherentLabel{-a, a, -a, a}}})));
}

SuperposedState makeB1ViaBeamSplitters(double alpha) {
  auto s = tensor(makeCat(cplx(2.0 * alpha, 0.0), +1), SuperposedState::vacuum(1));
  s = optics::beamSplitter(s, 0, 1);
  s = tensor(s, SuperposedState::vacuum(2));
  s = optics::beamSplitter(s, 0, 2);
  s = optics::beamSplitter(s, 1, 3);
  return canonicalPhase(normalize(s));
}

MixedState makeMultimodeEnsemble(double alpha, double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("fidelity must lie in [0, 1]");
  std::vector<MixedState::Component> c;
  if (f > 0.0) c.push_back({f, makeB1(alpha)});
  if (f < 1.0) c.push_back({1.0 - f, makeB2(alpha)});
  return MixedState(4, std::move(c));
}

RoundOutput multimodePurify(const MixedState& rhoPair, const ProbeOptions& probe,
                            BeamSplitterConvention convention) {
  if (rhoPair.modeCount() != 8) throw std::invalid_argument("four-mode P1 acts on two four-mode copies");
  return p1RoundModes(rhoPair, 4, probe, convention);
}

}  // namespace ecs::purification
