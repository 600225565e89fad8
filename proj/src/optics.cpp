#include "ecs/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ecs/gram.hpp"

namespace ecs::optics {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void checkMode(const SuperposedState& s, std::size_t mode) {
  if (mode >= s.modeCount()) throw std::out_of_range("mode index out of range");
}

double realAlpha(const SuperposedState& s, std::size_t mode) {
  const cplx a = qubitAmplitude(s, mode);
  if (std::abs(a.imag()) > kDedupTolerance) {
    throw std::invalid_argument("z rotations need a real qubit amplitude");
  }
  return std::abs(a.real());
}

}  // namespace

SuperposedState beamSplitter(const SuperposedState& s, std::size_t modeI, std::size_t modeJ,
                             BeamSplitterConvention convention) {
  checkMode(s, modeI);
  checkMode(s, modeJ);
  if (modeI == modeJ) throw std::invalid_argument("beam splitter needs two distinct modes");
  std::vector<Term> terms;
  terms.reserve(s.size());
  for (const auto& t : s.terms()) {
    const cplx bi = t.label[modeI];
    const cplx bj = t.label[modeJ];
    std::vector<cplx> amps(t.label.amplitudes().begin(), t.label.amplitudes().end());
    if (convention.sign >= 0) {
      amps[modeI] = (bi + bj) * kInvSqrt2;
      amps[modeJ] = (bi - bj) * kInvSqrt2;
    } else {
      amps[modeI] = (bj - bi) * kInvSqrt2;
      amps[modeJ] = (bi + bj) * kInvSqrt2;
    }
    terms.push_back({t.coefficient, CoherentLabel(std::move(amps))});
  }
  return {s.modeCount(), std::move(terms)};
}

MixedState beamSplitter(const MixedState& rho, std::size_t modeI, std::size_t modeJ,
                        BeamSplitterConvention convention) {
  std::vector<MixedState::Component> out;
  for (const auto& c : rho.components()) {
    out.push_back({c.weight, beamSplitter(c.state, modeI, modeJ, convention)});
  }
  return MixedState::fromUnnormalized(rho.modeCount(), std::move(out));
}

SuperposedState displace(const SuperposedState& s, std::size_t mode, cplx delta) {
  checkMode(s, mode);
  std::vector<Term> terms;
  terms.reserve(s.size());
  for (const auto& t : s.terms()) {
    const cplx beta = t.label[mode];
    const cplx phase = std::exp(0.5 * (delta * std::conj(beta) - std::conj(delta) * beta));
    terms.push_back({t.coefficient * phase, t.label.withMode(mode, beta + delta)});
  }
  return {s.modeCount(), std::move(terms)};
}

cplx qubitAmplitude(const SuperposedState& s, std::size_t mode) {
  checkMode(s, mode);
  cplx a = 0.0;
  for (const auto& t : s.terms()) {
    if (std::abs(t.label[mode]) > kDedupTolerance) {
      a = t.label[mode];
      break;
    }
  }
  for (const auto& t : s.terms()) {
    const cplx b = t.label[mode];
    if (std::abs(b - a) >= kDedupTolerance && std::abs(b + a) >= kDedupTolerance) {
      throw std::invalid_argument("label outside the {|a>, |-a>} qubit space");
    }
  }
  return a;
}

SuperposedState applyLabelGate(const SuperposedState& s, std::size_t mode, const Eigen::Matrix2cd& gate) {
  const cplx a = qubitAmplitude(s, mode);
  std::vector<Term> terms;
  terms.reserve(2 * s.size());
  for (const auto& t : s.terms()) {
    const bool plus = std::abs(t.label[mode] - a) < kDedupTolerance;
    const int col = plus ? 0 : 1;
    terms.push_back({t.coefficient * gate(0, col), t.label.withMode(mode, a)});
    terms.push_back({t.coefficient * gate(1, col), t.label.withMode(mode, -a)});
  }
  return {s.modeCount(), std::move(terms)};
}

Eigen::Matrix2cd kerrMatrix() {
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd m;
  m << 1.0, i, i, 1.0;
  return m * kInvSqrt2;
}

Eigen::Matrix2cd rotateZMatrix(double theta) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::polar(1.0, theta / 2);
  m(1, 1) = std::polar(1.0, -theta / 2);
  return m;
}

Eigen::Matrix2cd hadamardMatrix() {
  Eigen::Matrix2cd m;
  m << 1.0, 1.0, 1.0, -1.0;
  return m * kInvSqrt2;
}

SuperposedState kerrBx(const SuperposedState& s, std::size_t mode) {
  return applyLabelGate(s, mode, kerrMatrix());
}

RotationParams RotationParams::fromTheta(double alpha, double theta) {
  if (!(alpha > 0.0)) throw std::invalid_argument("rotation needs a positive qubit amplitude");
  return {theta / (4.0 * alpha), alpha, theta};
}

RotationParams RotationParams::fromEpsilon(double alpha, double epsilon) {
  return {epsilon, alpha, 4.0 * alpha * epsilon};
}

SuperposedState rotateZ(const SuperposedState& s, std::size_t mode, const RotationParams& params,
                        RotationMode how) {
  if (how == RotationMode::Physical) {
    checkMode(s, mode);
    return displace(s, mode, cplx(0.0, params.epsilon));
  }
  return applyLabelGate(s, mode, rotateZMatrix(params.theta));
}

SuperposedState sigmaZ(const SuperposedState& s, std::size_t mode, RotationMode how) {
  return rotateZ(s, mode, RotationParams::fromTheta(realAlpha(s, mode), std::numbers::pi), how);
}

SuperposedState bZ(const SuperposedState& s, std::size_t mode, RotationMode how) {
  return rotateZ(s, mode, RotationParams::fromTheta(realAlpha(s, mode), std::numbers::pi / 2), how);
}

SuperposedState bY(const SuperposedState& s, std::size_t mode) {
  // displaced labels leave the qubit space, so only ideal rotations compose with the Kerr gate
  auto step = kerrBx(s, mode);
  step = bZ(step, mode);
  step = kerrBx(step, mode);
  step = sigmaZ(step, mode);
  return step.scaled(-1.0);
}

SuperposedState hadamardUnnormalized(const SuperposedState& s, std::size_t mode) {
  return applyLabelGate(s, mode, hadamardMatrix());
}

SuperposedState hadamard(const SuperposedState& s, std::size_t mode) {
  return normalize(hadamardUnnormalized(s, mode));
}

const char* toString(Outcome o) {
  switch (o) {
    case Outcome::Vacuum: return "vacuum";
    case Outcome::Click: return "click";
    case Outcome::Even: return "even";
    case Outcome::Odd: return "odd";
  }
  return "?";
}

std::vector<Outcome> outcomesOf(DetectorModel model) {
  if (model.kind == DetectorKind::OnOff) return {Outcome::Vacuum, Outcome::Click};
  return {Outcome::Even, Outcome::Odd};
}

namespace {

Projector projectorFor(Outcome o) {
  switch (o) {
    case Outcome::Vacuum: return Projector::Vacuum;
    case Outcome::Click: return Projector::Click;
    case Outcome::Even: return Projector::Even;
    case Outcome::Odd: return Projector::Odd;
  }
  throw std::invalid_argument("unknown outcome");
}

}  // namespace

std::vector<DetectorOutcome> detect(const MixedState& rho, std::size_t mode, DetectorModel model) {
  if (mode >= rho.modeCount()) throw std::out_of_range("detector mode out of range");
  const bool modesLeft = rho.modeCount() > 1;
  std::vector<DetectorOutcome> out;
  for (Outcome o : outcomesOf(model)) {
    const ModeProjection proj[] = {{mode, projectorFor(o)}};
    double p = 0.0;
    std::vector<MixedState::Component> conditioned;
    for (const auto& c : rho.components()) {
      const double pc = projectionProbability(c.state, proj);
      p += c.weight * pc;
      if (!modesLeft || pc <= 1e-16) continue;
      for (auto& part : diagonalize(projectAndTrace(c.state, proj))) {
        conditioned.push_back({c.weight * part.weight, std::move(part.state)});
      }
    }
    p = std::clamp(p, 0.0, 1.0);
    std::optional<MixedState> state;
    if (modesLeft && p > 0.0 && !conditioned.empty()) {
      state = MixedState::fromUnnormalized(rho.modeCount() - 1, std::move(conditioned)).compressed();
    }
    out.push_back({o, p, std::move(state)});
  }
  return out;
}

DetectorOutcome sampleDetect(const MixedState& rho, std::size_t mode, DetectorModel model,
                             RandomStream& stream) {
  auto outcomes = detect(rho, mode, model);
  double total = 0.0;
  for (const auto& o : outcomes) total += o.probability;
  const double u = stream.uniform() * total;
  double acc = 0.0;
  for (auto& o : outcomes) {
    if (o.probability <= 0.0) continue;
    acc += o.probability;
    if (u < acc) return std::move(o);
  }
  for (auto it = outcomes.rbegin(); it != outcomes.rend(); ++it) {
    if (it->probability > 0.0) return std::move(*it);
  }
  throw std::logic_error("detector has no possible outcome");
}

}  // namespace ecs::optics
