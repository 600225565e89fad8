#include "ecs/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ecs {

namespace {

void requireFinite(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw std::invalid_argument("coherent amplitude is not finite");
  }
}

double snap(double x) { return std::abs(x) < 10 * kDedupTolerance ? 0.0 : x; }

cplx snap(cplx z) { return {snap(z.real()), snap(z.imag())}; }

}  // namespace

// CoherentLabel

CoherentLabel::CoherentLabel(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.empty()) {
    throw std::invalid_argument("coherent label needs at least one mode");
  }
  for (auto& a : amps_) {
    requireFinite(a);
    a = snap(a);
  }
}

CoherentLabel::CoherentLabel(std::initializer_list<cplx> amplitudes)
    : CoherentLabel(std::vector<cplx>(amplitudes)) {}

double CoherentLabel::maxMagnitude() const {
  double m = 0.0;
  for (auto a : amps_) m = std::max(m, std::abs(a));
  return m;
}

bool CoherentLabel::approxEquals(const CoherentLabel& other, double tol) const {
  if (other.amps_.size() != amps_.size()) return false;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (std::abs(amps_[i].real() - other.amps_[i].real()) >= tol ||
        std::abs(amps_[i].imag() - other.amps_[i].imag()) >= tol) {
      return false;
    }
  }
  return true;
}

CoherentLabel CoherentLabel::withMode(std::size_t mode, cplx value) const {
  auto amps = amps_;
  amps.at(mode) = value;
  return CoherentLabel(std::move(amps));
}

CoherentLabel CoherentLabel::appended(std::span<const cplx> extra) const {
  auto amps = amps_;
  amps.insert(amps.end(), extra.begin(), extra.end());
  return CoherentLabel(std::move(amps));
}

CoherentLabel CoherentLabel::without(std::span<const std::size_t> sortedModes) const {
  std::vector<cplx> amps;
  amps.reserve(amps_.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (k < sortedModes.size() && sortedModes[k] == i) {
      ++k;
      continue;
    }
    amps.push_back(amps_[i]);
  }
  return CoherentLabel(std::move(amps));
}

// SuperposedState

SuperposedState::SuperposedState(std::size_t modeCount, std::vector<Term> terms)
    : modes_(modeCount) {
  if (modeCount == 0) throw std::invalid_argument("state needs at least one mode");
  terms_.reserve(terms.size());
  // magnitude of everything merged into each slot, to recognise cancellation
  std::vector<double> mass;
  for (auto& t : terms) {
    if (t.label.modeCount() != modeCount) {
      throw std::invalid_argument("label has " + std::to_string(t.label.modeCount()) +
                                  " modes, state has " + std::to_string(modeCount));
    }
    requireFinite(t.coefficient);
    if (t.coefficient == cplx{0.0, 0.0}) continue;
    auto it = std::find_if(terms_.begin(), terms_.end(), [&](const Term& existing) {
      return existing.label.approxEquals(t.label);
    });
    if (it == terms_.end()) {
      mass.push_back(std::abs(t.coefficient));
      terms_.push_back(std::move(t));
    } else {
      mass[static_cast<std::size_t>(it - terms_.begin())] += std::abs(t.coefficient);
      it->coefficient += t.coefficient;
    }
  }
  std::vector<Term> kept;
  kept.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (std::abs(terms_[i].coefficient) > 1e-14 * mass[i]) kept.push_back(std::move(terms_[i]));
  }
  terms_ = std::move(kept);
}

SuperposedState SuperposedState::zero(std::size_t modeCount) { return {modeCount, {}}; }

SuperposedState SuperposedState::vacuum(std::size_t modeCount) {
  return {modeCount, {Term{1.0, CoherentLabel(std::vector<cplx>(modeCount, 0.0))}}};
}

SuperposedState SuperposedState::coherent(std::vector<cplx> amplitudes) {
  const auto n = amplitudes.size();
  return {n, {Term{1.0, CoherentLabel(std::move(amplitudes))}}};
}

double SuperposedState::squaredNorm() const { return innerProduct(*this, *this).real(); }

double SuperposedState::maxMagnitude() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, t.label.maxMagnitude());
  return m;
}

SuperposedState SuperposedState::scaled(cplx factor) const {
  auto terms = terms_;
  for (auto& t : terms) t.coefficient *= factor;
  return {modes_, std::move(terms)};
}

SuperposedState SuperposedState::operator+(const SuperposedState& other) const {
  if (other.modes_ != modes_) throw std::invalid_argument("mode-count mismatch in sum");
  auto terms = terms_;
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  return {modes_, std::move(terms)};
}

SuperposedState SuperposedState::operator-(const SuperposedState& other) const {
  return *this + other.scaled(-1.0);
}

// free functions

cplx coherentOverlap(cplx alpha, cplx beta) {
  return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(alpha) * beta);
}

cplx labelOverlap(const CoherentLabel& a, const CoherentLabel& b) {
  cplx exponent = 0.0;
  for (std::size_t m = 0; m < a.modeCount(); ++m) {
    exponent += -0.5 * std::norm(a[m]) - 0.5 * std::norm(b[m]) + std::conj(a[m]) * b[m];
  }
  return std::exp(exponent);
}

cplx innerProduct(const SuperposedState& a, const SuperposedState& b) {
  if (a.modeCount() != b.modeCount()) {
    throw std::invalid_argument("inner product of states with different mode counts");
  }
  cplx sum = 0.0;
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      sum += std::conj(ta.coefficient) * tb.coefficient * labelOverlap(ta.label, tb.label);
    }
  }
  return sum;
}

SuperposedState normalize(const SuperposedState& s) {
  const double n2 = s.squaredNorm();
  if (!(n2 >= kZeroNormSquared)) throw std::domain_error("cannot normalize the zero state");
  return s.scaled(1.0 / std::sqrt(n2));
}

SuperposedState canonicalPhase(const SuperposedState& s) {
  if (s.isZero()) return s;
  const double phase = std::arg(s[0].coefficient);  // (-π, π]
  double target = phase;
  if (target < 0.0) target += std::numbers::pi;
  if (target >= std::numbers::pi) target -= std::numbers::pi;
  return s.scaled(std::polar(1.0, target - phase));
}

SuperposedState tensor(const SuperposedState& a, const SuperposedState& b) {
  std::vector<Term> terms;
  terms.reserve(a.size() * b.size());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      terms.push_back({ta.coefficient * tb.coefficient, ta.label.appended(tb.label.amplitudes())});
    }
  }
  return {a.modeCount() + b.modeCount(), std::move(terms)};
}

SuperposedState flipMode(const SuperposedState& s, std::size_t mode) {
  if (mode >= s.modeCount()) throw std::out_of_range("mode index out of range");
  std::vector<Term> terms;
  terms.reserve(s.size());
  for (const auto& t : s.terms()) terms.push_back({t.coefficient, t.label.withMode(mode, -t.label[mode])});
  return {s.modeCount(), std::move(terms)};
}

double rayOverlap(const SuperposedState& a, const SuperposedState& b) {
  return std::norm(innerProduct(a, b)) / (a.squaredNorm() * b.squaredNorm());
}

SuperposedState makeEntangledCoherent(cplx alpha, double phi, EcsKind kind) {
  const cplx sign = kind == EcsKind::Phi ? alpha : -alpha;
  SuperposedState raw(2, {Term{1.0, CoherentLabel{alpha, sign}},
                          Term{std::polar(1.0, phi), CoherentLabel{-alpha, -sign}}});
  return canonicalPhase(normalize(raw));
}

SuperposedState makeQuasiBell(cplx alpha, QuasiBell which) {
  switch (which) {
    case QuasiBell::PhiPlus: return makeEntangledCoherent(alpha, 0.0, EcsKind::Phi);
    case QuasiBell::PhiMinus: return makeEntangledCoherent(alpha, std::numbers::pi, EcsKind::Phi);
    case QuasiBell::PsiPlus: return makeEntangledCoherent(alpha, 0.0, EcsKind::Psi);
    case QuasiBell::PsiMinus: return makeEntangledCoherent(alpha, std::numbers::pi, EcsKind::Psi);
  }
  throw std::invalid_argument("unknown quasi-Bell state");
}

SuperposedState makeCat(cplx beta, int sign) {
  SuperposedState raw(1, {Term{1.0, CoherentLabel{beta}},
                          Term{sign >= 0 ? 1.0 : -1.0, CoherentLabel{-beta}}});
  return canonicalPhase(normalize(raw));
}

// MixedState

MixedState::MixedState(std::size_t modeCount, std::vector<Component> components)
    : modes_(modeCount), components_(std::move(components)) {
  if (modeCount == 0) throw std::invalid_argument("mixed state needs at least one mode");
  if (components_.empty()) throw std::invalid_argument("mixed state needs a component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.state.modeCount() != modeCount) {
      throw std::invalid_argument("mixture component has the wrong mode count");
    }
    if (!(c.weight > 0.0 && c.weight <= 1.0 + 1e-12)) {
      throw std::invalid_argument("mixture weight outside (0, 1]");
    }
    if (std::abs(c.state.squaredNorm() - 1.0) > 1e-9) {
      throw std::invalid_argument("mixture component is not normalized");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture weights do not sum to 1");
}

MixedState MixedState::fromUnnormalized(std::size_t modeCount, std::vector<Component> components) {
  std::vector<Component> kept;
  double total = 0.0;
  for (auto& c : components) {
    const double n2 = c.state.squaredNorm();
    const double w = c.weight * n2;
    if (!(w > 0.0) || n2 < kZeroNormSquared) continue;
    kept.push_back({w, canonicalPhase(c.state.scaled(1.0 / std::sqrt(n2)))});
    total += w;
  }
  if (kept.empty() || !(total > 0.0)) throw std::domain_error("mixture has zero trace");
  double maxW = 0.0;
  for (auto& c : kept) maxW = std::max(maxW, c.weight);
  std::vector<Component> out;
  for (auto& c : kept) {
    if (c.weight < 1e-15 * maxW) continue;
    out.push_back(std::move(c));
  }
  double sum = 0.0;
  for (const auto& c : out) sum += c.weight;
  for (auto& c : out) c.weight /= sum;
  return {modeCount, std::move(out)};
}

MixedState MixedState::pure(const SuperposedState& s) {
  return {s.modeCount(), {Component{1.0, normalize(s)}}};
}

MixedState MixedState::compressed() const {
  std::vector<Component> out;
  for (const auto& c : components_) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Component& o) {
      return std::norm(innerProduct(o.state, c.state)) > 1.0 - 1e-12;
    });
    if (it == out.end()) {
      out.push_back(c);
    } else {
      it->weight += c.weight;
    }
  }
  return {modes_, std::move(out)};
}

double MixedState::maxMagnitude() const {
  double m = 0.0;
  for (const auto& c : components_) m = std::max(m, c.state.maxMagnitude());
  return m;
}

MixedState tensor(const MixedState& a, const MixedState& b) {
  std::vector<MixedState::Component> out;
  out.reserve(a.size() * b.size());
  for (const auto& ca : a.components()) {
    for (const auto& cb : b.components()) {
      out.push_back({ca.weight * cb.weight, tensor(ca.state, cb.state)});
    }
  }
  return MixedState::fromUnnormalized(a.modeCount() + b.modeCount(), std::move(out));
}

double fidelity(const MixedState& rho, const SuperposedState& target) {
  if (rho.modeCount() != target.modeCount()) {
    throw std::invalid_argument("fidelity of states with different mode counts");
  }
  double f = 0.0;
  for (const auto& c : rho.components()) f += c.weight * std::norm(innerProduct(target, c.state));
  return f;
}

cplx matrixElement(const MixedState& rho, const SuperposedState& x, const SuperposedState& y) {
  cplx sum = 0.0;
  for (const auto& c : rho.components()) {
    sum += c.weight * innerProduct(x, c.state) * innerProduct(c.state, y);
  }
  return sum;
}

}  // namespace ecs
