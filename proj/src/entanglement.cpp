#include "ecs/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "ecs/gram.hpp"
#include "ecs/optics.hpp"

namespace ecs {

LogicalBasis::LogicalBasis(cplx a) : alpha(a) {
  if (std::abs(a) < kDedupTolerance) throw std::invalid_argument("logical basis needs a nonzero amplitude");
  const double x = std::exp(-2.0 * std::norm(a));
  const double mp = 1.0 / std::sqrt(2.0 * (1.0 + x));
  const double mm = 1.0 / std::sqrt(2.0 * (1.0 - x));
  uCoeffs << mp, mp;
  vCoeffs << mm, -mm;
}

Eigen::Vector2cd LogicalBasis::components(int sign) const {
  const double x = std::exp(-2.0 * std::norm(alpha));
  Eigen::Vector2cd c;
  c << mPlus() * (1.0 + x), (sign > 0 ? 1.0 : -1.0) * mMinus() * (1.0 - x);
  return c;
}

Eigen::Matrix2cd LogicalBasis::lowdin() const {
  Eigen::Matrix2cd e;
  e.col(0) = (uCoeffs + vCoeffs) / std::numbers::sqrt2;
  e.col(1) = (uCoeffs - vCoeffs) / std::numbers::sqrt2;
  return e;
}

Eigen::VectorXd QubitDensity::eigenvalues() const {
  Eigen::MatrixXcd h = 0.5 * (matrix + matrix.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

namespace {

// Per kept mode: the amplitude a if all labels are ±a with a ≠ 0.
std::optional<std::vector<cplx>> qubitAmplitudes(const std::vector<CoherentLabel>& labels, std::size_t modes) {
  std::vector<cplx> amps(modes, 0.0);
  for (std::size_t m = 0; m < modes; ++m) {
    for (const auto& l : labels) {
      if (std::abs(l[m]) > kDedupTolerance) {
        amps[m] = l[m];
        break;
      }
    }
    if (std::abs(amps[m]) <= kDedupTolerance) return std::nullopt;
    for (const auto& l : labels) {
      if (std::abs(l[m] - amps[m]) >= kDedupTolerance && std::abs(l[m] + amps[m]) >= kDedupTolerance) {
        return std::nullopt;
      }
    }
  }
  return amps;
}

}  // namespace

QubitDensity reducedDensity(const SuperposedState& s, std::span<const std::size_t> keep) {
  if (keep.empty() || keep.size() >= s.modeCount()) {
    throw std::invalid_argument("reduced density needs a nonempty proper mode subset");
  }
  std::vector<bool> kept(s.modeCount(), false);
  for (auto m : keep) {
    if (m >= s.modeCount()) throw std::out_of_range("kept mode out of range");
    if (kept[m]) throw std::invalid_argument("mode kept twice");
    kept[m] = true;
  }
  std::vector<ModeProjection> traced;
  for (std::size_t m = 0; m < s.modeCount(); ++m) {
    if (!kept[m]) traced.push_back({m, Projector::Identity});
  }
  const auto op = projectAndTrace(normalize(s), traced);

  QubitDensity out;
  if (auto amps = qubitAmplitudes(op.labels, op.modeCount)) {
    std::vector<LogicalBasis> bases;
    for (auto a : *amps) bases.emplace_back(a);
    const Eigen::Index dim = Eigen::Index{1} << op.modeCount;
    Eigen::MatrixXcd w(dim, static_cast<Eigen::Index>(op.labels.size()));
    for (std::size_t i = 0; i < op.labels.size(); ++i) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
      for (std::size_t m = 0; m < op.modeCount; ++m) {
        const int sign = std::abs(op.labels[i][m] - (*amps)[m]) < kDedupTolerance ? 1 : -1;
        const Eigen::Vector2cd c = bases[m].components(sign);
        Eigen::VectorXcd next(v.size() * 2);
        for (Eigen::Index k = 0; k < v.size(); ++k) {
          next(2 * k) = v(k) * c(0);
          next(2 * k + 1) = v(k) * c(1);
        }
        v = std::move(next);
      }
      w.col(static_cast<Eigen::Index>(i)) = v;
    }
    out.matrix = w * op.coeffs * w.adjoint();
    out.logical = true;
    return out;
  }
  const auto x = orthonormalizer(gramMatrix(op.labels));
  out.matrix = inBasis(op, x);
  return out;
}

double entropyOfEntanglement(const SuperposedState& s) {
  if (s.modeCount() != 2) throw std::invalid_argument("entropy of entanglement needs a two-mode state");
  const std::size_t keep[] = {0};
  const auto lam = reducedDensity(s, keep).eigenvalues();
  return entropyBits(lam.cwiseMax(0.0));
}

double entropyClosedForm(double alpha, double phi) {
  const double x = std::exp(-2.0 * alpha * alpha);
  const double n2 = 1.0 / (2.0 * (1.0 + std::cos(phi) * x * x));
  const double det = n2 * n2 * (1.0 - x * x) * (1.0 - x * x);
  const double l1 = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - 4.0 * det)));
  const double l2 = det / l1;
  double e = 0.0;
  for (double l : {l1, l2}) {
    if (l > 1e-14) e -= l * std::log(l);
  }
  return e / std::numbers::ln2;
}

const char* toString(BellOutcome o) {
  switch (o) {
    case BellOutcome::PhiPlus: return "PhiPlus";
    case BellOutcome::PhiMinus: return "PhiMinus";
    case BellOutcome::PsiPlus: return "PsiPlus";
    case BellOutcome::PsiMinus: return "PsiMinus";
    case BellOutcome::Fail: return "Fail";
  }
  return "?";
}

namespace {

BellOutcome classify(Projector f, Projector g) {
  const bool fOn = f != Projector::Vacuum;
  const bool gOn = g != Projector::Vacuum;
  if (fOn == gOn) return BellOutcome::Fail;
  if (fOn) return f == Projector::Odd ? BellOutcome::PhiMinus : BellOutcome::PhiPlus;
  return g == Projector::Odd ? BellOutcome::PsiMinus : BellOutcome::PsiPlus;
}

}  // namespace

std::vector<BellResult> quasiBellDistribution(const MixedState& rho) {
  if (rho.modeCount() != 2) throw std::invalid_argument("quasi-Bell measurement needs two modes");
  std::array<double, 5> p{};
  constexpr Projector outcomes[] = {Projector::Vacuum, Projector::EvenClick, Projector::Odd};
  for (const auto& c : rho.components()) {
    const auto out = optics::beamSplitter(c.state, 0, 1);
    for (auto f : outcomes) {
      for (auto g : outcomes) {
        const ModeProjection proj[] = {{0, f}, {1, g}};
        p[static_cast<std::size_t>(classify(f, g))] += c.weight * projectionProbability(out, proj);
      }
    }
  }
  std::vector<BellResult> r;
  for (std::size_t k = 0; k < p.size(); ++k) {
    r.push_back({static_cast<BellOutcome>(k), std::clamp(p[k], 0.0, 1.0)});
  }
  return r;
}

std::vector<BellResult> quasiBellDistribution(const SuperposedState& s) {
  return quasiBellDistribution(MixedState::pure(normalize(s)));
}

BellResult quasiBellMeasure(const MixedState& rho, RandomStream& stream) {
  const auto dist = quasiBellDistribution(rho);
  double total = 0.0;
  for (const auto& r : dist) total += r.probability;
  const double u = stream.uniform() * total;
  double acc = 0.0;
  for (const auto& r : dist) {
    acc += r.probability;
    if (r.probability > 0.0 && u < acc) return r;
  }
  for (auto it = dist.rbegin(); it != dist.rend(); ++it) {
    if (it->probability > 0.0) return *it;
  }
  throw std::logic_error("empty quasi-Bell distribution");
}

namespace {

int labelSign(cplx value, cplx alpha) {
  if (std::abs(value - alpha) < kDedupTolerance) return 0;
  if (std::abs(value + alpha) < kDedupTolerance) return 1;
  throw std::invalid_argument("label outside the two-mode qubit space");
}

}  // namespace

Eigen::Vector4cd logicalVector(const SuperposedState& s, cplx alpha) {
  if (s.modeCount() != 2) throw std::invalid_argument("logical vector needs two modes");
  // e_k = Σ_l X_lk |l⟩ with X = S^{-1/2}; components are X^{-1} c = S^{1/2} c per mode
  const LogicalBasis basis(alpha);
  const Eigen::Matrix2cd x = basis.lowdin();
  const Eigen::Matrix2cd xinv = x.inverse();
  Eigen::Vector4cd c = Eigen::Vector4cd::Zero();
  for (const auto& t : s.terms()) {
    const int i = labelSign(t.label[0], alpha);
    const int j = labelSign(t.label[1], alpha);
    c(2 * i + j) += t.coefficient;
  }
  Eigen::Matrix4cd k;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k(2 * a + b, 2 * i + j) = xinv(a, i) * xinv(b, j);
  return k * c;
}

Eigen::Matrix4cd toLogical(const MixedState& rho, cplx alpha) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  for (const auto& c : rho.components()) {
    const Eigen::Vector4cd v = logicalVector(c.state, alpha);
    m += c.weight * v * v.adjoint();
  }
  return m;
}

MixedState fromLogical(const Eigen::Matrix4cd& rho, cplx alpha) {
  const Eigen::Matrix2cd x = LogicalBasis(alpha).lowdin();
  Eigen::Matrix4cd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
  const cplx labels[] = {alpha, -alpha};
  std::vector<MixedState::Component> comps;
  const double tr = h.trace().real();
  for (int k = 3; k >= 0; --k) {
    const double w = es.eigenvalues()(k);
    if (w <= 1e-14 * tr) continue;
    const Eigen::Vector4cd v = es.eigenvectors().col(k);
    std::vector<Term> terms;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        cplx coeff = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) coeff += v(2 * a + b) * x(i, a) * x(j, b);
        terms.push_back({coeff, CoherentLabel{labels[i], labels[j]}});
      }
    }
    comps.push_back({w, canonicalPhase(normalize(SuperposedState(2, std::move(terms))))});
  }
  return MixedState::fromUnnormalized(2, std::move(comps));
}

}  // namespace ecs
