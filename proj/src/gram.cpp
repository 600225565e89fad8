#include "ecs/gram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ecs {

cplx projectorElement(Projector q, cplx gamma, cplx beta) {
  switch (q) {
    case Projector::Identity: return coherentOverlap(gamma, beta);
    case Projector::Vacuum: return std::exp(-0.5 * std::norm(gamma) - 0.5 * std::norm(beta));
    case Projector::Click:
      return coherentOverlap(gamma, beta) - projectorElement(Projector::Vacuum, gamma, beta);
    case Projector::Even:
      return 0.5 * (coherentOverlap(gamma, beta) + coherentOverlap(gamma, -beta));
    case Projector::Odd:
      return 0.5 * (coherentOverlap(gamma, beta) - coherentOverlap(gamma, -beta));
    case Projector::EvenClick:
      return projectorElement(Projector::Even, gamma, beta) -
             projectorElement(Projector::Vacuum, gamma, beta);
  }
  throw std::invalid_argument("unknown projector");
}

double OperatorForm::trace() const {
  if (labels.empty()) return coeffs.size() == 1 ? coeffs(0, 0).real() : 0.0;
  const auto s = gramMatrix(labels);
  // Tr Σ A_ij |i⟩⟨j| = Σ A_ij ⟨j|i⟩
  return (coeffs.array() * s.transpose().array()).sum().real();
}

Eigen::MatrixXcd gramMatrix(std::span<const CoherentLabel> labels) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXcd s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      s(i, j) = labelOverlap(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)]);
      s(j, i) = std::conj(s(i, j));
    }
  }
  return s;
}

Eigen::MatrixXcd orthonormalizer(const Eigen::MatrixXcd& gram, double threshold) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  const auto& d = es.eigenvalues();
  const auto& v = es.eigenvectors();
  const Eigen::Index n = d.size();
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < n; ++i) kept += d(i) > threshold ? 1 : 0;
  if (kept == n) {
    Eigen::VectorXd inv = d.array().rsqrt();
    return v * inv.asDiagonal() * v.adjoint();
  }
  Eigen::MatrixXcd x(n, kept);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d(i) > threshold) x.col(col++) = v.col(i) / std::sqrt(d(i));
  }
  return x;
}

OperatorForm outerProduct(const SuperposedState& s) {
  OperatorForm op;
  op.modeCount = s.modeCount();
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::VectorXcd c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    op.labels.push_back(s[static_cast<std::size_t>(i)].label);
    c(i) = s[static_cast<std::size_t>(i)].coefficient;
  }
  op.coeffs = c * c.adjoint();
  return op;
}

namespace {

std::vector<ModeProjection> sortedChecked(std::span<const ModeProjection> traced, std::size_t modes) {
  std::vector<ModeProjection> t(traced.begin(), traced.end());
  std::sort(t.begin(), t.end(), [](auto& a, auto& b) { return a.mode < b.mode; });
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].mode >= modes) throw std::out_of_range("traced mode index out of range");
    if (i > 0 && t[i].mode == t[i - 1].mode) throw std::invalid_argument("mode traced twice");
  }
  return t;
}

// ⟨β_j|Q|β_i⟩ over the traced modes
cplx tracedElement(const std::vector<ModeProjection>& t, const CoherentLabel& bra, const CoherentLabel& ket) {
  cplx v = 1.0;
  for (const auto& mp : t) {
    v *= projectorElement(mp.projector, bra[mp.mode], ket[mp.mode]);
    if (v == cplx{0.0, 0.0}) break;
  }
  return v;
}

}  // namespace

OperatorForm projectAndTrace(const SuperposedState& s, std::span<const ModeProjection> traced) {
  const auto t = sortedChecked(traced, s.modeCount());
  std::vector<std::size_t> tracedModes;
  for (const auto& mp : t) tracedModes.push_back(mp.mode);

  OperatorForm op;
  op.modeCount = s.modeCount() - t.size();
  const std::size_t n = s.size();

  if (op.modeCount == 0) {
    cplx p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        p += s[i].coefficient * std::conj(s[j].coefficient) * tracedElement(t, s[j].label, s[i].label);
      }
    }
    op.coeffs = Eigen::MatrixXcd::Constant(1, 1, p.real());
    return op;
  }

  // map each term to a unique reduced label
  std::vector<std::size_t> slot(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto reduced = s[i].label.without(tracedModes);
    auto it = std::find_if(op.labels.begin(), op.labels.end(),
                           [&](const CoherentLabel& l) { return l.approxEquals(reduced); });
    if (it == op.labels.end()) {
      slot[i] = op.labels.size();
      op.labels.push_back(std::move(reduced));
    } else {
      slot[i] = static_cast<std::size_t>(it - op.labels.begin());
    }
  }
  const auto m = static_cast<Eigen::Index>(op.labels.size());
  op.coeffs = Eigen::MatrixXcd::Zero(m, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const cplx e = tracedElement(t, s[j].label, s[i].label);
      if (e == cplx{0.0, 0.0}) continue;
      op.coeffs(static_cast<Eigen::Index>(slot[i]), static_cast<Eigen::Index>(slot[j])) +=
          s[i].coefficient * std::conj(s[j].coefficient) * e;
    }
  }
  return op;
}

double projectionProbability(const SuperposedState& s, std::span<const ModeProjection> traced) {
  // Q is a projector, so ‖Q ψ‖² = Σ_ij c_i c_j* ⟨β_j|Q|β_i⟩ ⟨rest_j|rest_i⟩
  auto t = sortedChecked(traced, s.modeCount());
  std::vector<bool> isTraced(s.modeCount(), false);
  for (const auto& mp : t) isTraced[mp.mode] = true;
  for (std::size_t m = 0; m < s.modeCount(); ++m) {
    if (!isTraced[m]) t.push_back({m, Projector::Identity});
  }
  cplx p = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      p += s[i].coefficient * std::conj(s[j].coefficient) * tracedElement(t, s[j].label, s[i].label);
    }
  }
  return p.real();
}

Eigen::MatrixXcd inBasis(const OperatorForm& op, const Eigen::MatrixXcd& basis) {
  const auto s = gramMatrix(op.labels);
  return basis.adjoint() * s * op.coeffs * s * basis;
}

OperatorForm pruneLabels(const OperatorForm& op, double relative) {
  if (op.labels.empty()) return op;
  const double scale = op.coeffs.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < op.coeffs.rows(); ++i) {
    const double r = std::max(op.coeffs.row(i).cwiseAbs().maxCoeff(), op.coeffs.col(i).cwiseAbs().maxCoeff());
    if (r > relative * scale) keep.push_back(i);
  }
  if (keep.size() == op.labels.size()) return op;
  OperatorForm out;
  out.modeCount = op.modeCount;
  const auto m = static_cast<Eigen::Index>(keep.size());
  out.coeffs.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.labels.push_back(op.labels[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])]);
    for (Eigen::Index j = 0; j < m; ++j) {
      out.coeffs(i, j) = op.coeffs(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

std::vector<MixedState::Component> diagonalize(const OperatorForm& input, double relativeCutoff) {
  if (input.modeCount == 0) throw std::invalid_argument("cannot diagonalize a scalar");
  const auto op = pruneLabels(input);
  std::vector<MixedState::Component> out;
  if (op.labels.empty()) return out;
  const auto s = gramMatrix(op.labels);
  const auto x = orthonormalizer(s);
  Eigen::MatrixXcd b = x.adjoint() * s * op.coeffs * s * x;
  b = 0.5 * (b + b.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b);
  const auto& lam = es.eigenvalues();
  const double tr = lam.sum();
  if (!(tr > 0.0)) return out;
  for (Eigen::Index k = lam.size() - 1; k >= 0; --k) {
    if (lam(k) <= relativeCutoff * tr) continue;
    const Eigen::VectorXcd c = x * es.eigenvectors().col(k);
    std::vector<Term> terms;
    for (std::size_t i = 0; i < op.labels.size(); ++i) {
      terms.push_back({c(static_cast<Eigen::Index>(i)), op.labels[i]});
    }
    SuperposedState st(op.modeCount, std::move(terms));
    if (st.squaredNorm() < kZeroNormSquared) continue;
    out.push_back({lam(k), canonicalPhase(normalize(st))});
  }
  return out;
}

OperatorForm sum(std::span<const OperatorForm> parts, std::span<const double> weights) {
  if (parts.empty()) throw std::invalid_argument("nothing to sum");
  OperatorForm op;
  op.modeCount = parts.front().modeCount;
  std::vector<std::vector<std::size_t>> slots;
  for (const auto& p : parts) {
    if (p.modeCount != op.modeCount) throw std::invalid_argument("operator mode-count mismatch");
    std::vector<std::size_t> sl;
    for (const auto& l : p.labels) {
      auto it = std::find_if(op.labels.begin(), op.labels.end(),
                             [&](const CoherentLabel& x) { return x.approxEquals(l); });
      if (it == op.labels.end()) {
        sl.push_back(op.labels.size());
        op.labels.push_back(l);
      } else {
        sl.push_back(static_cast<std::size_t>(it - op.labels.begin()));
      }
    }
    slots.push_back(std::move(sl));
  }
  const auto m = static_cast<Eigen::Index>(op.labels.size());
  op.coeffs = Eigen::MatrixXcd::Zero(m, m);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const double w = weights.empty() ? 1.0 : weights[k];
    const auto& sl = slots[k];
    for (std::size_t i = 0; i < sl.size(); ++i) {
      for (std::size_t j = 0; j < sl.size(); ++j) {
        op.coeffs(static_cast<Eigen::Index>(sl[i]), static_cast<Eigen::Index>(sl[j])) +=
            w * parts[k].coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return op;
}

OperatorForm toOperator(const MixedState& rho) {
  std::vector<OperatorForm> parts;
  std::vector<double> w;
  for (const auto& c : rho.components()) {
    parts.push_back(outerProduct(c.state));
    w.push_back(c.weight);
  }
  return sum(parts, w);
}

Eigen::VectorXd spectrum(const OperatorForm& op) {
  const auto s = gramMatrix(op.labels);
  const auto x = orthonormalizer(s);
  Eigen::MatrixXcd b = x.adjoint() * s * op.coeffs * s * x;
  b = 0.5 * (b + b.adjoint()).eval();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(b, Eigen::EigenvaluesOnly).eigenvalues();
}

double entropyBits(const Eigen::VectorXd& eigenvalues) {
  const double total = eigenvalues.sum();
  double e = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double p = eigenvalues(i) / total;
    if (p < 1e-14) continue;
    e -= p * std::log2(p);
  }
  return e;
}

}  // namespace ecs
