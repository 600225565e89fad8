#include "ecs/fock.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace ecs::fock {

namespace {

Eigen::Index dimension(int cutoff, std::size_t modes) {
  Eigen::Index d = 1;
  for (std::size_t m = 0; m < modes; ++m) d *= cutoff;
  return d;
}

void checkModes(std::size_t modes) {
  if (modes == 0 || modes > kMaxModes) {
    throw std::invalid_argument("fock oracle supports 1 to 4 modes");
  }
}

// occupation of `mode` for flat index `idx`
int occupation(Eigen::Index idx, int cutoff, std::size_t modes, std::size_t mode) {
  for (std::size_t m = modes; m-- > mode + 1;) idx /= cutoff;
  return static_cast<int>(idx % cutoff);
}

Eigen::Index stride(int cutoff, std::size_t modes, std::size_t mode) {
  Eigen::Index s = 1;
  for (std::size_t m = mode + 1; m < modes; ++m) s *= cutoff;
  return s;
}

}  // namespace

int cutoffFor(double maxAmplitude) {
  const double a = std::abs(maxAmplitude);
  return static_cast<int>(std::ceil(a * a + 6.0 * a + 10.0));
}

FockVector coherentFock(cplx alpha, int cutoff) {
  if (cutoff < 2) throw std::invalid_argument("cutoff must be at least 2");
  if (cutoff < cutoffFor(std::abs(alpha))) {
    std::cerr << "warning: cutoff " << cutoff << " is below the rule value "
              << cutoffFor(std::abs(alpha)) << " for |alpha| = " << std::abs(alpha) << "\n";
  }
  FockVector v{cutoff, 1, Eigen::VectorXcd(cutoff)};
  v.amplitudes(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < cutoff; ++n) v.amplitudes(n) = v.amplitudes(n - 1) * alpha / std::sqrt(double(n));
  return v;
}

FockVector tensor(const FockVector& a, const FockVector& b) {
  if (a.cutoff != b.cutoff) throw std::invalid_argument("cutoff mismatch");
  checkModes(a.modeCount + b.modeCount);
  FockVector out{a.cutoff, a.modeCount + b.modeCount,
                 Eigen::VectorXcd(a.amplitudes.size() * b.amplitudes.size())};
  for (Eigen::Index i = 0; i < a.amplitudes.size(); ++i) {
    out.amplitudes.segment(i * b.amplitudes.size(), b.amplitudes.size()) = a.amplitudes(i) * b.amplitudes;
  }
  return out;
}

FockVector fromSuperposed(const SuperposedState& s, int cutoff) {
  checkModes(s.modeCount());
  FockVector out{cutoff, s.modeCount(), Eigen::VectorXcd::Zero(dimension(cutoff, s.modeCount()))};
  for (const auto& t : s.terms()) {
    FockVector v = coherentFock(t.label[0], cutoff);
    for (std::size_t m = 1; m < s.modeCount(); ++m) v = tensor(v, coherentFock(t.label[m], cutoff));
    out.amplitudes += t.coefficient * v.amplitudes;
  }
  return out;
}

FockDensity densityOf(const FockVector& v) {
  return {v.cutoff, v.modeCount, v.amplitudes * v.amplitudes.adjoint()};
}

FockDensity densityOf(const MixedState& rho, int cutoff) {
  const auto d = dimension(cutoff, rho.modeCount());
  FockDensity out{cutoff, rho.modeCount(), Eigen::MatrixXcd::Zero(d, d)};
  for (const auto& c : rho.components()) {
    const auto v = fromSuperposed(c.state, cutoff);
    out.matrix += c.weight * v.amplitudes * v.amplitudes.adjoint();
  }
  return out;
}

cplx inner(const FockVector& a, const FockVector& b) {
  if (a.amplitudes.size() != b.amplitudes.size()) throw std::invalid_argument("dimension mismatch");
  return a.amplitudes.dot(b.amplitudes);
}

FockVector beamSplitterFock(const FockVector& v, std::size_t modeI, std::size_t modeJ, int sign) {
  if (modeI == modeJ || modeI >= v.modeCount || modeJ >= v.modeCount) {
    throw std::invalid_argument("beam splitter needs two distinct valid modes");
  }
  if (sign < 0) std::swap(modeI, modeJ);  // exchanging the outputs
  const int n = v.cutoff;
  // table[(ni*n + nj)*n + p]: amplitude of |p, ni+nj-p⟩ in U|ni, nj⟩.
  // U|ni,nj⟩ = (a_i†+a_j†)^ni (a_i†−a_j†)^nj |0⟩ / (2^{(ni+nj)/2} √(ni! nj!))
  thread_local int cachedCutoff = 0;
  thread_local std::vector<long double> table;
  if (cachedCutoff != n) {
    table.assign(static_cast<std::size_t>(n) * n * n, 0.0L);
    std::vector<long double> lfact(static_cast<std::size_t>(2 * n + 1), 0.0L);
    for (int k = 1; k <= 2 * n; ++k) lfact[k] = lfact[k - 1] + std::log(static_cast<long double>(k));
    auto lbinom = [&](int a, int b) { return lfact[a] - lfact[b] - lfact[a - b]; };
    for (int ni = 0; ni < n; ++ni) {
      for (int nj = 0; nj < n; ++nj) {
        const int total = ni + nj;
        for (int k = 0; k <= ni; ++k) {
          for (int l = 0; l <= nj; ++l) {
            const int p = k + l;
            const int q = total - p;
            if (p >= n || q >= n) continue;
            const long double logMag = lbinom(ni, k) + lbinom(nj, l) +
                                       0.5L * (lfact[p] + lfact[q] - lfact[ni] - lfact[nj]) -
                                       0.5L * total * std::log(2.0L);
            const long double sgn = ((nj - l) % 2 == 0) ? 1.0L : -1.0L;
            table[(static_cast<std::size_t>(ni) * n + nj) * n + p] += sgn * std::exp(logMag);
          }
        }
      }
    }
    cachedCutoff = n;
  }
  // when modeI > modeJ in index order the pair (ni, nj) maps to strides accordingly
  const Eigen::Index si = stride(n, v.modeCount, modeI);
  const Eigen::Index sj = stride(n, v.modeCount, modeJ);
  FockVector out{n, v.modeCount, Eigen::VectorXcd::Zero(v.amplitudes.size())};
  for (Eigen::Index base = 0; base < v.amplitudes.size(); ++base) {
    if (occupation(base, n, v.modeCount, modeI) != 0 || occupation(base, n, v.modeCount, modeJ) != 0) continue;
    for (int ni = 0; ni < n; ++ni) {
      for (int nj = 0; nj < n; ++nj) {
        const cplx a = v.amplitudes(base + ni * si + nj * sj);
        if (a == cplx{0.0, 0.0}) continue;
        const long double* row = &table[(static_cast<std::size_t>(ni) * n + nj) * n];
        for (int p = 0; p < n; ++p) {
          const int q = ni + nj - p;
          if (q < 0 || q >= n) continue;
          out.amplitudes(base + p * si + q * sj) += a * static_cast<double>(row[p]);
        }
      }
    }
  }
  return out;
}

int defaultLindbladSteps(double gammaTau) {
  return std::max(1000, static_cast<int>(std::ceil(1e4 * gammaTau)));
}

namespace {

// One RK4 step of ẋ = Gx is x ← P(hG)x with P(z) = 1 + z + z²/2 + z³/6 + z⁴/24.
Eigen::MatrixXd rk4Propagator(const Eigen::MatrixXd& g, double h, int steps) {
  const Eigen::MatrixXd z = h * g;
  const Eigen::MatrixXd z2 = z * z;
  const Eigen::MatrixXd z3 = z2 * z;
  Eigen::MatrixXd base = Eigen::MatrixXd::Identity(g.rows(), g.cols()) + z + z2 / 2.0 + z3 / 6.0 + z3 * z / 24.0;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(g.rows(), g.cols());
  for (int e = steps; e > 0; e >>= 1) {
    if (e & 1) acc = acc * base;
    if (e > 1) base = base * base;
  }
  return acc;
}

}  // namespace

FockDensity lindbladEvolve(const FockDensity& rho, double gammaTau, int steps) {
  if (gammaTau < 0.0) throw std::invalid_argument("negative decoherence time");
  if (gammaTau == 0.0) return rho;
  if (steps <= 0) steps = defaultLindbladSteps(gammaTau);
  const int n = rho.cutoff;
  const std::size_t modes = rho.modeCount;
  const Eigen::Index dim = rho.matrix.rows();
  const double h = gammaTau / steps;

  // The per-mode dissipators commute.  On one mode, entry (j+d, j) obeys
  //   ẋ_j = −(j + d/2) x_j + √((j+d+1)(j+1)) x_{j+1},
  // so each band d (and its mirror −d) evolves with its own L×L generator.
  std::vector<Eigen::MatrixXd> band(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    const int len = n - d;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(len, len);
    for (int j = 0; j < len; ++j) {
      g(j, j) = -(j + 0.5 * d);
      if (j + 1 < len) g(j, j + 1) = std::sqrt(double(j + d + 1) * double(j + 1));
    }
    band[static_cast<std::size_t>(d)] = rk4Propagator(g, h, steps);
  }

  Eigen::MatrixXcd y = rho.matrix;
  std::vector<Eigen::Index> bases;
  Eigen::MatrixXcd slice(n, n);
  for (std::size_t m = 0; m < modes; ++m) {
    const Eigen::Index s = stride(n, modes, m);
    bases.clear();
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
      if (occupation(idx, n, modes, m) == 0) bases.push_back(idx);
    }
    for (auto br : bases) {
      for (auto bc : bases) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) slice(i, j) = y(br + i * s, bc + j * s);
        for (int d = 0; d < n; ++d) {
          const auto& k = band[static_cast<std::size_t>(d)];
          const int len = n - d;
          Eigen::VectorXcd lower(len), upper(len);
          for (int j = 0; j < len; ++j) {
            lower(j) = slice(j + d, j);
            upper(j) = slice(j, j + d);
          }
          lower = k * lower;
          upper = k * upper;
          for (int j = 0; j < len; ++j) {
            y(br + (j + d) * s, bc + j * s) = lower(j);
            y(br + j * s, bc + (j + d) * s) = upper(j);
          }
        }
      }
    }
  }
  return {n, modes, y};
}

Eigen::MatrixXcd reducedDensity(const FockVector& v, std::span<const std::size_t> keep) {
  const int n = v.cutoff;
  std::vector<bool> kept(v.modeCount, false);
  for (auto m : keep) {
    if (m >= v.modeCount) throw std::out_of_range("mode index out of range");
    kept[m] = true;
  }
  const Eigen::Index dk = dimension(n, keep.size());
  const Eigen::Index dt = dimension(n, v.modeCount - keep.size());
  // reshape into (kept x traced) then ρ = M Mᴴ
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dk, dt);
  for (Eigen::Index idx = 0; idx < v.amplitudes.size(); ++idx) {
    Eigen::Index ik = 0, it = 0;
    for (std::size_t m = 0; m < v.modeCount; ++m) {
      const int k = occupation(idx, n, v.modeCount, m);
      if (kept[m]) {
        ik = ik * n + k;
      } else {
        it = it * n + k;
      }
    }
    mat(ik, it) = v.amplitudes(idx);
  }
  return mat * mat.adjoint();
}

double entropyFock(const FockVector& v, std::span<const std::size_t> partition) {
  if (partition.empty() || partition.size() >= v.modeCount) {
    throw std::invalid_argument("partition must be a nonempty proper subset of modes");
  }
  const auto rho = reducedDensity(v, partition);
  const auto lam = densityEigenvalues(rho);
  const double total = lam.sum();
  double e = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    const double p = lam(i) / total;
    if (p < 1e-14) continue;
    e -= p * std::log2(p);
  }
  return e;
}

ParityProbabilities parityProbabilitiesFock(const FockVector& v, std::size_t mode) {
  if (mode >= v.modeCount) throw std::out_of_range("mode index out of range");
  ParityProbabilities p{0.0, 0.0};
  for (Eigen::Index idx = 0; idx < v.amplitudes.size(); ++idx) {
    const double w = std::norm(v.amplitudes(idx));
    if (occupation(idx, v.cutoff, v.modeCount, mode) % 2 == 0) {
      p.even += w;
    } else {
      p.odd += w;
    }
  }
  return p;
}

double occupationProbability(const FockVector& v,
                             const std::function<bool(std::span<const int>)>& accept) {
  std::vector<int> occ(v.modeCount);
  double p = 0.0;
  for (Eigen::Index idx = 0; idx < v.amplitudes.size(); ++idx) {
    for (std::size_t m = 0; m < v.modeCount; ++m) occ[m] = occupation(idx, v.cutoff, v.modeCount, m);
    if (accept(occ)) p += std::norm(v.amplitudes(idx));
  }
  return p;
}

Eigen::VectorXd densityEigenvalues(const Eigen::MatrixXcd& rho) {
  const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

double traceDistance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return 0.5 * densityEigenvalues(a - b).cwiseAbs().sum();
}

}  // namespace ecs::fock
