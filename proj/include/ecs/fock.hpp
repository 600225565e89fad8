#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "ecs/states.hpp"

// Truncated number-basis engine.  Used only to cross-check the coherent-state
// algebra; nothing in the protocol code depends on it.
namespace ecs::fock {

inline constexpr std::size_t kMaxModes = 4;

/// Cutoff N = ceil(|α|² + 6|α| + 10) for the largest amplitude a computation reaches.
int cutoffFor(double maxAmplitude);

/// Row-major amplitude array over N^modeCount occupations (mode 0 slowest).
struct FockVector {
  int cutoff = 0;
  std::size_t modeCount = 0;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
  /// 1 − ‖v‖², the weight lost to truncation.
  double leakage() const { return 1.0 - amplitudes.squaredNorm(); }
};

struct FockDensity {
  int cutoff = 0;
  std::size_t modeCount = 0;
  Eigen::MatrixXcd matrix;
};

/// e^{−|α|²/2} αⁿ/√n! for n < cutoff.  Warns on stderr when the cutoff is
/// below the rule for this amplitude.
FockVector coherentFock(cplx alpha, int cutoff);

FockVector tensor(const FockVector& a, const FockVector& b);

/// Number-basis image of a coherent superposition.
FockVector fromSuperposed(const SuperposedState& s, int cutoff);

FockDensity densityOf(const FockVector& v);
FockDensity densityOf(const MixedState& rho, int cutoff);

cplx inner(const FockVector& a, const FockVector& b);

/// 50-50 beam splitter with creation operators a_i† → (a_i† + a_j†)/√2,
/// a_j† → (a_i† − a_j†)/√2, i.e. coherent labels (β_i, β_j) →
/// ((β_i+β_j)/√2, (β_i−β_j)/√2).  `sign` = −1 exchanges the two outputs.
FockVector beamSplitterFock(const FockVector& v, std::size_t modeI, std::size_t modeJ, int sign = +1);

/// Default step count max(1000, ceil(1e4 γτ)).
int defaultLindbladSteps(double gammaTau);

/// RK4 integration of ∂ρ/∂τ = γ Σ a_i ρ a_i† − (γ/2) Σ {a_i† a_i, ρ} with γ = 1
/// up to τ = gammaTau.  steps ≤ 0 selects the default.
FockDensity lindbladEvolve(const FockDensity& rho, double gammaTau, int steps = 0);

/// Reduced density matrix on `keep` (sorted mode indices).
Eigen::MatrixXcd reducedDensity(const FockVector& v, std::span<const std::size_t> keep);

/// Base-2 entropy of the reduced state on `partition`.
double entropyFock(const FockVector& v, std::span<const std::size_t> partition);

struct ParityProbabilities {
  double even;
  double odd;
};
ParityProbabilities parityProbabilitiesFock(const FockVector& v, std::size_t mode);

/// Σ |amplitude|² over occupation tuples accepted by the predicate.
double occupationProbability(const FockVector& v,
                             const std::function<bool(std::span<const int>)>& accept);

/// ½ Σ|λ_k| of (a − b).
double traceDistance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

Eigen::VectorXd densityEigenvalues(const Eigen::MatrixXcd& rho);

}  // namespace ecs::fock
