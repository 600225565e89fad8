#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "ecs/random.hpp"
#include "ecs/states.hpp"

namespace ecs {

/// Orthonormal basis of span{|a⟩, |−a⟩}:
///   |u⟩ = M₊(|a⟩ + |−a⟩),  |v⟩ = M₋(|a⟩ − |−a⟩),  M± = {2(1 ± e^{−2|a|²})}^{−1/2}.
/// Coefficient pairs are over (|a⟩, |−a⟩).
struct LogicalBasis {
  cplx alpha;
  Eigen::Vector2cd uCoeffs;
  Eigen::Vector2cd vCoeffs;

  explicit LogicalBasis(cplx a);

  double mPlus() const { return uCoeffs(0).real(); }
  double mMinus() const { return vCoeffs(0).real(); }

  /// (⟨u|l⟩, ⟨v|l⟩) for l = +a (sign > 0) or −a.
  Eigen::Vector2cd components(int sign) const;

  /// Löwdin-orthonormalized pair e0 = (u+v)/√2 ≈ |a⟩, e1 = (u−v)/√2 ≈ |−a⟩ as
  /// columns of coefficients over (|a⟩, |−a⟩).
  Eigen::Matrix2cd lowdin() const;
};

/// Reduced density matrix.  When every kept mode carries only ±a labels the
/// matrix is in the (u,v)^{⊗k} basis (mode order as kept, u before v);
/// otherwise it is in the Löwdin-orthonormalized basis of the kept labels.
struct QubitDensity {
  Eigen::MatrixXcd matrix;
  bool logical = false;

  double trace() const { return matrix.trace().real(); }
  Eigen::VectorXd eigenvalues() const;
};

QubitDensity reducedDensity(const SuperposedState& s, std::span<const std::size_t> keep);

/// Base-2 entropy of the mode-0 reduced state of a two-mode pure state.
double entropyOfEntanglement(const SuperposedState& s);

/// Closed form for |Φ_φ⟩ / |Ψ_φ⟩ via the determinant of the reduced state.
double entropyClosedForm(double alpha, double phi);

enum class BellOutcome { PhiPlus, PhiMinus, PsiPlus, PsiMinus, Fail };

const char* toString(BellOutcome o);

struct BellResult {
  BellOutcome outcome;
  double probability;
};

/// 50-50 beam splitter on the two modes followed by parity-resolving
/// detectors on both outputs.  Odd at f → PhiMinus, even nonvacuum at f →
/// PhiPlus, same for g with Psi.  Both vacuum, or photons in both ports, →
/// Fail.  Returns all five outcomes in enum order.
std::vector<BellResult> quasiBellDistribution(const MixedState& rho);
std::vector<BellResult> quasiBellDistribution(const SuperposedState& s);

/// One draw from quasiBellDistribution.
BellResult quasiBellMeasure(const MixedState& rho, RandomStream& stream);

/// Two-mode density operator in the Löwdin logical basis e_i ⊗ e_j (index
/// 2i + j) of the per-mode amplitude.  Every label must be (±a, ±a).
Eigen::Matrix4cd toLogical(const MixedState& rho, cplx alpha);

/// Inverse of toLogical via the eigen-decomposition of the 4×4 matrix.
MixedState fromLogical(const Eigen::Matrix4cd& rho, cplx alpha);

/// Logical-basis column vector of a pure two-mode qubit state.
Eigen::Vector4cd logicalVector(const SuperposedState& s, cplx alpha);

}  // namespace ecs
