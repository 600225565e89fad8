#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ecs/states.hpp"

namespace ecs {

/// Single-mode projectors whose matrix elements between coherent states have
/// closed forms.  Vacuum is |0⟩⟨0|, Click its complement, Even/Odd the photon
/// parity projectors (vacuum counts as even), EvenClick = Even − Vacuum.
enum class Projector { Identity, Vacuum, Click, Even, Odd, EvenClick };

/// ⟨gamma|Q|beta⟩ for a single mode.
cplx projectorElement(Projector q, cplx gamma, cplx beta);

struct ModeProjection {
  std::size_t mode;
  Projector projector = Projector::Identity;
};

/// Operator Σ_ij A_ij |l_i⟩⟨l_j| on a nonorthogonal set of coherent labels.
struct OperatorForm {
  std::size_t modeCount = 0;
  std::vector<CoherentLabel> labels;
  Eigen::MatrixXcd coeffs;

  double trace() const;
};

Eigen::MatrixXcd gramMatrix(std::span<const CoherentLabel> labels);

/// Columns are coefficient vectors (over the labels) of an orthonormal basis
/// of their span.  Uses the symmetric (Löwdin) form S^{-1/2} when the Gram
/// matrix is well conditioned and canonical orthogonalization otherwise,
/// dropping directions with overlap eigenvalue below `threshold`.
Eigen::MatrixXcd orthonormalizer(const Eigen::MatrixXcd& gram, double threshold = 1e-12);

/// Density operator of a pure state in operator form.
OperatorForm outerProduct(const SuperposedState& s);

/// Applies each projector to its mode and traces that mode out:
///   Tr_T[(⊗Q) |ψ⟩⟨ψ| (⊗Q)].
/// Modes not listed are kept in their original order.  If every mode is
/// traced the result has modeCount 0 and a 1x1 coefficient holding the
/// probability.
OperatorForm projectAndTrace(const SuperposedState& s, std::span<const ModeProjection> traced);

/// ‖(⊗Q)|ψ⟩‖² without building the reduced operator.
double projectionProbability(const SuperposedState& s, std::span<const ModeProjection> traced);

/// Drops labels whose coefficient row and column are below `relative` times
/// the largest coefficient.
OperatorForm pruneLabels(const OperatorForm& op, double relative = 1e-15);

/// Eigen-decomposition of a (positive) operator into weighted normalized
/// pure states; weights are the eigenvalues (not renormalized).  Eigenvalues
/// below `relativeCutoff` × trace are dropped.
std::vector<MixedState::Component> diagonalize(const OperatorForm& op, double relativeCutoff = 1e-14);

/// Matrix of the operator in the orthonormal basis given by `basis`
/// (coefficient columns over op.labels): B = Cᴴ S A S C.
Eigen::MatrixXcd inBasis(const OperatorForm& op, const Eigen::MatrixXcd& basis);

/// Merges several operators into one over the union of their labels.
OperatorForm sum(std::span<const OperatorForm> parts, std::span<const double> weights);

/// Operator form of a mixed state.
OperatorForm toOperator(const MixedState& rho);

/// Sorted eigenvalues (ascending) of the operator.
Eigen::VectorXd spectrum(const OperatorForm& op);

/// Base-2 von Neumann entropy of normalized eigenvalues; values below 1e-14
/// contribute nothing.
double entropyBits(const Eigen::VectorXd& eigenvalues);

}  // namespace ecs
