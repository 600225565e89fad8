#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ecs/random.hpp"
#include "ecs/states.hpp"

namespace ecs::optics {

/// 50-50 beam-splitter convention.  sign = +1 (default) maps coherent labels
/// (β_i, β_j) → ((β_i+β_j)/√2, (β_i−β_j)/√2); sign = −1 maps them to
/// ((β_j−β_i)/√2, (β_i+β_j)/√2), i.e. the outputs exchanged.
struct BeamSplitterConvention {
  int sign = +1;
};

SuperposedState beamSplitter(const SuperposedState& s, std::size_t modeI, std::size_t modeJ,
                             BeamSplitterConvention convention = {});
MixedState beamSplitter(const MixedState& rho, std::size_t modeI, std::size_t modeJ,
                        BeamSplitterConvention convention = {});

/// D(δ) on one mode: β → β+δ with phase exp[(δβ* − δ*β)/2].
SuperposedState displace(const SuperposedState& s, std::size_t mode, cplx delta);

/// Qubit amplitude a of `mode` when every label there is ±a; throws
/// std::invalid_argument otherwise.
cplx qubitAmplitude(const SuperposedState& s, std::size_t mode);

/// Linear map on the {|a⟩, |−a⟩} span of one mode given in label
/// coordinates: column 0 is the image of |a⟩, column 1 the image of |−a⟩.
SuperposedState applyLabelGate(const SuperposedState& s, std::size_t mode, const Eigen::Matrix2cd& gate);

/// Label-coordinate matrices of the single-mode gates.
Eigen::Matrix2cd kerrMatrix();
Eigen::Matrix2cd rotateZMatrix(double theta);
Eigen::Matrix2cd hadamardMatrix();

/// Kerr-medium B_x: |a⟩ → (|a⟩ + i|−a⟩)/√2, |−a⟩ → (i|a⟩ + |−a⟩)/√2.
SuperposedState kerrBx(const SuperposedState& s, std::size_t mode);

/// Rotation angle θ = 4αε realised by the displacement D(iε).
struct RotationParams {
  double epsilon;
  double alpha;
  double theta;

  static RotationParams fromTheta(double alpha, double theta);
  static RotationParams fromEpsilon(double alpha, double epsilon);
};

enum class RotationMode { Exact, Physical };

/// Exact: |±a⟩ coefficients × e^{±iθ/2}.  Physical: D(iε).
SuperposedState rotateZ(const SuperposedState& s, std::size_t mode, const RotationParams& params,
                        RotationMode how = RotationMode::Exact);

/// π rotation about z (physical mode uses ε = π/4α).
SuperposedState sigmaZ(const SuperposedState& s, std::size_t mode, RotationMode how = RotationMode::Exact);
/// π/2 rotation about z (physical mode uses ε = π/8α).
SuperposedState bZ(const SuperposedState& s, std::size_t mode, RotationMode how = RotationMode::Exact);
/// B_y = −σ_z B_x B_z B_x with ideal z rotations.
SuperposedState bY(const SuperposedState& s, std::size_t mode);

/// |a⟩ → (|a⟩+|−a⟩)/√2, |−a⟩ → (|a⟩−|−a⟩)/√2, then renormalized.  Not
/// unitary on raw coherent labels; the lost norm is the overlap correction.
SuperposedState hadamard(const SuperposedState& s, std::size_t mode);
/// Same map without renormalization.
SuperposedState hadamardUnnormalized(const SuperposedState& s, std::size_t mode);

enum class DetectorKind { OnOff, Parity };
enum class Outcome { Vacuum, Click, Even, Odd };

const char* toString(Outcome o);

struct DetectorModel {
  DetectorKind kind = DetectorKind::OnOff;
};

std::vector<Outcome> outcomesOf(DetectorModel model);

struct DetectorOutcome {
  Outcome outcome;
  double probability;
  /// State of the remaining modes; empty when the probability vanishes or no
  /// mode is left.
  std::optional<MixedState> conditionedState;
};

/// Exact outcome distribution of an ideal detector on `mode`, with the
/// detected mode traced out of the conditioned states.
std::vector<DetectorOutcome> detect(const MixedState& rho, std::size_t mode, DetectorModel model);

/// One draw from detect's distribution.
DetectorOutcome sampleDetect(const MixedState& rho, std::size_t mode, DetectorModel model,
                             RandomStream& stream);

}  // namespace ecs::optics
