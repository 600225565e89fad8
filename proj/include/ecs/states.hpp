#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ecs {

using cplx = std::complex<double>;

/// Labels whose amplitudes differ by less than this (componentwise) are merged.
inline constexpr double kDedupTolerance = 1e-12;
/// Squared norms below this are treated as the zero state.
inline constexpr double kZeroNormSquared = 1e-24;

/// Per-mode complex amplitudes of one multimode coherent product state.
class CoherentLabel {
 public:
  explicit CoherentLabel(std::vector<cplx> amplitudes);
  CoherentLabel(std::initializer_list<cplx> amplitudes);

  std::size_t modeCount() const { return amps_.size(); }
  const cplx& operator[](std::size_t mode) const { return amps_[mode]; }
  std::span<const cplx> amplitudes() const { return amps_; }

  /// Largest per-mode amplitude magnitude.
  double maxMagnitude() const;

  bool approxEquals(const CoherentLabel& other, double tol = kDedupTolerance) const;

  CoherentLabel withMode(std::size_t mode, cplx value) const;
  CoherentLabel appended(std::span<const cplx> extra) const;
  CoherentLabel without(std::span<const std::size_t> sortedModes) const;

 private:
  std::vector<cplx> amps_;
};

struct Term {
  cplx coefficient;
  CoherentLabel label;
};

/// Finite complex superposition of coherent product states over a fixed
/// number of modes.  Terms are canonicalized on construction: labels within
/// kDedupTolerance are merged (coefficients summed, first occurrence keeps its
/// position) and amplitude parts below the tolerance are snapped to zero.
/// An empty term list is the explicit zero state.
class SuperposedState {
 public:
  SuperposedState(std::size_t modeCount, std::vector<Term> terms);

  static SuperposedState zero(std::size_t modeCount);
  static SuperposedState vacuum(std::size_t modeCount);
  static SuperposedState coherent(std::vector<cplx> amplitudes);

  std::size_t modeCount() const { return modes_; }
  std::size_t size() const { return terms_.size(); }
  bool isZero() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& operator[](std::size_t i) const { return terms_[i]; }

  double squaredNorm() const;
  double maxMagnitude() const;

  SuperposedState scaled(cplx factor) const;
  SuperposedState operator+(const SuperposedState& other) const;
  SuperposedState operator-(const SuperposedState& other) const;

 private:
  std::size_t modes_;
  std::vector<Term> terms_;
};

/// ⟨alpha|beta⟩ for single-mode coherent states.
cplx coherentOverlap(cplx alpha, cplx beta);
/// ⟨a|b⟩ for multimode coherent product states.
cplx labelOverlap(const CoherentLabel& a, const CoherentLabel& b);

cplx innerProduct(const SuperposedState& a, const SuperposedState& b);

/// Throws std::domain_error for the zero state.
SuperposedState normalize(const SuperposedState& s);

/// Rotates the global phase so the first coefficient's phase lies in [0, π).
SuperposedState canonicalPhase(const SuperposedState& s);

SuperposedState tensor(const SuperposedState& a, const SuperposedState& b);

/// |ψ⟩ after a per-mode sign flip of the label on `mode` (the photon-number
/// parity operator applied to that mode).
SuperposedState flipMode(const SuperposedState& s, std::size_t mode);

/// Squared modulus of the overlap, insensitive to global phase.
double rayOverlap(const SuperposedState& a, const SuperposedState& b);

enum class EcsKind { Phi, Psi };

/// N_φ(|α,α⟩ + e^{iφ}|−α,−α⟩) for Phi, N_φ(|α,−α⟩ + e^{iφ}|−α,α⟩) for Psi.
SuperposedState makeEntangledCoherent(cplx alpha, double phi, EcsKind kind);

enum class QuasiBell { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

SuperposedState makeQuasiBell(cplx alpha, QuasiBell which);
/// Even (sign=+1) or odd (sign=-1) cat M(|β⟩ ± |−β⟩).
SuperposedState makeCat(cplx beta, int sign);

/// Convex combination of normalized pure states.
class MixedState {
 public:
  struct Component {
    double weight;
    SuperposedState state;
  };

  /// Weights must sum to 1 within 1e-12; states must be normalized.
  MixedState(std::size_t modeCount, std::vector<Component> components);

  /// Normalizes states and weights, drops zero-weight parts.
  static MixedState fromUnnormalized(std::size_t modeCount,
                                     std::vector<Component> components);
  static MixedState pure(const SuperposedState& s);

  std::size_t modeCount() const { return modes_; }
  std::size_t size() const { return components_.size(); }
  const std::vector<Component>& components() const { return components_; }
  const Component& operator[](std::size_t i) const { return components_[i]; }

  /// Merges components that are the same ray (|⟨a|b⟩|² > 1 − 1e-12).
  MixedState compressed() const;

  double maxMagnitude() const;

 private:
  std::size_t modes_;
  std::vector<Component> components_;
};

/// All pairwise products; weights multiply.
MixedState tensor(const MixedState& a, const MixedState& b);

/// Σ_i w_i |⟨target|ψ_i⟩|².
double fidelity(const MixedState& rho, const SuperposedState& target);

/// ⟨x|ρ|y⟩.
cplx matrixElement(const MixedState& rho, const SuperposedState& x,
                   const SuperposedState& y);

}  // namespace ecs
