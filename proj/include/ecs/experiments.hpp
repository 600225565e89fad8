#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecs/purification.hpp"

namespace ecs::experiments {

struct EntropyRow {
  double alpha;
  double phi;
  double entropy;
  double closedForm;
};

/// E(α, φ) for |Φ_φ⟩ on every grid point, α-major.
std::vector<EntropyRow> entropyScan(std::span<const double> alphas, std::span<const double> phis);

struct DecoherenceRow {
  double alpha;
  double gammaTau;
  double fidelity;
  /// ⟨Φ̃₋|decohere(|Φ₋⟩)|Φ̃₋⟩ from the state path.
  double stateFidelity;
  bool purifiable;
  double threshold;
};

std::vector<DecoherenceRow> decoherenceTable(std::span<const double> alphas, std::span<const double> gammaTaus);

struct MultimodeRow {
  int round;
  double fidelityBefore;
  double fidelityAfter;
  double fidelityRecursion;
  double keepProbability;
  double amplitude;
};

/// Successive four-mode P1 rounds from F₀|B1⟩⟨B1| + (1−F₀)|B2⟩⟨B2|.
std::vector<MultimodeRow> multimodeTable(double alpha, double f0, int iterations,
                                         const purification::ProbeOptions& probe = {},
                                         optics::BeamSplitterConvention convention = {},
                                         MixedState* finalState = nullptr);

struct Check {
  std::string name;
  bool passed;
  double deviation;
  double tolerance;
};

struct VerifyOptions {
  optics::BeamSplitterConvention convention;
  std::uint64_t seed = 1;
  int randomStates = 24;
  double maxAmplitude = 3.0;
};

/// Coherent-state engine against the number-basis oracle.
std::vector<Check> verifySuite(const VerifyOptions& options);

/// Subset of verifySuite covering the P1 detector stage on single parties.
std::vector<Check> verifyP1Parties(double alpha, optics::BeamSplitterConvention convention);

/// Gram and closed-form entropies against the number basis on a grid.
std::vector<Check> verifyEntropy(std::span<const double> alphas, std::span<const double> phis);

/// decohere against the Lindblad integrator for every α ≤ 2 and γτ ≤ 2 on the grid.
std::vector<Check> verifyDecoherence(std::span<const double> alphas, std::span<const double> gammaTaus);

bool allPassed(std::span<const Check> checks);

}  // namespace ecs::experiments
