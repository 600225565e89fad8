#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "ecs/optics.hpp"
#include "ecs/random.hpp"
#include "ecs/states.hpp"

namespace ecs::purification {

enum class Scheme { Full, SimpleP1 };
enum class RunMode { Exact, MonteCarlo };

const char* toString(Scheme s);
const char* toString(QuasiBell q);

/// Auxiliary coherent input of each P1 BS2.  Unset amplitude means √2 times
/// the qubit amplitude of the pair being tested.
struct ProbeOptions {
  std::optional<double> amplitude;
  int sign = +1;
};

struct ProtocolConfig {
  double alpha = 2.0;
  Scheme scheme = Scheme::Full;
  QuasiBell target = QuasiBell::PhiMinus;
  int iterations = 1;
  RunMode mode = RunMode::Exact;
  std::uint64_t trials = 0;
  std::uint64_t rootSeed = 0;
  ProbeOptions probe;
  optics::BeamSplitterConvention convention;

  /// Throws std::invalid_argument on a bad combination.
  void validate() const;
};

struct MonteCarloStats {
  std::uint64_t trials = 0;
  std::uint64_t kept = 0;
  double rate = 0.0;
  /// Wald interval half-width at `z` standard errors.
  double halfWidth = 0.0;
  /// Mean target fidelity of the kept trials' final states.
  double keptFidelity = 0.0;
  double keptFidelitySigma = 0.0;
};

struct RoundReport {
  int round = 0;
  double fidelityBefore = 0.0;
  double fidelityAfter = 0.0;
  /// F → F²/(F²+(1−F)²) applied to fidelityBefore.
  double fidelityRecursion = 0.0;
  /// ⟨target|ρ|target⟩ of the output (differs from fidelityAfter only when
  /// the two ensemble members overlap).
  double overlapFidelity = 0.0;
  double successProbability = 0.0;
  double successFormula = 0.0;
  double amplitudeAfter = 0.0;
  std::optional<MonteCarloStats> monteCarlo;
};

struct RoundOutput {
  double keepProbability = 0.0;
  /// Empty when nothing survives.
  std::optional<MixedState> conditioned;
};

/// Second partner of the two-member ensemble for each target.
QuasiBell partnerOf(QuasiBell target);

/// F|target⟩⟨target| + (1−F)|partner⟩⟨partner|.
MixedState makeEnsemble(double alpha, double f, QuasiBell target);

/// Σ weights of components that are the target ray.
double componentWeight(const MixedState& rho, const SuperposedState& target);

/// Mode layout of P1 on `pairModes` modes per copy: copy one on
/// [0, n), copy two on [n, 2n), probes appended on [2n, 3n).  Copy-two and
/// probe modes are detected, copy one is kept.
SuperposedState p1Setup(const SuperposedState& pairState, std::size_t pairModes, const ProbeOptions& probe,
                        optics::BeamSplitterConvention convention = {});

/// P1 on a copy pair over (a, b, a′, b′): keep iff all four on/off detectors
/// click.  Output over (f, g).
RoundOutput p1Round(const MixedState& rhoPair, const ProbeOptions& probe = {},
                    optics::BeamSplitterConvention convention = {});

/// P1 generalized to `pairModes` modes per copy (four for the multimode
/// ensembles).  Every detector must click.
RoundOutput p1RoundModes(const MixedState& rhoPair, std::size_t pairModes, const ProbeOptions& probe = {},
                         optics::BeamSplitterConvention convention = {});

/// Vacuum ancillas on (k′, l′), beam splitters (f,k′), (g,l′).
SuperposedState p2Setup(const SuperposedState& s, optics::BeamSplitterConvention convention = {});

/// True when `target` is selected by equal parities on (k′, l′).
bool keepsSameParity(QuasiBell target);

/// P2 on (f, g): parity detection on both ancilla outputs, kept on the
/// parity pattern that selects `target`.
RoundOutput p2Round(const MixedState& rho, QuasiBell target, optics::BeamSplitterConvention convention = {});

double fidelityRecursion(double f);

/// Printed closed forms of the per-round success probability.
double successProbability(double f, double alpha, Scheme scheme);

/// Derived keep probability of one round with the default probe on the
/// two-member ensemble of fidelity f.
double exactSuccessProbability(double f, double alpha, Scheme scheme, QuasiBell target = QuasiBell::PhiMinus);

/// Probability that P2 yields different parities on |Φ′₊⟩ at amplitude √2α.
double p2DifferentParityProbability(double alpha);

/// One round on the ensemble over (a, b): builds ρ⊗ρ, runs P1 and, for the
/// full scheme, P2.
RoundOutput protocolRound(const MixedState& rho, Scheme scheme, QuasiBell target, const ProbeOptions& probe = {},
                          optics::BeamSplitterConvention convention = {});

/// Monte Carlo estimate of one round: source pairs drawn from ρ⊗ρ, every
/// detector sampled in sequence.  Chunks use child streams of `rootSeed`,
/// so results do not depend on scheduling.
MonteCarloStats monteCarloRound(const MixedState& rho, Scheme scheme, QuasiBell target, std::uint64_t trials,
                                std::uint64_t rootSeed, const ProbeOptions& probe = {},
                                optics::BeamSplitterConvention convention = {}, double z = 4.0);

/// Iterated purification from an initial two-member ensemble of fidelity
/// f0.  Rounds are successful rounds.  The tracked (fidelity, amplitude)
/// summary is checked against the full state every round.  `finalState`
/// receives the ensemble after the last round.
std::vector<RoundReport> runProtocol(const ProtocolConfig& config, double f0, MixedState* finalState = nullptr);

/// Alias of runProtocol with the scheme forced to SimpleP1.
std::vector<RoundReport> simpleP1Scheme(const MixedState& rho, int iterations, const ProtocolConfig& config);

/// Iterates successful rounds on an explicit ensemble.
std::vector<RoundReport> iterateRounds(MixedState rho, const ProtocolConfig& config,
                                       MixedState* finalState = nullptr);

// ---- bilateral twirl ----

/// The 12 rotations {I, B_x², B_y², B_z²} × {I, C, C²}, C = B_x B_y, in the
/// logical basis.
std::vector<Eigen::Matrix2cd> twirlGroup();

/// Bilateral action U ⊗ XUX (the partner conjugation keeps |Φ₋⟩ invariant).
Eigen::Matrix4cd bilateral(const Eigen::Matrix2cd& u);

/// Averages over `sampleCount` uniformly drawn group elements.
MixedState wernerTwirl(const MixedState& rho, std::size_t sampleCount, RandomStream& stream);
/// Exact average over the whole group.
MixedState wernerTwirlExact(const MixedState& rho);

// ---- vacuum decoherence ----

struct DecoherenceParams {
  double gammaTau = 0.0;
  double alpha = 1.0;

  double t() const;
  /// exp[−4(1−t²)α²]
  double capitalGamma() const;
  /// exp[−4t²α²]
  double k() const;
};

/// Amplitude damping for time γτ: labels scale by t and each dyadic |β⟩⟨γ|
/// picks up exp[(1−t²)(−|β|²/2 − |γ|²/2 + γ*β)] per mode.
MixedState decohere(const MixedState& rho, double gammaTau);
MixedState decohere(const SuperposedState& s, double gammaTau);

/// F(τ) = (1+Γ)(1−k) / (2(1−Γk)).
double decoheredFidelity(const DecoherenceParams& p);
/// F(τ) − 1/2 = (Γ−k) / (2(1−Γk)).
double decoheredFidelityExcess(const DecoherenceParams& p);

/// Dynamic quasi-Bell states at amplitude tα.
SuperposedState dynamicQuasiBell(const DecoherenceParams& p, QuasiBell which);

enum class PreRotation { BxBx, HH };

MixedState preRotate(const MixedState& rho, PreRotation gate);

/// Weight normalization of the HH-rotated decohered state:
/// 1 / (F r + 1 − F) with r = (1+k)/(1−k).
double hadamardNormalization(const DecoherenceParams& p);

/// Root of F(τ) = 1/2 in γτ by bisection on [0, 10].
double purificationThreshold(double alpha, double tolerance = 1e-10);

// ---- four-mode states ----

/// N(|α,α,α,α⟩ + |−α,−α,−α,−α⟩).
SuperposedState makeB1(double alpha);
/// N(|α,−α,α,−α⟩ + |−α,α,−α,α⟩).
SuperposedState makeB2(double alpha);
/// B1 generated from an even cat of amplitude 2α through three beam splitters.
SuperposedState makeB1ViaBeamSplitters(double alpha);

MixedState makeMultimodeEnsemble(double alpha, double f);

/// One P1 round over two copies of a four-mode ensemble (8 modes).
RoundOutput multimodePurify(const MixedState& rhoPair, const ProbeOptions& probe = {},
                            optics::BeamSplitterConvention convention = {});

}  // namespace ecs::purification
