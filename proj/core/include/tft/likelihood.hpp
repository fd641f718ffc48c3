// likelihood.hpp: log path densities and the thermodynamic functionals built
// from them: S_P, S_Q, entropy production, dissipated work and heat.
//
// Densities are taken with respect to the jump-count ⊗ Lebesgue reference
// measure, so a difference of two log densities is a log Radon–Nikodym
// derivative whenever the transform in between preserves that measure.

#pragma once

#include <span>

#include "tft/process.hpp"
#include "tft/sampler.hpp"
#include "tft/transforms.hpp"

namespace tft {

enum class Direction {
  Forward,   // S_P = log dP/d(φQ)
  Backward,  // S_Q = log dQ/d(φ⁻¹P)
};

struct Score {
  double value;
  Direction direction;
  double boundary;  // initial-law part
  double current;   // jump/holding part
};

// log μ0(x0) + Σ log k_{x_{i-1} x_i}(t_i) - Σ ∫ Λ_{x_i}(s) ds.
// Throws SupportError when the path has zero initial mass or crosses a zero
// rate under the measure.
double log_path_density(const ProcessMeasure& measure, const JumpPath& path);

// Throws EquivalenceError (carrying the offending path) on a support violation.
Score score(const ProcessMeasure& p, const ProcessMeasure& q, const PathTransform& transform,
            const JumpPath& path, Direction direction);

// βQ(0,T) = Σ_jumps log k_{x_{i-1} x_i}(t_i) / k_{x_i x_{i-1}}(t_i).
double heat_dissipation(const ProcessMeasure& measure, const JumpPath& path);

// Protocol-reversed measure started from the forward law at T (BC1).
ProcessMeasure bc1_reversed_measure(const ProcessMeasure& forward);
// Approximate BC1 partner whose initial law is the empirical law of X_T over
// the supplied forward paths. Every state must be observed at least once.
ProcessMeasure bc1_reversed_measure_empirical(const ProcessMeasure& forward,
                                              std::span<const JumpPath> forward_paths);
// Protocol-reversed measure started from the Gibbs law at T (BC2). Rejects a
// forward measure whose initial law is not Gibbs at s = 0 (tolerance 1e-10) or
// whose rates violate local detailed balance for the Hamiltonian.
ProcessMeasure bc2_reversed_measure(const ProcessMeasure& forward, const Hamiltonian& hamiltonian);

// Whether k_ij/k_ji = exp(-β (H_j - H_i)) holds for every connected pair, at
// every breakpoint interval (piecewise-constant) or on a uniform grid.
bool satisfies_ldb(const RateProtocol& protocol, const Hamiltonian& hamiltonian, double tol = 1e-9);

// Entropy production S(0,T) = ΔS + βQ(0,T) = log dP/dP^B under BC1.
Score entropy_production(const ProcessMeasure& forward, const JumpPath& path);
Score entropy_production(const ProcessMeasure& forward, const ProcessMeasure& reversed,
                         const JumpPath& path);

// Dissipated work βW - βΔF = (βΔH - βΔF) + βQ = log dP/dP^B under BC2.
Score dissipated_work(const ProcessMeasure& forward, const Hamiltonian& hamiltonian,
                      const JumpPath& path);
Score dissipated_work(const ProcessMeasure& forward, const ProcessMeasure& reversed,
                      const Hamiltonian& hamiltonian, const JumpPath& path);

}  // namespace tft
