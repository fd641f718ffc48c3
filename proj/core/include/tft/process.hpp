// process.hpp: state spaces, driving protocols, Hamiltonians and process measures
// for finite continuous-time Markov jump processes on [0, T].

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tft/errors.hpp"

namespace tft {

using State = std::size_t;
using RateMatrix = Eigen::MatrixXd;
using Adjacency = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

class StateSpace {
 public:
  enum class Kind { Finite, NonnegativeIntegers };

  static StateSpace finite(std::size_t size, std::vector<std::string> labels = {});
  // Countable space {0, 1, 2, ...}; only the birth-death module accepts it.
  static StateSpace nonnegative_integers();

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::Finite; }
  std::size_t size() const;
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  StateSpace(Kind kind, std::size_t size, std::vector<std::string> labels);

  Kind kind_;
  std::size_t size_;
  std::vector<std::string> labels_;
};

// Time-dependent jump rates k_ij(s) on [0, T]. Off-diagonal entries only; the
// diagonal is ignored and stored as zero. Every rate that is positive somewhere
// is positive everywhere on [0, T].
class RateProtocol {
 public:
  using Evaluator = std::function<RateMatrix(double)>;

  // breakpoints 0 = b_0 < ... < b_m = T, one matrix per interval [b_k, b_{k+1}).
  // The last interval is closed at T.
  static RateProtocol piecewise_constant(std::vector<double> breakpoints,
                                         std::vector<RateMatrix> rates);
  static RateProtocol constant(const RateMatrix& rates, double horizon);
  // rate_bound must dominate every k_ij(s); it is spot-checked on a uniform grid
  // of validation_points times and a violation is an error.
  static RateProtocol functional(std::size_t num_states, double horizon,
                                 Evaluator rates, double rate_bound,
                                 std::size_t validation_points = 257);

  std::size_t num_states() const noexcept { return num_states_; }
  double horizon() const noexcept { return horizon_; }
  bool is_piecewise_constant() const noexcept { return !evaluator_; }

  double rate(State from, State to, double s) const;
  RateMatrix rates_at(double s) const;
  double exit_rate(State from, double s) const;
  // ∫_a^b Λ_from(s) ds; exact for piecewise-constant protocols, adaptive
  // Gauss-Kronrod (absolute error 1e-10) otherwise.
  double integrated_exit_rate(State from, double a, double b) const;
  // K̄ >= sup k_ij(s).
  double rate_bound() const noexcept { return rate_bound_; }
  // True where k_ij > 0 (i != j).
  const Adjacency& support() const noexcept { return support_; }

  // Piecewise-constant only.
  const std::vector<double>& breakpoints() const;
  const std::vector<RateMatrix>& interval_rates() const;
  std::size_t interval_index(double s) const;

  // Functional only.
  const Evaluator& evaluator() const noexcept { return evaluator_; }

 private:
  RateProtocol() = default;

  std::size_t num_states_ = 0;
  double horizon_ = 0.0;
  double rate_bound_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<RateMatrix> interval_rates_;
  Evaluator evaluator_;
  Adjacency support_;
};

class InitialDistribution {
 public:
  // Entries >= 0 and summing to 1 within 1e-12.
  explicit InitialDistribution(Eigen::VectorXd masses);

  std::size_t size() const noexcept { return static_cast<std::size_t>(masses_.size()); }
  double mass(State x) const;
  double log_mass(State x) const;
  const Eigen::VectorXd& masses() const noexcept { return masses_; }
  bool strictly_positive() const noexcept;

 private:
  Eigen::VectorXd masses_;
};

// Energies H(x, s) in units where β multiplies them, plus the inverse temperature.
class Hamiltonian {
 public:
  using Evaluator = std::function<double(State, double)>;

  static Hamiltonian piecewise_constant(std::vector<double> breakpoints,
                                        std::vector<Eigen::VectorXd> energies,
                                        double beta);
  static Hamiltonian constant(Eigen::VectorXd energies, double beta, double horizon);
  // max_gap >= sup_{i,j,s} |H(i,s) - H(j,s)|; used to bound LDB rates.
  static Hamiltonian functional(std::size_t num_states, double horizon,
                                Evaluator energy, double beta, double max_gap);

  std::size_t num_states() const noexcept { return num_states_; }
  double horizon() const noexcept { return horizon_; }
  double beta() const noexcept { return beta_; }
  bool is_piecewise_constant() const noexcept { return !evaluator_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  double max_gap() const noexcept { return max_gap_; }

  double energy(State x, double s) const;
  Eigen::VectorXd energies_at(double s) const;

 private:
  Hamiltonian() = default;

  std::size_t num_states_ = 0;
  double horizon_ = 0.0;
  double beta_ = 1.0;
  double max_gap_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<Eigen::VectorXd> energies_;
  Evaluator evaluator_;
};

class ProcessMeasure {
 public:
  ProcessMeasure(StateSpace space, RateProtocol protocol, InitialDistribution initial);

  const StateSpace& space() const noexcept { return space_; }
  const RateProtocol& protocol() const noexcept { return protocol_; }
  const InitialDistribution& initial() const noexcept { return initial_; }
  double horizon() const noexcept { return protocol_.horizon(); }
  std::size_t num_states() const noexcept { return protocol_.num_states(); }

 private:
  StateSpace space_;
  RateProtocol protocol_;
  InitialDistribution initial_;
};

struct GibbsState {
  InitialDistribution distribution;
  double log_partition;
};

// p'_ij(s) = p_ij(T - s).
RateProtocol protocol_reverse(const RateProtocol& protocol);

// Symmetric local-detailed-balance kinetics on a connectivity graph:
// k_ij(s) = ν exp(-β (H(j,s) - H(i,s)) / 2). An empty adjacency means the
// complete graph. The adjacency must be symmetric.
RateProtocol build_ldb_protocol(const Hamiltonian& hamiltonian, double base_rate,
                                const StateSpace& space, double horizon,
                                const Adjacency& connectivity = {});

GibbsState gibbs_distribution(const Hamiltonian& hamiltonian, double s);

// Law of X_s under the measure.
InitialDistribution evolve_law(const ProcessMeasure& measure, double s);

// Whether a distribution equals the Gibbs law of H(., s) within tol. This is the
// only protocol-to-distribution mapping the library recognises.
bool matches_gibbs(const InitialDistribution& distribution, const Hamiltonian& hamiltonian,
                   double s, double tol = 1e-10);

// Stationary law of a time-independent generator (null vector of Gᵀ).
InitialDistribution stationary_distribution(const RateMatrix& rates);

// Generator G with G_ij = k_ij (i != j), G_ii = -Σ_j k_ij.
Eigen::MatrixXd generator(const RateMatrix& rates);

}  // namespace tft
