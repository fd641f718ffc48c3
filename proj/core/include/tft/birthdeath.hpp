// birthdeath.hpp: birth-death chains on {0, 1, 2, ...} with p_j + q_j = 1, so
// jump times form a unit-rate Poisson process and the position is an embedded
// walk. The heat released up to time t depends only on X_t, which reduces the
// heat MGF to a Poisson mixture of walk-endpoint sums.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tft/verify.hpp"

namespace tft {

// Hop right from j with rate p_j, left with q_j = 1 - p_j; p_0 = 1, q_0 = 0.
class BiasSpec {
 public:
  enum class Kind { Constant, Strong, Linear, Custom };

  // p_j/q_j = α for j >= 1; α must exceed 1.
  static BiasSpec constant(double alpha);
  // p_j/q_j = 2^j
  static BiasSpec strong();
  // p_j/q_j = j; exploratory only.
  static BiasSpec linear();
  // p_1, ..., p_J in (0, 1); sites beyond J reuse p_J.
  static BiasSpec custom(std::vector<double> p);

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double p(std::size_t j) const;
  double q(std::size_t j) const;
  // Exact in log space even where p_j or q_j underflows.
  double log_p(std::size_t j) const;
  double log_q(std::size_t j) const;
  // log p_j/q_{j+1} >= 0 for every j; then heat is nondecreasing in X_t and
  // e^{λQ} <= 1 for λ <= 0.
  bool heat_nondecreasing(std::size_t up_to) const;
  std::string describe() const;

 private:
  BiasSpec(Kind kind, double alpha, std::vector<double> table);

  Kind kind_;
  double alpha_;
  std::vector<double> table_;
};

struct BdRates {
  std::vector<double> p;  // p_0 .. p_sites
  std::vector<double> q;
};

BdRates bd_protocol(const BiasSpec& bias, std::size_t sites);

// Q(0,t) = Σ_{j<k} log p_j/q_{j+1} for X_t = k; 0 at k = 0.
double bd_heat(const BiasSpec& bias, std::size_t k);
// bd_heat for k = 0..k_max.
std::vector<double> bd_heat_table(const BiasSpec& bias, std::size_t k_max);

inline constexpr std::size_t kBdTruncationCap = 10000;

struct MgfSeries {
  double lambda;
  double t;
  std::size_t n_max;
  std::vector<double> term_log;         // log of the n-th Poisson-weighted term
  std::vector<double> partial_sum_log;  // log Σ_{m<=n} terms
  // log of a rigorous bound on the omitted terms; NaN when no bound is known
  // (strong or linear bias with λ > 0).
  double tail_bound_log;
  bool converged;  // bound known and tail <= 1e-8 of the sum
  double sum_log() const { return partial_sum_log.back(); }
  double term_ratio(std::size_t n) const;  // term_n / term_{n-1}
};

// Σ_{n<=N} e^{-t} t^n/n! Σ_{k=0}^{n} w_n(k) e^{λ Q(k)} with w_n the law of the
// embedded walk after n hops from 0. The k = 0 term is included, so λ = 0
// gives the Poisson CDF at N.
MgfSeries bd_mgf_truncated(const BiasSpec& bias, double lambda, double t, std::size_t n_max);

// Smallest N (up to the cap) whose tail bound is <= rel_tol of the partial sum;
// converged = false when no such N exists or no bound is available.
MgfSeries bd_mgf_auto(const BiasSpec& bias, double lambda, double t, double rel_tol = 1e-8,
                      std::size_t cap = kBdTruncationCap);

struct FreeEnergyEstimate {
  double lambda;
  double t;
  std::size_t n_max;
  double estimate;     // (1/t) log M from the partial sum
  double estimate_upper;  // (1/t) log(partial sum + tail bound)
  double lower_bound;  // α^{1+λ}/(α+1) - 1
  double upper_bound;  // (α+1)^λ - 1
  bool inside;         // lower < estimate and estimate_upper < upper
  bool reliable;       // tail bound <= 1e-8 of the sum
  double partial_sum_log;
  double tail_bound_log;
};

// Constant bias only.
FreeEnergyEstimate bd_free_energy(const BiasSpec& bias, double lambda, double t,
                                  std::size_t cap = kBdTruncationCap);

enum class SeriesCertificate { Diverges, Converges, Undetermined };
std::string to_string(SeriesCertificate c);

struct DivergenceReport {
  double lambda;
  double t;
  std::vector<std::size_t> n_list;
  std::vector<double> partial_sum_log;  // at each N in n_list
  std::vector<double> term_ratios;      // index n >= 1, up to max(n_list)
  std::size_t onset;                    // first n of the certified regime
  double max_ratio;
  SeriesCertificate certificate;
  std::string reason;
  double eta;     // Π_{k>=0} 2^k/(2^k+1)
  double eta_60;  // partial product through k = 60
  double eta_80;
};

// λ > 0: Diverges when beyond some n the term ratios exceed 1 and keep growing
// (compared two steps apart, which sidesteps walk parity). λ <= 0: Converges
// when beyond some n <= N/2 every ratio stays below 1/2.
DivergenceReport bd_divergence_scan(const BiasSpec& bias, double lambda, double t,
                                    std::vector<std::size_t> n_list);

// Π_{k=0}^{K} 2^k/(2^k+1)
double eta_partial(std::size_t k_max);

struct BdSamples {
  std::vector<double> heat;             // bd_heat(final state)
  std::vector<double> path_heat;        // hop-by-hop accumulation
  std::vector<std::size_t> final_state;
  std::vector<std::size_t> jump_count;
};

// Paths from X_0 = 0; path i uses SeededStream(seed, i, 2).
BdSamples simulate_bd(const BiasSpec& bias, double t, std::size_t n, std::uint64_t seed,
                      std::size_t workers = 1);

// TFT check for the birth-death chain itself: P starts from π(k) = 2^{-(k+1)},
// Q is the same homogeneous chain started from the law of X_t under P (BC1),
// φ = time reversal. Scores follow from endpoints alone:
//   S_P = log π(x_0) - log μ_t(x_t) + Q(x_t) - Q(x_0),
//   S_Q = log μ_t(x_0) - log π(x_t) + Q(x_t) - Q(x_0).
struct BdTftResult {
  MgfGrid grid;
  FtReport integral_ft;
};

BdTftResult bd_tft_check(const BiasSpec& bias, double t, const std::vector<double>& lambdas, std::size_t n,
                         std::uint64_t seed, std::size_t workers = 1);

// log μ_t(k), k = 0..k_max, for the chain started from π(k) = 2^{-(k+1)}.
std::vector<double> bd_law_from_geometric(const BiasSpec& bias, double t, std::size_t k_max);

nlohmann::json to_json(const MgfSeries& series);
nlohmann::json to_json(const FreeEnergyEstimate& estimate);
nlohmann::json to_json(const DivergenceReport& report);

// Columns: lambda,t,N_max,partial_sum_log,tail_bound_log,converged,lower_bound,upper_bound,estimate
std::string bd_csv_header();
std::string bd_csv_row(const FreeEnergyEstimate& estimate);
std::string bd_csv_row(const MgfSeries& series);

}  // namespace tft
