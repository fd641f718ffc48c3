// verify.hpp: Monte-Carlo checks of the transient fluctuation identities:
//   E_P[e^{λ S_P}] = E_Q[e^{-(1+λ) S_Q}]  on  -1 <= λ <= 0,
//   E_P[e^{-S_P}] = 1,
//   dF/dG(x) = e^x  for F the law of S_P under P and G that of -S_Q under Q.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tft/likelihood.hpp"
#include "tft/stats.hpp"

namespace tft {

struct VerifyOptions {
  std::size_t workers = 1;
  std::size_t batches = 20;
  // λ outside [-1, 0] is refused unless set; such points are then flagged.
  bool allow_outside_strip = false;
};

// Seeds: P-side paths use SeededStream domain 0 and Q-side paths domain 1.
inline constexpr std::uint64_t kForwardDomain = 0;
inline constexpr std::uint64_t kBackwardDomain = 1;

// S_P over paths drawn from P (Forward) or S_Q over paths drawn from Q (Backward).
std::vector<double> sample_scores(const ProcessMeasure& p, const ProcessMeasure& q,
                                  const PathTransform& transform, Direction direction,
                                  std::size_t n, std::uint64_t seed, std::size_t workers = 1);

struct MgfPoint {
  double lambda;
  double lhs;
  double lhs_se;
  double rhs;
  double rhs_se;
  bool pass;
  bool outside_strip;
  double lhs_max_share;
  double rhs_max_share;
};

struct MgfGrid {
  std::vector<MgfPoint> points;
  bool all_pass() const;
};

// Agreement: |lhs - rhs| <= 3 sqrt(se_l² + se_r²) + 1e-12 max(1, |lhs|); the
// last term only absorbs rounding when both sides have zero spread.
MgfGrid mgf_from_scores(const std::vector<double>& lambdas, const std::vector<double>& forward_scores,
                        const std::vector<double>& backward_scores, const VerifyOptions& options = {});

MgfGrid estimate_mgf_pair(const ProcessMeasure& p, const ProcessMeasure& q,
                          const PathTransform& transform, const std::vector<double>& lambdas,
                          std::size_t n, std::uint64_t seed, const VerifyOptions& options = {});

struct FtReport {
  double estimate;
  double se;
  bool pass;
  double max_share;
};

FtReport integral_ft_from_scores(const std::vector<double>& forward_scores, std::size_t batches = 20);
FtReport integral_ft_check(const ProcessMeasure& p, const ProcessMeasure& q,
                           const PathTransform& transform, std::size_t n, std::uint64_t seed,
                           const VerifyOptions& options = {});

enum class Functional {
  Score,    // S_P for any transform
  Entropy,  // entropy production; q must be the BC1 partner, transform time reversal
  Work,     // dissipated work; q must be the BC2 partner, needs the Hamiltonian
  Heat,     // βQ alone; no boundary term
};

std::string to_string(Functional f);
Functional functional_from_string(const std::string& name);

struct FunctionalValues {
  std::vector<double> forward;   // functional on P-paths
  std::vector<double> backward;  // minus the functional on Q-paths
};

FunctionalValues evaluate_functional(const ProcessMeasure& p, const ProcessMeasure& q,
                                     const PathTransform& transform, Functional functional,
                                     const std::vector<JumpPath>& forward_paths,
                                     const std::vector<JumpPath>& backward_paths,
                                     const std::optional<Hamiltonian>& hamiltonian = std::nullopt,
                                     std::size_t workers = 1);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct RatioBin {
  double lower;
  double upper;
  double center;
  std::size_t count_f;
  std::size_t count_g;
  // Abscissa at which e^x is exact for this bin: log of the G-average of e^x
  // inside it. Equals the center for a flat density; differs when the law is
  // atomic or steep across the bin.
  double abscissa;
  double log_ratio;  // log(dF̂/dĜ) = log((c_F/n_F)/(c_G/n_G))
  double deviation;  // |log_ratio - abscissa|
  double se;
  bool scored;
  bool within;
};

struct RatioReport {
  std::vector<double> edges;
  std::vector<RatioBin> bins;
  std::size_t scored = 0;
  std::size_t within = 0;
  Verdict verdict = Verdict::Inconclusive;
  // For a failing test: whether the log-ratio sits above or below the abscissa
  // in most failing bins, and where those bins are.
  std::string direction;
};

struct RatioOptions {
  std::size_t bins = 0;  // 0 selects Freedman-Diaconis
  std::size_t min_count = 25;
  double z = 3.0;
  double pass_fraction = 0.95;
  double central_mass = 0.995;
};

RatioReport ratio_test(const std::vector<double>& forward, const std::vector<double>& backward,
                       const RatioOptions& options = {});

struct DistributionalOptions {
  RatioOptions ratio;
  std::size_t workers = 1;
  std::optional<Hamiltonian> hamiltonian;
};

RatioReport distributional_test(const ProcessMeasure& p, const ProcessMeasure& q,
                                const PathTransform& transform, Functional functional,
                                std::size_t n, std::uint64_t seed,
                                const DistributionalOptions& options = {});

nlohmann::json to_json(const MgfGrid& grid);
nlohmann::json to_json(const FtReport& report);
nlohmann::json to_json(const RatioReport& report);
std::string to_csv(const MgfGrid& grid);
std::string to_csv(const RatioReport& report);

}  // namespace tft
