#include "tft/birthdeath.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "format.hpp"
#include "tft/parallel.hpp"

namespace tft {

using detail::fmt;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSimulationDomain = 2;
constexpr std::uint64_t kTftForwardDomain = 3;
constexpr std::uint64_t kTftBackwardDomain = 4;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

// ------------------------------------------------------------------ BiasSpec

BiasSpec::BiasSpec(Kind kind, double alpha, std::vector<double> table)
    : kind_(kind), alpha_(alpha), table_(std::move(table)) {}

BiasSpec BiasSpec::constant(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("BiasSpec: constant bias needs a finite α > 1");
  }
  return {Kind::Constant, alpha, {}};
}

BiasSpec BiasSpec::strong() { return {Kind::Strong, kNaN, {}}; }

BiasSpec BiasSpec::linear() { return {Kind::Linear, kNaN, {}}; }

BiasSpec BiasSpec::custom(std::vector<double> p) {
  if (p.empty()) throw std::invalid_argument("BiasSpec: custom table is empty");
  for (double v : p) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("BiasSpec: custom p_j must lie in (0, 1)");
  }
  return {Kind::Custom, kNaN, std::move(p)};
}

double BiasSpec::log_p(std::size_t j) const {
  if (j == 0) return 0.0;
  const double jd = static_cast<double>(j);
  switch (kind_) {
    case Kind::Constant: return std::log(alpha_) - std::log1p(alpha_);
    case Kind::Strong: return -std::log1p(std::exp2(-jd));
    case Kind::Linear: return -std::log1p(1.0 / jd);
    case Kind::Custom: return std::log(table_[std::min(j, table_.size()) - 1]);
  }
  return kNaN;
}

double BiasSpec::log_q(std::size_t j) const {
  if (j == 0) return kNegInf;
  const double jd = static_cast<double>(j);
  switch (kind_) {
    case Kind::Constant: return -std::log1p(alpha_);
    case Kind::Strong: return -jd * std::log(2.0) - std::log1p(std::exp2(-jd));
    case Kind::Linear: return -std::log1p(jd);
    case Kind::Custom: return std::log1p(-table_[std::min(j, table_.size()) - 1]);
  }
  return kNaN;
}

double BiasSpec::p(std::size_t j) const { return std::exp(log_p(j)); }
double BiasSpec::q(std::size_t j) const { return j == 0 ? 0.0 : std::exp(log_q(j)); }

bool BiasSpec::heat_nondecreasing(std::size_t up_to) const {
  if (kind_ != Kind::Custom) return true;
  for (std::size_t j = 0; j < up_to; ++j) {
    if (log_p(j) - log_q(j + 1) < 0.0) return false;
  }
  return true;
}

std::string BiasSpec::describe() const {
  switch (kind_) {
    case Kind::Constant: return "constant(alpha=" + fmt(alpha_) + ")";
    case Kind::Strong: return "strong";
    case Kind::Linear: return "linear";
    case Kind::Custom: return "custom(" + std::to_string(table_.size()) + " sites)";
  }
  return "?";
}

BdRates bd_protocol(const BiasSpec& bias, std::size_t sites) {
  BdRates r;
  r.p.resize(sites + 1);
  r.q.resize(sites + 1);
  for (std::size_t j = 0; j <= sites; ++j) {
    r.p[j] = bias.p(j);
    r.q[j] = bias.q(j);
  }
  return r;
}

double bd_heat(const BiasSpec& bias, std::size_t k) {
  double h = 0.0;
  for (std::size_t j = 0; j < k; ++j) h += bias.log_p(j) - bias.log_q(j + 1);
  return h;
}

std::vector<double> bd_heat_table(const BiasSpec& bias, std::size_t k_max) {
  std::vector<double> h(k_max + 1, 0.0);
  for (std::size_t k = 1; k <= k_max; ++k) h[k] = h[k - 1] + bias.log_p(k - 1) - bias.log_q(k);
  return h;
}

// ------------------------------------------------------------------- series

double MgfSeries::term_ratio(std::size_t n) const {
  if (n == 0 || n >= term_log.size()) throw std::out_of_range("MgfSeries: ratio index");
  return std::exp(term_log[n] - term_log[n - 1]);
}

namespace {

double log_poisson_tail(double mean, std::size_t n) {
  // P(Pois(mean) > n) = P(n + 1, mean), the regularized lower incomplete gamma.
  const double v = boost::math::gamma_p(static_cast<double>(n) + 1.0, mean);
  return v > 0.0 ? std::log(v) : kNegInf;
}

double tail_bound_log(const BiasSpec& bias, bool nondecreasing, double lambda, double t, std::size_t n) {
  if (lambda <= 0.0 && nondecreasing) return log_poisson_tail(t, n);
  if (bias.kind() == BiasSpec::Kind::Constant && lambda > 0.0) {
    // Q(k) <= k log(α+1) and k <= n, so term_n <= e^{-t} (tc)^n / n!.
    const double c = std::pow(bias.alpha() + 1.0, lambda);
    return -t + t * c + log_poisson_tail(t * c, n);
  }
  return kNaN;
}

MgfSeries run_series(const BiasSpec& bias, double lambda, double t, std::size_t n_limit, double rel_tol) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("birth-death MGF: t must be positive");
  if (!std::isfinite(lambda)) throw std::invalid_argument("birth-death MGF: λ must be finite");
  if (n_limit < 1 || n_limit > kBdTruncationCap) {
    throw std::invalid_argument("birth-death MGF: N_max must lie in [1, " + std::to_string(kBdTruncationCap) + "]");
  }
  const auto heat = bd_heat_table(bias, n_limit + 1);
  std::vector<double> p(n_limit + 2);
  std::vector<double> q(n_limit + 2);
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = bias.p(j);
    q[j] = bias.q(j);
  }
  const bool nondecreasing = bias.heat_nondecreasing(n_limit + 1);
  const double log_t = std::log(t);
  const double log_tol = std::log(rel_tol);

  MgfSeries s{lambda, t, 0, {}, {}, kNaN, false};
  std::vector<double> w{1.0};
  std::vector<double> next;
  double partial = kNegInf;
  for (std::size_t n = 0; n <= n_limit; ++n) {
    double top = kNegInf;
    for (std::size_t k = n % 2; k <= n; k += 2) {
      if (w[k] > 0.0) top = std::max(top, std::log(w[k]) + lambda * heat[k]);
    }
    double acc = 0.0;
    for (std::size_t k = n % 2; k <= n; k += 2) {
      if (w[k] > 0.0) acc += std::exp(std::log(w[k]) + lambda * heat[k] - top);
    }
    const double nd = static_cast<double>(n);
    const double term = -t + nd * log_t - std::lgamma(nd + 1.0) + top + std::log(acc);
    partial = log_add(partial, term);
    s.term_log.push_back(term);
    s.partial_sum_log.push_back(partial);
    s.n_max = n;
    s.tail_bound_log = tail_bound_log(bias, nondecreasing, lambda, t, n);
    s.converged = !std::isnan(s.tail_bound_log) && s.tail_bound_log - partial <= std::log(1e-8);
    if (rel_tol > 0.0 && !std::isnan(s.tail_bound_log) && s.tail_bound_log - partial <= log_tol) break;
    if (n == n_limit) break;

    next.assign(n + 2, 0.0);
    for (std::size_t k = 0; k <= n + 1; ++k) {
      double v = 0.0;
      if (k >= 1 && k - 1 <= n) v += w[k - 1] * p[k - 1];
      if (k + 1 <= n) v += w[k + 1] * q[k + 1];
      next[k] = v;
    }
    w.swap(next);
  }
  return s;
}

}  // namespace

MgfSeries bd_mgf_truncated(const BiasSpec& bias, double lambda, double t, std::size_t n_max) {
  return run_series(bias, lambda, t, n_max, 0.0);
}

MgfSeries bd_mgf_auto(const BiasSpec& bias, double lambda, double t, double rel_tol, std::size_t cap) {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("bd_mgf_auto: rel_tol must be positive");
  MgfSeries s = run_series(bias, lambda, t, std::min(cap, kBdTruncationCap), rel_tol);
  s.converged = !std::isnan(s.tail_bound_log) && s.tail_bound_log - s.sum_log() <= std::log(rel_tol);
  return s;
}

FreeEnergyEstimate bd_free_energy(const BiasSpec& bias, double lambda, double t, std::size_t cap) {
  if (bias.kind() != BiasSpec::Kind::Constant) {
    throw std::invalid_argument("bd_free_energy: the free energy is established for constant bias only");
  }
  const MgfSeries s = bd_mgf_auto(bias, lambda, t, 1e-8, cap);
  const double a = bias.alpha();
  FreeEnergyEstimate e{};
  e.lambda = lambda;
  e.t = t;
  e.n_max = s.n_max;
  e.partial_sum_log = s.sum_log();
  e.tail_bound_log = s.tail_bound_log;
  e.estimate = s.sum_log() / t;
  const std::array<double, 2> ends{s.sum_log(), s.tail_bound_log};
  e.estimate_upper = std::isnan(s.tail_bound_log) ? s.tail_bound_log : log_sum_exp(ends) / t;
  e.lower_bound = std::pow(a, 1.0 + lambda) / (a + 1.0) - 1.0;
  e.upper_bound = std::pow(a + 1.0, lambda) - 1.0;
  // The true value lies in [estimate, estimate_upper]; the whole bracket must
  // sit strictly between the bounds.
  e.inside = e.lower_bound < e.estimate && e.estimate_upper < e.upper_bound;
  e.reliable = s.converged;
  return e;
}

// --------------------------------------------------------------- divergence

std::string to_string(SeriesCertificate c) {
  switch (c) {
    case SeriesCertificate::Diverges: return "diverges";
    case SeriesCertificate::Converges: return "converges";
    case SeriesCertificate::Undetermined: return "undetermined";
  }
  return "?";
}

double eta_partial(std::size_t k_max) {
  double log_eta = 0.0;
  for (std::size_t k = 0; k <= k_max; ++k) log_eta -= std::log1p(std::exp2(-static_cast<double>(k)));
  return std::exp(log_eta);
}

DivergenceReport bd_divergence_scan(const BiasSpec& bias, double lambda, double t, std::vector<std::size_t> n_list) {
  if (n_list.empty()) throw std::invalid_argument("bd_divergence_scan: empty N list");
  std::sort(n_list.begin(), n_list.end());
  const std::size_t n_top = n_list.back();
  if (n_top < 4) throw std::invalid_argument("bd_divergence_scan: largest N must be at least 4");
  const MgfSeries s = bd_mgf_truncated(bias, lambda, t, n_top);

  DivergenceReport r{};
  r.lambda = lambda;
  r.t = t;
  r.n_list = n_list;
  for (auto n : n_list) r.partial_sum_log.push_back(s.partial_sum_log[n]);
  r.term_ratios.assign(n_top + 1, kNaN);
  std::vector<double> log_ratio(n_top + 1, kNaN);
  r.max_ratio = 0.0;
  for (std::size_t n = 1; n <= n_top; ++n) {
    log_ratio[n] = s.term_log[n] - s.term_log[n - 1];
    r.term_ratios[n] = std::exp(log_ratio[n]);
    r.max_ratio = std::max(r.max_ratio, r.term_ratios[n]);
  }
  r.eta = eta_partial(200);
  r.eta_60 = eta_partial(60);
  r.eta_80 = eta_partial(80);

  // Growth regime: every ratio from the onset on exceeds 1 and dominates the
  // ratio two steps earlier.
  std::size_t onset = n_top + 1;
  for (std::size_t n = n_top; n >= 3; --n) {
    if (log_ratio[n] > 0.0 && log_ratio[n] >= log_ratio[n - 2]) {
      onset = n;
    } else {
      break;
    }
  }
  if (lambda > 0.0 && onset + 10 <= n_top) {
    r.certificate = SeriesCertificate::Diverges;
    r.onset = onset;
    r.reason = "term ratios exceed 1 and increase for n >= " + std::to_string(onset) + " (max ratio " +
               fmt(r.max_ratio) + ")";
    return r;
  }
  std::size_t decay = n_top + 1;
  for (std::size_t n = n_top; n >= 1; --n) {
    if (log_ratio[n] < std::log(0.5)) {
      decay = n;
    } else {
      break;
    }
  }
  if (decay <= n_top / 2) {
    r.certificate = SeriesCertificate::Converges;
    r.onset = decay;
    r.reason = "term ratios stay below 1/2 for n >= " + std::to_string(decay);
    return r;
  }
  r.certificate = SeriesCertificate::Undetermined;
  r.onset = 0;
  r.reason = "neither sustained growth nor geometric decay within N = " + std::to_string(n_top);
  return r;
}

// --------------------------------------------------------------- simulation

namespace {

std::size_t poisson_count(SeededStream& stream, double t) {
  std::size_t n = 0;
  double clock = stream.exponential();
  while (clock < t) {
    ++n;
    clock += stream.exponential();
  }
  return n;
}

struct WalkResult {
  std::size_t state;
  double heat;
};

WalkResult walk(const BiasSpec& bias, std::size_t start, std::size_t hops, SeededStream& stream) {
  std::size_t j = start;
  double heat = 0.0;
  for (std::size_t h = 0; h < hops; ++h) {
    if (j == 0 || stream.uniform() < bias.p(j)) {
      heat += bias.log_p(j) - bias.log_q(j + 1);
      ++j;
    } else {
      heat += bias.log_q(j) - bias.log_p(j - 1);
      --j;
    }
  }
  return {j, heat};
}

}  // namespace

BdSamples simulate_bd(const BiasSpec& bias, double t, std::size_t n, std::uint64_t seed, std::size_t workers) {
  if (!(t > 0.0)) throw std::invalid_argument("simulate_bd: t must be positive");
  BdSamples out;
  out.heat.resize(n);
  out.path_heat.resize(n);
  out.final_state.resize(n);
  out.jump_count.resize(n);
  parallel_for(n, workers, [&](std::size_t i) {
    SeededStream stream(seed, i, kSimulationDomain);
    const std::size_t hops = poisson_count(stream, t);
    const WalkResult w = walk(bias, 0, hops, stream);
    out.jump_count[i] = hops;
    out.final_state[i] = w.state;
    out.path_heat[i] = w.heat;
  });
  // Endpoint heat from one shared table; identical endpoints give identical values.
  std::size_t top = 0;
  for (auto k : out.final_state) top = std::max(top, k);
  const auto table = bd_heat_table(bias, top);
  for (std::size_t i = 0; i < n; ++i) out.heat[i] = table[out.final_state[i]];
  return out;
}

std::vector<double> bd_law_from_geometric(const BiasSpec& bias, double t, std::size_t k_max) {
  if (!(t > 0.0)) throw std::invalid_argument("bd_law_from_geometric: t must be positive");
  const auto hops = static_cast<std::size_t>(std::ceil(t + 12.0 * std::sqrt(t) + 40.0));
  // Room above k_max so mass that wanders up and back is kept.
  const std::size_t width = k_max + hops + 64;
  std::vector<double> v(width + 1);
  for (std::size_t j = 0; j <= width; ++j) v[j] = std::exp2(-static_cast<double>(j + 1));
  std::vector<double> law(width + 1, 0.0);
  std::vector<double> next(width + 1);
  const auto p = bd_protocol(bias, width + 1);
  for (std::size_t n = 0; n <= hops; ++n) {
    const double nd = static_cast<double>(n);
    const double weight = std::exp(-t + nd * std::log(t) - std::lgamma(nd + 1.0));
    for (std::size_t k = 0; k <= width; ++k) law[k] += weight * v[k];
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t k = 0; k <= width; ++k) {
      if (k + 1 <= width) next[k + 1] += v[k] * p.p[k];
      if (k >= 1) next[k - 1] += v[k] * p.q[k];
    }
    v.swap(next);
  }
  std::vector<double> out(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) out[k] = std::log(law[k]);
  return out;
}

BdTftResult bd_tft_check(const BiasSpec& bias, double t, const std::vector<double>& lambdas, std::size_t n,
                         std::uint64_t seed, std::size_t workers) {
  if (n < 1000) throw std::invalid_argument("bd_tft_check: n must be at least 1000");
  constexpr std::size_t kStates = 256;
  const auto log_mu = bd_law_from_geometric(bias, t, kStates);
  const auto heat = bd_heat_table(bias, kStates);
  auto log_pi = [](std::size_t k) { return -static_cast<double>(k + 1) * std::log(2.0); };
  std::vector<double> cdf(kStates + 1);
  double acc = 0.0;
  for (std::size_t k = 0; k <= kStates; ++k) cdf[k] = (acc += std::exp(log_mu[k]));

  auto checked = [](std::size_t k) {
    if (k > kStates) throw std::range_error("bd_tft_check: sampled state beyond the tabulated law");
    return k;
  };
  std::vector<double> sp(n);
  std::vector<double> sq(n);
  parallel_for(n, workers, [&](std::size_t i) {
    SeededStream stream(seed, i, kTftForwardDomain);
    std::size_t x0 = 0;
    while (stream.uniform() < 0.5) ++x0;
    checked(x0);
    const auto w = walk(bias, x0, poisson_count(stream, t), stream);
    const std::size_t xt = checked(w.state);
    sp[i] = log_pi(x0) - log_mu[xt] + heat[xt] - heat[x0];
  });
  parallel_for(n, workers, [&](std::size_t i) {
    SeededStream stream(seed, i, kTftBackwardDomain);
    const double u = stream.uniform() * acc;
    const auto x0 = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    checked(x0);
    const auto w = walk(bias, x0, poisson_count(stream, t), stream);
    const std::size_t xt = checked(w.state);
    sq[i] = log_mu[x0] - log_pi(xt) + heat[xt] - heat[x0];
  });
  return {mgf_from_scores(lambdas, sp, sq), integral_ft_from_scores(sp)};
}

// ------------------------------------------------------------------- output

nlohmann::json to_json(const MgfSeries& s) {
  return {{"lambda", s.lambda},
          {"t", s.t},
          {"N_max", s.n_max},
          {"partial_sum_log", s.sum_log()},
          {"tail_bound_log", s.tail_bound_log},
          {"converged", s.converged}};
}

nlohmann::json to_json(const FreeEnergyEstimate& e) {
  return {{"lambda", e.lambda},
          {"t", e.t},
          {"N_max", e.n_max},
          {"partial_sum_log", e.partial_sum_log},
          {"tail_bound_log", e.tail_bound_log},
          {"converged", e.reliable},
          {"lower_bound", e.lower_bound},
          {"upper_bound", e.upper_bound},
          {"estimate", e.estimate},
          {"estimate_upper", e.estimate_upper},
          {"inside_bounds", e.inside}};
}

nlohmann::json to_json(const DivergenceReport& r) {
  nlohmann::json sums = nlohmann::json::array();
  for (std::size_t i = 0; i < r.n_list.size(); ++i) {
    sums.push_back({{"N", r.n_list[i]}, {"partial_sum_log", r.partial_sum_log[i]}});
  }
  nlohmann::json out = {{"lambda", r.lambda},
                        {"t", r.t},
                        {"partial_sums", sums},
                        {"onset", r.onset},
                        {"max_ratio", r.max_ratio},
                        {"certificate", to_string(r.certificate)},
                        {"converged", r.certificate == SeriesCertificate::Converges},
                        {"reason", r.reason},
                        {"eta", r.eta},
                        {"eta_60", r.eta_60},
                        {"eta_80", r.eta_80}};
  if (r.n_list.size() >= 2) {
    out["growth_factor_log"] = r.partial_sum_log.back() - r.partial_sum_log[r.partial_sum_log.size() - 2];
  }
  return out;
}

std::string bd_csv_header() {
  return "lambda,t,N_max,partial_sum_log,tail_bound_log,converged,lower_bound,upper_bound,estimate\n";
}

std::string bd_csv_row(const FreeEnergyEstimate& e) {
  return fmt(e.lambda) + ',' + fmt(e.t) + ',' + std::to_string(e.n_max) + ',' + fmt(e.partial_sum_log) + ',' +
         fmt(e.tail_bound_log) + ',' + (e.reliable ? "1" : "0") + ',' + fmt(e.lower_bound) + ',' +
         fmt(e.upper_bound) + ',' + fmt(e.estimate) + '\n';
}

std::string bd_csv_row(const MgfSeries& s) {
  return fmt(s.lambda) + ',' + fmt(s.t) + ',' + std::to_string(s.n_max) + ',' + fmt(s.sum_log()) + ',' +
         fmt(s.tail_bound_log) + ',' + (s.converged ? "1" : "0") + ",nan,nan," + fmt(s.sum_log() / s.t) + '\n';
}

}  // namespace tft
