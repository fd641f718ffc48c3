#include "tft/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "format.hpp"
#include "tft/parallel.hpp"

namespace tft {

using detail::fmt;

std::vector<double> sample_scores(const ProcessMeasure& p, const ProcessMeasure& q,
                                  const PathTransform& transform, Direction direction,
                                  std::size_t n, std::uint64_t seed, std::size_t workers) {
  const bool forward = direction == Direction::Forward;
  const ProcessMeasure& source = forward ? p : q;
  const auto paths = sample_ensemble(source, n, seed,
                                     {workers, forward ? kForwardDomain : kBackwardDomain,
                                      SamplingMethod::Automatic});
  std::vector<double> scores(n);
  parallel_for(n, workers, [&](std::size_t i) {
    scores[i] = score(p, q, transform, paths[i], direction).value;
  });
  return scores;
}

bool MgfGrid::all_pass() const {
  return std::all_of(points.begin(), points.end(), [](const MgfPoint& pt) { return pt.pass; });
}

namespace {

void check_lambdas(const std::vector<double>& lambdas, const VerifyOptions& options) {
  if (lambdas.empty()) throw std::invalid_argument("MGF grid: no λ values");
  for (double l : lambdas) {
    if (!std::isfinite(l)) throw std::invalid_argument("MGF grid: non-finite λ");
    if ((l < -1.0 || l > 0.0) && !options.allow_outside_strip) {
      throw std::invalid_argument("MGF grid: λ = " + fmt(l) +
                                  " lies outside [-1, 0]; set allow_outside_strip to probe it");
    }
  }
}

bool agree(double a, double sa, double b, double sb) {
  return std::abs(a - b) <= 3.0 * std::hypot(sa, sb) + 1e-12 * std::max(1.0, std::abs(a));
}

}  // namespace

MgfGrid mgf_from_scores(const std::vector<double>& lambdas, const std::vector<double>& forward_scores,
                        const std::vector<double>& backward_scores, const VerifyOptions& options) {
  check_lambdas(lambdas, options);
  MgfGrid grid;
  std::vector<double> lhs_terms(forward_scores.size());
  std::vector<double> rhs_terms(backward_scores.size());
  for (double lambda : lambdas) {
    for (std::size_t i = 0; i < forward_scores.size(); ++i) lhs_terms[i] = lambda * forward_scores[i];
    for (std::size_t i = 0; i < backward_scores.size(); ++i) {
      rhs_terms[i] = -(1.0 + lambda) * backward_scores[i];
    }
    const Estimate lhs = exp_mean(lhs_terms, options.batches);
    const Estimate rhs = exp_mean(rhs_terms, options.batches);
    grid.points.push_back({lambda, lhs.value, lhs.se, rhs.value, rhs.se,
                           agree(lhs.value, lhs.se, rhs.value, rhs.se), lambda < -1.0 || lambda > 0.0,
                           max_summand_share(lhs_terms), max_summand_share(rhs_terms)});
  }
  return grid;
}

MgfGrid estimate_mgf_pair(const ProcessMeasure& p, const ProcessMeasure& q,
                          const PathTransform& transform, const std::vector<double>& lambdas,
                          std::size_t n, std::uint64_t seed, const VerifyOptions& options) {
  if (n < 1000) throw std::invalid_argument("estimate_mgf_pair: n must be at least 1000");
  check_lambdas(lambdas, options);
  const auto sp = sample_scores(p, q, transform, Direction::Forward, n, seed, options.workers);
  const auto sq = sample_scores(p, q, transform, Direction::Backward, n, seed, options.workers);
  return mgf_from_scores(lambdas, sp, sq, options);
}

FtReport integral_ft_from_scores(const std::vector<double>& forward_scores, std::size_t batches) {
  std::vector<double> terms(forward_scores.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = -forward_scores[i];
  const Estimate e = exp_mean(terms, batches);
  return {e.value, e.se, agree(e.value, e.se, 1.0, 0.0), max_summand_share(terms)};
}

FtReport integral_ft_check(const ProcessMeasure& p, const ProcessMeasure& q,
                           const PathTransform& transform, std::size_t n, std::uint64_t seed,
                           const VerifyOptions& options) {
  if (n < 1000) throw std::invalid_argument("integral_ft_check: n must be at least 1000");
  const auto sp = sample_scores(p, q, transform, Direction::Forward, n, seed, options.workers);
  return integral_ft_from_scores(sp, options.batches);
}

std::string to_string(Functional f) {
  switch (f) {
    case Functional::Score: return "score";
    case Functional::Entropy: return "entropy";
    case Functional::Work: return "work";
    case Functional::Heat: return "heat";
  }
  return "?";
}

Functional functional_from_string(const std::string& name) {
  if (name == "score") return Functional::Score;
  if (name == "entropy") return Functional::Entropy;
  if (name == "work") return Functional::Work;
  if (name == "heat") return Functional::Heat;
  throw std::invalid_argument("unknown functional '" + name + "'");
}

FunctionalValues evaluate_functional(const ProcessMeasure& p, const ProcessMeasure& q,
                                     const PathTransform& transform, Functional functional,
                                     const std::vector<JumpPath>& forward_paths,
                                     const std::vector<JumpPath>& backward_paths,
                                     const std::optional<Hamiltonian>& hamiltonian,
                                     std::size_t workers) {
  if (functional != Functional::Score && transform.kind() != PathTransform::Kind::TimeReversal) {
    throw std::invalid_argument("evaluate_functional: " + to_string(functional) +
                                " is defined for time reversal only");
  }
  if (functional == Functional::Work && !hamiltonian) {
    throw std::invalid_argument("evaluate_functional: work needs the Hamiltonian");
  }
  FunctionalValues out{std::vector<double>(forward_paths.size()),
                       std::vector<double>(backward_paths.size())};
  parallel_for(forward_paths.size(), workers, [&](std::size_t i) {
    const auto& w = forward_paths[i];
    switch (functional) {
      case Functional::Score: out.forward[i] = score(p, q, transform, w, Direction::Forward).value; break;
      case Functional::Entropy: out.forward[i] = entropy_production(p, q, w).value; break;
      case Functional::Work: out.forward[i] = dissipated_work(p, q, *hamiltonian, w).value; break;
      case Functional::Heat: out.forward[i] = heat_dissipation(p, w); break;
    }
  });
  parallel_for(backward_paths.size(), workers, [&](std::size_t i) {
    const auto& w = backward_paths[i];
    out.backward[i] = functional == Functional::Heat
                          ? -heat_dissipation(q, w)
                          : -score(p, q, transform, w, Direction::Backward).value;
  });
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

// Values equal up to roundoff land in the same bin.
double snap(double v) { return std::nearbyint(v * 1e9) / 1e9; }

}  // namespace

RatioReport ratio_test(const std::vector<double>& forward, const std::vector<double>& backward,
                       const RatioOptions& options) {
  if (forward.empty() || backward.empty()) throw std::invalid_argument("ratio_test: empty ensemble");
  std::vector<double> f(forward.size());
  std::vector<double> g(backward.size());
  std::transform(forward.begin(), forward.end(), f.begin(), snap);
  std::transform(backward.begin(), backward.end(), g.begin(), snap);
  std::vector<double> pooled = f;
  pooled.insert(pooled.end(), g.begin(), g.end());

  const double tail = 0.5 * (1.0 - options.central_mass);
  double lo = quantile(pooled, tail);
  double hi = quantile(pooled, 1.0 - tail);
  std::size_t count = 1;
  if (hi - lo < 1e-9) {
    lo -= 5e-10;
    hi += 5e-10;
  } else if (options.bins > 0) {
    count = options.bins;
  } else {
    const double iqr = quantile(pooled, 0.75) - quantile(pooled, 0.25);
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(pooled.size()));
    // A single atom holding half the mass zeroes the IQR; fall back to Sturges.
    if (!(width > 0.0)) width = (hi - lo) / std::ceil(std::log2(static_cast<double>(pooled.size())) + 1.0);
    count = static_cast<std::size_t>(std::clamp(std::ceil((hi - lo) / width), 1.0, 512.0));
  }

  RatioReport report;
  const double width = (hi - lo) / static_cast<double>(count);
  for (std::size_t k = 0; k <= count; ++k) report.edges.push_back(k == count ? hi : lo + width * k);
  auto bin_of = [&](double v) -> long {
    if (v < lo || v > hi) return -1;
    return std::min(static_cast<long>((v - lo) / width), static_cast<long>(count) - 1);
  };

  std::vector<std::size_t> cf(count, 0);
  std::vector<std::size_t> cg(count, 0);
  std::vector<double> s1(count, 0.0);
  std::vector<double> s2(count, 0.0);
  for (double v : f) {
    if (const long b = bin_of(v); b >= 0) ++cf[static_cast<std::size_t>(b)];
  }
  for (double v : g) {
    if (const long b = bin_of(v); b >= 0) {
      const auto k = static_cast<std::size_t>(b);
      // Offset by the bin's upper edge keeps the weights in (0, 1].
      const double e = std::exp(v - report.edges[k + 1]);
      ++cg[k];
      s1[k] += e;
      s2[k] += e * e;
    }
  }

  const double nf = static_cast<double>(f.size());
  const double ng = static_cast<double>(g.size());
  std::size_t above = 0;
  std::size_t below = 0;
  double fail_lo = hi;
  double fail_hi = lo;
  for (std::size_t k = 0; k < count; ++k) {
    RatioBin bin{};
    bin.lower = report.edges[k];
    bin.upper = report.edges[k + 1];
    bin.center = 0.5 * (bin.lower + bin.upper);
    bin.count_f = cf[k];
    bin.count_g = cg[k];
    bin.scored = cf[k] >= options.min_count && cg[k] >= options.min_count;
    if (cf[k] > 0 && cg[k] > 0) {
      bin.abscissa = bin.upper + std::log(s1[k] / static_cast<double>(cg[k]));
      bin.log_ratio = std::log(static_cast<double>(cf[k]) / nf) - std::log(static_cast<double>(cg[k]) / ng);
      bin.deviation = std::abs(bin.log_ratio - bin.abscissa);
      bin.se = std::sqrt(1.0 / static_cast<double>(cf[k]) + s2[k] / (s1[k] * s1[k]));
      bin.within = bin.scored && bin.deviation <= options.z * bin.se;
    } else {
      bin.abscissa = bin.center;
      bin.log_ratio = std::numeric_limits<double>::quiet_NaN();
      bin.deviation = std::numeric_limits<double>::quiet_NaN();
      bin.se = std::numeric_limits<double>::quiet_NaN();
      bin.within = false;
    }
    if (bin.scored) {
      ++report.scored;
      if (bin.within) {
        ++report.within;
      } else {
        (bin.log_ratio > bin.abscissa ? above : below) += 1;
        fail_lo = std::min(fail_lo, bin.lower);
        fail_hi = std::max(fail_hi, bin.upper);
      }
    }
    report.bins.push_back(bin);
  }

  if (report.scored == 0) {
    report.verdict = Verdict::Inconclusive;
    report.direction = "no bin holds " + std::to_string(options.min_count) + " samples from both ensembles";
  } else if (static_cast<double>(report.within) >= options.pass_fraction * static_cast<double>(report.scored)) {
    report.verdict = Verdict::Pass;
  } else {
    report.verdict = Verdict::Fail;
    std::ostringstream msg;
    msg << "log(dF/dG) " << (above >= below ? "exceeds" : "falls below") << " x in "
        << std::max(above, below) << " of " << (above + below) << " failing bins over x in ["
        << fmt(fail_lo) << ", " << fmt(fail_hi) << "]";
    report.direction = msg.str();
  }
  return report;
}

RatioReport distributional_test(const ProcessMeasure& p, const ProcessMeasure& q,
                                const PathTransform& transform, Functional functional,
                                std::size_t n, std::uint64_t seed,
                                const DistributionalOptions& options) {
  if (n < 1000) throw std::invalid_argument("distributional_test: n must be at least 1000");
  const auto fp = sample_ensemble(p, n, seed, {options.workers, kForwardDomain, SamplingMethod::Automatic});
  const auto bp = sample_ensemble(q, n, seed, {options.workers, kBackwardDomain, SamplingMethod::Automatic});
  const auto values = evaluate_functional(p, q, transform, functional, fp, bp, options.hamiltonian,
                                          options.workers);
  return ratio_test(values.forward, values.backward, options.ratio);
}

nlohmann::json to_json(const MgfGrid& grid) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& pt : grid.points) {
    points.push_back({{"lambda", pt.lambda},
                      {"lhs", pt.lhs},
                      {"lhs_se", pt.lhs_se},
                      {"rhs", pt.rhs},
                      {"rhs_se", pt.rhs_se},
                      {"pass", pt.pass},
                      {"outside_strip", pt.outside_strip},
                      {"lhs_max_share", pt.lhs_max_share},
                      {"rhs_max_share", pt.rhs_max_share}});
  }
  return {{"points", points}, {"pass", grid.all_pass()}};
}

nlohmann::json to_json(const FtReport& report) {
  return {{"estimate", report.estimate},
          {"se", report.se},
          {"pass", report.pass},
          {"max_share", report.max_share}};
}

nlohmann::json to_json(const RatioReport& report) {
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& b : report.bins) {
    bins.push_back({{"lower", b.lower},
                    {"upper", b.upper},
                    {"center", b.center},
                    {"count_f", b.count_f},
                    {"count_g", b.count_g},
                    {"abscissa", b.abscissa},
                    {"log_ratio", b.log_ratio},
                    {"deviation", b.deviation},
                    {"se", b.se},
                    {"scored", b.scored},
                    {"within", b.within}});
  }
  return {{"edges", report.edges},
          {"bins", bins},
          {"scored", report.scored},
          {"within", report.within},
          {"verdict", to_string(report.verdict)},
          {"pass", report.verdict == Verdict::Pass},
          {"direction", report.direction}};
}

std::string to_csv(const MgfGrid& grid) {
  std::string out = "lambda,lhs,lhs_se,rhs,rhs_se,pass,outside_strip,lhs_max_share,rhs_max_share\n";
  for (const auto& pt : grid.points) {
    out += fmt(pt.lambda) + ',' + fmt(pt.lhs) + ',' + fmt(pt.lhs_se) + ',' + fmt(pt.rhs) + ',' +
           fmt(pt.rhs_se) + ',' + (pt.pass ? "1" : "0") + ',' + (pt.outside_strip ? "1" : "0") + ',' +
           fmt(pt.lhs_max_share) + ',' + fmt(pt.rhs_max_share) + '\n';
  }
  return out;
}

std::string to_csv(const RatioReport& report) {
  std::string out = "lower,upper,center,count_f,count_g,abscissa,log_ratio,deviation,se,scored,within\n";
  for (const auto& b : report.bins) {
    out += fmt(b.lower) + ',' + fmt(b.upper) + ',' + fmt(b.center) + ',' + std::to_string(b.count_f) + ',' +
           std::to_string(b.count_g) + ',' + fmt(b.abscissa) + ',' + fmt(b.log_ratio) + ',' +
           fmt(b.deviation) + ',' + fmt(b.se) + ',' + (b.scored ? "1" : "0") + ',' +
           (b.within ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace tft
