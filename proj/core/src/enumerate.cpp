#include "tft/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tft {

DiscreteChain::DiscreteChain(Eigen::VectorXd initial, std::vector<Eigen::MatrixXd> steps)
    : initial_(std::move(initial)), steps_(std::move(steps)) {
  const auto n = initial_.size();
  if (n < 2) throw std::invalid_argument("DiscreteChain: need at least two states");
  if (steps_.empty()) throw std::invalid_argument("DiscreteChain: need at least one step");
  if (initial_.minCoeff() < 0.0 || std::abs(initial_.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscreteChain: initial law must be a probability vector");
  }
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const auto& m = steps_[i];
    if (m.rows() != n || m.cols() != n) {
      throw std::invalid_argument("DiscreteChain: step matrix " + std::to_string(i + 1) + " has wrong shape");
    }
    if (!m.allFinite() || m.minCoeff() < 0.0) {
      throw std::invalid_argument("DiscreteChain: step matrix " + std::to_string(i + 1) + " has negative entries");
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (std::abs(m.row(r).sum() - 1.0) > 1e-12) {
        throw std::invalid_argument("DiscreteChain: step matrix " + std::to_string(i + 1) +
                                    " is not row-stochastic");
      }
    }
  }
}

bool DiscreteChain::strictly_positive() const {
  if (initial_.minCoeff() <= 0.0) return false;
  return std::all_of(steps_.begin(), steps_.end(), [](const Eigen::MatrixXd& m) { return m.minCoeff() > 0.0; });
}

double DiscreteChain::log_probability(const std::vector<State>& path) const {
  if (path.size() != steps_.size() + 1) throw std::invalid_argument("DiscreteChain: path length mismatch");
  for (auto x : path) {
    if (x >= num_states()) throw std::invalid_argument("DiscreteChain: state out of range");
  }
  double lp = std::log(initial_[static_cast<Eigen::Index>(path[0])]);
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    lp += std::log(steps_[i](static_cast<Eigen::Index>(path[i]), static_cast<Eigen::Index>(path[i + 1])));
  }
  return lp;
}

Eigen::VectorXd DiscreteChain::marginal(std::size_t step) const {
  if (step > steps_.size()) throw std::out_of_range("DiscreteChain: step beyond n");
  Eigen::RowVectorXd law = initial_.transpose();
  for (std::size_t i = 0; i < step; ++i) law = law * steps_[i];
  return law.transpose();
}

// ---------------------------------------------------------------------------

CoordinatePermutation::CoordinatePermutation(std::vector<std::size_t> sigma) : sigma_(std::move(sigma)) {
  std::vector<bool> seen(sigma_.size(), false);
  for (auto v : sigma_) {
    if (v >= sigma_.size() || seen[v]) throw std::invalid_argument("CoordinatePermutation: not a permutation");
    seen[v] = true;
  }
  if (sigma_.empty()) throw std::invalid_argument("CoordinatePermutation: empty");
}

CoordinatePermutation CoordinatePermutation::identity(std::size_t steps) {
  std::vector<std::size_t> s(steps + 1);
  std::iota(s.begin(), s.end(), std::size_t{0});
  return CoordinatePermutation(std::move(s));
}

CoordinatePermutation CoordinatePermutation::reversal(std::size_t steps) {
  std::vector<std::size_t> s(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) s[i] = steps - i;
  return CoordinatePermutation(std::move(s));
}

CoordinatePermutation CoordinatePermutation::cyclic_shift(std::size_t steps, long shift) {
  const long m = static_cast<long>(steps + 1);
  const long offset = ((shift % m) + m) % m;
  std::vector<std::size_t> s(steps + 1);
  for (long i = 0; i < m; ++i) s[static_cast<std::size_t>(i)] = static_cast<std::size_t>((i + offset) % m);
  return CoordinatePermutation(std::move(s));
}

std::vector<State> CoordinatePermutation::apply(const std::vector<State>& path) const {
  if (path.size() != sigma_.size()) throw std::invalid_argument("CoordinatePermutation: length mismatch");
  std::vector<State> out(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) out[i] = path[sigma_[i]];
  return out;
}

CoordinatePermutation CoordinatePermutation::inverse() const {
  std::vector<std::size_t> inv(sigma_.size());
  for (std::size_t i = 0; i < sigma_.size(); ++i) inv[sigma_[i]] = i;
  return CoordinatePermutation(std::move(inv));
}

bool CoordinatePermutation::is_involution() const {
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    if (sigma_[sigma_[i]] != i) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

std::vector<EnumeratedPath> enumerate_paths(const DiscreteChain& chain) {
  const std::size_t n_states = chain.num_states();
  const std::size_t length = chain.steps() + 1;
  const double total = std::pow(static_cast<double>(n_states), static_cast<double>(length));
  if (total > kEnumerationLimit) {
    throw std::length_error("enumerate_paths: " + std::to_string(n_states) + "^" + std::to_string(length) +
                            " paths exceed the enumeration limit");
  }
  std::vector<EnumeratedPath> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<State> path(length, 0);
  for (;;) {
    const double lp = chain.log_probability(path);
    out.push_back({path, std::exp(lp), lp});
    // Odometer increment, last coordinate fastest.
    std::size_t k = length;
    while (k > 0) {
      --k;
      if (++path[k] < n_states) break;
      path[k] = 0;
      if (k == 0) return out;
    }
  }
}

namespace {

struct Cluster {
  double value;  // mass-weighted mean
  double mass;
};

// Sorted (value, mass) pairs merged while within tol of the cluster's first value.
std::vector<Cluster> cluster_values(std::vector<std::pair<double, double>> items, double tol) {
  std::sort(items.begin(), items.end());
  std::vector<Cluster> out;
  std::size_t i = 0;
  while (i < items.size()) {
    const double anchor = items[i].first;
    double mass = 0.0;
    double weighted = 0.0;
    while (i < items.size() && items[i].first - anchor <= tol) {
      mass += items[i].second;
      weighted += items[i].first * items[i].second;
      ++i;
    }
    out.push_back({mass > 0.0 ? weighted / mass : anchor, mass});
  }
  return out;
}

}  // namespace

ExactReport exact_verify(const DiscreteChain& p, const DiscreteChain& q, const CoordinatePermutation& sigma,
                         const ExactOptions& options) {
  if (p.num_states() != q.num_states() || p.steps() != q.steps()) {
    throw std::invalid_argument("exact_verify: chains differ in N or n");
  }
  if (!p.strictly_positive() || !q.strictly_positive()) {
    throw std::invalid_argument("exact_verify: both chains must be strictly positive");
  }
  if (sigma.sigma().size() != p.steps() + 1) throw std::invalid_argument("exact_verify: σ has wrong length");

  const auto paths_p = enumerate_paths(p);
  const auto paths_q = enumerate_paths(q);
  const auto sigma_inv = sigma.inverse();

  std::vector<double> sp(paths_p.size());
  std::vector<double> sq(paths_q.size());
  for (std::size_t i = 0; i < paths_p.size(); ++i) {
    sp[i] = paths_p[i].log_probability - q.log_probability(sigma.apply(paths_p[i].states));
  }
  for (std::size_t i = 0; i < paths_q.size(); ++i) {
    sq[i] = paths_q[i].log_probability - p.log_probability(sigma_inv.apply(paths_q[i].states));
  }

  ExactReport report{};
  {
    std::vector<std::pair<double, double>> items_p;
    std::vector<std::pair<double, double>> items_q;
    for (std::size_t i = 0; i < sp.size(); ++i) items_p.emplace_back(sp[i], paths_p[i].probability);
    // Law of -S_Q under Q, so matching is by equal value.
    for (std::size_t i = 0; i < sq.size(); ++i) items_q.emplace_back(-sq[i], paths_q[i].probability);
    const auto cp = cluster_values(std::move(items_p), options.cluster_tol);
    const auto cq = cluster_values(std::move(items_q), options.cluster_tol);

    std::vector<bool> used(cq.size(), false);
    report.corollary_pass = true;
    for (const auto& c : cp) {
      const auto it = std::lower_bound(cq.begin(), cq.end(), c.value - options.cluster_tol,
                                       [](const Cluster& a, double v) { return a.value < v; });
      double qm = 0.0;
      if (it != cq.end() && std::abs(it->value - c.value) <= options.cluster_tol) {
        qm = it->mass;
        used[static_cast<std::size_t>(it - cq.begin())] = true;
      }
      const double rel = std::abs(c.mass - std::exp(c.value) * qm) / c.mass;
      const bool ok = rel <= options.corollary_rel_tol;
      report.corollary_pass = report.corollary_pass && ok;
      report.support.push_back({c.value, c.mass, qm, rel, ok});
    }
    report.unmatched_q_points = static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
    if (report.unmatched_q_points > 0) report.corollary_pass = false;
  }

  report.mgf_pass = true;
  for (double lambda : options.lambdas) {
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t i = 0; i < sp.size(); ++i) lhs += paths_p[i].probability * std::exp(lambda * sp[i]);
    for (std::size_t i = 0; i < sq.size(); ++i) {
      rhs += paths_q[i].probability * std::exp(-(1.0 + lambda) * sq[i]);
    }
    const bool ok = std::abs(lhs - rhs) <= options.mgf_rel_tol * std::max(std::abs(lhs), std::abs(rhs));
    report.mgf_pass = report.mgf_pass && ok;
    report.mgf.push_back({lambda, lhs, rhs, ok});
  }

  double ft = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) ft += paths_p[i].probability * std::exp(-sp[i]);
  report.integral_ft = ft;
  report.integral_ft_pass = std::abs(ft - 1.0) <= options.integral_ft_tol;
  return report;
}

nlohmann::json to_json(const ExactReport& report) {
  nlohmann::json support = nlohmann::json::array();
  for (const auto& s : report.support) {
    support.push_back({{"value", s.value},
                       {"p_mass", s.p_mass},
                       {"q_mass", s.q_mass},
                       {"rel_error", s.rel_error},
                       {"pass", s.pass}});
  }
  nlohmann::json points = nlohmann::json::array();
  bool all = true;
  for (const auto& m : report.mgf) {
    points.push_back({{"lambda", m.lambda},
                      {"lhs", m.lhs},
                      {"lhs_se", 0.0},
                      {"rhs", m.rhs},
                      {"rhs_se", 0.0},
                      {"pass", m.pass}});
    all = all && m.pass;
  }
  return {{"support", support},
          {"unmatched_q_points", report.unmatched_q_points},
          {"corollary_pass", report.corollary_pass},
          {"mgf", {{"points", points}, {"pass", all}}},
          {"integral_ft", {{"estimate", report.integral_ft}, {"se", 0.0}, {"pass", report.integral_ft_pass}}},
          {"pass", report.pass()}};
}

}  // namespace tft
