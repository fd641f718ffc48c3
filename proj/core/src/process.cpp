#include "tft/process.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "interval.hpp"

namespace tft {

namespace {

void check_breakpoints(const std::vector<double>& breakpoints, const char* who) {
  if (breakpoints.size() < 2) {
    throw std::invalid_argument(std::string(who) + ": need at least two breakpoints");
  }
  if (breakpoints.front() != 0.0) {
    throw std::invalid_argument(std::string(who) + ": first breakpoint must be 0");
  }
  for (std::size_t k = 1; k < breakpoints.size(); ++k) {
    if (!(breakpoints[k] > breakpoints[k - 1]) || !std::isfinite(breakpoints[k])) {
      throw std::invalid_argument(std::string(who) + ": breakpoints must be finite and strictly increasing");
    }
  }
}

Adjacency positivity_pattern(const RateMatrix& rates) {
  const auto n = rates.rows();
  Adjacency pattern = Adjacency::Constant(n, n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && rates(i, j) > 0.0) pattern(i, j) = true;
    }
  }
  return pattern;
}

// Validates one rate matrix and zeroes its diagonal.
RateMatrix sanitize_rates(RateMatrix rates, std::size_t n, const char* who) {
  if (static_cast<std::size_t>(rates.rows()) != n || static_cast<std::size_t>(rates.cols()) != n) {
    throw std::invalid_argument(std::string(who) + ": rate matrix has wrong shape");
  }
  for (Eigen::Index i = 0; i < rates.rows(); ++i) {
    rates(i, i) = 0.0;
    for (Eigen::Index j = 0; j < rates.cols(); ++j) {
      if (!std::isfinite(rates(i, j)) || rates(i, j) < 0.0) {
        throw std::invalid_argument(std::string(who) + ": rates must be finite and nonnegative");
      }
    }
  }
  return rates;
}

}  // namespace

// ---------------------------------------------------------------- StateSpace

StateSpace::StateSpace(Kind kind, std::size_t size, std::vector<std::string> labels)
    : kind_(kind), size_(size), labels_(std::move(labels)) {}

StateSpace StateSpace::finite(std::size_t size, std::vector<std::string> labels) {
  if (size < 2) throw std::invalid_argument("StateSpace: finite space needs at least 2 states");
  if (!labels.empty() && labels.size() != size) {
    throw std::invalid_argument("StateSpace: label count does not match size");
  }
  return StateSpace(Kind::Finite, size, std::move(labels));
}

StateSpace StateSpace::nonnegative_integers() {
  return StateSpace(Kind::NonnegativeIntegers, 0, {});
}

std::size_t StateSpace::size() const {
  if (!is_finite()) throw std::logic_error("StateSpace: countable space has no finite size");
  return size_;
}

// -------------------------------------------------------------- RateProtocol

RateProtocol RateProtocol::piecewise_constant(std::vector<double> breakpoints,
                                              std::vector<RateMatrix> rates) {
  check_breakpoints(breakpoints, "RateProtocol");
  if (rates.size() + 1 != breakpoints.size()) {
    throw std::invalid_argument("RateProtocol: need one rate matrix per interval");
  }
  RateProtocol p;
  p.num_states_ = static_cast<std::size_t>(rates.front().rows());
  if (p.num_states_ < 2) throw std::invalid_argument("RateProtocol: need at least 2 states");
  p.horizon_ = breakpoints.back();
  for (auto& m : rates) m = sanitize_rates(std::move(m), p.num_states_, "RateProtocol");
  p.support_ = positivity_pattern(rates.front());
  for (const auto& m : rates) {
    if (positivity_pattern(m) != p.support_) {
      throw std::invalid_argument("RateProtocol: rate support changes with time");
    }
    p.rate_bound_ = std::max(p.rate_bound_, m.maxCoeff());
  }
  p.breakpoints_ = std::move(breakpoints);
  p.interval_rates_ = std::move(rates);
  return p;
}

RateProtocol RateProtocol::constant(const RateMatrix& rates, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("RateProtocol: horizon must be positive");
  return piecewise_constant({0.0, horizon}, {rates});
}

RateProtocol RateProtocol::functional(std::size_t num_states, double horizon, Evaluator rates,
                                      double rate_bound, std::size_t validation_points) {
  if (num_states < 2) throw std::invalid_argument("RateProtocol: need at least 2 states");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("RateProtocol: horizon must be positive");
  }
  if (!rates) throw std::invalid_argument("RateProtocol: missing rate evaluator");
  if (!(rate_bound > 0.0) || !std::isfinite(rate_bound)) {
    throw std::invalid_argument("RateProtocol: rate bound must be positive and finite");
  }
  validation_points = std::max<std::size_t>(validation_points, 2);
  RateProtocol p;
  p.num_states_ = num_states;
  p.horizon_ = horizon;
  p.rate_bound_ = rate_bound;
  for (std::size_t g = 0; g < validation_points; ++g) {
    const double s = horizon * static_cast<double>(g) / static_cast<double>(validation_points - 1);
    const RateMatrix m = sanitize_rates(rates(s), num_states, "RateProtocol");
    if (g == 0) {
      p.support_ = positivity_pattern(m);
    } else if (positivity_pattern(m) != p.support_) {
      throw std::invalid_argument("RateProtocol: rate support changes with time");
    }
    if (m.maxCoeff() > rate_bound) {
      throw std::invalid_argument("RateProtocol: rate bound violated at s = " + std::to_string(s));
    }
  }
  p.evaluator_ = std::move(rates);
  return p;
}

std::size_t RateProtocol::interval_index(double s) const {
  if (!is_piecewise_constant()) throw std::logic_error("RateProtocol: not piecewise constant");
  return detail::locate_interval(breakpoints_, s);
}

const std::vector<double>& RateProtocol::breakpoints() const {
  if (!is_piecewise_constant()) throw std::logic_error("RateProtocol: not piecewise constant");
  return breakpoints_;
}

const std::vector<RateMatrix>& RateProtocol::interval_rates() const {
  if (!is_piecewise_constant()) throw std::logic_error("RateProtocol: not piecewise constant");
  return interval_rates_;
}

RateMatrix RateProtocol::rates_at(double s) const {
  if (is_piecewise_constant()) return interval_rates_[interval_index(s)];
  RateMatrix m = evaluator_(s);
  m.diagonal().setZero();
  return m;
}

double RateProtocol::rate(State from, State to, double s) const {
  if (from >= num_states_ || to >= num_states_) throw std::out_of_range("RateProtocol: state out of range");
  if (from == to) return 0.0;
  if (is_piecewise_constant()) return interval_rates_[interval_index(s)](from, to);
  return evaluator_(s)(from, to);
}

double RateProtocol::exit_rate(State from, double s) const {
  if (from >= num_states_) throw std::out_of_range("RateProtocol: state out of range");
  const RateMatrix m = rates_at(s);
  return m.row(static_cast<Eigen::Index>(from)).sum();
}

double RateProtocol::integrated_exit_rate(State from, double a, double b) const {
  if (from >= num_states_) throw std::out_of_range("RateProtocol: state out of range");
  if (b < a) throw std::invalid_argument("RateProtocol: integration bounds reversed");
  if (b == a) return 0.0;
  if (is_piecewise_constant()) {
    double total = 0.0;
    const auto row = static_cast<Eigen::Index>(from);
    for (std::size_t k = interval_index(a); k < interval_rates_.size(); ++k) {
      const double lo = std::max(a, breakpoints_[k]);
      const double hi = std::min(b, breakpoints_[k + 1]);
      if (hi > lo) total += interval_rates_[k].row(row).sum() * (hi - lo);
      if (breakpoints_[k + 1] >= b) break;
    }
    return total;
  }
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  const auto f = [&](double s) { return exit_rate(from, s); };
  // A single rule already meets the target on most holding intervals; the
  // adaptive pass is kept for long or sharply varying ones.
  double error = 0.0;
  double value = Rule::integrate(f, a, b, 0, 0.0, &error);
  if (error <= 1e-11) return value;
  value = Rule::integrate(f, a, b, 15, 1e-11, &error);
  if (!(error <= 1e-10)) {
    throw ToleranceError("integrated_exit_rate: quadrature error estimate " + std::to_string(error));
  }
  return value;
}

// ------------------------------------------------------- InitialDistribution

InitialDistribution::InitialDistribution(Eigen::VectorXd masses) : masses_(std::move(masses)) {
  if (masses_.size() == 0) throw std::invalid_argument("InitialDistribution: empty");
  for (Eigen::Index i = 0; i < masses_.size(); ++i) {
    if (!std::isfinite(masses_[i]) || masses_[i] < 0.0) {
      throw std::invalid_argument("InitialDistribution: masses must be finite and nonnegative");
    }
  }
  if (std::abs(masses_.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("InitialDistribution: masses must sum to 1");
  }
}

double InitialDistribution::mass(State x) const {
  if (x >= size()) throw std::out_of_range("InitialDistribution: state out of range");
  return masses_[static_cast<Eigen::Index>(x)];
}

double InitialDistribution::log_mass(State x) const { return std::log(mass(x)); }

bool InitialDistribution::strictly_positive() const noexcept { return masses_.minCoeff() > 0.0; }

// --------------------------------------------------------------- Hamiltonian

Hamiltonian Hamiltonian::piecewise_constant(std::vector<double> breakpoints,
                                            std::vector<Eigen::VectorXd> energies, double beta) {
  check_breakpoints(breakpoints, "Hamiltonian");
  if (energies.size() + 1 != breakpoints.size()) {
    throw std::invalid_argument("Hamiltonian: need one energy vector per interval");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("Hamiltonian: beta must be finite and nonnegative");
  }
  Hamiltonian h;
  h.num_states_ = static_cast<std::size_t>(energies.front().size());
  if (h.num_states_ < 2) throw std::invalid_argument("Hamiltonian: need at least 2 states");
  for (const auto& e : energies) {
    if (static_cast<std::size_t>(e.size()) != h.num_states_) {
      throw std::invalid_argument("Hamiltonian: energy vectors differ in length");
    }
    if (!e.allFinite()) throw std::invalid_argument("Hamiltonian: energies must be finite");
    h.max_gap_ = std::max(h.max_gap_, e.maxCoeff() - e.minCoeff());
  }
  h.horizon_ = breakpoints.back();
  h.beta_ = beta;
  h.breakpoints_ = std::move(breakpoints);
  h.energies_ = std::move(energies);
  return h;
}

Hamiltonian Hamiltonian::constant(Eigen::VectorXd energies, double beta, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("Hamiltonian: horizon must be positive");
  return piecewise_constant({0.0, horizon}, {std::move(energies)}, beta);
}

Hamiltonian Hamiltonian::functional(std::size_t num_states, double horizon, Evaluator energy,
                                    double beta, double max_gap) {
  if (num_states < 2) throw std::invalid_argument("Hamiltonian: need at least 2 states");
  if (!(horizon > 0.0)) throw std::invalid_argument("Hamiltonian: horizon must be positive");
  if (!energy) throw std::invalid_argument("Hamiltonian: missing energy evaluator");
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("Hamiltonian: beta must be finite and nonnegative");
  }
  if (!(max_gap >= 0.0) || !std::isfinite(max_gap)) {
    throw std::invalid_argument("Hamiltonian: max_gap must be finite and nonnegative");
  }
  Hamiltonian h;
  h.num_states_ = num_states;
  h.horizon_ = horizon;
  h.beta_ = beta;
  h.max_gap_ = max_gap;
  h.breakpoints_ = {0.0, horizon};
  h.evaluator_ = std::move(energy);
  return h;
}

double Hamiltonian::energy(State x, double s) const {
  if (x >= num_states_) throw std::out_of_range("Hamiltonian: state out of range");
  const double e = is_piecewise_constant()
                       ? energies_[detail::locate_interval(breakpoints_, s)][static_cast<Eigen::Index>(x)]
                       : evaluator_(x, s);
  if (!std::isfinite(e)) throw std::domain_error("Hamiltonian: non-finite energy");
  return e;
}

Eigen::VectorXd Hamiltonian::energies_at(double s) const {
  if (is_piecewise_constant()) return energies_[detail::locate_interval(breakpoints_, s)];
  Eigen::VectorXd e(static_cast<Eigen::Index>(num_states_));
  for (std::size_t x = 0; x < num_states_; ++x) e[static_cast<Eigen::Index>(x)] = energy(x, s);
  return e;
}

// ------------------------------------------------------------ ProcessMeasure

ProcessMeasure::ProcessMeasure(StateSpace space, RateProtocol protocol, InitialDistribution initial)
    : space_(std::move(space)), protocol_(std::move(protocol)), initial_(std::move(initial)) {
  if (!space_.is_finite()) {
    throw std::invalid_argument("ProcessMeasure: general CTMC machinery needs a finite state space");
  }
  if (space_.size() != protocol_.num_states() || initial_.size() != protocol_.num_states()) {
    throw std::invalid_argument("ProcessMeasure: state space, protocol and initial law disagree in size");
  }
}

// ----------------------------------------------------------------- operations

RateProtocol protocol_reverse(const RateProtocol& protocol) {
  const double horizon = protocol.horizon();
  if (protocol.is_piecewise_constant()) {
    const auto& b = protocol.breakpoints();
    const auto& rates = protocol.interval_rates();
    const std::size_t m = rates.size();
    std::vector<double> reflected(m + 1);
    std::vector<RateMatrix> reordered(m);
    reflected[0] = 0.0;
    reflected[m] = horizon;
    for (std::size_t k = 1; k < m; ++k) reflected[k] = horizon - b[m - k];
    for (std::size_t k = 0; k < m; ++k) reordered[k] = rates[m - 1 - k];
    return RateProtocol::piecewise_constant(std::move(reflected), std::move(reordered));
  }
  auto inner = protocol.evaluator();
  return RateProtocol::functional(
      protocol.num_states(), horizon,
      [inner, horizon](double s) { return inner(horizon - s); }, protocol.rate_bound());
}

RateProtocol build_ldb_protocol(const Hamiltonian& hamiltonian, double base_rate,
                                const StateSpace& space, double horizon,
                                const Adjacency& connectivity) {
  if (!space.is_finite()) throw std::invalid_argument("build_ldb_protocol: finite state space required");
  const std::size_t n = space.size();
  if (hamiltonian.num_states() != n) {
    throw std::invalid_argument("build_ldb_protocol: Hamiltonian and state space disagree in size");
  }
  if (hamiltonian.horizon() != horizon) {
    throw std::invalid_argument("build_ldb_protocol: Hamiltonian horizon differs from protocol horizon");
  }
  if (!(base_rate > 0.0) || !std::isfinite(base_rate)) {
    throw std::invalid_argument("build_ldb_protocol: base rate must be positive");
  }
  const double beta = hamiltonian.beta();
  if (!(beta >= 0.0)) throw std::invalid_argument("build_ldb_protocol: beta must be nonnegative");

  Adjacency graph = connectivity;
  if (graph.size() == 0) {
    graph = Adjacency::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), true);
  }
  if (static_cast<std::size_t>(graph.rows()) != n || static_cast<std::size_t>(graph.cols()) != n) {
    throw std::invalid_argument("build_ldb_protocol: connectivity has wrong shape");
  }
  for (std::size_t i = 0; i < n; ++i) {
    graph(i, i) = false;
    for (std::size_t j = 0; j < i; ++j) {
      if (graph(i, j) != graph(j, i)) {
        throw std::invalid_argument("build_ldb_protocol: connectivity must be symmetric");
      }
    }
  }

  auto rates_for = [graph, base_rate, beta, n](const Eigen::VectorXd& energies) {
    if (!energies.allFinite()) throw std::invalid_argument("build_ldb_protocol: non-finite energies");
    RateMatrix k = RateMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (graph(i, j)) k(i, j) = base_rate * std::exp(-0.5 * beta * (energies[j] - energies[i]));
      }
    }
    return k;
  };

  if (hamiltonian.is_piecewise_constant()) {
    const auto& b = hamiltonian.breakpoints();
    std::vector<RateMatrix> rates;
    rates.reserve(b.size() - 1);
    for (std::size_t k = 0; k + 1 < b.size(); ++k) rates.push_back(rates_for(hamiltonian.energies_at(b[k])));
    return RateProtocol::piecewise_constant(b, std::move(rates));
  }
  const double bound = base_rate * std::exp(0.5 * beta * hamiltonian.max_gap());
  return RateProtocol::functional(
      n, horizon, [hamiltonian, rates_for](double s) { return rates_for(hamiltonian.energies_at(s)); },
      bound * (1.0 + 1e-12));
}

GibbsState gibbs_distribution(const Hamiltonian& hamiltonian, double s) {
  const Eigen::VectorXd exponent = -hamiltonian.beta() * hamiltonian.energies_at(s);
  const double shift = exponent.maxCoeff();
  const Eigen::VectorXd weights = (exponent.array() - shift).exp().matrix();
  const double total = weights.sum();
  Eigen::VectorXd masses = weights / total;
  masses /= masses.sum();
  return GibbsState{InitialDistribution(std::move(masses)), shift + std::log(total)};
}

bool matches_gibbs(const InitialDistribution& distribution, const Hamiltonian& hamiltonian, double s,
                   double tol) {
  if (distribution.size() != hamiltonian.num_states()) return false;
  const auto gibbs = gibbs_distribution(hamiltonian, s);
  return (gibbs.distribution.masses() - distribution.masses()).cwiseAbs().maxCoeff() <= tol;
}

Eigen::MatrixXd generator(const RateMatrix& rates) {
  Eigen::MatrixXd g = rates;
  g.diagonal().setZero();
  for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, i) = -g.row(i).sum();
  return g;
}

InitialDistribution stationary_distribution(const RateMatrix& rates) {
  const Eigen::MatrixXd g = generator(rates);
  const auto n = g.rows();
  Eigen::MatrixXd a = g.transpose();
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  return InitialDistribution(std::move(pi));
}

namespace {

Eigen::VectorXd clamp_and_normalize(Eigen::VectorXd v) {
  v = v.cwiseMax(0.0);
  const double total = v.sum();
  if (!(total > 0.0) || !std::isfinite(total)) throw ToleranceError("evolve_law: probability mass lost");
  return v / total;
}

Eigen::VectorXd evolve_functional(const RateProtocol& protocol, Eigen::VectorXd law, double target) {
  namespace odeint = boost::numeric::odeint;
  using Vec = std::vector<double>;
  const std::size_t n = protocol.num_states();
  auto rhs = [&protocol, n](const Vec& x, Vec& dxdt, double s) {
    const Eigen::MatrixXd g = generator(protocol.rates_at(s));
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += x[i] * g(i, j);
      dxdt[j] = acc;
    }
  };
  auto stepper = odeint::make_controlled(1e-10, 0.0, odeint::runge_kutta_dopri5<Vec>());
  Vec x(law.data(), law.data() + law.size());
  double s = 0.0;
  double dt = std::min(1e-3, target);
  std::size_t attempts = 0;
  while (s < target) {
    if (++attempts > 10'000'000) throw ToleranceError("evolve_law: step budget exhausted");
    if (s + dt > target) dt = target - s;
    if (stepper.try_step(rhs, x, s, dt) == odeint::success) {
      double total = 0.0;
      for (auto& v : x) total += (v = std::max(v, 0.0));
      for (auto& v : x) v /= total;
    } else if (dt < 1e-14 * std::max(1.0, target)) {
      throw ToleranceError("evolve_law: step size underflow at s = " + std::to_string(s));
    }
  }
  return Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n));
}

}  // namespace

InitialDistribution evolve_law(const ProcessMeasure& measure, double s) {
  const auto& protocol = measure.protocol();
  if (!(s >= 0.0) || s > protocol.horizon()) {
    throw std::invalid_argument("evolve_law: time outside [0, T]");
  }
  Eigen::VectorXd law = measure.initial().masses();
  if (s == 0.0) return InitialDistribution(law);
  if (protocol.is_piecewise_constant()) {
    const auto& b = protocol.breakpoints();
    const auto& rates = protocol.interval_rates();
    Eigen::RowVectorXd row = law.transpose();
    for (std::size_t k = 0; k < rates.size() && b[k] < s; ++k) {
      const double length = std::min(s, b[k + 1]) - b[k];
      const Eigen::MatrixXd propagator = (generator(rates[k]) * length).exp();
      row = row * propagator;
    }
    law = row.transpose();
  } else {
    law = evolve_functional(protocol, std::move(law), s);
  }
  return InitialDistribution(clamp_and_normalize(std::move(law)));
}

}  // namespace tft
