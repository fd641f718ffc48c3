#include "tft/likelihood.hpp"

#include <cmath>
#include <stdexcept>

namespace tft {

double log_path_density(const ProcessMeasure& measure, const JumpPath& path) {
  const auto& protocol = measure.protocol();
  if (path.horizon() != protocol.horizon()) {
    throw std::invalid_argument("log_path_density: path horizon differs from measure horizon");
  }
  const std::size_t n = protocol.num_states();
  const State x0 = path.initial_state();
  if (x0 >= n) throw std::invalid_argument("log_path_density: state out of range");
  const double m0 = measure.initial().mass(x0);
  if (!(m0 > 0.0)) throw SupportError("log_path_density: zero initial mass at state " + std::to_string(x0));

  double value = std::log(m0);
  State state = x0;
  double clock = 0.0;
  for (const auto& jump : path.jumps()) {
    if (jump.target >= n) throw std::invalid_argument("log_path_density: state out of range");
    value -= protocol.integrated_exit_rate(state, clock, jump.time);
    const double k = protocol.rate(state, jump.target, jump.time);
    if (!(k > 0.0)) {
      throw SupportError("log_path_density: zero rate " + std::to_string(state) + " -> " +
                         std::to_string(jump.target));
    }
    value += std::log(k);
    state = jump.target;
    clock = jump.time;
  }
  value -= protocol.integrated_exit_rate(state, clock, protocol.horizon());
  return value;
}

Score score(const ProcessMeasure& p, const ProcessMeasure& q, const PathTransform& transform,
            const JumpPath& path, Direction direction) {
  if (p.num_states() != q.num_states() || p.horizon() != q.horizon()) {
    throw std::invalid_argument("score: P and Q must share state space and horizon");
  }
  const bool forward = direction == Direction::Forward;
  const ProcessMeasure& own = forward ? p : q;
  const ProcessMeasure& other = forward ? q : p;
  const JumpPath image = forward ? apply_transform(transform, path)
                                 : apply_transform(invert_transform(transform).inverse, path);
  double own_density = 0.0;
  double other_density = 0.0;
  try {
    own_density = log_path_density(own, path);
    other_density = log_path_density(other, image);
  } catch (const SupportError& e) {
    throw EquivalenceError(std::string("score: equivalence failure: ") + e.what(), format_path(path));
  }
  const double boundary = own.initial().log_mass(path.initial_state()) -
                          other.initial().log_mass(image.initial_state());
  const double value = own_density - other_density;
  return Score{value, direction, boundary, value - boundary};
}

double heat_dissipation(const ProcessMeasure& measure, const JumpPath& path) {
  const auto& protocol = measure.protocol();
  double heat = 0.0;
  State state = path.initial_state();
  for (const auto& jump : path.jumps()) {
    const double there = protocol.rate(state, jump.target, jump.time);
    const double back = protocol.rate(jump.target, state, jump.time);
    if (!(there > 0.0) || !(back > 0.0)) {
      throw SupportError("heat_dissipation: zero rate on the transition " + std::to_string(state) +
                         " <-> " + std::to_string(jump.target));
    }
    heat += std::log(there) - std::log(back);
    state = jump.target;
  }
  return heat;
}

ProcessMeasure bc1_reversed_measure(const ProcessMeasure& forward) {
  return ProcessMeasure(forward.space(), protocol_reverse(forward.protocol()),
                        evolve_law(forward, forward.horizon()));
}

ProcessMeasure bc1_reversed_measure_empirical(const ProcessMeasure& forward,
                                              std::span<const JumpPath> forward_paths) {
  if (forward_paths.empty()) throw std::invalid_argument("bc1_reversed_measure_empirical: no paths");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(forward.num_states()));
  for (const auto& path : forward_paths) counts[static_cast<Eigen::Index>(path.final_state())] += 1.0;
  if (counts.minCoeff() <= 0.0) {
    throw std::invalid_argument("bc1_reversed_measure_empirical: some state never observed at T");
  }
  counts /= counts.sum();
  return ProcessMeasure(forward.space(), protocol_reverse(forward.protocol()),
                        InitialDistribution(std::move(counts)));
}

bool satisfies_ldb(const RateProtocol& protocol, const Hamiltonian& hamiltonian, double tol) {
  if (protocol.num_states() != hamiltonian.num_states()) return false;
  std::vector<double> times;
  if (protocol.is_piecewise_constant()) {
    const auto& b = protocol.breakpoints();
    for (std::size_t k = 0; k + 1 < b.size(); ++k) times.push_back(0.5 * (b[k] + b[k + 1]));
  } else {
    for (int g = 0; g <= 64; ++g) times.push_back(protocol.horizon() * g / 64.0);
  }
  for (const auto& hb : hamiltonian.breakpoints()) {
    if (hb > 0.0 && hb < protocol.horizon()) times.push_back(hb);
  }
  const double beta = hamiltonian.beta();
  const std::size_t n = protocol.num_states();
  for (double s : times) {
    const RateMatrix k = protocol.rates_at(s);
    const Eigen::VectorXd h = hamiltonian.energies_at(s);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (k(i, j) == 0.0 && k(j, i) == 0.0) continue;
        if (k(i, j) <= 0.0 || k(j, i) <= 0.0) return false;
        const double mismatch = std::log(k(i, j) / k(j, i)) + beta * (h[j] - h[i]);
        if (std::abs(mismatch) > tol) return false;
      }
    }
  }
  return true;
}

ProcessMeasure bc2_reversed_measure(const ProcessMeasure& forward, const Hamiltonian& hamiltonian) {
  if (!matches_gibbs(forward.initial(), hamiltonian, 0.0, 1e-10)) {
    throw std::invalid_argument("BC2 violated: forward initial law is not Gibbs at s = 0");
  }
  if (!satisfies_ldb(forward.protocol(), hamiltonian)) {
    throw std::invalid_argument("BC2 requires rates obeying local detailed balance for the Hamiltonian");
  }
  return ProcessMeasure(forward.space(), protocol_reverse(forward.protocol()),
                        gibbs_distribution(hamiltonian, forward.horizon()).distribution);
}

Score entropy_production(const ProcessMeasure& forward, const JumpPath& path) {
  return entropy_production(forward, bc1_reversed_measure(forward), path);
}

Score entropy_production(const ProcessMeasure& forward, const ProcessMeasure& reversed,
                         const JumpPath& path) {
  const Score s = score(forward, reversed, PathTransform::time_reversal(), path, Direction::Forward);
  // ΔS = log μ(x0, 0) - log μ(x_T, T), with μ(·, T) the reversed measure's start.
  const double delta_s = forward.initial().log_mass(path.initial_state()) -
                         reversed.initial().log_mass(path.final_state());
  return Score{s.value, Direction::Forward, delta_s, heat_dissipation(forward, path)};
}

Score dissipated_work(const ProcessMeasure& forward, const Hamiltonian& hamiltonian,
                      const JumpPath& path) {
  return dissipated_work(forward, bc2_reversed_measure(forward, hamiltonian), hamiltonian, path);
}

Score dissipated_work(const ProcessMeasure& forward, const ProcessMeasure& reversed,
                      const Hamiltonian& hamiltonian, const JumpPath& path) {
  const Score s = score(forward, reversed, PathTransform::time_reversal(), path, Direction::Forward);
  const double horizon = forward.horizon();
  const double beta = hamiltonian.beta();
  const double log_z0 = gibbs_distribution(hamiltonian, 0.0).log_partition;
  const double log_zt = gibbs_distribution(hamiltonian, horizon).log_partition;
  // βΔH - βΔF
  const double boundary = beta * (hamiltonian.energy(path.final_state(), horizon) -
                                  hamiltonian.energy(path.initial_state(), 0.0)) +
                          log_zt - log_z0;
  return Score{s.value, Direction::Forward, boundary, heat_dissipation(forward, path)};
}

}  // namespace tft
