#include "tft/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tft/parallel.hpp"

namespace tft {

// ------------------------------------------------------------------ JumpPath

JumpPath::JumpPath(State initial, std::vector<Jump> jumps, double horizon)
    : initial_(initial), jumps_(std::move(jumps)), horizon_(horizon) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw std::invalid_argument("JumpPath: horizon must be positive and finite");
  }
  double previous = 0.0;
  State state = initial_;
  for (const auto& jump : jumps_) {
    if (!(jump.time > previous) || !(jump.time < horizon_)) {
      throw std::invalid_argument("JumpPath: jump times must satisfy 0 < t_1 < ... < t_n < T");
    }
    if (jump.target == state) throw std::invalid_argument("JumpPath: consecutive states must differ");
    previous = jump.time;
    state = jump.target;
  }
}

State JumpPath::state_at(double s) const {
  if (s < 0.0 || s > horizon_) throw std::out_of_range("JumpPath: time outside [0, T]");
  const auto it = std::upper_bound(jumps_.begin(), jumps_.end(), s,
                                   [](double t, const Jump& j) { return t < j.time; });
  return it == jumps_.begin() ? initial_ : std::prev(it)->target;
}

std::vector<State> JumpPath::skeleton() const {
  std::vector<State> states;
  states.reserve(jumps_.size() + 1);
  states.push_back(initial_);
  for (const auto& j : jumps_) states.push_back(j.target);
  return states;
}

std::vector<double> JumpPath::holding_durations() const {
  std::vector<double> d;
  d.reserve(jumps_.size() + 1);
  double previous = 0.0;
  for (const auto& j : jumps_) {
    d.push_back(j.time - previous);
    previous = j.time;
  }
  d.push_back(horizon_ - previous);
  return d;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string format_path(const JumpPath& path) {
  std::string out = std::to_string(path.initial_state());
  out += ' ';
  append_double(out, path.horizon());
  out += ' ';
  out += std::to_string(path.jump_count());
  for (const auto& j : path.jumps()) {
    out += ' ';
    append_double(out, j.time);
    out += ' ';
    out += std::to_string(j.target);
  }
  return out;
}

JumpPath parse_path(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    if (end > pos) tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  auto parse_number = [](std::string_view token, auto& value) {
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      throw std::invalid_argument("parse_path: malformed token '" + std::string(token) + "'");
    }
  };
  if (tokens.size() < 3) throw std::invalid_argument("parse_path: expected `x0 T n ...`");
  State x0 = 0;
  double horizon = 0.0;
  std::size_t n = 0;
  parse_number(tokens[0], x0);
  parse_number(tokens[1], horizon);
  parse_number(tokens[2], n);
  if (tokens.size() != 3 + 2 * n) throw std::invalid_argument("parse_path: jump count mismatch");
  std::vector<Jump> jumps(n);
  for (std::size_t i = 0; i < n; ++i) {
    parse_number(tokens[3 + 2 * i], jumps[i].time);
    parse_number(tokens[4 + 2 * i], jumps[i].target);
  }
  return JumpPath(x0, std::move(jumps), horizon);
}

// -------------------------------------------------------------- SeededStream

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t index, std::uint64_t domain) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  return std::seed_seq{lo(seed), hi(seed), lo(index), hi(index), lo(domain), hi(domain)};
}

}  // namespace

SeededStream::SeededStream(std::uint64_t seed, std::uint64_t index, std::uint64_t domain) {
  auto seq = make_seed_seq(seed, index, domain);
  engine_.seed(seq);
}

double SeededStream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double SeededStream::exponential() { return -std::log(uniform()); }

// ------------------------------------------------------------------ sampling

namespace {

State draw_categorical(const Eigen::VectorXd& weights, double total, double u) {
  const double target = u * total;
  double acc = 0.0;
  State last_positive = 0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = static_cast<State>(i);
    acc += weights[i];
    if (target < acc) return last_positive;
  }
  return last_positive;
}

State draw_initial(const InitialDistribution& initial, SeededStream& stream) {
  return draw_categorical(initial.masses(), 1.0, stream.uniform());
}

// Keeps the jump strictly inside (previous, limit).
double nudge_into(double t, double previous, double limit) {
  if (t >= limit) t = std::nextafter(limit, previous);
  if (t <= previous) t = std::nextafter(previous, limit);
  return t;
}

JumpPath sample_by_inversion(const ProcessMeasure& measure, SeededStream& stream) {
  const auto& protocol = measure.protocol();
  const auto& b = protocol.breakpoints();
  const auto& rates = protocol.interval_rates();
  const std::size_t intervals = rates.size();

  State x = draw_initial(measure.initial(), stream);
  const State x0 = x;
  std::vector<Jump> jumps;
  double s = 0.0;
  std::size_t k = 0;
  while (k < intervals) {
    // Invert ∫_s^t Λ_x(u) du = E across intervals.
    double budget = stream.exponential();
    double t = 0.0;
    bool jumped = false;
    while (k < intervals) {
      const double exit = rates[k].row(static_cast<Eigen::Index>(x)).sum();
      const double room = b[k + 1] - s;
      if (exit > 0.0 && budget < exit * room) {
        t = nudge_into(s + budget / exit, s, b[k + 1]);
        jumped = true;
        break;
      }
      budget -= exit * room;
      s = b[k + 1];
      ++k;
    }
    if (!jumped) break;
    const Eigen::VectorXd row = rates[k].row(static_cast<Eigen::Index>(x)).transpose();
    x = draw_categorical(row, row.sum(), stream.uniform());
    jumps.push_back({t, x});
    s = t;
  }
  return JumpPath(x0, std::move(jumps), protocol.horizon());
}

JumpPath sample_by_thinning(const ProcessMeasure& measure, SeededStream& stream) {
  const auto& protocol = measure.protocol();
  const double horizon = protocol.horizon();
  const double envelope = protocol.rate_bound() * static_cast<double>(protocol.num_states() - 1);

  State x = draw_initial(measure.initial(), stream);
  const State x0 = x;
  std::vector<Jump> jumps;
  double s = 0.0;
  for (;;) {
    const double candidate = s + stream.exponential() / envelope;
    if (candidate >= horizon) break;
    s = candidate;
    const Eigen::VectorXd row = protocol.rates_at(s).row(static_cast<Eigen::Index>(x)).transpose();
    const double exit = row.sum();
    if (exit > envelope * (1.0 + 1e-12)) {
      throw ThinningBoundError("sample_path: exit rate " + std::to_string(exit) +
                               " exceeds thinning envelope " + std::to_string(envelope));
    }
    if (stream.uniform() * envelope >= exit) continue;
    const double previous = jumps.empty() ? 0.0 : jumps.back().time;
    const double t = nudge_into(s, previous, horizon);
    x = draw_categorical(row, exit, stream.uniform());
    jumps.push_back({t, x});
    s = t;
  }
  return JumpPath(x0, std::move(jumps), horizon);
}

}  // namespace

JumpPath sample_path(const ProcessMeasure& measure, SeededStream& stream, SamplingMethod method) {
  const bool pc = measure.protocol().is_piecewise_constant();
  if (method == SamplingMethod::Automatic) method = pc ? SamplingMethod::Inversion : SamplingMethod::Thinning;
  if (method == SamplingMethod::Inversion) {
    if (!pc) throw std::invalid_argument("sample_path: inversion needs a piecewise-constant protocol");
    return sample_by_inversion(measure, stream);
  }
  return sample_by_thinning(measure, stream);
}

std::vector<JumpPath> sample_ensemble(const ProcessMeasure& measure, std::size_t count,
                                      std::uint64_t seed, const EnsembleOptions& options) {
  if (count == 0) throw std::invalid_argument("sample_ensemble: need at least one path");
  std::vector<JumpPath> paths(count, JumpPath(0, {}, measure.horizon()));
  parallel_for(count, options.workers, [&](std::size_t i) {
    SeededStream stream(seed, i, options.domain);
    try {
      paths[i] = sample_path(measure, stream, options.method);
    } catch (const ThinningBoundError& e) {
      throw ThinningBoundError("trajectory " + std::to_string(i) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("trajectory " + std::to_string(i) + ": " + e.what());
    }
  });
  return paths;
}

}  // namespace tft
