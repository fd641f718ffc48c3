// sampler.hpp: right-continuous jump paths and exact trajectory sampling for
// inhomogeneous CTMCs with seed-reproducible parallel ensembles.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tft/process.hpp"

namespace tft {

struct Jump {
  double time;
  State target;

  friend bool operator==(const Jump&, const Jump&) = default;
};

// ω ∈ D([0,T], Ξ): initial state plus jumps at 0 < t_1 < ... < t_n < T.
// The value at s is the state after the last jump at or before s.
class JumpPath {
 public:
  JumpPath(State initial, std::vector<Jump> jumps, double horizon);

  State initial_state() const noexcept { return initial_; }
  State final_state() const noexcept { return jumps_.empty() ? initial_ : jumps_.back().target; }
  const std::vector<Jump>& jumps() const noexcept { return jumps_; }
  std::size_t jump_count() const noexcept { return jumps_.size(); }
  double horizon() const noexcept { return horizon_; }

  State state_at(double s) const;
  // x_0, x_1, ..., x_n
  std::vector<State> skeleton() const;
  // Durations between consecutive events 0, t_1, ..., t_n, T.
  std::vector<double> holding_durations() const;

  friend bool operator==(const JumpPath&, const JumpPath&) = default;

 private:
  State initial_;
  std::vector<Jump> jumps_;
  double horizon_;
};

// Line format: `x0 T n t_1 x_1 ... t_n x_n`, shortest round-trip decimals.
std::string format_path(const JumpPath& path);
JumpPath parse_path(std::string_view line);

// Substream for trajectory `index` of an ensemble keyed by `seed`. The optional
// domain word separates independent ensembles drawn under the same seed.
class SeededStream {
 public:
  SeededStream(std::uint64_t seed, std::uint64_t index, std::uint64_t domain = 0);

  std::uint64_t next() { return engine_(); }
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double exponential();

 private:
  std::mt19937_64 engine_;
};

enum class SamplingMethod {
  Automatic,  // inversion for piecewise-constant protocols, thinning otherwise
  Inversion,
  Thinning,
};

JumpPath sample_path(const ProcessMeasure& measure, SeededStream& stream,
                     SamplingMethod method = SamplingMethod::Automatic);

struct EnsembleOptions {
  std::size_t workers = 1;
  std::uint64_t domain = 0;
  SamplingMethod method = SamplingMethod::Automatic;
};

// Path i is sample_path(measure, SeededStream(seed, i, domain)); output does not
// depend on the worker count.
std::vector<JumpPath> sample_ensemble(const ProcessMeasure& measure, std::size_t count,
                                      std::uint64_t seed, const EnsembleOptions& options = {});

}  // namespace tft
