#include "tft/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tft {

// --------------------------------------------------------- PermutationFamily

PermutationFamily::PermutationFamily(Kind kind, long shift,
                                     std::map<std::size_t, std::vector<std::size_t>> table)
    : kind_(kind), shift_(shift), table_(std::move(table)) {}

PermutationFamily PermutationFamily::identity() { return {Kind::Identity, 0, {}}; }

PermutationFamily PermutationFamily::cyclic_shift(long shift) {
  if (shift == 0) return identity();
  return {Kind::CyclicShift, shift, {}};
}

PermutationFamily PermutationFamily::reverse() { return {Kind::Reverse, 0, {}}; }

PermutationFamily PermutationFamily::table(std::map<std::size_t, std::vector<std::size_t>> by_jump_count) {
  for (const auto& [n, perm] : by_jump_count) {
    if (perm.size() != n + 1) {
      throw std::invalid_argument("PermutationFamily: entry for n = " + std::to_string(n) +
                                  " must permute n + 1 segments");
    }
    std::vector<bool> seen(perm.size(), false);
    for (auto v : perm) {
      if (v >= perm.size() || seen[v]) {
        throw std::invalid_argument("PermutationFamily: entry for n = " + std::to_string(n) +
                                    " is not a permutation");
      }
      seen[v] = true;
    }
  }
  return {Kind::Table, 0, std::move(by_jump_count)};
}

std::vector<std::size_t> PermutationFamily::for_jump_count(std::size_t n) const {
  const std::size_t m = n + 1;
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  switch (kind_) {
    case Kind::Identity:
      break;
    case Kind::CyclicShift: {
      const long mm = static_cast<long>(m);
      const long offset = ((shift_ % mm) + mm) % mm;
      for (std::size_t i = 0; i < m; ++i) perm[i] = static_cast<std::size_t>((static_cast<long>(i) + offset) % mm);
      break;
    }
    case Kind::Reverse:
      std::reverse(perm.begin(), perm.end());
      break;
    case Kind::Table:
      if (auto it = table_.find(n); it != table_.end()) perm = it->second;
      break;
  }
  return perm;
}

PermutationFamily PermutationFamily::inverse() const {
  switch (kind_) {
    case Kind::Identity:
    case Kind::Reverse:
      return *this;
    case Kind::CyclicShift:
      return cyclic_shift(-shift_);
    case Kind::Table: {
      std::map<std::size_t, std::vector<std::size_t>> inverted;
      for (const auto& [n, perm] : table_) {
        std::vector<std::size_t> inv(perm.size());
        for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
        inverted.emplace(n, std::move(inv));
      }
      return {Kind::Table, 0, std::move(inverted)};
    }
  }
  return *this;
}

bool PermutationFamily::is_involution() const {
  switch (kind_) {
    case Kind::Identity:
    case Kind::Reverse:
      return true;
    case Kind::CyclicShift:
      // Self-inverse on m segments iff 2s ≡ 0 (mod m); m = 2|s| + 1 breaks it.
      return false;
    case Kind::Table:
      for (const auto& [n, perm] : table_) {
        for (std::size_t i = 0; i < perm.size(); ++i) {
          if (perm[perm[i]] != i) return false;
        }
      }
      return true;
  }
  return false;
}

std::string PermutationFamily::describe() const {
  switch (kind_) {
    case Kind::Identity:
      return "identity";
    case Kind::CyclicShift:
      return "cyclic-shift:" + std::to_string(shift_);
    case Kind::Reverse:
      return "reverse";
    case Kind::Table: {
      std::string out = "table{";
      bool first = true;
      for (const auto& [n, perm] : table_) {
        if (!first) out += ';';
        first = false;
        out += std::to_string(n) + ":";
        for (std::size_t i = 0; i < perm.size(); ++i) {
          if (i) out += ',';
          out += std::to_string(perm[i]);
        }
      }
      return out + "}";
    }
  }
  return "?";
}

// ------------------------------------------------------------- PathTransform

PathTransform::PathTransform(Kind kind, PermutationFamily family, std::vector<PathTransform> parts)
    : kind_(kind), family_(std::move(family)), parts_(std::move(parts)) {}

PathTransform PathTransform::identity() { return {Kind::Identity, PermutationFamily::identity(), {}}; }

PathTransform PathTransform::time_reversal() {
  return {Kind::TimeReversal, PermutationFamily::identity(), {}};
}

PathTransform PathTransform::holding_permutation(PermutationFamily family) {
  return {Kind::HoldingPermutation, std::move(family), {}};
}

PathTransform PathTransform::composition(std::vector<PathTransform> parts) {
  return {Kind::Composition, PermutationFamily::identity(), std::move(parts)};
}

const PermutationFamily& PathTransform::family() const {
  if (kind_ != Kind::HoldingPermutation) throw std::logic_error("PathTransform: not a holding permutation");
  return family_;
}

std::string PathTransform::describe() const {
  switch (kind_) {
    case Kind::Identity:
      return "identity";
    case Kind::TimeReversal:
      return "time-reversal";
    case Kind::HoldingPermutation:
      return "holding-permutation(" + family_.describe() + ")";
    case Kind::Composition: {
      std::string out = "composition[";
      for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) out += ", ";
        out += parts_[i].describe();
      }
      return out + "]";
    }
  }
  return "?";
}

namespace {

double keep_inside(double t, double previous, double horizon) {
  if (t >= horizon) t = std::nextafter(horizon, previous);
  if (t <= previous) t = std::nextafter(previous, horizon);
  return t;
}

JumpPath reverse_time(const JumpPath& path) {
  const double horizon = path.horizon();
  const auto states = path.skeleton();
  const auto& jumps = path.jumps();
  const std::size_t n = jumps.size();
  std::vector<Jump> out;
  out.reserve(n);
  double previous = 0.0;
  // The state entered at T - t_i is x_{i-1}.
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = n - 1 - r;
    const double t = keep_inside(horizon - jumps[i].time, previous, horizon);
    out.push_back({t, states[i]});
    previous = t;
  }
  return JumpPath(path.final_state(), std::move(out), horizon);
}

JumpPath permute_holdings(const PermutationFamily& family, const JumpPath& path) {
  const auto& jumps = path.jumps();
  const std::size_t n = jumps.size();
  if (n == 0) return path;
  const auto perm = family.for_jump_count(n);
  // Extended precision keeps t -> durations -> permuted partial sums within an
  // ulp of exact, so a permutation followed by its inverse restores the times.
  std::vector<long double> durations(n + 1);
  long double previous = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    durations[i] = static_cast<long double>(jumps[i].time) - previous;
    previous = jumps[i].time;
  }
  durations[n] = static_cast<long double>(path.horizon()) - previous;

  std::vector<Jump> out;
  out.reserve(n);
  long double clock = 0.0L;
  double last = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    clock += durations[perm[i]];
    const double t = keep_inside(static_cast<double>(clock), last, path.horizon());
    out.push_back({t, jumps[i].target});
    last = t;
  }
  return JumpPath(path.initial_state(), std::move(out), path.horizon());
}

}  // namespace

JumpPath apply_transform(const PathTransform& transform, const JumpPath& path) {
  switch (transform.kind()) {
    case PathTransform::Kind::Identity:
      return path;
    case PathTransform::Kind::TimeReversal:
      return reverse_time(path);
    case PathTransform::Kind::HoldingPermutation:
      return permute_holdings(transform.family(), path);
    case PathTransform::Kind::Composition: {
      JumpPath current = path;
      for (const auto& part : transform.parts()) current = apply_transform(part, current);
      return current;
    }
  }
  return path;
}

namespace {

PathTransform inverse_of(const PathTransform& transform) {
  switch (transform.kind()) {
    case PathTransform::Kind::Identity:
    case PathTransform::Kind::TimeReversal:
      return transform;
    case PathTransform::Kind::HoldingPermutation:
      return PathTransform::holding_permutation(transform.family().inverse());
    case PathTransform::Kind::Composition: {
      std::vector<PathTransform> parts;
      const auto& original = transform.parts();
      parts.reserve(original.size());
      for (auto it = original.rbegin(); it != original.rend(); ++it) parts.push_back(inverse_of(*it));
      return PathTransform::composition(std::move(parts));
    }
  }
  return transform;
}

bool involutive(const PathTransform& transform) {
  switch (transform.kind()) {
    case PathTransform::Kind::Identity:
    case PathTransform::Kind::TimeReversal:
      return true;
    case PathTransform::Kind::HoldingPermutation:
      return transform.family().is_involution();
    case PathTransform::Kind::Composition:
      // Structural test only: sufficient, not necessary.
      if (transform.parts().size() == 1) return involutive(transform.parts().front());
      return inverse_of(transform).describe() == transform.describe();
  }
  return false;
}

}  // namespace

InverseTransform invert_transform(const PathTransform& transform) {
  return {inverse_of(transform), involutive(transform)};
}

}  // namespace tft
