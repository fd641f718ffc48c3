// transforms.hpp: bijections of path space with explicit inverses.
//
// Every variant keeps the jump count and maps the jump-time vector by a
// piecewise isometry, so it preserves the jump-count ⊗ Lebesgue reference
// measure on paths. Log-density differences are Radon–Nikodym derivatives only
// under that property; any new variant must keep it.

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "tft/sampler.hpp"

namespace tft {

// A permutation π_n of the n+1 holding segments for every jump count n.
// Output segment i takes the duration of input segment π_n(i).
class PermutationFamily {
 public:
  enum class Kind { Identity, CyclicShift, Reverse, Table };

  static PermutationFamily identity();
  // π_n(i) = (i + shift) mod (n + 1)
  static PermutationFamily cyclic_shift(long shift = 1);
  // π_n(i) = n - i
  static PermutationFamily reverse();
  // Explicit permutations keyed by jump count; counts without an entry use the
  // identity.
  static PermutationFamily table(std::map<std::size_t, std::vector<std::size_t>> by_jump_count);

  Kind kind() const noexcept { return kind_; }
  long shift() const noexcept { return shift_; }
  std::vector<std::size_t> for_jump_count(std::size_t n) const;
  PermutationFamily inverse() const;
  bool is_involution() const;
  std::string describe() const;

 private:
  PermutationFamily(Kind kind, long shift, std::map<std::size_t, std::vector<std::size_t>> table);

  Kind kind_;
  long shift_;
  std::map<std::size_t, std::vector<std::size_t>> table_;
};

class PathTransform {
 public:
  enum class Kind { Identity, TimeReversal, HoldingPermutation, Composition };

  static PathTransform identity();
  static PathTransform time_reversal();
  static PathTransform holding_permutation(PermutationFamily family);
  // Applied in list order: parts[0] first.
  static PathTransform composition(std::vector<PathTransform> parts);

  Kind kind() const noexcept { return kind_; }
  const PermutationFamily& family() const;
  const std::vector<PathTransform>& parts() const noexcept { return parts_; }
  std::string describe() const;

 private:
  PathTransform(Kind kind, PermutationFamily family, std::vector<PathTransform> parts);

  Kind kind_;
  PermutationFamily family_;
  std::vector<PathTransform> parts_;
};

JumpPath apply_transform(const PathTransform& transform, const JumpPath& path);

struct InverseTransform {
  PathTransform inverse;
  bool is_involution;
};

InverseTransform invert_transform(const PathTransform& transform);

}  // namespace tft
