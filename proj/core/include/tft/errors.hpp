#pragma once

#include <stdexcept>
#include <string>

namespace tft {

// A path lies outside the support of a measure (zero initial mass or a zero
// rate along the path). Distinct from numerical failure.
class SupportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// P ~ φQ failed on a concrete path; carries the serialized offending path.
class EquivalenceError : public std::runtime_error {
 public:
  EquivalenceError(const std::string& what, std::string path)
      : std::runtime_error(what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// An adaptive integrator or quadrature did not reach its tolerance.
class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The thinning envelope was exceeded by a true rate; the sample is invalid.
class ThinningBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tft
