#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace subavg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape mismatch, non-finite entries, or a violated type invariant.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A scalar function was applied outside of its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two points are (numerically) at the cut locus of each other, so the
/// connecting geodesic is not unique and the logarithm is undefined.
/// `index` names the offending datum when the error comes from a
/// multi-point computation.
class CutLocus : public Error {
 public:
  explicit CutLocus(const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : Error(what), index_(index) {}

  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

class NotDescentDirection : public Error {
 public:
  using Error::Error;
};

class LineSearchFailed : public Error {
 public:
  using Error::Error;
};

class DegenerateCurvature : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  using Error::Error;
};

class DegenerateAverage : public Error {
 public:
  using Error::Error;
};

}  // namespace subavg
