#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "subavg/grassmann.hpp"

namespace subavg::cli {

/// Malformed subspace file. The message names the offending field.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON subspace file, version "1":
///
///   {"version": "1", "n": 2, "m": 1, "count": 1,
///    "bases": [[[{"re": 1, "im": 0}], [{"re": 0, "im": 0}]]]}
///
/// `bases` holds `count` n x m matrices, each as a list of n rows of m
/// {re, im} entries.
struct SubspaceFile {
  Index n = 0;
  Index m = 0;
  std::vector<ComplexMatrix> bases;
};

/// Orthonormality tolerance applied on load.
inline constexpr double kLoadTolerance = 1e-8;

/// Parses and validates. Non-orthonormal bases are re-orthonormalized when
/// `repair` is set and rejected otherwise.
SubspaceFile parse_subspace_file(const std::string& text, bool repair);
SubspaceFile read_subspace_file(const std::string& path, bool repair);

std::string format_subspace_file(const SubspaceFile& file);
void write_text_file(const std::string& path, const std::string& contents);

/// StiefelBasis for a loaded basis; bases within the load tolerance but not
/// the strict one are orthonormalized without changing their span.
StiefelBasis to_stiefel(const ComplexMatrix& basis);

}  // namespace subavg::cli
