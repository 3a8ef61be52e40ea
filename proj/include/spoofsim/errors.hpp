// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0

#ifndef SPOOFSIM_ERRORS_HPP
#define SPOOFSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spoofsim {

/// Base class for all spoofsim errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A ray direction was requested for a zero-norm point.
class DegenerateRay : public Error {
 public:
  explicit DegenerateRay(const std::string& msg) : Error(msg) {}
};

/// Non-positive azimuth bin resolution.
class InvalidResolution : public Error {
 public:
  explicit InvalidResolution(const std::string& msg) : Error(msg) {}
};

/// A file could not be decoded in its declared format.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

/// Decoded content violates a value-range contract.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// An argument violates an operation precondition.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// Required preprocessing (e.g. azimuth binning) is missing.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

/// The requested attack cannot be mounted against the given LiDAR.
class ApplicabilityError : public Error {
 public:
  explicit ApplicabilityError(const std::string& msg) : Error(msg) {}
};

/// Object model geometry is degenerate.
class InvalidModel : public Error {
 public:
  explicit InvalidModel(const std::string& msg) : Error(msg) {}
};

}  // namespace spoofsim

#endif  // SPOOFSIM_ERRORS_HPP
