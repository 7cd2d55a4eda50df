#pragma once

#include <stdexcept>
#include <string>

namespace scram_xai {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid profile, config value or argument.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Interval or index outside a series.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// Matrix / tensor dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV or series content that cannot be ingested.
class IngestionError : public Error {
 public:
  using Error::Error;
};

// Checkpoint file is corrupt, truncated or from another format version.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Operation called in the wrong object state (e.g. backward without forward).
class StateError : public Error {
 public:
  using Error::Error;
};

// Baseline trajectory does not cover the requested window.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// Too little data to compute a statistic (e.g. a signature score).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace scram_xai
