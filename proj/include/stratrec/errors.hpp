#pragma once

#include <stdexcept>
#include <string>

namespace stratrec {

/// Malformed input: out-of-range parameters, bad pdfs, unparsable records.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Missing or inconsistent configuration, e.g. no model for a (request, strategy) pair.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The cardinality constraint cannot be met by the catalog (k > |S|, empty catalog).
class CardinalityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An exhaustive oracle refused to run because the instance exceeds its size cap.
class SizeCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace stratrec
