#pragma once

#include <stdexcept>
#include <string>

namespace termstruct {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed input text (CSV rows, dates); messages carry the line number.
class ParseError : public Error {
  public:
    using Error::Error;
};

class DuplicateRecordError : public ParseError {
  public:
    using ParseError::ParseError;
};

// No common observation period across markets.
class AlignmentError : public Error {
  public:
    using Error::Error;
};

// Too few observations for the requested statistic.
class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

// Sample admits no estimate (zero variance, all values equal, zero Hill denominator).
class DegenerateDataError : public Error {
  public:
    using Error::Error;
};

// Value outside the operation's domain (non-positive y in a log-log fit, bad k).
class DomainError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

// File system / stream failures on inputs or artifacts.
class InputError : public Error {
  public:
    using Error::Error;
};

// A pipeline stage was invoked before its prerequisites were materialized.
class DependencyError : public Error {
  public:
    using Error::Error;
};

// Bootstrap replicate redraw cap exceeded.
class BootstrapError : public Error {
  public:
    using Error::Error;
};

}  // namespace termstruct
