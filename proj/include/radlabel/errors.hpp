#ifndef RADLABEL_ERRORS_HPP
#define RADLABEL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace radlabel {

// Base class for all errors raised by this library. Commands map these to
// exit code 1; anything else escaping to main is exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed on-disk data (bad label cell, wrong column count, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A label vector violating the schema (No Finding restriction, missing
// conditions on construction from named entries).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// File could not be opened / written.
class IOError : public Error {
 public:
  using Error::Error;
};

// A split or resample over too few items.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Inconsistent run configuration (missing datasets for a strategy, unknown
// keys, bad values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Structurally valid config but unusable data (e.g. empty train split).
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed model input batch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Prediction/gold sequences of different lengths.
class LengthError : public Error {
 public:
  using Error::Error;
};

// Model outputs that cannot be paired report-by-report.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// Macro average requested but every condition score is undefined.
class AllUndefinedError : public Error {
 public:
  using Error::Error;
};

// Translation client failure; callers fall back to the original text.
class TranslationError : public Error {
 public:
  using Error::Error;
};

}  // namespace radlabel

#endif  // RADLABEL_ERRORS_HPP
