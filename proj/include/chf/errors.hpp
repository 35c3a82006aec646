#pragma once

#include <stdexcept>
#include <string>

namespace chf {

/// Base class for every error raised by chfkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// water-props
class PropertyError : public Error {
 public:
  using Error::Error;
};
class OutOfRange : public PropertyError {
 public:
  using PropertyError::PropertyError;
};

// dataset-io
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, long line) : Error(what), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};
class SchemaError : public Error {
 public:
  using Error::Error;
};
class UnitError : public Error {
 public:
  using Error::Error;
};
class InvariantError : public Error {
 public:
  using Error::Error;
};

// channel
class MeshError : public Error {
 public:
  using Error::Error;
};

// lut-engine
class FormatError : public Error {
 public:
  using Error::Error;
};
class GridError : public Error {
 public:
  using Error::Error;
};
class OutOfTable : public Error {
 public:
  OutOfTable(const std::string& what, double pressure, double mass_flux, double quality)
      : Error(what), pressure_(pressure), mass_flux_(mass_flux), quality_(quality) {}
  double pressure() const noexcept { return pressure_; }
  double mass_flux() const noexcept { return mass_flux_; }
  double quality() const noexcept { return quality_; }

 private:
  double pressure_;
  double mass_flux_;
  double quality_;
};
class NoConvergence : public Error {
 public:
  using Error::Error;
};
class SingularProfile : public Error {
 public:
  using Error::Error;
};

// digitizer
class TooFewPoints : public Error {
 public:
  using Error::Error;
};
class OutOfSpan : public Error {
 public:
  using Error::Error;
};
class UnsortedNodes : public Error {
 public:
  using Error::Error;
};
class SpanError : public Error {
 public:
  using Error::Error;
};

// nn-regressor
class ShapeError : public Error {
 public:
  using Error::Error;
};
class NonFiniteInput : public Error {
 public:
  using Error::Error;
};
class EmptyDataset : public Error {
 public:
  using Error::Error;
};
class DivergenceError : public Error {
 public:
  using Error::Error;
};
class VersionError : public Error {
 public:
  using Error::Error;
};

// correlations / eval-harness
class UnknownCorrelation : public Error {
 public:
  using Error::Error;
};
class UnknownModel : public Error {
 public:
  using Error::Error;
};
class EmptyInput : public Error {
 public:
  using Error::Error;
};
class NonPositiveMeasured : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace chf
