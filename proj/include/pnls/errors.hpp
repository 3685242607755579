#pragma once

#include <stdexcept>
#include <string>

namespace pnls {

// Every library error carries a short machine-readable code alongside the
// message; the CLI serializes both into its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct InvalidGrid : Error {
  explicit InvalidGrid(const std::string& w) : Error("InvalidGrid", w) {}
};
struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& w) : Error("ShapeMismatch", w) {}
};
struct RecurrenceOverflow : Error {
  explicit RecurrenceOverflow(const std::string& w) : Error("RecurrenceOverflow", w) {}
};
struct SingularTime : Error {
  explicit SingularTime(const std::string& w) : Error("SingularTime", w) {}
};
struct BoundaryMassExceeded : Error {
  BoundaryMassExceeded(const std::string& w, double t, double fraction)
      : Error("BoundaryMassExceeded", w), time(t), boundary_fraction(fraction) {}
  double time;
  double boundary_fraction;
};
struct NonFinite : Error {
  NonFinite(const std::string& w, double t) : Error("NonFinite", w), time(t) {}
  double time;
};
struct AdmissibilityError : Error {
  explicit AdmissibilityError(const std::string& w) : Error("AdmissibilityError", w) {}
};
struct InsufficientSamples : Error {
  explicit InsufficientSamples(const std::string& w) : Error("InsufficientSamples", w) {}
};
struct NoContraction : Error {
  explicit NoContraction(const std::string& w) : Error("NoContraction", w) {}
};
struct QuadratureResolution : Error {
  explicit QuadratureResolution(const std::string& w) : Error("QuadratureResolution", w) {}
};
struct VanishingOverlap : Error {
  explicit VanishingOverlap(const std::string& w) : Error("VanishingOverlap", w) {}
};
struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w) : Error("InvalidArgument", w) {}
};
struct ConfigSyntaxError : Error {
  ConfigSyntaxError(const std::string& w, int l, int c) : Error("ConfigSyntaxError", w), line(l), column(c) {}
  int line;
  int column;
};
struct ConfigError : Error {
  ConfigError(const std::string& f, const std::string& w) : Error("ConfigError", f + ": " + w), field(f) {}
  std::string field;
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error("IoError", w) {}
};

}  // namespace pnls
