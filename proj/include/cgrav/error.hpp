#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cgrav {

enum class ErrorCode {
  SingularEvaluation,    // field point on (or within r_min of) the source worldline
  InsufficientHistory,   // retarded time falls outside the sampled worldline
  NearLuminalDegeneracy, // Lienard-Wiechert denominator collapses
  UnsupportedOrbit,      // conserved quantities violate the bound-orbit inequalities
  UnboundOrbit,          // E >= c^2
  Domain,                // argument outside a formula's domain
  MalformedConfig,       // unparsable input file
  Validation,            // parsed value violates a type invariant
  Stiffness,             // step size underflow in the integrator
};

std::string_view to_string(ErrorCode code);

/// Single exception type for all library failures; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cgrav
