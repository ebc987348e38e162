#ifndef AFFINE_ERROR_HPP
#define AFFINE_ERROR_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace affine {

enum class ErrorKind {
  parse,
  schema,
  malformed,
  not_a_partial_order,
  missing_join,
  distributivity_failure,
  complement_failure,
  tensor_axiom_failure,
  variety_mismatch,
  budget_exceeded,
  not_a_subalgebra,
  kappa_not_homomorphism,
  not_continuous,
  unsupported_variety,
  cocone_shape_mismatch,
  generation_exhausted,
  integral_shortcut_mismatch,
  ell_not_point,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse: return "ParseError";
    case ErrorKind::schema: return "SchemaError";
    case ErrorKind::malformed: return "Malformed";
    case ErrorKind::not_a_partial_order: return "NotAPartialOrder";
    case ErrorKind::missing_join: return "MissingJoin";
    case ErrorKind::distributivity_failure: return "DistributivityFailure";
    case ErrorKind::complement_failure: return "ComplementFailure";
    case ErrorKind::tensor_axiom_failure: return "TensorAxiomFailure";
    case ErrorKind::variety_mismatch: return "VarietyMismatch";
    case ErrorKind::budget_exceeded: return "BudgetExceeded";
    case ErrorKind::not_a_subalgebra: return "NotASubalgebra";
    case ErrorKind::kappa_not_homomorphism: return "KappaNotHomomorphism";
    case ErrorKind::not_continuous: return "NotContinuous";
    case ErrorKind::unsupported_variety: return "UnsupportedVariety";
    case ErrorKind::cocone_shape_mismatch: return "CoconeShapeMismatch";
    case ErrorKind::generation_exhausted: return "GenerationExhausted";
    case ErrorKind::integral_shortcut_mismatch: return "IntegralShortcutMismatch";
    case ErrorKind::ell_not_point: return "EllNotPoint";
  }
  return "Unknown";
}

/// Library-wide exception. `witness` names the offending elements (display
/// names, not indices) so reports stay readable.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::vector<std::string> witness = {})
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        witness_(std::move(witness)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::string>& witness() const noexcept { return witness_; }

 private:
  ErrorKind kind_;
  std::vector<std::string> witness_;
};

/// Optional wall-clock deadline for the current thread. Enumerations poll it
/// through check_budget, so a long instance stops at its next checkpoint.
inline thread_local std::optional<std::chrono::steady_clock::time_point> budget_deadline;

inline void check_budget(std::uint64_t needed, std::uint64_t cap,
                         const std::string& what) {
  if (budget_deadline && std::chrono::steady_clock::now() > *budget_deadline) {
    throw Error(ErrorKind::budget_exceeded, what + ": wall-time budget exhausted");
  }
  if (needed > cap) {
    throw Error(ErrorKind::budget_exceeded,
                what + " needs " + std::to_string(needed) + " > cap " +
                    std::to_string(cap));
  }
}

/// Saturating multiplication for budget arithmetic.
inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > UINT64_MAX / b) return UINT64_MAX;
  return a * b;
}

inline std::uint64_t sat_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r = sat_mul(r, base);
  return r;
}

}  // namespace affine

#endif
