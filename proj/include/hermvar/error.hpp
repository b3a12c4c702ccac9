#ifndef HERMVAR_ERROR_HPP
#define HERMVAR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hermvar {

// Domain and precondition violations throw std::invalid_argument.

/// A numerical procedure failed (factorization, non-summable series, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hermvar

#endif  // HERMVAR_ERROR_HPP
