#ifndef COVPROJ_ERRORS_HPP
#define COVPROJ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace covproj {

// Thrown when a computation fails numerically (eigensolver breakdown,
// materially indefinite input, fixed-point non-convergence).  Contract
// violations by the caller raise std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace covproj

#endif
