#ifndef CAUSAL_CPD_ERROR_HPP
#define CAUSAL_CPD_ERROR_HPP

#include <stdexcept>

namespace ccpd {

/// Malformed or insufficient input data (bad CSV cells, domain violations,
/// series too short for the requested analysis, unwritable outputs).
/// Parameter mistakes are reported as std::invalid_argument instead.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ccpd

#endif  // CAUSAL_CPD_ERROR_HPP
