#ifndef SERI_ERRORS_HPP
#define SERI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace seri {

/// Invalid parameters or preconditions (delta <= -1, index out of range, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A hard resource cap (node count of a branching realization) was hit.
class ResourceCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal cross-check between two independent routes failed.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace seri

#endif  // SERI_ERRORS_HPP
