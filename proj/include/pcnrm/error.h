#ifndef PCNRM_ERROR_H_
#define PCNRM_ERROR_H_

#include <stdexcept>
#include <string>

namespace pcnrm {

// Failure classes. The CLI maps them onto process exit codes.
enum class ErrorCode {
  kInput = 2,   // malformed or inconsistent input data
  kSolver = 3,  // infeasible/unbounded model, numerical trouble, node limit
  kCap = 4,     // a configured size cap was exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline Error InputError(const std::string& what) {
  return Error(ErrorCode::kInput, what);
}
inline Error SolverError(const std::string& what) {
  return Error(ErrorCode::kSolver, what);
}
inline Error CapError(const std::string& what) {
  return Error(ErrorCode::kCap, what);
}

}  // namespace pcnrm

#endif  // PCNRM_ERROR_H_
