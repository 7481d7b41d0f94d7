#pragma once

#include <stdexcept>
#include <string>

namespace auirl {

enum class ErrorKind {
  Config,          // malformed or invalid configuration document
  Validation,      // invalid argument or value out of range
  Input,           // malformed input data (CSV rows, state literals, requests)
  DomainMismatch,  // artifact trained on a different domain
  CorruptFile,     // truncated or damaged persisted artifact
  Io,              // filesystem failure
  State,           // operation not permitted in the current state
  Convergence,     // iterative solver did not converge
};

const char *to_string(ErrorKind kind);

/** Base exception for the toolkit. `path()` names the offending location
 *  (a config key path, a CSV row, a request field) when one exists. */
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message, std::string path = {})
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        kind_(kind), path_(std::move(path)) {}

  ErrorKind kind() const { return kind_; }
  const std::string &path() const { return path_; }

private:
  ErrorKind kind_;
  std::string path_;
};

}  // namespace auirl
