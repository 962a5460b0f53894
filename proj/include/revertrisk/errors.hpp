#pragma once

#include <stdexcept>
#include <string>

namespace rr {

// Error taxonomy shared by the whole library. The C API maps kinds onto
// status codes, the CLI maps them onto exit codes.
enum class ErrorKind {
  usage,        // bad arguments / bad configuration
  parse,        // malformed input line or payload
  schema,       // structurally valid input missing a required field
  data,         // semantically invalid data (empty corpus, single class, ...)
  io,           // filesystem problems
  transport,    // HTTP / network failures
  not_found,    // missing revision, deleted content
  unsupported,  // page-creation revisions and similar out-of-scope inputs
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(std::string msg) { return Error(ErrorKind::usage, std::move(msg)); }
inline Error parse_error(std::string msg) { return Error(ErrorKind::parse, std::move(msg)); }
inline Error schema_error(std::string msg) { return Error(ErrorKind::schema, std::move(msg)); }
inline Error data_error(std::string msg) { return Error(ErrorKind::data, std::move(msg)); }
inline Error io_error(std::string msg) { return Error(ErrorKind::io, std::move(msg)); }
inline Error transport_error(std::string msg) { return Error(ErrorKind::transport, std::move(msg)); }
inline Error not_found_error(std::string msg) { return Error(ErrorKind::not_found, std::move(msg)); }
inline Error unsupported_error(std::string msg) { return Error(ErrorKind::unsupported, std::move(msg)); }
inline Error internal_error(std::string msg) { return Error(ErrorKind::internal, std::move(msg)); }

}  // namespace rr
