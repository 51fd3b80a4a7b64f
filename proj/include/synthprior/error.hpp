#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace synthprior {

// Category carried by every library error; the CLI maps it to an exit code.
enum class ErrorKind { domain, rank, parse, io, numeric };

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::rank: return "rank";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
    case ErrorKind::numeric: return "numeric";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error domain_error(const std::string& what) { return {ErrorKind::domain, what}; }
inline Error rank_error(const std::string& what) { return {ErrorKind::rank, what}; }
inline Error parse_error(const std::string& what) { return {ErrorKind::parse, what}; }
inline Error io_error(const std::string& what) { return {ErrorKind::io, what}; }
inline Error numeric_error(const std::string& what) { return {ErrorKind::numeric, what}; }

}  // namespace synthprior
