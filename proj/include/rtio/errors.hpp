#ifndef RTIO_ERRORS_HPP
#define RTIO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rtio {

// Base of everything thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller misuse: bad arguments, bad expressions, contract violations.
// CLI maps these to exit code 1.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& msg) : Error(msg) {}
};

// Filesystem / adapter failures. CLI maps these to exit code 2.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Malformed or corrupt on-disk data: bad magic, checksum mismatches,
// truncated structures, undecodable payloads. CLI maps these to exit code 2.
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

}  // namespace rtio

#endif  // RTIO_ERRORS_HPP
