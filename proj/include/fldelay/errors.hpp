#pragma once

#include <stdexcept>
#include <string>

namespace fldelay {

// Bad input: a configuration key, a file, or a precondition on arguments.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  explicit ValidationError(const std::string& what) : ValidationError(std::string{}, what) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A numerical routine could not reach its accuracy target.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fldelay
