#pragma once

#include <stdexcept>
#include <string>

namespace candy {

// Malformed or inconsistent input data. Carries the file and 1-based line
// when the problem can be pinned to a row.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}

  DataError(std::string file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string file_;
  std::size_t line_ = 0;
};

// Caller passed arguments that cannot be satisfied (bad k, bad fraction, ...).
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace candy
