#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bbx {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad values passed to an operation (shape mismatch, domain violation, ...).
class invalid_argument : public error {
 public:
  using error::error;
};

// Malformed file content. Carries a 1-based position inside the file.
class parse_error : public error {
 public:
  parse_error(const std::string& file, std::size_t line, std::size_t column,
              const std::string& what)
      : error(file + ":" + std::to_string(line) + ":" + std::to_string(column) +
              ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class io_error : public error {
 public:
  using error::error;
};

// External processor exited nonzero. Keeps the captured output for diagnosis.
class backend_error : public error {
 public:
  backend_error(const std::string& what, int exit_code, std::string diagnostics)
      : error(what), exit_code_(exit_code), diagnostics_(std::move(diagnostics)) {}

  int exit_code() const { return exit_code_; }
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  int exit_code_;
  std::string diagnostics_;
};

class cache_error : public error {
 public:
  using error::error;
};

}  // namespace bbx
