#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace parmine {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data. Carries the offending file and 1-based line when known,
/// and formats them as `file:line: message`.
class InputError : public Error {
 public:
  explicit InputError(const std::string& message)
      : Error(message), message_(message) {}
  InputError(std::string file, std::size_t line, const std::string& message)
      : Error(format(file, line, message)),
        file_(std::move(file)),
        line_(line),
        message_(message) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

 private:
  static std::string format(const std::string& file, std::size_t line,
                            const std::string& message) {
    std::string out = file.empty() ? std::string("<input>") : file;
    if (line > 0) out += ":" + std::to_string(line);
    return out + ": " + message;
  }

  std::string file_;
  std::size_t line_ = 0;
  std::string message_;
};

/// A row or record that does not follow its file format.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

/// A numeric argument outside its domain (n-gram order 0, max length 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A statistic that is mathematically undefined for the given input
/// (empty dictionary ratio, zero-variance correlation).
class UndefinedValue : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, const std::string& message)
      : Error("diverged at epoch " + std::to_string(epoch) + ": " + message),
        epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

/// Inconsistent run configuration (missing dictionary for a mode that needs
/// one, incompatible ratios, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace parmine
