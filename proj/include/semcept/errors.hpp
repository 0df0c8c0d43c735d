#ifndef SEMCEPT_ERRORS_HPP
#define SEMCEPT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semcept {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. line() is 1-based, 0 when the error is not tied to a line.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class WalkError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class EmptyVocabulary : public Error {
 public:
  using Error::Error;
};

}  // namespace semcept

#endif  // SEMCEPT_ERRORS_HPP
