#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rareval {

// Bad input data: malformed files, inconsistent judgments, impossible
// campaign shapes. The CLI maps these to exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A line-level defect in a run or qrels file.
class ParseError : public DataError {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

// Invalid parameter combination (alpha out of range, T > topics, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A statistic that has no value for the given input, e.g. Kendall's tau
// when one side is entirely tied, or rarity of a document nobody retrieved.
class UndefinedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace rareval
