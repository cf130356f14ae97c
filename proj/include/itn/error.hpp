#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace itn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string file_;
  std::size_t line_;
};

/// Design matrix is not of full column rank.
class RankDeficientError : public Error {
public:
  explicit RankDeficientError(std::vector<std::string> columns)
      : Error(make_message(columns)), columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const noexcept { return columns_; }

private:
  static std::string make_message(const std::vector<std::string>& cols) {
    std::string msg = "design is rank deficient; collinear columns:";
    for (const auto& c : cols) msg += " " + c;
    return msg;
  }
  std::vector<std::string> columns_;
};

/// Iterative estimator failed to converge. `trace` holds the objective per iteration.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}

  const std::vector<double>& trace() const noexcept { return trace_; }

private:
  std::vector<double> trace_;
};

/// Binary-response fit diverges because some regressor combination separates the classes.
class SeparationError : public Error {
public:
  using Error::Error;
};

}  // namespace itn
