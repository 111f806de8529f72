#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wrsync {

// Base for every error raised by the library. The C API maps the concrete
// type onto a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument to a pure function (out-of-range factor, negative width, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A configuration failed validation. Carries every violation found, not just
// the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// A fiber link's optical margin is below the receiver threshold: the clock
// cannot lock.
class LinkError : public Error {
 public:
  LinkError(std::string link_name, double margin_db);
  const std::string& link_name() const { return link_name_; }
  double margin_db() const { return margin_db_; }

 private:
  std::string link_name_;
  double margin_db_;
};

// Malformed input file. line is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Two tag channels could not be matched against each other.
class PairingError : public Error {
 public:
  using Error::Error;
};

}  // namespace wrsync
