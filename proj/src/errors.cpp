#include "wrsync/errors.hpp"

#include <sstream>

namespace wrsync {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream out;
  out << "invalid configuration (" << issues.size() << " issue" << (issues.size() == 1 ? "" : "s") << ")";
  for (const auto& issue : issues) {
    out << "\n  - " << issue;
  }
  return out.str();
}

std::string link_message(const std::string& name, double margin_db) {
  std::ostringstream out;
  out << "link below sensitivity threshold: '" << name << "' margin " << margin_db << " dB";
  return out.str();
}

std::string parse_message(const std::string& what, std::size_t line) {
  if (line == 0) {
    return what;
  }
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

LinkError::LinkError(std::string link_name, double margin_db)
    : Error(link_message(link_name, margin_db)), link_name_(std::move(link_name)), margin_db_(margin_db) {}

ParseError::ParseError(const std::string& what, std::size_t line) : Error(parse_message(what, line)), line_(line) {}

}  // namespace wrsync
