#include "nsp/errors.hpp"

namespace nsp {

namespace {

std::string join_violations(const std::vector<std::string>& items) {
  std::string out = "validation failed:";
  for (const auto& item : items) {
    out += "\n  - ";
    out += item;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

}  // namespace nsp
