#include "gridsim/error.hpp"

namespace gridsim {

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& item : items) {
        out += "\n  - ";
        out += item;
    }
    return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : GridError(join(violations)), violations_(std::move(violations)) {}

}  // namespace gridsim
