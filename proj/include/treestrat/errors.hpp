#pragma once

#include <stdexcept>
#include <string>

namespace treestrat {

/// Input failed a structural or schema check (exit code 2 in the CLI).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A tree pair exceeded the exact-search budget (exit code 3 in the CLI).
/// Never downgraded to an approximation.
class BudgetExceededError : public std::runtime_error {
public:
    BudgetExceededError(const std::string& what, std::string first_id, std::string second_id)
        : std::runtime_error(what), first(std::move(first_id)), second(std::move(second_id)) {}

    std::string first;
    std::string second;
};

} // namespace treestrat
