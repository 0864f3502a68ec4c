#pragma once

#include <stdexcept>
#include <string>

namespace ladder {

// Bad input: a parameter or config field failed validation.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& reason)
        : std::invalid_argument(field + ": " + reason), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// A numerical invariant was violated while running (leakage, norm, positivity, blow-up).
class InvariantViolation : public std::runtime_error {
public:
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

class LeakageError : public InvariantViolation {
public:
    LeakageError(double time_ns, double top_population)
        : InvariantViolation("population leaked into the top level (P=" +
                             std::to_string(top_population) + " at t=" +
                             std::to_string(time_ns) + " ns); increase n_levels"),
          time_ns_(time_ns), top_population_(top_population) {}

    double time_ns() const noexcept { return time_ns_; }
    double top_population() const noexcept { return top_population_; }

private:
    double time_ns_;
    double top_population_;
};

}  // namespace ladder
