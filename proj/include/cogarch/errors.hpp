#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cogarch {

// Base class for every error raised by the library. The `kind()` string is
// what the CLI prints as the machine-parsable reason.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define COGARCH_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    };

COGARCH_DEFINE_ERROR(OrderError)
COGARCH_DEFINE_ERROR(ValueError)
COGARCH_DEFINE_ERROR(NumericalError)
COGARCH_DEFINE_ERROR(PrecondError)
COGARCH_DEFINE_ERROR(SingularError)
COGARCH_DEFINE_ERROR(FeasibilityError)
COGARCH_DEFINE_ERROR(StabilityError)
COGARCH_DEFINE_ERROR(FamilyError)
COGARCH_DEFINE_ERROR(DataError)
COGARCH_DEFINE_ERROR(IoError)

#undef COGARCH_DEFINE_ERROR

// Optimizer failure; carries the best point found so callers can still report it.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> best_point, double best_value)
        : Error("ConvergenceError", what),
          best_point_(std::move(best_point)),
          best_value_(best_value) {}

    [[nodiscard]] const std::vector<double>& best_point() const noexcept { return best_point_; }
    [[nodiscard]] double best_value() const noexcept { return best_value_; }

private:
    std::vector<double> best_point_;
    double best_value_;
};

}  // namespace cogarch
