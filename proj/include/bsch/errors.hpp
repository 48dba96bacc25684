#ifndef BSCH_ERRORS_HPP
#define BSCH_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace bsch {

// Argument outside the admissible domain of a singular potential,
// or an out-of-range model parameter.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Field shape does not match the owning grid.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A scalar root solve exhausted its iteration budget. Signals a
// tolerance or bracketing bug, not bad user input.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Newton exhausted its budget; callers should retry with smaller dt.
struct NewtonDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A Newton trial escaped the separation guard even after full
// backtracking. Internal bug signal for singular potentials.
struct SeparationBreach : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// sigma > 0 requires the previous state and dt.
struct MissingPrev : std::logic_error {
    using std::logic_error::logic_error;
};

// Iterative linear solver stagnated.
struct LinearBreakdown : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation applied to a potential kind it does not support.
struct KindMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Not enough samples/records for a fit.
struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Time loop hit the dt floor.
struct Aborted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config syntax error with position information.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error(msg), line(line), column(column) {}
    int line = 0;
    int column = 0;
};

// Semantic config errors; collects every violation, key-path qualified.
struct ValidationError : std::runtime_error {
    explicit ValidationError(std::vector<std::string> issues_)
        : std::runtime_error(join(issues_)), issues(std::move(issues_)) {}
    std::vector<std::string> issues;

  private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "config validation failed:";
        for (const auto& e : v) {
            s += "\n  " + e;
        }
        return s;
    }
};

} // namespace bsch

#endif
