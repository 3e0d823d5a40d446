#ifndef ETRAP_ERRORS_HPP
#define ETRAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace etrap {

// Base class for all toolkit errors so callers can catch in one place.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

struct invalid_dimension_error : error {
    using error::error;
};

struct shape_error : error {
    using error::error;
};

// A stated contract (Hermiticity, normalization, ...) was violated by an input.
struct contract_violation : error {
    using error::error;
};

// Evaluation requested on (or numerically at) a pole of a closed form.
struct singularity_error : error {
    using error::error;
};

struct divergence_error : error {
    using error::error;
};

struct step_size_error : error {
    using error::error;
};

struct parse_error : error {
    parse_error(const std::string& msg, long line)
        : error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    long line_number;
};

struct fit_error : error {
    using error::error;
};

struct config_error : error {
    using error::error;
};

} // namespace etrap

#endif
