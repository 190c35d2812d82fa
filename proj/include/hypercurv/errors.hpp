#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hypercurv {

// Base of every library error. code() is the stable machine-readable tag the
// CLI reports in its error object.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("parse_error", "line " + std::to_string(line) + ": " + what), line_(line) {}

    // 1-based; 0 when the error is not tied to a line (e.g. empty input).
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IndexError : public Error {
public:
    explicit IndexError(const std::string& what) : Error("index_error", what) {}
};

class DisconnectedError : public Error {
public:
    explicit DisconnectedError(const std::string& what) : Error("disconnected", what) {}
};

class MarginalError : public Error {
public:
    explicit MarginalError(const std::string& what) : Error("marginal_mismatch", what) {}
};

class SupportCapExceeded : public Error {
public:
    SupportCapExceeded(double tuples, double cap)
        : Error("support_cap_exceeded",
                "joint support of " + std::to_string(tuples) + " tuples exceeds cap " +
                    std::to_string(cap)),
          tuples_(tuples) {}

    double tuples() const noexcept { return tuples_; }

private:
    double tuples_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error("no_convergence", what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class EpsilonFloorError : public Error {
public:
    explicit EpsilonFloorError(const std::string& what) : Error("epsilon_floor", what) {}
};

class NotAnEdgeError : public Error {
public:
    explicit NotAnEdgeError(const std::string& what) : Error("not_an_edge", what) {}
};

class NotAHyperpathError : public Error {
public:
    explicit NotAHyperpathError(const std::string& what) : Error("not_a_hyperpath", what) {}
};

class SizeCapError : public Error {
public:
    explicit SizeCapError(const std::string& what) : Error("size_cap_exceeded", what) {}
};

class LpError : public Error {
public:
    explicit LpError(const std::string& what) : Error("lp_failure", what) {}
};

class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& what) : Error("geometry_error", what) {}
};

class EpsilonInvalidError : public Error {
public:
    explicit EpsilonInvalidError(const std::string& what) : Error("epsilon_invalid", what) {}
};

class CollinearError : public Error {
public:
    explicit CollinearError(const std::string& what) : Error("collinear", what) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

}  // namespace hypercurv
