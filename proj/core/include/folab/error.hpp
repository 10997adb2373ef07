#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace folab {

/// Base class for every error the toolkit raises.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Syntax error while parsing an expression or a scenario file.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::string found, std::vector<std::string> expected);

    std::size_t offset() const { return offset_; }
    const std::string& found() const { return found_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::string found_;
    std::vector<std::string> expected_;
};

/// Numeric domain violation (log of non-positive, division by zero, ...)
/// raised during evaluation, carrying the byte offset of the offending node.
class EvalError : public Error {
public:
    EvalError(std::size_t offset, const std::string& what)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Misconfigured scenario data: asymmetric metric, non-positive-definite
/// metric, dependent spanning fields, non-involutive distribution, ...
class ScenarioError : public Error {
public:
    using Error::Error;
};

/// An operator was handed an argument violating its contract
/// (e.g. a non-normal field where a normal one is required).
class MisuseError : public Error {
public:
    using Error::Error;
};

/// A geodesic left the chart through a non-periodic face.
class BoundaryExitError : public Error {
public:
    BoundaryExitError(double exit_time, const std::string& what)
        : Error(what), exit_time_(exit_time) {}

    double exit_time() const { return exit_time_; }

private:
    double exit_time_;
};

} // namespace folab
