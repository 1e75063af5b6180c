#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sepsys {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A template or model was evaluated outside its mathematical domain
// (log of a non-positive argument, 0 raised to a negative power, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class TargetEvalError : public Error {
public:
    TargetEvalError(std::string const& what, std::vector<double> point)
        : Error(what), point_(std::move(point)) {}

    [[nodiscard]] auto point() const -> std::vector<double> const& { return point_; }

private:
    std::vector<double> point_;
};

class StructureError : public Error {
public:
    using Error::Error;
};

class DegenerateContextError : public Error {
public:
    using Error::Error;
};

class UnsupportedArity : public Error {
public:
    using Error::Error;
};

class NoModelFits : public Error {
public:
    NoModelFits(std::string const& what, double best_mse)
        : Error(what), best_mse_(best_mse) {}

    [[nodiscard]] auto best_mse() const -> double { return best_mse_; }

private:
    double best_mse_;
};

class IllConditionedAssembly : public Error {
public:
    IllConditionedAssembly(std::string const& what, double condition)
        : Error(what), condition_(condition) {}

    [[nodiscard]] auto condition() const -> double { return condition_; }

private:
    double condition_;
};

// Raised by run_mbb; carries the pipeline stage that failed.
class StageError : public Error {
public:
    StageError(std::string stage, std::string const& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}

    [[nodiscard]] auto stage() const -> std::string const& { return stage_; }

private:
    std::string stage_;
};

} // namespace sepsys
