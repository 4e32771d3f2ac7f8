#pragma once

#include <stdexcept>
#include <string>

namespace kbarrier {

/// Base for every error raised by the library. `kind()` is a stable,
/// machine-parsable class name used by the CLI on failure.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

struct SamplingError : Error {
    explicit SamplingError(const std::string& what) : Error("sampling", what) {}
};

struct GeometryError : Error {
    explicit GeometryError(const std::string& what) : Error("degenerate_geometry", what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error("parse", what) {}
};

struct NotFoundError : Error {
    explicit NotFoundError(const std::string& what) : Error("not_found", what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error("io", what) {}
};

struct StructuralError : Error {
    explicit StructuralError(const std::string& what) : Error("structural", what) {}
};

struct TrainingError : Error {
    explicit TrainingError(const std::string& what) : Error("training", what) {}
};

struct BudgetError : Error {
    explicit BudgetError(const std::string& what) : Error("budget", what) {}
};

struct UndefinedMetricError : Error {
    explicit UndefinedMetricError(const std::string& what) : Error("undefined_metric", what) {}
};

}  // namespace kbarrier
