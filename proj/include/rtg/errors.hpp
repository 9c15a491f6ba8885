// errors.hpp — Exception hierarchy shared by all rtg components.
//
// Each class maps to one stable error kind (and CLI exit code):
//   invalid_input      -> "invalid-input"      (exit 2)
//   config_error       -> "config-error"       (exit 2)
//   numerical_failure  -> "numerical-failure"  (exit 3)
//   resource_refusal   -> "resource-refusal"   (exit 4)
//   unsupported_operation -> "unsupported-operation" (exit 2)
#pragma once

#include <stdexcept>
#include <string>

namespace rtg {

class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
    [[nodiscard]] virtual const char* kind() const noexcept { return "internal-error"; }
    [[nodiscard]] virtual int exit_code() const noexcept { return 1; }
};

// Caller passed an argument outside the documented domain.
class invalid_input : public error {
public:
    using error::error;
    [[nodiscard]] const char* kind() const noexcept override { return "invalid-input"; }
    [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

// Configuration text failed validation; message lists every violation.
class config_error : public error {
public:
    using error::error;
    [[nodiscard]] const char* kind() const noexcept override { return "config-error"; }
    [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

// A numerical routine could not reach its tolerance within budget.
// Carries the partial result and the error estimate actually achieved.
class numerical_failure : public error {
public:
    numerical_failure(const std::string& what, double partial, double achieved_error)
        : error(what), partial_result(partial), achieved_error(achieved_error) {}
    explicit numerical_failure(const std::string& what)
        : error(what), partial_result(0.0), achieved_error(0.0) {}
    [[nodiscard]] const char* kind() const noexcept override { return "numerical-failure"; }
    [[nodiscard]] int exit_code() const noexcept override { return 3; }

    double partial_result;
    double achieved_error;
};

// Request exceeds the configured resource cap; message suggests a remedy.
class resource_refusal : public error {
public:
    using error::error;
    [[nodiscard]] const char* kind() const noexcept override { return "resource-refusal"; }
    [[nodiscard]] int exit_code() const noexcept override { return 4; }
};

// The model variant does not provide the evaluator this operation needs.
class unsupported_operation : public error {
public:
    using error::error;
    [[nodiscard]] const char* kind() const noexcept override { return "unsupported-operation"; }
    [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

} // namespace rtg
