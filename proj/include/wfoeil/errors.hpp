#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wfoeil {

// Process exit codes shared by the library errors and the CLI.
enum class ExitCode : int { ok = 0, invalid = 1, resource = 2, capability = 3 };

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

struct SourceSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, SourceSpan span)
        : Error(ExitCode::invalid, format(what, span)), message_(what), span_(span) {}

    const SourceSpan& span() const noexcept { return span_; }
    const std::string& message() const noexcept { return message_; }

private:
    static std::string format(const std::string& what, const SourceSpan& s) {
        return std::to_string(s.line) + ":" + std::to_string(s.column) + ": " + what;
    }
    std::string message_;
    SourceSpan span_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ExitCode::invalid, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ExitCode::invalid, what) {}
};

class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& what) : Error(ExitCode::resource, what) {}
};

class AlphabetBlowupError : public ResourceError {
public:
    using ResourceError::ResourceError;
};

class BudgetExceededError : public ResourceError {
public:
    BudgetExceededError(const std::string& what, std::string subformula)
        : ResourceError(what), subformula_(std::move(subformula)) {}
    const std::string& subformula() const noexcept { return subformula_; }

private:
    std::string subformula_;
};

class CapabilityError : public Error {
public:
    explicit CapabilityError(const std::string& what) : Error(ExitCode::capability, what) {}
};

}  // namespace wfoeil
