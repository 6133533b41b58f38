#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csmw {

/// Base of every error raised by the toolkit. `code()` is a stable,
/// machine-readable identifier (e.g. "constraint-conflict").
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class GuardSyntaxError : public Error {
public:
    GuardSyntaxError(std::size_t offset, const std::string& message)
        : Error("guard-syntax", "guard syntax error at offset " + std::to_string(offset) + ": " + message),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class ModelSyntaxError : public Error {
public:
    ModelSyntaxError(int line, const std::string& message)
        : Error("model-syntax", "line " + std::to_string(line) + ": " + message), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace csmw
