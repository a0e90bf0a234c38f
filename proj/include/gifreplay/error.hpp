#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gifreplay {

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or malformed media (GIF/PNG/JPEG/frame directory).
class DecodeError : public Error {
public:
    using Error::Error;
};

// Caller broke a documented precondition (e.g. SSIM size mismatch).
class ContractError : public Error {
public:
    using Error::Error;
};

// A recording source with nothing in it (e.g. a frame directory with no
// images). Subtype of DecodeError so generic input handling catches both.
class EmptyInputError : public DecodeError {
public:
    using DecodeError::DecodeError;
};

// Manifest validation failure; carries every violation, not just the first.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::vector<std::string> violations)
        : Error(what), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

// Path enumeration hit max_paths or max_depth.
class ExplosionError : public Error {
public:
    ExplosionError(const std::string& what, const std::string& limit_name)
        : Error(what), limit_(limit_name) {}

    const std::string& limit() const { return limit_; }

private:
    std::string limit_;
};

// No path from the launch node to the trace target.
class UnreachableError : public Error {
public:
    UnreachableError(const std::string& what, std::string target)
        : Error(what), target_(std::move(target)) {}

    const std::string& target() const { return target_; }

private:
    std::string target_;
};

}  // namespace gifreplay
