#pragma once

#include <stdexcept>
#include <string>

namespace dcb {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shape / extent mismatch between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A caller broke an operation's precondition (non-scalar loss,
/// non-monotone memory index, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Memory bank write past its fixed capacity.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// An operation that requires stored memory was called on an empty bank.
class EmptyMemoryError : public Error {
public:
    using Error::Error;
};

/// Malformed on-disk data (bad magic, wrong version, truncation).
/// Carries the byte offset at which the problem was detected.
class FormatError : public Error {
public:
    FormatError(const std::string& msg, long long offset)
        : Error(msg + " (byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
    long long offset() const { return offset_; }

private:
    long long offset_;
};

/// Invalid run configuration (bad extents, unknown keys, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Training diverged (non-finite loss). Carries the offending optimizer step.
class TrainingError : public Error {
public:
    TrainingError(const std::string& msg, long long step)
        : Error(msg + " (optimizer step " + std::to_string(step) + ")"), step_(step) {}
    long long step() const { return step_; }

private:
    long long step_;
};

}  // namespace dcb
