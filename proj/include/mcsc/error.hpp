#pragma once

#include <stdexcept>
#include <string>

namespace mcsc {

// Base of every error the library raises. kind() is a stable short name the
// CLI prints before the message.
class Error : public std::runtime_error
{
  public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind))
    {
    }

    const std::string& kind() const noexcept { return kind_; }

  private:
    std::string kind_;
};

class FramingError : public Error
{
  public:
    explicit FramingError(const std::string& what) : Error("framing-error", what) {}
};

class RangeError : public Error
{
  public:
    explicit RangeError(const std::string& what) : Error("range-error", what) {}
};

class InvalidChannelPlan : public Error
{
  public:
    explicit InvalidChannelPlan(const std::string& what) : Error("invalid-channel-plan", what) {}
};

class InvalidConfig : public Error
{
  public:
    explicit InvalidConfig(const std::string& what) : Error("invalid-config", what) {}
};

class NotSynchronized : public Error
{
  public:
    explicit NotSynchronized(const std::string& what) : Error("not-synchronized", what) {}
};

// Validation failure of a scenario document; field() names the offending path.
class ValidationError : public Error
{
  public:
    ValidationError(std::string field, const std::string& what)
        : Error("validation-error", field + ": " + what), field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

// Simulator bug guard, never expected in a correct run.
class ConsistencyError : public Error
{
  public:
    explicit ConsistencyError(const std::string& what) : Error("consistency-error", what) {}
};

class LogFormatError : public Error
{
  public:
    explicit LogFormatError(const std::string& what) : Error("log-format-error", what) {}
};

} // namespace mcsc
