#ifndef PREFQ_ERRORS_HPP_
#define PREFQ_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prefq {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error
{
  public:
    SyntaxError(std::size_t position, const std::string& message)
        : Error("syntax error at " + std::to_string(position) + ": " + message),
          position_(position)
    {
    }

    std::size_t position() const noexcept { return position_; }

  private:
    std::size_t position_;
};

class TypeError : public Error
{
  public:
    using Error::Error;
};

class SchemaMismatch : public Error
{
  public:
    using Error::Error;
};

class StageCapExceeded : public Error
{
  public:
    explicit StageCapExceeded(int cap)
        : Error("fixpoint not reached within " + std::to_string(cap) + " stages")
    {
    }
};

class NotAnIntervalOrder : public Error
{
  public:
    NotAnIntervalOrder() : Error("preference relation is not an interval order") {}
};

class NotSPO : public Error
{
  public:
    NotSPO() : Error("preference relation is not a strict partial order") {}
};

class StaleCache : public Error
{
  public:
    using Error::Error;
};

class NotZeroCompatible : public Error
{
  public:
    NotZeroCompatible() : Error("utility preferences are not 0-compatible") {}
};

class HeaderMismatch : public Error
{
  public:
    using Error::Error;
};

class ValueParseError : public Error
{
  public:
    ValueParseError(std::size_t row, std::size_t column, const std::string& message)
        : Error("row " + std::to_string(row) + ", column " + std::to_string(column) + ": " +
                message),
          row_(row), column_(column)
    {
    }

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t row_;
    std::size_t column_;
};

class DuplicateTuple : public Error
{
  public:
    explicit DuplicateTuple(std::size_t row)
        : Error("duplicate tuple at row " + std::to_string(row)), row_(row)
    {
    }

    std::size_t row() const noexcept { return row_; }

  private:
    std::size_t row_;
};

class OverlapError : public Error
{
  public:
    OverlapError() : Error("insert and delete sets overlap") {}
};

class VersionError : public Error
{
  public:
    using Error::Error;
};

class IoError : public Error
{
  public:
    using Error::Error;
};

class NameError : public Error
{
  public:
    using Error::Error;
};

} // namespace prefq

#endif // PREFQ_ERRORS_HPP_
