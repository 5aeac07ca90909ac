#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace for2for {

/// Error categories; the numeric value doubles as the CLI exit code.
enum class ErrorKind { Usage = 1, Data = 2, Numeric = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

    std::string_view code() const noexcept {
        switch (kind_) {
            case ErrorKind::Usage: return "usage";
            case ErrorKind::Data: return "data";
            case ErrorKind::Numeric: return "numeric";
        }
        return "unknown";
    }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& m) : Error(ErrorKind::Usage, m) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& m) : Error(ErrorKind::Data, m) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& m) : Error(ErrorKind::Numeric, m) {}
};

}  // namespace for2for
