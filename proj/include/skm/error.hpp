#pragma once

#include <stdexcept>
#include <string>

namespace skm {

// Every failure raised by the library carries a stable machine-readable code
// (used verbatim in JSON error payloads and CLI messages).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ParseError : public Error {
public:
    ParseError(std::string code, const std::string& message, int line, int column)
        : Error(std::move(code), "line " + std::to_string(line) + ", column " +
                                     std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace skm
