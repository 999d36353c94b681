#pragma once

#include <stdexcept>
#include <string>

namespace cgems {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised (or carried in a TokenStream) when the source text cannot be tokenized.
class LexicalError : public Error {
public:
    LexicalError(const std::string& what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class StructureError : public Error {
public:
    StructureError(const std::string& what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Argument outside an operation's domain (bad k, width mismatch, cc < 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int row, int column)
        : Error("row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + what),
          row_(row), column_(column) {}
    int row() const noexcept { return row_; }
    int column() const noexcept { return column_; }

private:
    int row_;
    int column_;
};

/// The runner itself could not be used (missing binary, bad template).
class RunnerError : public Error {
public:
    using Error::Error;
};

/// The analyzed program ran but exited unsuccessfully.
class ExecutionError : public Error {
public:
    ExecutionError(const std::string& what, std::string diagnostics)
        : Error(what), diagnostics_(std::move(diagnostics)) {}
    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

class TimeoutError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    TrainingError(const std::string& what, int epoch)
        : Error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

}  // namespace cgems
