#pragma once

#include <stdexcept>
#include <string>

namespace faqrank {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (bad JSON, bad run line). Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a data-model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A pluggable analyzer failed.
class AnalysisError : public Error {
public:
    using Error::Error;
};

/// Remote scorer unreachable, timed out, or kept failing after retries.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Remote scorer answered with something that breaks the wire contract.
class ProtocolError : public Error {
public:
    using Error::Error;
};

}  // namespace faqrank
