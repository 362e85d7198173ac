#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mobius {

// Caller passed a value outside an operation's admissible range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Range does not fit the 64-bit sieve (products of small primes must fit).
class CapacityError : public std::range_error {
public:
    using std::range_error::range_error;
};

// A formula is undefined at the requested point (iterated logs, E(x) = 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed spec string or checkpoint file. `line` is 0 when not file-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mobius
