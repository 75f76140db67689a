#ifndef ANNC_ERRORS_HPP
#define ANNC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace annc {

/// Base class of every error thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Points or curves of different dimension were combined.
class dimension_error : public error {
public:
    using error::error;
};

/// A value violates a structural invariant (e.g. a malformed alignment).
class structural_error : public error {
public:
    using error::error;
};

/// A configured size limit was exceeded.
class capacity_error : public error {
public:
    using error::error;
};

/// Invalid parameters (epsilon outside (0,1], non-positive radius, ...).
class config_error : public error {
public:
    using error::error;
};

/// Operation not available in the current mode (e.g. count on a near-neighbor index).
class mode_error : public error {
public:
    using error::error;
};

/// Unknown curve id, unsupported query length, ...
class lookup_error : public error {
public:
    using error::error;
};

/// File does not carry the expected magic/version or has inconsistent contents.
class format_error : public error {
public:
    using error::error;
};

/// File ended early or a length field is impossible.
class corruption_error : public format_error {
public:
    using format_error::format_error;
};

/// Input text could not be parsed. Carries the 1-based line number.
class parse_error : public error {
public:
    parse_error(std::size_t line, const std::string& what)
        : error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace annc

#endif // ANNC_ERRORS_HPP
