#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kos {

/// Stable error classes. The CLI maps each to an `ERROR <token>: <message>`
/// line; library users can catch the concrete types below.
enum class Errc {
    NotFound,
    Ambiguous,
    BadRelType,
    InvalidKb,
    FormatError,
    DuplicateId,
    ParseError,
};

inline const char* errcToken(Errc c) {
    switch (c) {
        case Errc::NotFound: return "NOT_FOUND";
        case Errc::Ambiguous: return "AMBIGUOUS";
        case Errc::BadRelType: return "BAD_RELTYPE";
        case Errc::InvalidKb: return "INVALID_KB";
        case Errc::FormatError: return "FORMAT_ERROR";
        case Errc::DuplicateId: return "DUPLICATE_ID";
        case Errc::ParseError: return "PARSE_ERROR";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }
    const char* codeToken() const noexcept { return errcToken(code_); }

private:
    Errc code_;
};

struct NotFoundError : Error {
    explicit NotFoundError(const std::string& m) : Error(Errc::NotFound, m) {}
};

struct AmbiguousError : Error {
    explicit AmbiguousError(const std::string& m) : Error(Errc::Ambiguous, m) {}
};

struct BadRelTypeError : Error {
    explicit BadRelTypeError(const std::string& m) : Error(Errc::BadRelType, m) {}
};

struct InvalidKbError : Error {
    explicit InvalidKbError(const std::string& m) : Error(Errc::InvalidKb, m) {}
};

/// Data-file violation; `line` is 1-based, 0 when unknown.
struct FormatError : Error {
    explicit FormatError(const std::string& m, std::size_t line = 0)
        : Error(Errc::FormatError, line ? "line " + std::to_string(line) + ": " + m : m),
          line(line) {}
    std::size_t line;
};

struct DuplicateIdError : Error {
    explicit DuplicateIdError(const std::string& m, std::size_t line = 0)
        : Error(Errc::DuplicateId, line ? "line " + std::to_string(line) + ": " + m : m),
          line(line) {}
    std::size_t line;
};

/// Query-text syntax error; `offset` is the 1-based byte position of the
/// first offending character.
struct ParseError : Error {
    ParseError(const std::string& m, std::size_t offset)
        : Error(Errc::ParseError, m + " at offset " + std::to_string(offset)),
          offset(offset) {}
    std::size_t offset;
};

} // namespace kos
