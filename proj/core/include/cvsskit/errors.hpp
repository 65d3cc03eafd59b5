#pragma once

#include <stdexcept>
#include <string>

namespace cvsskit {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class VectorErrorKind {
    BadPrefix,
    WrongOrder,
    UnknownLabel,
    MissingMetric,
    TrailingGarbage,
};

const char* to_string(VectorErrorKind kind);

/// Rejection from the strict vector grammar. `where()` names the offending
/// metric, or the offending token for prefix/garbage errors.
class MalformedVector : public Error {
public:
    MalformedVector(VectorErrorKind kind, std::string where);

    VectorErrorKind kind() const noexcept { return kind_; }
    const std::string& where() const noexcept { return where_; }

private:
    VectorErrorKind kind_;
    std::string where_;
};

class IoError : public Error {
public:
    using Error::Error;
};

class CatalogParseError : public Error {
public:
    using Error::Error;
};

class TooFewRecords : public Error {
public:
    using Error::Error;
};

class MissingFewShot : public Error {
public:
    using Error::Error;
};

class EndpointUnreachable : public Error {
public:
    using Error::Error;
};

class RateLimitedExhausted : public Error {
public:
    using Error::Error;
};

class BadResponseShape : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class IllegalLabel : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class MissingComponent : public Error {
public:
    using Error::Error;
};

class NothingScoreable : public Error {
public:
    using Error::Error;
};

class CveMismatch : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace cvsskit
