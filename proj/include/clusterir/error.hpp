#pragma once

#include <stdexcept>
#include <string>

namespace clusterir {

// Base class for all engine errors. Subclasses map to distinct CLI exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File not found / unreadable / unwritable.
struct IoError : Error {
    using Error::Error;
};

// Malformed input file; message carries the line number where possible.
struct ParseError : Error {
    using Error::Error;
};

// Input violates a structural invariant (duplicate id, rank gap, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Parameter conflicts with a stored manifest or another parameter.
struct ConfigError : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// A word or document id that should exist does not.
struct LookupError : Error {
    using Error::Error;
};

// Stored index was written by a different format version.
struct IncompatibleIndexError : Error {
    using Error::Error;
};

// Stored index directory is missing files or unreadable.
struct CorruptIndexError : Error {
    using Error::Error;
};

} // namespace clusterir
