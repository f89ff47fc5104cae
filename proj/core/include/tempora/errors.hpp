#pragma once

#include <stdexcept>
#include <string>

namespace tempora {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Bad input data: manifests, corpora, feature files (CLI exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

/// Model file or feature-schema mismatch (CLI exit code 4).
class ModelError : public Error {
public:
    using Error::Error;
};

}  // namespace tempora
