#pragma once

#include <stdexcept>
#include <string>

namespace cascadia {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad user-supplied data: missing inputs, invalid parameters, malformed files.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Ill-formed model definition: unknown modes, unassigned outputs, bad references.
class DefinitionError : public Error {
public:
    explicit DefinitionError(const std::string& what) : Error(what) {}
};

/// Non-finite value produced during integration or output evaluation.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

/// An automaton kept jumping on too many consecutive steps.
class ZenoError : public Error {
public:
    explicit ZenoError(const std::string& what) : Error(what) {}
};

/// Filesystem / stream failure.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

} // namespace cascadia
