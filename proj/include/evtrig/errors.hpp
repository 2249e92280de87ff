#pragma once

#include <stdexcept>
#include <string>

namespace evtrig {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class NoStabilizingSolution : public Error {
public:
    using Error::Error;
};

class NotHurwitz : public Error {
public:
    using Error::Error;
};

// Free-boundary solver failures.
class NotStationary : public Error {
public:
    using Error::Error;
};

class OmegaTouchesBoundary : public Error {
public:
    using Error::Error;
};

class NonFiniteValue : public Error {
public:
    using Error::Error;
};

class EmptyOmega : public Error {
public:
    using Error::Error;
};

class NonFiniteState : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace evtrig
