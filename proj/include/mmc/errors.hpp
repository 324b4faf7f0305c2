#pragma once

#include <stdexcept>
#include <string>

namespace mmc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Projection target segment has zero length.
class DegenerateSegment : public Error {
public:
    using Error::Error;
};

class EpsOutOfRange : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class CoincidentSeeds : public Error {
public:
    using Error::Error;
};

class MissingLabels : public Error {
public:
    using Error::Error;
};

class SingleClass : public Error {
public:
    using Error::Error;
};

class NonPositiveInput : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class EmptyPool : public Error {
public:
    using Error::Error;
};

class OracleFailure : public Error {
public:
    using Error::Error;
};

class WrongDimension : public Error {
public:
    using Error::Error;
};

class EmptyClass : public Error {
public:
    using Error::Error;
};

class InfeasibleSpec : public Error {
public:
    using Error::Error;
};

/// Malformed dataset / report / slab files.
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mmc
