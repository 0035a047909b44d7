#pragma once

#include <stdexcept>
#include <string>

namespace eyesym {

/// Invalid argument to an operation (bad sigma, kernel size, rank, ...).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input data violates a domain invariant (degenerate circles, bad manifest, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// No response maximum passed the argument threshold; there is no detectable
/// circular structure in the image.
class NoEyeFound : public std::runtime_error {
public:
    explicit NoEyeFound(const std::string& what) : std::runtime_error(what) {}
};

/// Every pixel of the image is below the local-variance floor.
class FlatImage : public std::runtime_error {
public:
    explicit FlatImage(const std::string& what) : std::runtime_error(what) {}
};

/// A vector that must normalize to a probability distribution sums to zero.
class ZeroVector : public std::runtime_error {
public:
    explicit ZeroVector(const std::string& what) : std::runtime_error(what) {}
};

/// Two iris codes share no jointly valid bits.
class EmptyOverlap : public std::runtime_error {
public:
    explicit EmptyOverlap(const std::string& what) : std::runtime_error(what) {}
};

/// The width-calibration fit is singular.
class DegenerateCalibration : public std::runtime_error {
public:
    explicit DegenerateCalibration(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be read, written or parsed.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace eyesym
