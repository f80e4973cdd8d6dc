#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace subres {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A potential (or derived quantity) evaluated to a non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Problem size exceeds a dense-linear-algebra cap.
class SizeCapError : public Error {
public:
    using Error::Error;
};

/// Power-law fit could not be formed.
class FitError : public Error {
public:
    using Error::Error;
};

/// Malformed run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

std::string format_point(const Vec& x);

}  // namespace subres
