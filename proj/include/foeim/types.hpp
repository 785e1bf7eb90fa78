// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <sstream>
#include <stdexcept>
#include <string>

namespace foeim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Newton iteration failed to converge; carries the residual history.
class NewtonError : public Error {
public:
    NewtonError(const std::string& what, std::vector<double> residuals)
        : Error(what), residual_history(std::move(residuals)) {}
    std::vector<double> residual_history;
};

/// A nonlinear function returned NaN/Inf during quadrature evaluation.
class EvaluationError : public Error {
public:
    using Error::Error;
};

namespace detail {
[[noreturn]] inline void fail(const char* cond, const std::string& msg) {
    std::ostringstream os;
    os << msg << " (violated: " << cond << ")";
    throw Error(os.str());
}
} // namespace detail

} // namespace foeim

#define FOEIM_REQUIRE(cond, msg)                                   \
    do {                                                           \
        if (!(cond)) {                                             \
            std::ostringstream os_;                                \
            os_ << msg;                                            \
            ::foeim::detail::fail(#cond, os_.str());               \
        }                                                          \
    } while (0)
