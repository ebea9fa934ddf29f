#ifndef TIKMOR_CORE_HPP
#define TIKMOR_CORE_HPP

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tikmor
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index  = Eigen::Index;

//
// Exception hierarchy. Solvers signal non-convergence through their result
// objects; exceptions are reserved for invalid input and numerical failure.
//
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnsupportedFormat : public Error
{
public:
    using Error::Error;
};

/// Iterative solve ran out of budget; carries the residual it reached.
class ConvergenceError : public Error
{
public:
    ConvergenceError(const std::string& what, double achieved)
        : Error(what + " (achieved residual " + std::to_string(achieved) + ")"),
          achieved_(achieved)
    {
    }

    double achieved_residual() const noexcept { return achieved_; }

private:
    double achieved_;
};

class DegenerateRhs : public Error
{
public:
    using Error::Error;
};

class SingularJacobian : public Error
{
public:
    using Error::Error;
};

/// The noise level cannot be matched by any positive regularization parameter.
class InfeasibleDiscrepancy : public Error
{
public:
    using Error::Error;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

} // namespace tikmor

#endif // TIKMOR_CORE_HPP
