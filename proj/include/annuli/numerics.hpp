#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace annuli {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_levels = 60;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;       // |I_k - I_{k-1}| of the last refinement
    int levels = 0;
    long evaluations = 0;
    bool converged = false;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Integrand = std::function<double(double)>;

// Tanh-sinh (double exponential) quadrature on the open interval (a, b).
// Endpoints are never evaluated; integrable algebraic endpoint
// singularities such as (y - a)^{-1/2} are handled at full accuracy.
// Never throws on non-convergence; inspect .converged.
QuadratureResult integrate_full(const Integrand& f, double a, double b,
                                const QuadratureSpec& spec = {});

// Throwing wrapper around integrate_full.
double integrate(const Integrand& f, double a, double b,
                 const QuadratureSpec& spec = {});

enum class SingularEnd { Lower, Upper, Both };

// Value of an improper integral, or +/-infinity when it diverges.
// Tries direct tanh-sinh first; if that fails, integrates on nested
// intervals shrinking toward the singular end(s) and declares infinity
// when the partial values grow beyond 1e12 or fail to Cauchy-converge
// after max_levels shrink steps.
double integrate_or_divergent(const Integrand& f, double a, double b,
                              SingularEnd where, const QuadratureSpec& spec = {});

// Hybrid bisection / inverse-quadratic root finder (Brent).
// Requires f(lo) * f(hi) <= 0; the result always lies in [lo, hi].
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-12);

struct MonotoneTable {
    std::vector<double> abscissae;  // strictly increasing
    std::vector<double> values;     // strictly monotone (either direction)

    MonotoneTable() = default;
    MonotoneTable(std::vector<double> xs, std::vector<double> ys);

    std::size_t size() const { return abscissae.size(); }
    bool increasing() const { return values.back() > values.front(); }
};

// Fritsch-Carlson monotonicity-preserving piecewise cubic Hermite
// interpolant. Works for non-monotone data too (slopes flatten at
// local extrema); strictly shape preserving on monotone segments.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> xs, std::vector<double> ys);

    double operator()(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }

private:
    std::size_t segment(double x) const;
    std::vector<double> xs_, ys_, slopes_;
};

// Evaluator of the inverse of a strictly monotone tabulated function.
// Built from monotone cubic interpolation of the swapped table, with one
// guarded Newton refinement against the forward evaluator when supplied.
class MonotoneInverse {
public:
    MonotoneInverse() = default;
    explicit MonotoneInverse(const MonotoneTable& table,
                             std::function<double(double)> forward = {},
                             std::function<double(double)> forward_deriv = {});

    // Throws std::out_of_range for queries outside the tabulated value range.
    double operator()(double y) const;

    double y_min() const { return y_lo_; }
    double y_max() const { return y_hi_; }

private:
    MonotoneCubic inverse_;
    std::function<double(double)> forward_, forward_deriv_;
    double y_lo_ = 0.0, y_hi_ = 0.0;
    double x_lo_ = 0.0, x_hi_ = 0.0;
    bool value_increasing_ = true;
};

MonotoneInverse invert_monotone(const MonotoneTable& table,
                                std::function<double(double)> forward = {},
                                std::function<double(double)> forward_deriv = {});

// Central difference derivatives, used by self-checks and tests.
double fd_derivative(const std::function<double(double)>& f, double x, double h);
double fd_second(const std::function<double(double)>& f, double x, double h);

}  // namespace annuli
