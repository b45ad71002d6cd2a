#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "annuli/numerics.hpp"

#include <json.hpp>

namespace annuli {

enum class MetricKind { Euclidean, Inverse, Sphere, Hyperbolic, Power, Tabulated };

std::string to_string(MetricKind kind);
MetricKind metric_kind_from_string(const std::string& name);

// Open interval on which a density is positive and smooth.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Radial conformal density rho(|w|) on an annulus target, with analytic
// evaluators for the first two derivatives of log rho. Immutable value
// type; cheap to copy and safe to share across threads.
class RadialMetric {
public:
    MetricKind kind() const;
    const Interval& domain() const;
    const std::vector<double>& params() const;
    std::string name() const;

    double rho(double s) const;
    double dlog_rho(double s) const;
    double d2log_rho(double s) const;

    // Same density on a narrower domain.
    RadialMetric restricted(double lo, double hi) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    explicit RadialMetric(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    friend RadialMetric builtin(MetricKind, const std::vector<double>&);
    friend RadialMetric tabulated_metric(std::vector<double>, std::vector<double>);
};

// Density families: euclidean rho=1, inverse rho=1/s, sphere rho=2/(1+s^2),
// hyperbolic rho=2/(1-s^2) on (0,1), power rho=s^alpha (params={alpha}).
RadialMetric builtin(MetricKind kind, const std::vector<double>& params = {});

// Density sampled at strictly increasing abscissae; log rho is interpolated
// with a monotonicity-preserving cubic and derivatives come from the
// interpolant.
RadialMetric tabulated_metric(std::vector<double> s, std::vector<double> rho);

// K = -(lap log rho)/rho^2 with the radial Laplacian
// (log rho)'' + (log rho)'/s. Evaluation below s = 1e-8 is refused.
double gauss_curvature(const RadialMetric& metric, double s);

// 2*pi * int_delta^sigma s rho^2(s) ds, or +infinity when the improper
// integral diverges. sigma may be +infinity.
double metric_area(const RadialMetric& metric, double delta, double sigma,
                   const QuadratureSpec& spec = {});

// inf of s*rho(s) on (delta,sigma) attained as the right limit at delta,
// plus bounded curvature on the sampled interval.
bool is_regular(const RadialMetric& metric, double delta, double sigma);

// Finite area and bounded curvature on the sampled interval.
bool is_allowable(const RadialMetric& metric, double delta, double sigma);

// {"kind": ..., "params": {...}, "domain": [lo, hi]}; unknown keys rejected.
RadialMetric metric_from_json(const nlohmann::json& j);
nlohmann::json metric_to_json(const RadialMetric& metric);

// CSV with header `s,rho` -> tabulated metric.
RadialMetric metric_from_csv(std::istream& in);

// Builtin name ("euclidean", "power:1.5", ...) or a path to a JSON/CSV file.
RadialMetric metric_from_spec(const std::string& name_or_path);

}  // namespace annuli
