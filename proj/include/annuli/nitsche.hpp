#pragma once

#include <stdexcept>

#include "annuli/metric.hpp"
#include "annuli/numerics.hpp"

namespace annuli {

// Requested source modulus lies beyond the critical one; the energy-minimal
// map degenerates and the caller must use the affine branch instead.
class BranchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Least gamma keeping s^2 rho^2(s) + gamma >= 0 on [delta, 1], i.e.
// -min of (s rho(s))^2, located numerically (never assumed at delta).
struct GammaFloor {
    double value = 0.0;
    double argmin = 0.0;
};

GammaFloor gamma_floor_info(const RadialMetric& metric, double delta);
double gamma_floor(const RadialMetric& metric, double delta);

// Source modulus of the gamma-family map onto A(delta, 1):
// tau = int_delta^1 rho(y) dy / sqrt(y^2 rho^2(y) + gamma).
// Returns +infinity when the integral diverges at gamma = gamma_floor.
double tau_of_gamma(const RadialMetric& metric, double delta, double gamma,
                    const QuadratureSpec& spec = {});

// Floor data plus the critical source modulus tau_of_gamma(gamma_floor).
struct NitscheBranch {
    GammaFloor floor;
    double tau_critical = 0.0;  // may be +infinity
};

NitscheBranch nitsche_branch(const RadialMetric& metric, double delta,
                             const QuadratureSpec& spec = {});

// Unique gamma with tau_of_gamma = tau; requires 0 < tau < tau_critical.
double solve_gamma(const RadialMetric& metric, double delta, double tau,
                   const QuadratureSpec& spec = {});
double solve_gamma(const RadialMetric& metric, double delta,
                   const NitscheBranch& branch, double tau,
                   const QuadratureSpec& spec = {});

// Radial harmonic diffeomorphism w(s e^{it}) = p(s) e^{it} from
// A(e^{-tau}, 1) onto A(delta, 1), normalized by w(e^{it}) = e^{it}.
class NitscheMap {
public:
    NitscheMap(RadialMetric metric, double gamma, double delta, double tau,
               MonotoneTable q_samples);

    const RadialMetric& metric() const { return metric_; }
    double gamma() const { return gamma_; }
    double delta() const { return delta_; }
    double tau() const { return tau_; }
    double inner_radius() const;  // e^{-tau}
    const MonotoneTable& q_table() const { return q_table_; }

    double q(double s) const;        // profile of the inverse map, [delta,1] -> [e^{-tau},1]
    double p(double x) const;        // q^{-1}, [e^{-tau},1] -> [delta,1]
    double p_prime(double x) const;  // sqrt(p^2 rho^2(p) + gamma) / (x rho(p))

private:
    RadialMetric metric_;
    double gamma_, delta_, tau_;
    MonotoneTable q_table_;
    MonotoneCubic q_interp_;
    MonotoneInverse p_eval_;
};

// Samples q on a 1025-point grid (clustered toward the radicand zero for
// near-critical gamma) and inverts it.
NitscheMap build_map(const RadialMetric& metric, double delta, double gamma,
                     const QuadratureSpec& spec = {});

// Hopf(w) = gamma / (4 z^2); the constant is gamma / 4.
double hopf_constant(const NitscheMap& map);

// Max over interior samples of the relative deviation of
// rho^2(p(s)) (s^2 p'(s)^2 - p(s)^2) / 4 from gamma / 4, with p'
// taken from finite differences of the built profile.
double hopf_residual(const NitscheMap& map, int n_samples);

struct CriticalData {
    double gamma_floor = 0.0;
    double tau_critical = 0.0;  // extended real
    double psi_value = 0.0;     // int_delta^1 rho dy / sqrt(y^2 rho^2 - delta^2 rho^2(delta)); NaN if undefined
    bool discrepancy_flag = false;
};

CriticalData critical_data(const RadialMetric& metric, double delta,
                           const QuadratureSpec& spec = {});

// Quasiconformality constant of the gamma-family map:
// max{ sqrt((g0-gamma)/g0), sqrt(g0/(g0-gamma)) } with g0 = gamma_floor.
// +infinity at the floor (harmonic but not quasiconformal).
double qc_constant(const RadialMetric& metric, double delta, double gamma);

// Pointwise distortion at target radius p:
// max{ sqrt(gamma + p^2 rho^2(p)) / (p rho(p)), its reciprocal }.
double pointwise_distortion(const RadialMetric& metric, double gamma, double p);

// {gamma, delta, tau, samples: [[s, q(s)], ...]}
nlohmann::json nitsche_map_to_json(const NitscheMap& map);

}  // namespace annuli
