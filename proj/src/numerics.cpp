#include "annuli/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace annuli {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kDivergenceGuard = 1e12;
constexpr long kEvalBudget = 2'000'000;

// One tanh-sinh node. |u| = (pi/2) sinh t; the abscissa is stored as a
// distance from the nearer endpoint so that points exponentially close
// to the endpoint keep full relative accuracy.
struct TsNode {
    double dist;    // distance from endpoint, in units of the half-width d
    double weight;  // (pi/2) cosh(t) sech^2(u), in units of d
};

bool ts_node(double t, TsNode& out) {
    const double u = kHalfPi * std::sinh(std::abs(t));
    if (u > 350.0) return false;  // distance underflows past this
    const double eu = std::exp(-2.0 * u);
    const double denom = 1.0 + eu;
    out.dist = 2.0 * eu / denom;
    out.weight = kHalfPi * std::cosh(t) * 4.0 * eu / (denom * denom);
    return out.dist > 0.0 && out.weight > 0.0;
}

void validate_spec(const QuadratureSpec& spec) {
    if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0))
        throw std::invalid_argument("quadrature tolerances must be positive");
    if (spec.max_levels < 10)
        throw std::invalid_argument("quadrature max_levels must be >= 10");
}

}  // namespace

QuadratureResult integrate_full(const Integrand& f, double a, double b,
                                const QuadratureSpec& spec) {
    validate_spec(spec);
    if (!(a < b)) {
        if (a == b) return {0.0, 0.0, 0, 0, true};
        throw std::invalid_argument("integrate: requires a < b");
    }

    const double d = 0.5 * (b - a);
    QuadratureResult res;

    // Sums w*f over all nodes of the current spacing; I_k = h_k * sum.
    long double sum = 0.0L;

    auto add_node = [&](double t, bool& alive) -> bool {
        TsNode n;
        if (!ts_node(t, n)) {
            alive = false;
            return true;
        }
        const double g = d * n.dist;
        const double x = (t >= 0.0) ? b - g : a + g;
        if (!(x > a && x < b)) {
            alive = false;
            return true;
        }
        const double fv = f(x);
        ++res.evaluations;
        if (!std::isfinite(fv)) {
            res.value = fv;
            res.error = std::numeric_limits<double>::infinity();
            return false;
        }
        sum += static_cast<long double>(d * n.weight) * fv;
        return true;
    };

    // Level 0: integer nodes.
    {
        bool alive = true;
        const double f0 = f(0.5 * (a + b));
        ++res.evaluations;
        if (!std::isfinite(f0)) {
            res.value = f0;
            return res;
        }
        sum += static_cast<long double>(d * kHalfPi) * f0;
        for (int j = 1; alive; ++j) {
            bool alive_p = true, alive_m = true;
            if (!add_node(static_cast<double>(j), alive_p)) return res;
            if (!add_node(-static_cast<double>(j), alive_m)) return res;
            alive = alive_p || alive_m;
        }
    }

    double h = 1.0;
    double prev = static_cast<double>(sum) * h;
    if (std::abs(prev) > kDivergenceGuard) {
        res.value = prev;
        return res;
    }

    for (int level = 1; level <= spec.max_levels; ++level) {
        h *= 0.5;
        // New nodes at odd multiples of h.
        bool alive = true;
        for (long j = 1; alive; j += 2) {
            const double t = static_cast<double>(j) * h;
            bool alive_p = true, alive_m = true;
            if (!add_node(t, alive_p)) return res;
            if (!add_node(-t, alive_m)) return res;
            alive = alive_p || alive_m;
        }
        const double cur = static_cast<double>(sum) * h;
        res.levels = level;
        res.value = cur;
        if (std::abs(cur) > kDivergenceGuard) return res;

        if (level >= 2) {
            res.error = std::abs(cur - prev);
            const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(cur));
            if (res.error <= tol) {
                res.converged = true;
                return res;
            }
        }
        prev = cur;
        if (res.evaluations > kEvalBudget) return res;
    }
    return res;
}

double integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
    const QuadratureResult r = integrate_full(f, a, b, spec);
    if (!r.converged)
        throw QuadratureError("quadrature failed to converge (levels=" +
                              std::to_string(r.levels) + ", last=" +
                              std::to_string(r.value) + ")");
    return r.value;
}

double integrate_or_divergent(const Integrand& f, double a, double b,
                              SingularEnd where, const QuadratureSpec& spec) {
    const QuadratureResult direct = integrate_full(f, a, b, spec);
    if (direct.converged && std::isfinite(direct.value) &&
        std::abs(direct.value) <= kDivergenceGuard)
        return direct.value;

    const double inf = std::numeric_limits<double>::infinity();
    const double width = b - a;
    double ea = (where != SingularEnd::Upper) ? 1e-3 * width : 0.0;
    double eb = (where != SingularEnd::Lower) ? 1e-3 * width : 0.0;

    bool have_prev = false;
    double prev = 0.0, last = 0.0;
    for (int k = 0; k <= spec.max_levels; ++k) {
        const double lo = a + ea, hi = b - eb;
        if (!(lo < hi)) break;
        // Stop once the offsets drop below the representable spacing.
        if (ea > 0.0 && lo == a) break;
        if (eb > 0.0 && hi == b) break;

        const QuadratureResult r = integrate_full(f, lo, hi, spec);
        if (!std::isfinite(r.value)) return std::copysign(inf, r.value);
        last = r.value;
        if (std::abs(last) > kDivergenceGuard) return std::copysign(inf, last);
        // Loose Cauchy test: this path only classifies convergent-vs-divergent
        // after the direct pass failed; precision comes from the direct pass.
        if (have_prev &&
            std::abs(last - prev) <= std::max(100.0 * spec.abs_tol, 1e-8 * (1.0 + std::abs(last))))
            return last;
        prev = last;
        have_prev = true;
        ea *= 0.25;
        eb *= 0.25;
    }
    return std::copysign(inf, last == 0.0 ? 1.0 : last);
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol) {
    if (!(lo < hi)) throw std::invalid_argument("find_root: requires lo < hi");
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (std::isnan(fa) || std::isnan(fb))
        throw NumericError("find_root: function returned NaN at bracket");
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw std::invalid_argument("find_root: no sign change on bracket");

    // Brent's method.
    double c = a, fc = fa;
    double e = b - a, dstep = e;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // Inverse quadratic / secant step.
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = dstep;
                dstep = p / q;
            } else {
                dstep = xm;
                e = dstep;
            }
        } else {
            dstep = xm;
            e = dstep;
        }
        a = b;
        fa = fb;
        b += (std::abs(dstep) > tol1) ? dstep : std::copysign(tol1, xm);
        fb = f(b);
        if (std::isnan(fb)) throw NumericError("find_root: function returned NaN");
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            e = dstep = b - a;
        }
    }
    return b;
}

MonotoneTable::MonotoneTable(std::vector<double> xs, std::vector<double> ys)
    : abscissae(std::move(xs)), values(std::move(ys)) {
    if (abscissae.size() != values.size())
        throw std::invalid_argument("MonotoneTable: length mismatch");
    if (abscissae.size() < 4)
        throw std::invalid_argument("MonotoneTable: need at least 4 samples");
    for (std::size_t i = 1; i < abscissae.size(); ++i)
        if (!(abscissae[i] > abscissae[i - 1]))
            throw std::invalid_argument("MonotoneTable: abscissae not strictly increasing");
    const bool inc = values[1] > values[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double dv = values[i] - values[i - 1];
        if (dv == 0.0 || (dv > 0.0) != inc)
            throw std::invalid_argument("MonotoneTable: values not strictly monotone");
    }
}

MonotoneCubic::MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    const std::size_t n = xs_.size();
    if (n < 2 || ys_.size() != n)
        throw std::invalid_argument("MonotoneCubic: need matched arrays, size >= 2");
    for (std::size_t i = 1; i < n; ++i)
        if (!(xs_[i] > xs_[i - 1]))
            throw std::invalid_argument("MonotoneCubic: abscissae not strictly increasing");

    slopes_.assign(n, 0.0);
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = xs_[k + 1] - xs_[k];
        del[k] = (ys_[k + 1] - ys_[k]) / h[k];
    }
    slopes_[0] = del[0];
    slopes_[n - 1] = del[n - 2];
    // Fritsch-Butland weighted harmonic mean at interior knots.
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double prod = del[k - 1] * del[k];
        if (prod <= 0.0) {
            slopes_[k] = 0.0;
        } else {
            const double w = (h[k - 1] + 2.0 * h[k]) / (3.0 * (h[k - 1] + h[k]));
            slopes_[k] = prod / (w * del[k] + (1.0 - w) * del[k - 1]);
        }
    }
}

std::size_t MonotoneCubic::segment(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    if (it == xs_.begin()) return 0;
    std::size_t k = static_cast<std::size_t>(it - xs_.begin()) - 1;
    return std::min(k, xs_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const std::size_t k = segment(x);
    const double h = xs_[k + 1] - xs_[k];
    const double t = (x - xs_[k]) / h;
    const double omt = 1.0 - t;
    const double h00 = (1.0 + 2.0 * t) * omt * omt;
    const double h10 = t * omt * omt;
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    return ys_[k] * h00 + h * slopes_[k] * h10 + ys_[k + 1] * h01 + h * slopes_[k + 1] * h11;
}

double MonotoneCubic::derivative(double x) const {
    x = std::clamp(x, xs_.front(), xs_.back());
    const std::size_t k = segment(x);
    const double h = xs_[k + 1] - xs_[k];
    const double t = (x - xs_[k]) / h;
    const double d00 = (6.0 * t * t - 6.0 * t) / h;
    const double d10 = 3.0 * t * t - 4.0 * t + 1.0;
    const double d01 = (6.0 * t - 6.0 * t * t) / h;
    const double d11 = 3.0 * t * t - 2.0 * t;
    return ys_[k] * d00 + slopes_[k] * d10 + ys_[k + 1] * d01 + slopes_[k + 1] * d11;
}

double MonotoneCubic::second_derivative(double x) const {
    x = std::clamp(x, xs_.front(), xs_.back());
    const std::size_t k = segment(x);
    const double h = xs_[k + 1] - xs_[k];
    const double t = (x - xs_[k]) / h;
    return (12.0 * t - 6.0) * (ys_[k] - ys_[k + 1]) / (h * h) +
           (6.0 * t - 4.0) * slopes_[k] / h + (6.0 * t - 2.0) * slopes_[k + 1] / h;
}

MonotoneInverse::MonotoneInverse(const MonotoneTable& table,
                                 std::function<double(double)> forward,
                                 std::function<double(double)> forward_deriv)
    : forward_(std::move(forward)), forward_deriv_(std::move(forward_deriv)) {
    std::vector<double> ys = table.values;
    std::vector<double> xs = table.abscissae;
    value_increasing_ = table.increasing();
    if (!value_increasing_) {
        std::reverse(ys.begin(), ys.end());
        std::reverse(xs.begin(), xs.end());
    }
    inverse_ = MonotoneCubic(ys, xs);
    y_lo_ = ys.front();
    y_hi_ = ys.back();
    x_lo_ = std::min(xs.front(), xs.back());
    x_hi_ = std::max(xs.front(), xs.back());
}

double MonotoneInverse::operator()(double y) const {
    const double slack = 1e-12 * (std::abs(y_hi_ - y_lo_) + 1.0);
    if (y < y_lo_ - slack || y > y_hi_ + slack)
        throw std::out_of_range("MonotoneInverse: query outside value range");
    y = std::clamp(y, y_lo_, y_hi_);
    double x = inverse_(y);
    if (forward_) {
        const double fy = forward_(x);
        double fp;
        if (forward_deriv_) {
            fp = forward_deriv_(x);
        } else {
            const double gp = inverse_.derivative(y);
            fp = (gp != 0.0) ? 1.0 / gp : 0.0;
        }
        if (std::isfinite(fp) && fp != 0.0)
            x = std::clamp(x - (fy - y) / fp, x_lo_, x_hi_);
    }
    return x;
}

MonotoneInverse invert_monotone(const MonotoneTable& table,
                                std::function<double(double)> forward,
                                std::function<double(double)> forward_deriv) {
    return MonotoneInverse(table, std::move(forward), std::move(forward_deriv));
}

double fd_derivative(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
}

double fd_second(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace annuli
