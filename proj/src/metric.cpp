#include "annuli/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>

namespace annuli {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCurvatureFloor = 1e-8;  // polar Laplacian is refused below this radius
}

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::Euclidean: return "euclidean";
        case MetricKind::Inverse: return "inverse";
        case MetricKind::Sphere: return "sphere";
        case MetricKind::Hyperbolic: return "hyperbolic";
        case MetricKind::Power: return "power";
        case MetricKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

MetricKind metric_kind_from_string(const std::string& name) {
    if (name == "euclidean") return MetricKind::Euclidean;
    if (name == "inverse") return MetricKind::Inverse;
    if (name == "sphere") return MetricKind::Sphere;
    if (name == "hyperbolic") return MetricKind::Hyperbolic;
    if (name == "power") return MetricKind::Power;
    if (name == "tabulated") return MetricKind::Tabulated;
    throw std::invalid_argument("unknown metric kind: " + name);
}

struct RadialMetric::Impl {
    MetricKind kind;
    std::vector<double> params;
    Interval domain;
    MonotoneCubic log_rho;  // tabulated only
};

MetricKind RadialMetric::kind() const { return impl_->kind; }
const Interval& RadialMetric::domain() const { return impl_->domain; }
const std::vector<double>& RadialMetric::params() const { return impl_->params; }

std::string RadialMetric::name() const {
    if (impl_->kind == MetricKind::Power) {
        std::ostringstream os;
        os << "power:" << impl_->params[0];
        return os.str();
    }
    return to_string(impl_->kind);
}

double RadialMetric::rho(double s) const {
    const Impl& im = *impl_;
    if (!(s > im.domain.lo && s < im.domain.hi))
        throw std::domain_error("rho: radius outside metric domain");
    switch (im.kind) {
        case MetricKind::Euclidean: return 1.0;
        case MetricKind::Inverse: return 1.0 / s;
        case MetricKind::Sphere: return 2.0 / (1.0 + s * s);
        case MetricKind::Hyperbolic: return 2.0 / (1.0 - s * s);
        case MetricKind::Power: return std::pow(s, im.params[0]);
        case MetricKind::Tabulated: return std::exp(im.log_rho(s));
    }
    return 0.0;
}

double RadialMetric::dlog_rho(double s) const {
    const Impl& im = *impl_;
    if (!(s > im.domain.lo && s < im.domain.hi))
        throw std::domain_error("dlog_rho: radius outside metric domain");
    switch (im.kind) {
        case MetricKind::Euclidean: return 0.0;
        case MetricKind::Inverse: return -1.0 / s;
        case MetricKind::Sphere: return -2.0 * s / (1.0 + s * s);
        case MetricKind::Hyperbolic: return 2.0 * s / (1.0 - s * s);
        case MetricKind::Power: return im.params[0] / s;
        case MetricKind::Tabulated: return im.log_rho.derivative(s);
    }
    return 0.0;
}

double RadialMetric::d2log_rho(double s) const {
    const Impl& im = *impl_;
    if (!(s > im.domain.lo && s < im.domain.hi))
        throw std::domain_error("d2log_rho: radius outside metric domain");
    switch (im.kind) {
        case MetricKind::Euclidean: return 0.0;
        case MetricKind::Inverse: return 1.0 / (s * s);
        case MetricKind::Sphere: {
            const double q = 1.0 + s * s;
            return (2.0 * s * s - 2.0) / (q * q);
        }
        case MetricKind::Hyperbolic: {
            const double q = 1.0 - s * s;
            return (2.0 + 2.0 * s * s) / (q * q);
        }
        case MetricKind::Power: return -im.params[0] / (s * s);
        case MetricKind::Tabulated: return im.log_rho.second_derivative(s);
    }
    return 0.0;
}

RadialMetric RadialMetric::restricted(double lo, double hi) const {
    if (!(lo < hi)) throw std::invalid_argument("restricted: empty domain");
    if (lo < impl_->domain.lo || hi > impl_->domain.hi)
        throw std::invalid_argument("restricted: outside natural domain");
    auto impl = std::make_shared<Impl>(*impl_);
    impl->domain = {lo, hi};
    return RadialMetric(std::move(impl));
}

RadialMetric builtin(MetricKind kind, const std::vector<double>& params) {
    auto impl = std::make_shared<RadialMetric::Impl>();
    impl->kind = kind;
    impl->params = params;
    switch (kind) {
        case MetricKind::Euclidean:
        case MetricKind::Inverse:
        case MetricKind::Sphere:
            if (!params.empty())
                throw std::invalid_argument("metric takes no parameters");
            impl->domain = {0.0, kInf};
            break;
        case MetricKind::Hyperbolic:
            if (!params.empty())
                throw std::invalid_argument("metric takes no parameters");
            impl->domain = {0.0, 1.0};
            break;
        case MetricKind::Power:
            if (params.size() != 1 || !std::isfinite(params[0]))
                throw std::invalid_argument("power metric needs one finite exponent");
            impl->domain = {0.0, kInf};
            break;
        case MetricKind::Tabulated:
            throw std::invalid_argument("use tabulated_metric() for sampled densities");
    }
    return RadialMetric(std::move(impl));
}

RadialMetric tabulated_metric(std::vector<double> s, std::vector<double> rho) {
    if (s.size() != rho.size() || s.size() < 4)
        throw std::invalid_argument("tabulated metric needs >= 4 matched samples");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(rho[i] > 0.0))
            throw std::invalid_argument("tabulated metric: densities must be positive");
        if (i > 0 && !(s[i] > s[i - 1]))
            throw std::invalid_argument("tabulated metric: abscissae must be strictly increasing");
    }
    std::vector<double> log_rho(rho.size());
    std::transform(rho.begin(), rho.end(), log_rho.begin(),
                   [](double r) { return std::log(r); });
    auto impl = std::make_shared<RadialMetric::Impl>();
    impl->kind = MetricKind::Tabulated;
    impl->domain = {s.front(), s.back()};
    impl->log_rho = MonotoneCubic(std::move(s), std::move(log_rho));
    return RadialMetric(std::move(impl));
}

double gauss_curvature(const RadialMetric& metric, double s) {
    if (!(s >= kCurvatureFloor))
        throw std::domain_error("gauss_curvature: radius below evaluation floor");
    const double lap = metric.d2log_rho(s) + metric.dlog_rho(s) / s;
    const double r = metric.rho(s);
    return -lap / (r * r);
}

double metric_area(const RadialMetric& metric, double delta, double sigma,
                   const QuadratureSpec& spec) {
    if (!(delta < sigma)) throw std::invalid_argument("metric_area: delta >= sigma");
    const Interval& dom = metric.domain();
    if (delta < dom.lo || sigma > dom.hi)
        throw std::invalid_argument("metric_area: interval outside domain closure");

    const double two_pi = 2.0 * std::numbers::pi;
    auto f = [&](double s) {
        const double r = metric.rho(s);
        return two_pi * s * r * r;
    };
    if (std::isinf(sigma)) {
        // Rational map (delta, inf) -> (0, 1).
        auto g = [&](double v) {
            const double omv = 1.0 - v;
            const double s = delta + v / omv;
            return f(s) / (omv * omv);
        };
        return integrate_or_divergent(g, 0.0, 1.0, SingularEnd::Both, spec);
    }
    return integrate_or_divergent(f, delta, sigma, SingularEnd::Both, spec);
}

bool is_regular(const RadialMetric& metric, double delta, double sigma) {
    try {
        if (!(delta < sigma) || std::isinf(sigma)) return false;
        const int n = 4096;
        const double width = sigma - delta;
        const double limit_s = delta + 1e-9 * width;
        const double limit = limit_s * metric.rho(limit_s);
        double inf_sampled = limit;
        double sup_k = 0.0;
        for (int i = 0; i < n; ++i) {
            const double s = delta + width * (i + 0.5) / n;
            inf_sampled = std::min(inf_sampled, s * metric.rho(s));
            if (s >= kCurvatureFloor) {
                const double k = gauss_curvature(metric, s);
                if (!std::isfinite(k)) return false;
                sup_k = std::max(sup_k, std::abs(k));
            }
        }
        if (!std::isfinite(sup_k) || !std::isfinite(inf_sampled) || !std::isfinite(limit))
            return false;
        return inf_sampled >= limit - 1e-8 * (1.0 + std::abs(limit));
    } catch (const std::exception&) {
        return false;  // degenerate evaluation
    }
}

bool is_allowable(const RadialMetric& metric, double delta, double sigma) {
    try {
        const double area = metric_area(metric, delta, sigma);
        if (!std::isfinite(area)) return false;
        const int n = 2048;
        const double hi = std::isinf(sigma) ? delta + 1e6 * (1.0 + delta) : sigma;
        for (int i = 0; i < n; ++i) {
            const double s = std::max(delta + (hi - delta) * (i + 0.5) / n, kCurvatureFloor);
            if (!std::isfinite(gauss_curvature(metric, s))) return false;
        }
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

namespace {

double domain_value_from_json(const nlohmann::json& v) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
        throw std::invalid_argument("metric domain: unrecognized bound '" + s + "'");
    }
    return v.get<double>();
}

}  // namespace

RadialMetric metric_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("metric spec: expected JSON object");
    for (const auto& item : j.items()) {
        if (item.key() != "kind" && item.key() != "params" && item.key() != "domain")
            throw std::invalid_argument("metric spec: unknown key '" + item.key() + "'");
    }
    if (!j.contains("kind")) throw std::invalid_argument("metric spec: missing 'kind'");
    const MetricKind kind = metric_kind_from_string(j.at("kind").get<std::string>());

    const nlohmann::json params = j.value("params", nlohmann::json::object());
    RadialMetric m = builtin(MetricKind::Euclidean);
    if (kind == MetricKind::Tabulated) {
        for (const auto& item : params.items())
            if (item.key() != "s" && item.key() != "rho")
                throw std::invalid_argument("metric spec: unknown param '" + item.key() + "'");
        m = tabulated_metric(params.at("s").get<std::vector<double>>(),
                             params.at("rho").get<std::vector<double>>());
    } else if (kind == MetricKind::Power) {
        for (const auto& item : params.items())
            if (item.key() != "alpha")
                throw std::invalid_argument("metric spec: unknown param '" + item.key() + "'");
        m = builtin(kind, {params.at("alpha").get<double>()});
    } else {
        if (!params.empty())
            throw std::invalid_argument("metric spec: params not accepted for this kind");
        m = builtin(kind);
    }
    if (j.contains("domain")) {
        const auto& d = j.at("domain");
        if (!d.is_array() || d.size() != 2)
            throw std::invalid_argument("metric spec: domain must be [lo, hi]");
        m = m.restricted(domain_value_from_json(d[0]), domain_value_from_json(d[1]));
    }
    return m;
}

nlohmann::json metric_to_json(const RadialMetric& metric) {
    nlohmann::json j;
    j["kind"] = to_string(metric.kind());
    nlohmann::json params = nlohmann::json::object();
    if (metric.kind() == MetricKind::Power) params["alpha"] = metric.params()[0];
    j["params"] = params;
    const Interval& d = metric.domain();
    j["domain"] = {d.lo, std::isinf(d.hi) ? nlohmann::json("inf") : nlohmann::json(d.hi)};
    return j;
}

RadialMetric metric_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("metric csv: empty input");
    // Tolerate trailing carriage returns from foreign line endings.
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "s,rho") throw std::invalid_argument("metric csv: expected header 's,rho'");
    std::vector<double> s, rho;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b))
            throw std::invalid_argument("metric csv: malformed row '" + line + "'");
        s.push_back(std::stod(a));
        rho.push_back(std::stod(b));
    }
    return tabulated_metric(std::move(s), std::move(rho));
}

RadialMetric metric_from_spec(const std::string& name_or_path) {
    static const char* simple[] = {"euclidean", "inverse", "sphere", "hyperbolic"};
    for (const char* n : simple)
        if (name_or_path == n) return builtin(metric_kind_from_string(n));
    if (name_or_path.rfind("power:", 0) == 0)
        return builtin(MetricKind::Power, {std::stod(name_or_path.substr(6))});

    std::ifstream in(name_or_path);
    if (!in) throw std::invalid_argument("metric spec: no such builtin or file: " + name_or_path);
    if (name_or_path.size() > 4 &&
        name_or_path.compare(name_or_path.size() - 4, 4, ".csv") == 0)
        return metric_from_csv(in);
    nlohmann::json j;
    in >> j;
    return metric_from_json(j);
}

}  // namespace annuli
