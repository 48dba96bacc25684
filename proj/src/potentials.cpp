#include "bsch/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bsch {

namespace {

// Least-squares line fit y ~ a + b*x. Returns {a, b}.
std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double b = (n * sxy - sx * sy) / denom;
    const double a = (sy - b * sx) / n;
    return {a, b};
}

} // namespace

Potential Potential::logarithmic(double theta, double theta_c) {
    if (!(theta > 0.0)) {
        throw DomainError("Logarithmic potential requires theta > 0");
    }
    if (!(theta_c > 0.0)) {
        throw DomainError("Logarithmic potential requires theta_c > 0");
    }
    return Potential(PotentialKind::Logarithmic, theta, theta_c);
}

Potential Potential::quartic() {
    return Potential(PotentialKind::Quartic, 0.0, 0.0);
}

Potential Potential::double_obstacle(double theta_c) {
    if (!(theta_c > 0.0)) {
        throw DomainError("DoubleObstacle potential requires theta_c > 0");
    }
    return Potential(PotentialKind::DoubleObstacle, 0.0, theta_c);
}

void Potential::require_interior(double r) const {
    if (!(std::abs(r) < 1.0)) {
        throw DomainError("singular potential evaluated at |r| >= 1 (r = " +
                          std::to_string(r) + ")");
    }
}

double Potential::varpi() const {
    switch (kind_) {
    case PotentialKind::Logarithmic: return theta_;
    case PotentialKind::Quartic: return 0.0;
    case PotentialKind::DoubleObstacle: return 0.0;
    }
    return 0.0;
}

// log1p keeps f0 exactly odd in floating point: f0(-r) = -f0(r) bit for bit.
double Potential::f0(double r) {
    return std::log1p(r) - std::log1p(-r);
}

double Potential::f0_cap(double r) {
    const double a = (1.0 + r) * std::log1p(r);
    const double b = (1.0 - r) * std::log1p(-r);
    return a + b;
}

double Potential::beta_hat(double r) const {
    switch (kind_) {
    case PotentialKind::Logarithmic:
        require_interior(r);
        return 0.5 * theta_ * f0_cap(r);
    case PotentialKind::Quartic:
        return 0.25 * r * r * r * r;
    case PotentialKind::DoubleObstacle:
        if (std::abs(r) > 1.0) {
            throw DomainError("double-obstacle indicator evaluated at |r| > 1");
        }
        return 0.0;
    }
    return 0.0;
}

double Potential::beta(double r) const {
    switch (kind_) {
    case PotentialKind::Logarithmic:
        require_interior(r);
        return 0.5 * theta_ * f0(r);
    case PotentialKind::Quartic:
        return r * r * r;
    case PotentialKind::DoubleObstacle:
        throw KindMismatch("double-obstacle beta is set-valued; "
                           "use subgradient_indicator");
    }
    return 0.0;
}

double Potential::beta_prime(double r) const {
    switch (kind_) {
    case PotentialKind::Logarithmic:
        require_interior(r);
        return theta_ / ((1.0 - r) * (1.0 + r));
    case PotentialKind::Quartic:
        return 3.0 * r * r;
    case PotentialKind::DoubleObstacle:
        throw KindMismatch("double-obstacle beta is set-valued; "
                           "use subgradient_indicator");
    }
    return 0.0;
}

double Potential::pi_hat(double r) const {
    switch (kind_) {
    case PotentialKind::Logarithmic:
    case PotentialKind::DoubleObstacle:
        return -0.5 * theta_c_ * r * r;
    case PotentialKind::Quartic:
        return -0.5 * r * r + 0.25;
    }
    return 0.0;
}

double Potential::pi(double r) const {
    switch (kind_) {
    case PotentialKind::Logarithmic:
    case PotentialKind::DoubleObstacle:
        return -theta_c_ * r;
    case PotentialKind::Quartic:
        return -r;
    }
    return 0.0;
}

std::string Potential::describe() const {
    switch (kind_) {
    case PotentialKind::Logarithmic:
        return "logarithmic(theta=" + std::to_string(theta_) +
               ", theta_c=" + std::to_string(theta_c_) + ")";
    case PotentialKind::Quartic:
        return "quartic";
    case PotentialKind::DoubleObstacle:
        return "double_obstacle(theta_c=" + std::to_string(theta_c_) + ")";
    }
    return "?";
}

YosidaApprox::YosidaApprox(Potential base, double epsilon, double rho)
    : base_(std::move(base)), eps_(epsilon), rho_(rho) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw DomainError("Yosida epsilon must lie in (0,1)");
    }
    if (!(rho >= 1.0)) {
        throw DomainError("Yosida rho must be >= 1");
    }
    if (base_.kind() == PotentialKind::DoubleObstacle) {
        throw KindMismatch("Yosida regularisation of the obstacle graph "
                           "is not provided");
    }
}

// Safeguarded Newton on g(J) = J + lam*beta(J) - r, monotone increasing.
// Bracket: (-1,1) for singular bases, [-|r|,|r|] for the quartic. Newton
// steps falling outside the bracket fall back to bisection; terminates
// at |g| <= 1e-15*max(1,|r|) or when the bracket collapses to adjacent
// doubles, whichever first.
double YosidaApprox::resolvent(double r) const {
    const double lam = eps_ * rho_;
    double lo, hi;
    if (base_.singular()) {
        lo = -1.0;
        hi = 1.0;
    } else {
        lo = -std::abs(r);
        hi = std::abs(r);
    }

    const double gtol = 1e-15 * std::max(1.0, std::abs(r));
    auto g = [&](double j) { return j + lam * base_.beta(j) - r; };
    auto gp = [&](double j) { return 1.0 + lam * base_.beta_prime(j); };

    double j = std::clamp(r, std::nextafter(lo, hi), std::nextafter(hi, lo));
    const int budget = 200;
    for (int it = 0; it < budget; ++it) {
        const double gj = g(j);
        if (std::abs(gj) <= gtol) {
            return j;
        }
        if (gj > 0.0) {
            hi = j;
        } else {
            lo = j;
        }
        double step = gj / gp(j);
        double next = j - step;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (next == j || std::nextafter(lo, hi) >= hi) {
            // Bracket collapsed to machine resolution; j is the best double.
            return j;
        }
        j = next;
    }
    throw ConvergenceError("Yosida resolvent solve exceeded its budget at r=" +
                           std::to_string(r));
}

std::pair<double, double> YosidaApprox::eval(double r) const {
    const double j = resolvent(r);
    return {(r - j) / (eps_ * rho_), j};
}

double YosidaApprox::beta_eps_prime(double r) const {
    const double j = resolvent(r);
    const double bp = base_.beta_prime(j);
    return bp / (1.0 + eps_ * rho_ * bp);
}

double YosidaApprox::envelope(double r) const {
    const double j = resolvent(r);
    const double d = r - j;
    double cap;
    if (base_.singular() && std::abs(j) >= 1.0) {
        // The resolvent saturated at the representable edge of (-1,1);
        // the convex part there is the finite limit value.
        cap = 0.5 * base_.theta() * (2.0 * std::log(2.0));
    } else {
        cap = base_.beta_hat(j);
    }
    return 0.5 * d * d / (eps_ * rho_) + cap;
}

bool subgradient_indicator(double r, double candidate, double tol) {
    if (std::abs(r) > 1.0) {
        throw DomainError("subgradient_indicator requires |r| <= 1");
    }
    if (r >= 1.0 - tol) {
        return candidate >= -tol;
    }
    if (r <= -1.0 + tol) {
        return candidate <= tol;
    }
    return std::abs(candidate) <= tol;
}

AssumptionReport validate_assumptions(const Potential& bulk,
                                      const Potential& surf,
                                      int samples) {
    if (samples < 100) {
        throw DomainError("validate_assumptions requires samples >= 100");
    }
    if (bulk.kind() == PotentialKind::DoubleObstacle ||
        surf.kind() == PotentialKind::DoubleObstacle) {
        throw KindMismatch("assumption audit needs pointwise beta; "
                           "the obstacle graph has none");
    }

    AssumptionReport rep;

    // Sample grid on (0,1), geometric in 1-r down to 1e-12, mirrored to
    // the negative side through oddness of beta.
    std::vector<double> rs;
    rs.reserve(static_cast<std::size_t>(samples));
    const int half = samples / 2;
    for (int k = 0; k < half; ++k) {
        const double t = static_cast<double>(k) / (half - 1);
        const double gap = std::pow(10.0, -1.0 - 11.0 * t); // 1e-1 .. 1e-12
        rs.push_back(1.0 - gap);
    }
    for (int k = 0; k < samples - half; ++k) {
        rs.push_back(static_cast<double>(k + 1) / (samples - half + 1) * 0.9);
    }
    std::sort(rs.begin(), rs.end());

    // (A1): monotone beta, beta' >= varpi > 0 for singular kinds.
    double min_bp = std::numeric_limits<double>::infinity();
    bool monotone = true;
    double prev_b = -std::numeric_limits<double>::infinity();
    for (double r : rs) {
        const double b = bulk.beta(r);
        if (b < prev_b) {
            monotone = false;
        }
        prev_b = b;
        min_bp = std::min(min_bp, bulk.beta_prime(r));
        min_bp = std::min(min_bp, bulk.beta_prime(-r));
        min_bp = std::min(min_bp, surf.beta_prime(r));
    }
    min_bp = std::min(min_bp, bulk.beta_prime(0.0));
    rep.varpi_observed = min_bp;
    rep.a1_pass = monotone && (bulk.singular() ? min_bp > 0.0 : min_bp >= 0.0);

    // (A2): |beta| <= rho |beta_G| + c0. Fit rho as the worst ratio where
    // the surface part is large, c0 as the worst remainder elsewhere.
    double rho_f = 0.0, rev_rho = 0.0;
    std::vector<std::pair<double, double>> pairs; // (|beta|, |beta_G|)
    for (double r : rs) {
        pairs.emplace_back(std::abs(bulk.beta(r)), std::abs(surf.beta(r)));
        pairs.emplace_back(std::abs(bulk.beta(-r)), std::abs(surf.beta(-r)));
    }
    for (const auto& [b, bg] : pairs) {
        if (bg >= 1.0) {
            rho_f = std::max(rho_f, b / bg);
        }
        if (b >= 1.0) {
            rev_rho = std::max(rev_rho, bg / b);
        }
    }
    if (rho_f == 0.0) rho_f = 1.0;
    if (rev_rho == 0.0) rev_rho = 1.0;
    double c0 = 0.0, rev_c0 = 0.0;
    for (const auto& [b, bg] : pairs) {
        c0 = std::max(c0, b - rho_f * bg);
        rev_c0 = std::max(rev_c0, bg - rev_rho * b);
    }
    rep.rho_fitted = rho_f;
    rep.c0_fitted = std::max(c0, 0.0);
    rep.reverse_rho = rev_rho;
    rep.reverse_c0 = std::max(rev_c0, 0.0);
    rep.a2_pass = std::isfinite(rho_f) && std::isfinite(c0);

    // (A3): pi globally Lipschitz; ours are linear so the sampled slope is
    // the constant itself.
    auto pi_lip = [](const Potential& p) {
        double lip = 0.0;
        for (double r = -3.0; r <= 3.0; r += 0.25) {
            const double d = (p.pi(r + 1e-4) - p.pi(r - 1e-4)) / 2e-4;
            lip = std::max(lip, std::abs(d));
        }
        return lip;
    };
    rep.pi_lipschitz_bulk = pi_lip(bulk);
    rep.pi_lipschitz_surf = pi_lip(surf);
    rep.a3_pass = std::isfinite(rep.pi_lipschitz_bulk) &&
                  std::isfinite(rep.pi_lipschitz_surf);

    if (!bulk.singular()) {
        // (A5) asymptotics concern the singular blow-up only.
        rep.a5a_pass = false;
        rep.a5b_pass = false;
        return rep;
    }

    // (A5a): fit ln beta' ~ a + b |beta|^gamma over the blow-up region,
    // gamma swept over [1,2).
    std::vector<double> xb, yb;
    for (double r : rs) {
        const double b = std::abs(bulk.beta(r));
        if (b > 1.0) {
            xb.push_back(b);
            yb.push_back(std::log(bulk.beta_prime(r)));
        }
    }
    double best_res = std::numeric_limits<double>::infinity();
    double best_gamma = 1.0, best_a = 0.0, best_b = 0.0;
    for (double gamma = 1.0; gamma < 2.0; gamma += 0.1) {
        std::vector<double> xg(xb.size());
        for (std::size_t i = 0; i < xb.size(); ++i) {
            xg[i] = std::pow(xb[i], gamma);
        }
        auto [a, b] = fit_line(xg, yb);
        double res = 0.0;
        for (std::size_t i = 0; i < xg.size(); ++i) {
            const double e = yb[i] - (a + b * xg[i]);
            res += e * e;
        }
        res = std::sqrt(res / xg.size());
        if (res < best_res) {
            best_res = res;
            best_gamma = gamma;
            best_a = a;
            best_b = b;
        }
    }
    rep.gamma_sharp = best_gamma;
    rep.c_sharp = std::max({std::exp(best_a), best_b, bulk.beta_prime(0.0)});
    rep.a5a_fit_residual = best_res;
    rep.a5a_pass = best_b > 0.0 && best_gamma < 2.0 && best_res < 1.0;

    // (A5b): slope of ln beta(1-2*delta) against ln|ln delta|.
    auto kappa_fit = [&](double side) {
        std::vector<double> xs, ys;
        for (double e = 2.0; e <= 10.0; e += 0.5) {
            const double delta = std::pow(10.0, -e);
            const double r = side * (1.0 - 2.0 * delta);
            xs.push_back(std::log(std::abs(std::log(delta))));
            ys.push_back(std::log(std::abs(bulk.beta(r))));
        }
        return fit_line(xs, ys).second;
    };
    rep.kappa_plus = kappa_fit(1.0);
    rep.kappa_minus = kappa_fit(-1.0);
    rep.a5b_pass = rep.kappa_plus > 0.5 && rep.kappa_minus > 0.5;

    return rep;
}

} // namespace bsch
