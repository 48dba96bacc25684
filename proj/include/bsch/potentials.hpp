#ifndef BSCH_POTENTIALS_HPP
#define BSCH_POTENTIALS_HPP

#include <string>
#include <utility>

#include "bsch/errors.hpp"

namespace bsch {

enum class PotentialKind { Logarithmic, Quartic, DoubleObstacle };

// Free-energy density W = beta_hat + pi_hat split into a convex part
// beta_hat (derivative beta, monotone) and a smooth concave part pi_hat
// (derivative pi, globally Lipschitz). Normalisation: beta(0) = 0,
// beta_hat(0) = 0.
//
//   Logarithmic:    beta_hat = (theta/2)[(1+r)ln(1+r) + (1-r)ln(1-r)],
//                   pi_hat   = -(theta_c/2) r^2, domain (-1,1).
//   Quartic:        beta_hat = r^4/4, pi_hat = -r^2/2 + 1/4, domain R;
//                   the sum is (r^2-1)^2/4.
//   DoubleObstacle: beta_hat = indicator of [-1,1] (value 0 inside),
//                   pi_hat   = -(theta_c/2) r^2. beta is set-valued and
//                   never evaluated pointwise; use subgradient_indicator.
class Potential {
  public:
    static Potential logarithmic(double theta, double theta_c);
    static Potential quartic();
    static Potential double_obstacle(double theta_c);

    PotentialKind kind() const { return kind_; }
    double theta() const { return theta_; }
    double theta_c() const { return theta_c_; }

    // Singular kinds confine the field to (-1,1).
    bool singular() const { return kind_ != PotentialKind::Quartic; }

    // Lower bound on beta' (theta for Logarithmic, 0 for Quartic).
    double varpi() const;

    double beta_hat(double r) const;
    double beta(double r) const;
    double beta_prime(double r) const;
    double pi_hat(double r) const;
    double pi(double r) const;

    // W and W' themselves.
    double f(double r) const { return beta_hat(r) + pi_hat(r); }
    double f_prime(double r) const { return beta(r) + pi(r); }

    // Convex logarithmic core f0 = ln((1+r)/(1-r)) and its antiderivative
    // F0; exposed for the deep-quench readouts where xi = theta*f0(phi).
    static double f0(double r);
    static double f0_cap(double r);

    std::string describe() const;

  private:
    Potential(PotentialKind k, double th, double thc)
        : kind_(k), theta_(th), theta_c_(thc) {}
    void require_interior(double r) const;

    PotentialKind kind_;
    double theta_ = 0.0;
    double theta_c_ = 0.0;
};

// Moreau-Yosida regularisation of the convex part:
//   J solves J + eps*rho*beta(J) = r,
//   beta_eps(r) = (r - J)/(eps*rho),
//   envelope(r) = |r - J|^2/(2*eps*rho) + beta_hat(J).
// rho >= 1 is the cross-potential scaling used when regularising the
// surface potential; rho = 1 for the bulk.
class YosidaApprox {
  public:
    YosidaApprox(Potential base, double epsilon, double rho = 1.0);

    const Potential& base() const { return base_; }
    double epsilon() const { return eps_; }
    double rho() const { return rho_; }

    // Resolvent J of r; defined for every real r.
    double resolvent(double r) const;

    // (beta_eps(r), J(r)).
    std::pair<double, double> eval(double r) const;
    double beta_eps(double r) const { return eval(r).first; }

    // d/dr beta_eps = beta'(J)/(1 + eps*rho*beta'(J)).
    double beta_eps_prime(double r) const;

    // Moreau envelope; 0 <= envelope(r) <= beta_hat(r) on the base domain.
    double envelope(double r) const;

  private:
    Potential base_;
    double eps_;
    double rho_;
};

// True iff candidate lies in the subgradient of the indicator of [-1,1]
// at r: {0} in the interior, (-inf,0] at r=-1, [0,+inf) at r=+1.
// tol widens both the contact detection and the candidate comparison.
bool subgradient_indicator(double r, double candidate, double tol = 1e-8);

// Numerical audit of the structural assumptions on a (bulk, surface)
// potential pair, sampled on a grid clustered geometrically toward the
// endpoints. Fits report constants by least squares in log coordinates;
// they evidence the asymptotics rather than prove them.
struct AssumptionReport {
    // (A1) monotonicity and uniform convexity of beta.
    bool a1_pass = false;
    double varpi_observed = 0.0;

    // (A2) |beta| <= rho*|beta_G| + c0 (surface dominates bulk), plus the
    // reverse-domination constants as a report field.
    bool a2_pass = false;
    double rho_fitted = 0.0;
    double c0_fitted = 0.0;
    double reverse_rho = 0.0;
    double reverse_c0 = 0.0;

    // (A3) global Lipschitz bound on pi, pi_G.
    bool a3_pass = false;
    double pi_lipschitz_bulk = 0.0;
    double pi_lipschitz_surf = 0.0;

    // (A5a) beta' <= C# exp(C# |beta|^gamma#), gamma# in [1,2).
    bool a5a_pass = false;
    double c_sharp = 0.0;
    double gamma_sharp = 0.0;
    double a5a_fit_residual = 0.0;

    // (A5b) 1/beta(1-2*delta) = O(|ln delta|^-kappa), kappa > 1/2.
    bool a5b_pass = false;
    double kappa_plus = 0.0;
    double kappa_minus = 0.0;

    bool all_pass() const {
        return a1_pass && a2_pass && a3_pass && a5a_pass && a5b_pass;
    }
};

AssumptionReport validate_assumptions(const Potential& bulk,
                                      const Potential& surf,
                                      int samples);

} // namespace bsch

#endif
