#ifndef BICMCAP_AWGN_PAM_HPP
#define BICMCAP_AWGN_PAM_HPP

#include <vector>

#include "bicmcap/bacm.hpp"
#include "bicmcap/bicm.hpp"
#include "bicmcap/dmc.hpp"

namespace bicmcap {

/// Equidistant PAM constellation gamma * {-(M-1), -(M-3), ..., M-1} with
/// BRGC-consistent column order: the point whose Gray label is k sits at
/// index k. costs[k] = points[k]^2.
struct Constellation {
    int m = 1;
    double gamma = 1.0;
    std::vector<double> points;
    std::vector<double> costs;
};

/// Output discretization: n_out equal-width bins covering every conditional
/// output to within sigma_span noise standard deviations.
struct DiscretizationRule {
    int n_out = 200;
    double sigma_span = 6.0;
};

/// snr = E|X|^2 with unit-variance noise.
struct SnrTarget {
    double linear = 1.0;

    static SnrTarget from_db(double db);
    static SnrTarget from_linear(double linear);
    double db() const;
};

Constellation build_constellation(int m, double gamma);

/// Bin masses by Gaussian CDF differences over the interval
/// [min point - sigma_span, max point + sigma_span]; each column is
/// renormalized by its own total so the result is exactly column-stochastic
/// (the truncated tail mass is folded in proportionally).
Dmc discretize_awgn(const Constellation& c, const DiscretizationRule& rule = {});

/// w^T (p^1 (x) ... (x) p^m).
double snr_of(const Constellation& c, const BitPmfSet& bits);

/// Scaling at which uniform bit pmfs realize the given snr exactly:
/// sqrt(3 snr / (M^2 - 1)).
double uniform_gamma(int m, double snr);

/// 0.5 log2(1 + snr), bits.
double awgn_capacity(double snr);

struct SnrSolve {
    double lambda = 0.0;
    CapacityResult result;
    double gamma = 0.0;
    double target_snr = 0.0;
    bool below_target = false;  // lambda = 0 power already short of the target
    bool on_target = false;     // realized cost within relative 1e-4 of the target
    bool feasible = false;      // realized cost does not exceed the target
    bool cost_monotone = true;  // realized cost never rose along the lambda trace
    int bacm_solves = 0;
};

/// Finds lambda >= 0 such that the penalized solve realizes the target snr
/// (relative cost tolerance 1e-4): the bracket [0, 1] is grown geometrically
/// until the realized cost straddles the target, then bisected. A target
/// above the unconstrained power is answered with lambda = 0 and flagged
/// below_target. When no lambda realizes the target exactly (the cost jumps
/// across it between local optima), the best feasible solve is returned with
/// on_target = false.
SnrSolve solve_lambda_for_snr(int m, double gamma, SnrTarget target,
                              const DiscretizationRule& rule = {}, const BacmConfig& config = {});

struct AwgnCapacityResult {
    double c_bicm = 0.0;
    double best_gamma = 0.0;
    SnrSolve solve;
    int gamma_evaluations = 0;
};

/// C^bicm(snr) = max over the scaling of the snr-constrained solve. An empty
/// grid selects golden-section search over [gamma_u/4, 4 gamma_u] with
/// absolute tolerance 1e-4 gamma_u.
AwgnCapacityResult bicm_capacity_awgn(int m, SnrTarget target,
                                      const std::vector<double>& gamma_grid = {},
                                      const DiscretizationRule& rule = {},
                                      const BacmConfig& config = {});

struct CmAwgnResult {
    double value = 0.0;        // best power-constrained capacity over the scaling
    double upper_bound = 0.0;  // certified bound at the best scaling
    double best_gamma = 0.0;
    bool converged = true;
};

/// Coded-modulation capacity of M-PAM at the given snr: power-constrained
/// Blahut-Arimoto, line-searched over the constellation scaling. The value
/// is certified by upper_bound whatever the tolerance, so the default favors
/// speed over the last digits.
CmAwgnResult cm_capacity_awgn(int m, SnrTarget target, const DiscretizationRule& rule = {},
                              double ba_tol = 1e-6);

}  // namespace bicmcap

#endif
