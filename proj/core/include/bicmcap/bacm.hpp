#ifndef BICMCAP_BACM_HPP
#define BICMCAP_BACM_HPP

#include <array>
#include <optional>
#include <vector>

#include "bicmcap/bicm.hpp"
#include "bicmcap/dmc.hpp"

namespace bicmcap {

struct BacmConfig {
    double precision_d = 1e-5;  // half-width of the bisection bracket at termination
    double inner_tol = 1e-11;   // objective-improvement floor for one-bit convergence
    double outer_tol = 1e-9;    // objective-improvement floor per full alternation pass
    int max_inner = 100;
    int max_outer = 500;
    // Surrogate re-expansions per visit inside the alternation before the
    // bit hands control back; further convergence comes from the next pass.
    // The one-bit procedure contracts geometrically when the linearized
    // terms dominate, so running every visit down to |update| < d wastes
    // re-expansions that the outer cycle performs anyway. 0 = no budget.
    int inner_step_budget = 8;
    // Starting points; empty means a single uniform start. With several
    // entries the best final objective wins (order fixed, deterministic).
    std::vector<BitPmfSet> starts;

    void validate() const;
};

struct SolveTelemetry {
    int outer_passes = 0;                       // L
    std::vector<int> inner_iterations;          // K per one-bit solve
    long derivative_evaluations = 0;
    std::vector<int> interior_bisection_evals;  // per interior bisection run
    std::vector<double> objective_trace;        // penalized objective, non-decreasing
    bool converged = true;
};

struct CapacityResult {
    double value = 0.0;  // I^bicm at the returned bit pmfs, bits
    BitPmfSet bits;
    double lambda = 0.0;
    std::optional<double> realized_cost;  // w^T kron(bits) when a cost vector was given
    SolveTelemetry telemetry;

    double penalized_objective() const {
        return value - lambda * (realized_cost ? *realized_cost : 0.0);
    }
};

/// Concave lower bound of the penalized objective I^bicm - lambda w^T p as a
/// function of one bit pmf: the output entropy and H(Y|B_i) terms are kept
/// exact, each H(Y|B_j) term is replaced by its first-order expansion at the
/// current iterate, which makes the bound tight there and a lower bound
/// everywhere. All channel matrices are captured at construction.
class BitSurrogate {
public:
    BitSurrogate(const Dmc& channel, const BitPmfSet& bits, int position, double lambda,
                 const std::vector<double>* cost);

    void set_expansion(double p0_hat);
    double expansion() const { return p0_hat_; }

    /// f^i_0(p0, p0_hat) - lambda w^i.p; -inf where an expansion-pinned
    /// linearized term has positive coefficient.
    double value(double p0) const;
    /// df^i_0/dp0 (one-sided +-inf at the boundaries where the output pmf
    /// loses support).
    double derivative(double p0) const;
    /// Boundary value forced by the expansion point, if any: when the
    /// expansion sits on the simplex boundary and a linearized term has a
    /// vanishing log argument with live channel entries, the surrogate is
    /// -inf everywhere except at that boundary.
    std::optional<double> pinned() const { return pinned_; }

    /// True penalized objective restricted to this bit pmf (other pmfs fixed).
    double objective(double p0) const;

    int bit_count() const { return m_; }
    const std::array<double, 2>& bit_cost() const { return bit_cost_; }

private:
    struct PairTerm {
        EffectivePairChannel channel;
        double pj0 = 0.5;                       // fixed pmf of the partner bit
        std::array<std::vector<double>, 2> log_at_hat;  // log2 of H^j at expansion
        std::array<std::vector<bool>, 2> dead;          // 0 log 0 terms to skip
        double lin0 = 0.0, lin1 = 0.0;          // hhat^j = lin0 p0 + lin1 p1
    };

    int m_ = 0;
    int position_ = 0;
    double lambda_ = 0.0;
    std::array<double, 2> bit_cost_{0.0, 0.0};  // w^i
    EffectiveBitChannel hi_;
    double hybi_const0_ = 0.0, hybi_const1_ = 0.0;  // sum_k H_kb log2 H_kb
    std::vector<PairTerm> pairs_;
    double p0_hat_ = 0.5;
    std::optional<double> pinned_;
};

/// Tangent lower bound of h^j(p^i) = -H(Y|B_j) as a function of p^i,
/// expanded at pi_hat. Equals h^j exactly at pi = pi_hat and never exceeds
/// it elsewhere.
double taylor_lower_bound_hj(const EffectivePairChannel& pair, const BitPmf& pj, const BitPmf& pi,
                             const BitPmf& pi_hat);

struct InnerSolve {
    BitPmf p;
    int derivative_evals = 0;
    int bisection_evals = 0;
    bool interior = false;
};

/// Maximizes the surrogate over p0 in [0,1] to within +-d: boundary 0 when
/// the right derivative at 0 is negative, boundary 1 when the left
/// derivative at 1 is positive, otherwise bisection on the derivative sign
/// down to a bracket of width 2d.
InnerSolve inner_maximize(const BitSurrogate& surrogate, double d);

struct CcpResult {
    BitPmf p;
    int iterations = 0;  // K
    bool converged = true;
    double objective = 0.0;  // penalized objective at the returned pmf
};

/// One-bit convex-concave procedure: repeatedly re-expands the surrogate at
/// the incumbent and maximizes it, until the iterate moves by less than the
/// precision or the true objective stops improving. The true objective never
/// decreases across iterations. step_budget > 0 additionally bounds the
/// number of re-expansions (used by the alternation, which revisits the bit
/// anyway); 0 runs to the fixed point.
CcpResult convex_concave_bit(const Dmc& channel, const BitPmfSet& bits, int position,
                             double lambda, const std::vector<double>* cost,
                             const BacmConfig& config, SolveTelemetry* telemetry = nullptr,
                             int step_budget = 0);

/// Bit-alternating solve: cycles the convex-concave procedure over the bit
/// positions until a full pass improves the penalized objective by less than
/// outer_tol. With a cost vector, maximizes I^bicm - lambda w^T p.
CapacityResult bacm_solve(const Dmc& channel, double lambda = 0.0,
                          const std::vector<double>* cost = nullptr,
                          const BacmConfig& config = {});

}  // namespace bicmcap

#endif
