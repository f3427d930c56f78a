#include "bicmcap/bacm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bicmcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline int bit_of(std::size_t label, int position, int m) {
    return static_cast<int>((label >> (m - 1 - position)) & 1u);
}

}  // namespace

void BacmConfig::validate() const {
    if (!(precision_d > 0.0)) throw std::invalid_argument("BacmConfig: precision_d must be > 0");
    if (!(inner_tol > 0.0) || !(outer_tol > 0.0)) {
        throw std::invalid_argument("BacmConfig: tolerances must be > 0");
    }
    if (max_inner < 1 || max_outer < 1) {
        throw std::invalid_argument("BacmConfig: iteration caps must be >= 1");
    }
    if (inner_step_budget < 0) {
        throw std::invalid_argument("BacmConfig: inner_step_budget must be >= 0");
    }
}

BitSurrogate::BitSurrogate(const Dmc& channel, const BitPmfSet& bits, int position, double lambda,
                           const std::vector<double>* cost)
    : m_(channel.bits()), position_(position), lambda_(lambda),
      hi_(effective_bit_channel(channel, bits, position)) {
    if (lambda_ < 0.0) throw std::invalid_argument("BitSurrogate: lambda must be nonnegative");
    if (lambda_ != 0.0 && cost == nullptr) {
        throw std::invalid_argument("BitSurrogate: lambda requires a cost vector");
    }

    const std::size_t n = channel.outputs();
    for (std::size_t k = 0; k < n; ++k) {
        if (hi_.given0[k] > 0.0) hybi_const0_ += hi_.given0[k] * std::log2(hi_.given0[k]);
        if (hi_.given1[k] > 0.0) hybi_const1_ += hi_.given1[k] * std::log2(hi_.given1[k]);
    }

    if (cost) {
        if (cost->size() != channel.inputs()) {
            throw std::invalid_argument("BitSurrogate: cost length mismatch");
        }
        for (std::size_t x = 0; x < channel.inputs(); ++x) {
            double w = 1.0;
            for (int j = 0; j < m_; ++j) {
                if (j == position_) continue;
                w *= bits[static_cast<std::size_t>(j)].prob(bit_of(x, j, m_));
            }
            bit_cost_[static_cast<std::size_t>(bit_of(x, position_, m_))] += w * (*cost)[x];
        }
    }

    pairs_.reserve(static_cast<std::size_t>(m_ - 1));
    for (int j = 0; j < m_; ++j) {
        if (j == position_) continue;
        PairTerm t;
        t.channel = effective_pair_channel(channel, bits, j, position_);
        t.pj0 = bits[static_cast<std::size_t>(j)].p0;
        for (auto& v : t.log_at_hat) v.assign(n, 0.0);
        for (auto& v : t.dead) v.assign(n, false);
        pairs_.push_back(std::move(t));
    }
    set_expansion(bits[static_cast<std::size_t>(position)].p0);
}

void BitSurrogate::set_expansion(double p0_hat) {
    if (!(p0_hat >= 0.0 && p0_hat <= 1.0)) {
        throw std::invalid_argument("BitSurrogate: expansion point outside [0,1]");
    }
    p0_hat_ = p0_hat;
    pinned_.reset();
    const double q0 = p0_hat, q1 = 1.0 - p0_hat;
    for (auto& t : pairs_) {
        const std::size_t n = t.channel.outputs();
        t.lin0 = t.lin1 = 0.0;
        for (int b = 0; b < 2; ++b) {
            const double pjb = b == 0 ? t.pj0 : 1.0 - t.pj0;
            const auto& e0 = t.channel.cols[static_cast<std::size_t>(b << 1)];
            const auto& e1 = t.channel.cols[static_cast<std::size_t>((b << 1) | 1)];
            auto& logs = t.log_at_hat[static_cast<std::size_t>(b)];
            auto& dead = t.dead[static_cast<std::size_t>(b)];
            double a = 0.0, c = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double chat = q0 * e0[k] + q1 * e1[k];
                if (chat > 0.0) {
                    dead[k] = false;
                    logs[k] = std::log2(chat);
                } else if (e0[k] == 0.0 && e1[k] == 0.0) {
                    dead[k] = true;  // coefficient is identically zero
                    logs[k] = 0.0;
                } else if (pjb == 0.0) {
                    dead[k] = true;  // whole b-column weighted by zero
                    logs[k] = 0.0;
                } else if (q0 > 0.0 && q1 > 0.0) {
                    // Interior weights make a zero only by underflow, so the
                    // channel entries are below ~1e-320 and the whole term
                    // is numerically zero.
                    dead[k] = true;
                    logs[k] = 0.0;
                } else {
                    // The log argument vanishes at a boundary expansion
                    // point while the channel entries do not: the surrogate
                    // is -inf everywhere except at that boundary.
                    dead[k] = false;
                    logs[k] = -kInf;
                    pinned_ = p0_hat;
                }
                if (!dead[k]) {
                    if (e0[k] > 0.0) a += pjb * e0[k] * logs[k];
                    if (e1[k] > 0.0) c += pjb * e1[k] * logs[k];
                }
            }
            t.lin0 += a;
            t.lin1 += c;
        }
    }
}

double BitSurrogate::value(double p0) const {
    const double p1 = 1.0 - p0;
    const std::size_t n = hi_.outputs();
    double hy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = p0 * hi_.given0[k] + p1 * hi_.given1[k];
        if (r > 0.0) hy -= r * std::log2(r);
    }
    double v = static_cast<double>(m_) * hy + p0 * hybi_const0_ + p1 * hybi_const1_ -
               lambda_ * (p0 * bit_cost_[0] + p1 * bit_cost_[1]);
    for (const auto& t : pairs_) {
        // p0 * lin0 with the 0 * (-inf) = 0 convention at the endpoints.
        if (p0 > 0.0) v += p0 * t.lin0;
        if (p1 > 0.0) v += p1 * t.lin1;
    }
    return v;
}

double BitSurrogate::derivative(double p0) const {
    if (pinned_) return *pinned_ == 0.0 ? -kInf : kInf;
    const double p1 = 1.0 - p0;
    const std::size_t n = hi_.outputs();
    double dhy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double delta = hi_.given0[k] - hi_.given1[k];
        if (delta == 0.0) continue;
        const double r = p0 * hi_.given0[k] + p1 * hi_.given1[k];
        if (r > 0.0) {
            dhy -= delta * (std::log2(r) + kLog2E);
        } else if (p0 == 0.0 || p0 == 1.0) {
            // One-sided limit at the boundary: the vanishing output mass
            // dominates everything else.
            return delta > 0.0 ? kInf : -kInf;
        }
        // Interior zeros come from underflow; the exact term is below
        // ~1e-320 * |log eps| and drops out.
    }
    double d = static_cast<double>(m_) * dhy + (hybi_const0_ - hybi_const1_) -
               lambda_ * (bit_cost_[0] - bit_cost_[1]);
    for (const auto& t : pairs_) d += t.lin0 - t.lin1;
    return d;
}

double BitSurrogate::objective(double p0) const {
    const double p1 = 1.0 - p0;
    const std::size_t n = hi_.outputs();
    double hy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = p0 * hi_.given0[k] + p1 * hi_.given1[k];
        if (r > 0.0) hy -= r * std::log2(r);
    }
    double v = static_cast<double>(m_) * hy + p0 * hybi_const0_ + p1 * hybi_const1_ -
               lambda_ * (p0 * bit_cost_[0] + p1 * bit_cost_[1]);
    for (const auto& t : pairs_) {
        for (int b = 0; b < 2; ++b) {
            const double pjb = b == 0 ? t.pj0 : 1.0 - t.pj0;
            if (pjb == 0.0) continue;
            const auto& e0 = t.channel.cols[static_cast<std::size_t>(b << 1)];
            const auto& e1 = t.channel.cols[static_cast<std::size_t>((b << 1) | 1)];
            double h = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double c = p0 * e0[k] + p1 * e1[k];
                if (c > 0.0) h += c * std::log2(c);
            }
            v += pjb * h;  // h^j = -H(Y|B_j) contribution for this column
        }
    }
    return v;
}

double taylor_lower_bound_hj(const EffectivePairChannel& pair, const BitPmf& pj, const BitPmf& pi,
                             const BitPmf& pi_hat) {
    const std::size_t n = pair.outputs();
    double v = 0.0;
    for (int b = 0; b < 2; ++b) {
        const double pjb = pj.prob(b);
        if (pjb == 0.0) continue;
        const auto& e0 = pair.cols[static_cast<std::size_t>(b << 1)];
        const auto& e1 = pair.cols[static_cast<std::size_t>((b << 1) | 1)];
        for (std::size_t k = 0; k < n; ++k) {
            const double coef = pi.p0 * e0[k] + pi.p1() * e1[k];
            if (coef == 0.0) continue;
            const double arg = pi_hat.p0 * e0[k] + pi_hat.p1() * e1[k];
            if (arg > 0.0) {
                v += pjb * coef * std::log2(arg);
            } else if (pi_hat.p0 == 0.0 || pi_hat.p0 == 1.0) {
                v = -kInf;  // genuine boundary singularity of the expansion
            }
            // interior-weight zeros are underflow; the term drops out
        }
    }
    return v;
}

InnerSolve inner_maximize(const BitSurrogate& surrogate, double d) {
    if (!(d > 0.0)) throw std::invalid_argument("inner_maximize: precision must be > 0");
    if (auto pin = surrogate.pinned()) return {BitPmf(*pin), 0, 0, false};

    InnerSolve out;
    const double df0 = surrogate.derivative(0.0);
    ++out.derivative_evals;
    if (df0 < 0.0) {
        out.p = BitPmf(0.0);
        return out;
    }
    const double df1 = surrogate.derivative(1.0);
    ++out.derivative_evals;
    if (df1 > 0.0) {
        out.p = BitPmf(1.0);
        return out;
    }
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 2.0 * d) {
        const double mid = 0.5 * (lo + hi);
        const double v = surrogate.derivative(mid);
        ++out.bisection_evals;
        if (v > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.derivative_evals += out.bisection_evals;
    out.interior = true;
    out.p = BitPmf(0.5 * (lo + hi));
    return out;
}

CcpResult convex_concave_bit(const Dmc& channel, const BitPmfSet& bits, int position,
                             double lambda, const std::vector<double>* cost,
                             const BacmConfig& config, SolveTelemetry* telemetry,
                             int step_budget) {
    config.validate();
    const int cap = step_budget > 0 ? std::min(step_budget, config.max_inner) : config.max_inner;
    BitSurrogate s(channel, bits, position, lambda, cost);
    double p = bits[static_cast<std::size_t>(position)].p0;
    double obj = s.objective(p);

    CcpResult res;
    res.p = BitPmf(p);
    res.objective = obj;
    res.converged = false;
    // With a single bit there are no linearized terms, so one maximization
    // is exact.
    const bool exact = s.bit_count() == 1;

    for (int it = 1; it <= cap; ++it) {
        s.set_expansion(p);
        const InnerSolve is = inner_maximize(s, config.precision_d);
        if (telemetry) {
            telemetry->derivative_evaluations += is.derivative_evals;
            if (is.interior) telemetry->interior_bisection_evals.push_back(is.bisection_evals);
        }
        res.iterations = it;

        const double cand = is.p.p0;
        const double cand_obj = s.objective(cand);
        if (cand_obj < obj) {
            // The bisection precision overshot the surrogate maximum past
            // the tangency point; keep the incumbent.
            res.converged = true;
            break;
        }
        const double moved = std::abs(cand - p);
        const double gain = cand_obj - obj;
        p = cand;
        obj = cand_obj;
        if (telemetry) telemetry->objective_trace.push_back(obj);
        if (exact || moved < config.precision_d || gain < config.inner_tol) {
            res.converged = true;
            break;
        }
        if (it == cap && step_budget > 0) res.converged = true;  // budget stop, not a failure
    }
    res.p = BitPmf(p);
    res.objective = obj;
    return res;
}

CapacityResult bacm_solve(const Dmc& channel, double lambda, const std::vector<double>* cost,
                          const BacmConfig& config) {
    config.validate();
    const int m = channel.bits();
    if (lambda < 0.0) throw std::invalid_argument("bacm_solve: lambda must be nonnegative");
    if (lambda > 0.0 && cost == nullptr) {
        throw std::invalid_argument("bacm_solve: lambda > 0 requires a cost vector");
    }
    if (cost) {
        if (cost->size() != channel.inputs()) {
            throw std::invalid_argument("bacm_solve: cost length " +
                                        std::to_string(cost->size()) +
                                        " does not match input count " +
                                        std::to_string(channel.inputs()));
        }
        for (double w : *cost) {
            if (!(w > 0.0)) throw std::invalid_argument("bacm_solve: cost entries must be > 0");
        }
    }

    std::vector<BitPmfSet> starts = config.starts;
    if (starts.empty()) starts.push_back(uniform_bits(m));

    std::optional<CapacityResult> best;
    for (const auto& start : starts) {
        if (static_cast<int>(start.size()) != m) {
            throw std::invalid_argument("bacm_solve: starting point has wrong bit count");
        }
        BitPmfSet bits = start;
        SolveTelemetry tel;

        std::vector<double> p0s(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) p0s[i] = bits[i].p0;
        double obj = detail::bicm_objective(channel, p0s.data(), lambda, cost);
        tel.objective_trace.push_back(obj);

        bool outer_converged = false;
        for (int pass = 1; pass <= config.max_outer; ++pass) {
            tel.outer_passes = pass;
            const double pass_start = obj;
            for (int i = 0; i < m; ++i) {
                CcpResult c = convex_concave_bit(channel, bits, i, lambda, cost, config, &tel,
                                                 config.inner_step_budget);
                bits[static_cast<std::size_t>(i)] = c.p;
                tel.inner_iterations.push_back(c.iterations);
                if (!c.converged) tel.converged = false;
                obj = c.objective;
            }
            if (obj - pass_start < config.outer_tol) {
                outer_converged = true;
                break;
            }
        }
        if (!outer_converged) tel.converged = false;

        CapacityResult r;
        r.value = bicm_mi(channel, bits);
        r.bits = std::move(bits);
        r.lambda = lambda;
        if (cost) {
            double c = 0.0;
            for (std::size_t x = 0; x < channel.inputs(); ++x)
                c += (*cost)[x] * kron_prob(r.bits, x);
            r.realized_cost = c;
        }
        r.telemetry = std::move(tel);
        if (!best || r.penalized_objective() > best->penalized_objective()) best = std::move(r);
    }
    return *best;
}

}  // namespace bicmcap
