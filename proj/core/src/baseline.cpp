#include "bicmcap/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace bicmcap {

namespace {

constexpr int kMaxExhaustiveBits = 4;

std::vector<double> grid_axis(double step) {
    const long npts = static_cast<long>(std::floor(1.0 / step)) + 1;
    std::vector<double> axis(static_cast<std::size_t>(npts));
    for (long t = 0; t < npts; ++t) axis[static_cast<std::size_t>(t)] = static_cast<double>(t) * step;
    axis.back() = 1.0;
    return axis;
}

double point_cost(const std::vector<double>& p0s, const std::vector<double>& w) {
    const int m = static_cast<int>(p0s.size());
    double cost = 0.0;
    for (std::size_t x = 0; x < w.size(); ++x) {
        double p = 1.0;
        for (int i = 0; i < m; ++i) {
            const int b = static_cast<int>((x >> (m - 1 - i)) & 1u);
            p *= b == 0 ? p0s[static_cast<std::size_t>(i)] : 1.0 - p0s[static_cast<std::size_t>(i)];
        }
        cost += p * w[x];
    }
    return cost;
}

/// Enumerates the product of per-axis grids, calling fn(p0s) for each point.
void for_each_grid_point(const std::vector<std::vector<double>>& axes,
                         const std::function<void(const std::vector<double>&)>& fn) {
    const std::size_t m = axes.size();
    std::vector<std::size_t> idx(m, 0);
    std::vector<double> p0s(m);
    for (std::size_t i = 0; i < m; ++i) p0s[i] = axes[i][0];
    for (;;) {
        fn(p0s);
        std::size_t d = m;
        while (d > 0) {
            --d;
            if (++idx[d] < axes[d].size()) {
                p0s[d] = axes[d][idx[d]];
                break;
            }
            idx[d] = 0;
            p0s[d] = axes[d][0];
            if (d == 0) return;
        }
    }
}

}  // namespace

void GridSpec::validate() const {
    if (!(step > 0.0 && step <= 0.5)) {
        throw std::invalid_argument("GridSpec: step must be in (0, 0.5]");
    }
    if (refinement && !(*refinement > 0.0 && *refinement < 1.0)) {
        throw std::invalid_argument("GridSpec: refinement factor must be in (0,1)");
    }
    if (refine_stages < 1) throw std::invalid_argument("GridSpec: refine_stages must be >= 1");
}

ExhaustiveResult exhaustive_bicm(const Dmc& channel, const GridSpec& grid, double lambda,
                                 const std::vector<double>* w, std::optional<double> cost_cap) {
    grid.validate();
    const int m = channel.bits();
    const long npts = static_cast<long>(std::floor(1.0 / grid.step)) + 1;
    if (m > kMaxExhaustiveBits) {
        throw std::invalid_argument("exhaustive_bicm: m = " + std::to_string(m) +
                                    " needs about " + std::to_string(npts) + "^" +
                                    std::to_string(m) + " evaluations; refusing m > " +
                                    std::to_string(kMaxExhaustiveBits));
    }
    if ((lambda != 0.0 || cost_cap) && w == nullptr) {
        throw std::invalid_argument("exhaustive_bicm: lambda or cost_cap requires a cost vector");
    }
    if (w && w->size() != channel.inputs()) {
        throw std::invalid_argument("exhaustive_bicm: cost length mismatch");
    }

    ExhaustiveResult res;
    res.value = -std::numeric_limits<double>::infinity();
    const double cap_slack = cost_cap ? *cost_cap * (1.0 + 1e-12) : 0.0;

    long* counter = &res.grid_evaluations;
    auto visit = [&](const std::vector<double>& p0s) {
        ++*counter;
        if (cost_cap && point_cost(p0s, *w) > cap_slack) return;
        const double v = detail::bicm_objective(channel, p0s.data(), lambda, w);
        if (v > res.value) {
            res.value = v;
            res.bits.clear();
            for (double p0 : p0s) res.bits.push_back(BitPmf(p0));
        }
    };

    std::vector<std::vector<double>> axes(static_cast<std::size_t>(m), grid_axis(grid.step));
    for_each_grid_point(axes, visit);

    if (grid.refinement) {
        counter = &res.refine_evaluations;
        double prev_step = grid.step;
        for (int stage = 0; stage < grid.refine_stages; ++stage) {
            const double fine = prev_step * *grid.refinement;
            const long half = std::lround(prev_step / fine);
            for (int i = 0; i < m; ++i) {
                const double center = res.bits[static_cast<std::size_t>(i)].p0;
                std::vector<double> axis;
                for (long t = -half; t <= half; ++t) {
                    const double v = center + static_cast<double>(t) * fine;
                    if (v >= 0.0 && v <= 1.0) axis.push_back(v);
                }
                axes[static_cast<std::size_t>(i)] = std::move(axis);
            }
            for_each_grid_point(axes, visit);
            prev_step = fine;
        }
    }
    return res;
}

std::vector<double> grid_local_maxima(const Dmc& channel, double step, double lambda,
                                      const std::vector<double>* w, std::size_t max_count) {
    const int m = channel.bits();
    const long npts = static_cast<long>(std::floor(1.0 / step)) + 1;
    double total = 1.0;
    for (int i = 0; i < m; ++i) total *= static_cast<double>(npts);
    if (total > 64e6) {
        throw std::invalid_argument("grid_local_maxima: grid of " + std::to_string(total) +
                                    " points is too large");
    }

    const auto axis = grid_axis(step);
    const std::size_t n_axis = axis.size();
    std::vector<double> values(static_cast<std::size_t>(total));
    std::vector<double> p0s(static_cast<std::size_t>(m));
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        std::size_t rem = flat;
        for (int i = m - 1; i >= 0; --i) {
            p0s[static_cast<std::size_t>(i)] = axis[rem % n_axis];
            rem /= n_axis;
        }
        values[flat] = detail::bicm_objective(channel, p0s.data(), lambda, w);
    }

    std::vector<double> maxima;
    std::vector<long> coord(static_cast<std::size_t>(m));
    std::vector<long> delta(static_cast<std::size_t>(m));
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        std::size_t rem = flat;
        for (int i = m - 1; i >= 0; --i) {
            coord[static_cast<std::size_t>(i)] = static_cast<long>(rem % n_axis);
            rem /= n_axis;
        }
        bool is_max = true;
        std::fill(delta.begin(), delta.end(), -1);
        for (;;) {
            bool self = true, valid = true;
            std::size_t nflat = 0;
            for (int i = 0; i < m && valid; ++i) {
                const long c = coord[static_cast<std::size_t>(i)] + delta[static_cast<std::size_t>(i)];
                if (c < 0 || c >= static_cast<long>(n_axis)) valid = false;
                if (delta[static_cast<std::size_t>(i)] != 0) self = false;
                nflat = nflat * n_axis + static_cast<std::size_t>(std::max<long>(c, 0));
            }
            if (valid && !self && values[nflat] > values[flat]) {
                is_max = false;
                break;
            }
            int d = m;
            bool done = false;
            while (d > 0) {
                --d;
                if (++delta[static_cast<std::size_t>(d)] <= 1) break;
                delta[static_cast<std::size_t>(d)] = -1;
                if (d == 0) done = true;
            }
            if (done) break;
        }
        if (is_max) maxima.push_back(values[flat]);
    }
    std::sort(maxima.rbegin(), maxima.rend());
    if (maxima.size() > max_count) maxima.resize(max_count);
    return maxima;
}

double uniform_bicm(const Dmc& channel) { return bicm_mi(channel, uniform_bits(channel.bits())); }

CmResult cm_capacity(const Dmc& channel, const std::vector<double>* w,
                     std::optional<double> target_cost, double tol) {
    CmOptions opts;
    opts.ba_tol = tol;
    return cm_capacity(channel, w, target_cost, opts);
}

CmResult cm_capacity(const Dmc& channel, const std::vector<double>* w,
                     std::optional<double> target_cost, const CmOptions& cm_opts) {
    BaOptions opts;
    opts.tol = cm_opts.ba_tol;
    opts.max_iterations = cm_opts.ba_max_iterations;
    opts.warm_start = cm_opts.warm_start;

    if (!w || !target_cost) {
        const BaResult ba = blahut_arimoto(channel, w, 0.0, opts);
        return {ba.mutual_information, ba.upper_bound, ba.input, 0.0, ba.realized_cost,
                ba.converged};
    }
    const double target = *target_cost;
    if (!(target > 0.0)) throw std::invalid_argument("cm_capacity: target cost must be positive");

    CmResult out{0.0, std::numeric_limits<double>::infinity(), Pmf::uniform(channel.inputs()),
                 0.0, 0.0, true};
    const double cost_tol = cm_opts.cost_rel_tol * target;

    Pmf warm = cm_opts.warm_start ? *cm_opts.warm_start : Pmf::uniform(channel.inputs());
    bool found_feasible = false;
    auto run = [&](double lambda) {
        opts.warm_start = &warm;
        BaResult ba = blahut_arimoto(channel, w, lambda, opts);
        if (!ba.converged) out.converged = false;
        // I(p) <= F*_lambda + lambda E' <= upper_bound + lambda E' for every
        // p with cost at most E'; E' carries the same slack the feasibility
        // test below allows.
        out.upper_bound =
            std::min(out.upper_bound, ba.upper_bound + lambda * (target + cost_tol));
        if (ba.realized_cost <= target + cost_tol &&
            (!found_feasible || ba.mutual_information > out.value)) {
            found_feasible = true;
            out.value = ba.mutual_information;
            out.input = ba.input;
            out.lambda = lambda;
            out.realized_cost = ba.realized_cost;
        }
        warm = ba.input;
        return ba;
    };

    BaResult r = run(0.0);
    if (r.realized_cost <= target + cost_tol) return out;

    double lam_lo = 0.0;
    double lam_hi = 1.0;
    r = run(lam_hi);
    int doublings = 0;
    while (r.realized_cost > target && doublings++ < 60) {
        lam_lo = lam_hi;
        lam_hi *= 2.0;
        r = run(lam_hi);
    }
    if (r.realized_cost > target) {
        out.converged = false;
        return out;
    }
    for (int step = 0; step < 100; ++step) {
        if (std::abs(out.realized_cost - target) <= cost_tol && found_feasible) break;
        const double lam = 0.5 * (lam_lo + lam_hi);
        r = run(lam);
        if (r.realized_cost > target) {
            lam_lo = lam;
        } else {
            lam_hi = lam;
        }
    }
    if (!found_feasible) out.converged = false;
    return out;
}

}  // namespace bicmcap
