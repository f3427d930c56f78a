#include "bicmcap/blahut_arimoto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bicmcap {

BaResult blahut_arimoto(const Dmc& channel, const std::vector<double>* cost, double lambda,
                        const BaOptions& opts) {
    const std::size_t n = channel.outputs();
    const std::size_t M = channel.inputs();
    if (opts.tol <= 0.0) throw std::invalid_argument("blahut_arimoto: tol must be positive");
    if (lambda != 0.0 && cost == nullptr) {
        throw std::invalid_argument("blahut_arimoto: lambda requires a cost vector");
    }
    if (lambda < 0.0) throw std::invalid_argument("blahut_arimoto: lambda must be nonnegative");
    if (cost && cost->size() != M) {
        throw std::invalid_argument("blahut_arimoto: cost length " + std::to_string(cost->size()) +
                                    " does not match input count " + std::to_string(M));
    }

    // D_j = sum_k H_kj log2(H_kj / r_k) splits into a constant column part
    // and a -sum_k H_kj log2 r_k part.
    std::vector<double> col_const(M, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
        double s = 0.0;
        for (double h : channel.column(j))
            if (h > 0.0) s += h * std::log2(h);
        col_const[j] = s;
    }

    std::vector<double> p(M, 1.0 / static_cast<double>(M));
    if (opts.warm_start) {
        if (opts.warm_start->size() != M) {
            throw std::invalid_argument("blahut_arimoto: warm start length mismatch");
        }
        // Mix with uniform so every input keeps support under the
        // multiplicative update.
        const double eps = 1e-12;
        for (std::size_t j = 0; j < M; ++j)
            p[j] = (1.0 - eps) * (*opts.warm_start)[j] + eps / static_cast<double>(M);
    }

    std::vector<double> r(n), log_r(n), score(M);
    BaResult res{.input = Pmf::uniform(M)};
    res.upper_bound = std::numeric_limits<double>::infinity();

    for (long it = 1; it <= opts.max_iterations; ++it) {
        std::fill(r.begin(), r.end(), 0.0);
        for (std::size_t j = 0; j < M; ++j) {
            const double pj = p[j];
            if (pj == 0.0) continue;
            auto col = channel.column(j);
            for (std::size_t k = 0; k < n; ++k) r[k] += pj * col[k];
        }
        for (std::size_t k = 0; k < n; ++k) log_r[k] = r[k] > 0.0 ? std::log2(r[k]) : 0.0;

        double value = 0.0;
        double upper = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < M; ++j) {
            double t = 0.0;
            auto col = channel.column(j);
            for (std::size_t k = 0; k < n; ++k)
                if (col[k] > 0.0) t += col[k] * log_r[k];
            double e = col_const[j] - t;
            if (cost) e -= lambda * (*cost)[j];
            score[j] = e;
            value += p[j] * e;
            upper = std::max(upper, e);
        }

        res.iterations = it;
        res.objective = value;
        res.upper_bound = std::min(res.upper_bound, upper);
        if (opts.record_trace) res.objective_trace.push_back(value);

        if (upper - value < opts.tol) {
            res.converged = true;
            break;
        }
        if (it == opts.max_iterations) break;

        // p_j <- p_j 2^{score_j}, normalized; shift by the max for stability.
        double z = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            p[j] *= std::exp2(score[j] - upper);
            z += p[j];
        }
        for (std::size_t j = 0; j < M; ++j) p[j] /= z;
    }

    // Tidy the pmf so it satisfies the Pmf invariant exactly.
    double z = 0.0;
    for (double x : p) z += x;
    for (double& x : p) x /= z;
    res.input = Pmf(p);
    res.mutual_information = mutual_information(channel, res.input);
    if (cost) {
        double c = 0.0;
        for (std::size_t j = 0; j < M; ++j) c += (*cost)[j] * p[j];
        res.realized_cost = c;
    }
    return res;
}

}  // namespace bicmcap
