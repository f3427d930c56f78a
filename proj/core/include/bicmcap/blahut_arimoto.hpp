#ifndef BICMCAP_BLAHUT_ARIMOTO_HPP
#define BICMCAP_BLAHUT_ARIMOTO_HPP

#include <vector>

#include "bicmcap/dmc.hpp"

namespace bicmcap {

struct BaOptions {
    double tol = 1e-9;          // duality-gap stopping threshold, bits
    long max_iterations = 100000;
    bool record_trace = false;  // keep the per-iteration objective
    const Pmf* warm_start = nullptr;
};

struct BaResult {
    double objective = 0.0;           // I(p) - lambda w^T p at the returned input, bits
    double mutual_information = 0.0;  // I(p) at the returned input, bits
    double upper_bound = 0.0;         // certified upper bound on the optimal objective
    double realized_cost = 0.0;       // w^T p (0 when no cost vector)
    Pmf input;
    long iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;  // filled when record_trace is set
};

/// Maximizes I(p) over input pmfs, or I(p) - lambda w^T p when a cost vector
/// is given. Stops when the duality gap max_j D_j - sum_j p_j D_j drops below
/// tol. On hitting the iteration cap the best iterate is returned with
/// converged = false.
BaResult blahut_arimoto(const Dmc& channel, const std::vector<double>* cost = nullptr,
                        double lambda = 0.0, const BaOptions& opts = {});

}  // namespace bicmcap

#endif
