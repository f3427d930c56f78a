#ifndef BICMCAP_BASELINE_HPP
#define BICMCAP_BASELINE_HPP

#include <optional>
#include <vector>

#include "bicmcap/bicm.hpp"
#include "bicmcap/blahut_arimoto.hpp"
#include "bicmcap/dmc.hpp"

namespace bicmcap {

/// Grid over each p^i_0 in [0,1], endpoints included. An optional refinement
/// re-searches a +-step box around the incumbent with the step shrunk by
/// `refinement` per stage.
struct GridSpec {
    double step = 1e-2;
    std::optional<double> refinement;  // factor in (0,1), e.g. 0.1
    int refine_stages = 1;

    void validate() const;
};

struct ExhaustiveResult {
    double value = 0.0;  // best I^bicm - lambda w^T p found
    BitPmfSet bits;
    long grid_evaluations = 0;    // exactly (floor(1/step)+1)^m
    long refine_evaluations = 0;
};

/// Exhaustive search of the product grid; the literature method and the
/// reference oracle for the solver. Refuses m > 4 (cost grows as
/// (1/step)^m). With cost_cap, grid points with w^T p above the cap are
/// skipped.
ExhaustiveResult exhaustive_bicm(const Dmc& channel, const GridSpec& grid, double lambda = 0.0,
                                 const std::vector<double>* w = nullptr,
                                 std::optional<double> cost_cap = std::nullopt);

/// Values of the grid-local maxima of I^bicm - lambda w^T p (Moore
/// neighborhood), sorted descending, at most max_count entries. Used to
/// screen instances whose top two optima are well separated.
std::vector<double> grid_local_maxima(const Dmc& channel, double step, double lambda = 0.0,
                                      const std::vector<double>* w = nullptr,
                                      std::size_t max_count = 8);

/// I^bicm with every bit pmf uniform; the classical BICM lower bound.
double uniform_bicm(const Dmc& channel);

struct CmResult {
    double value = 0.0;        // I(p) at the returned input, bits
    double upper_bound = 0.0;  // certified upper bound on the capacity
    Pmf input;
    double lambda = 0.0;
    double realized_cost = 0.0;
    bool converged = true;
};

struct CmOptions {
    double ba_tol = 1e-9;
    long ba_max_iterations = 100000;
    double cost_rel_tol = 1e-6;
    const Pmf* warm_start = nullptr;
};

/// Coded-modulation capacity of the channel: plain Blahut-Arimoto, or, with
/// (w, target_cost), max I(p) subject to w^T p <= target_cost via a lambda
/// sweep over the cost-penalized solve. upper_bound is valid for the
/// constrained problem regardless of the sweep tolerance or convergence (it
/// comes from the duality gap, which certifies at every iterate).
CmResult cm_capacity(const Dmc& channel, const std::vector<double>* w,
                     std::optional<double> target_cost, const CmOptions& opts);
CmResult cm_capacity(const Dmc& channel, const std::vector<double>* w = nullptr,
                     std::optional<double> target_cost = std::nullopt, double tol = 1e-9);

}  // namespace bicmcap

#endif
