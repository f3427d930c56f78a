#ifndef BICMCAP_CLI_HPP
#define BICMCAP_CLI_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bicmcap {

/// One run of a subcommand, flattened for serialization. Serializes to one
/// JSON object or one CSV row; doubles round-trip losslessly.
struct RunRecord {
    std::string command;
    std::vector<std::string> argv;
    std::vector<std::pair<std::string, std::string>> config;

    double value = 0.0;  // the computed capacity / objective, bits
    std::vector<double> bit_pmfs;   // p0 per label position, MSB first
    std::vector<double> input_pmf;  // symbol pmf (Blahut-Arimoto runs)
    double lambda = 0.0;
    std::optional<double> realized_cost;
    bool converged = true;

    std::optional<double> uniform_bicm;
    std::optional<double> cm_capacity;
    std::optional<double> cm_capacity_upper;
    std::optional<double> awgn_capacity;
    std::optional<double> gap_bicm_percent;  // 100 (1 - value / awgn capacity)
    std::optional<double> gap_cm_percent;
    std::optional<double> gap_uniform_percent;

    std::optional<int> m;
    std::optional<double> snr_db;
    std::optional<double> best_gamma;
    std::optional<double> realized_snr;
    std::vector<std::string> labeling;   // Gray labels in amplitude order
    std::vector<double> points;          // constellation points in label order

    int outer_passes = 0;
    std::vector<int> inner_iterations;
    long derivative_evaluations = 0;
    std::optional<long> ba_iterations;
    std::optional<int> gamma_evaluations;
    std::optional<int> bacm_solves;

    std::string status = "ok";
    std::optional<double> wall_ms;  // present only with --timing
    bool flagged = false;           // drives exit code 3
};

/// Runs one CLI invocation (args exclude the program name) and writes results
/// to the given streams. Returns the process exit code: 0 success, 2 input
/// error, 3 a non-convergence flag is present in the result.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bicmcap

#endif
