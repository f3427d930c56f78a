#ifndef BICMCAP_DMC_IO_HPP
#define BICMCAP_DMC_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "bicmcap/dmc.hpp"

namespace bicmcap {

/// Plain-text transition matrix: one output row per line, whitespace-separated
/// probabilities, '#' starts a comment. Columns are the channel inputs in
/// label order. Parse errors report 1-based line numbers.
Dmc load_dmc(std::istream& in, const std::string& name = "<stream>");
Dmc load_dmc_file(const std::string& path);
void save_dmc(std::ostream& out, const Dmc& channel);

/// Cost file: one decimal value per line ('#' comments allowed), length 2^m.
std::vector<double> load_cost_file(const std::string& path);

}  // namespace bicmcap

#endif
