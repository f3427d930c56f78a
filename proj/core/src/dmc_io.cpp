#include "bicmcap/dmc_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bicmcap {

namespace {

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

Dmc load_dmc(std::istream& in, const std::string& name) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(strip_comment(line));
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                double v = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                row.push_back(v);
            } catch (const std::exception&) {
                throw std::invalid_argument(name + ":" + std::to_string(lineno) +
                                            ": cannot parse '" + tok + "' as a probability");
            }
        }
        if (row.empty()) continue;  // blank or comment-only line
        if (width == 0) {
            width = row.size();
        } else if (row.size() != width) {
            throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": row has " +
                                        std::to_string(row.size()) + " entries, expected " +
                                        std::to_string(width));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument(name + ": no matrix rows found");

    const std::size_t n = rows.size();
    const std::size_t M = width;
    std::vector<double> col_major(n * M);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < M; ++j) col_major[j * n + k] = rows[k][j];
    try {
        return Dmc(n, M, std::move(col_major));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(name + ": " + e.what());
    }
}

Dmc load_dmc_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open matrix file '" + path + "'");
    return load_dmc(f, path);
}

void save_dmc(std::ostream& out, const Dmc& channel) {
    char buf[32];
    for (std::size_t k = 0; k < channel.outputs(); ++k) {
        for (std::size_t j = 0; j < channel.inputs(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", channel(k, j));
            out << (j ? " " : "") << buf;
        }
        out << '\n';
    }
}

std::vector<double> load_cost_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open cost file '" + path + "'");
    std::vector<double> costs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        std::istringstream ls(strip_comment(line));
        std::string tok;
        while (ls >> tok) {
            try {
                costs.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                            ": cannot parse '" + tok + "' as a cost");
            }
        }
    }
    if (costs.empty()) throw std::invalid_argument(path + ": no cost values found");
    return costs;
}

}  // namespace bicmcap
