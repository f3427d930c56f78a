#include "bicmcap/dmc.hpp"

#include <cmath>
#include <stdexcept>

namespace bicmcap {

namespace {

void check_probability_entries(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::invalid_argument(std::string(what) + ": entry " + std::to_string(x) +
                                        " outside [0,1]");
        }
    }
}

}  // namespace

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("Pmf: empty");
    check_probability_entries(probs_, "Pmf");
    double sum = 0.0;
    for (double x : probs_) sum += x;
    if (std::abs(sum - 1.0) > kPmfSumTol) {
        throw std::invalid_argument("Pmf: entries sum to " + std::to_string(sum) +
                                    ", expected 1 within 1e-12");
    }
}

Pmf Pmf::uniform(std::size_t len) {
    if (len == 0) throw std::invalid_argument("Pmf::uniform: zero length");
    return Pmf(std::vector<double>(len, 1.0 / static_cast<double>(len)));
}

Dmc::Dmc(std::size_t n_outputs, std::size_t n_inputs, std::vector<double> column_major)
    : n_(n_outputs), m_inputs_(n_inputs), data_(std::move(column_major)) {
    if (n_ == 0 || m_inputs_ == 0) throw std::invalid_argument("Dmc: empty dimension");
    if (data_.size() != n_ * m_inputs_) {
        throw std::invalid_argument("Dmc: data size " + std::to_string(data_.size()) +
                                    " does not match " + std::to_string(n_) + "x" +
                                    std::to_string(m_inputs_));
    }
    // M must be 2^m with m >= 1
    if (m_inputs_ < 2 || (m_inputs_ & (m_inputs_ - 1)) != 0) {
        throw std::invalid_argument("Dmc: input count " + std::to_string(m_inputs_) +
                                    " is not a power of two >= 2");
    }
    std::size_t t = m_inputs_;
    while (t > 1) {
        t >>= 1;
        ++bits_;
    }
    check_probability_entries(data_, "Dmc");
    for (std::size_t j = 0; j < m_inputs_; ++j) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n_; ++k) sum += data_[j * n_ + k];
        if (std::abs(sum - 1.0) > kPmfSumTol) {
            throw std::invalid_argument("Dmc: column " + std::to_string(j + 1) + " sums to " +
                                        std::to_string(sum) + ", expected 1 within 1e-12");
        }
    }
}

double entropy_bits(std::span<const double> probs) {
    double h = 0.0;
    for (double x : probs) {
        if (x > 0.0) h -= x * std::log2(x);
    }
    return h;
}

double entropy(const Pmf& p) { return entropy_bits(p.probs()); }

Pmf output_pmf(const Dmc& channel, const Pmf& input) {
    if (input.size() != channel.inputs()) {
        throw std::invalid_argument("output_pmf: input pmf length " + std::to_string(input.size()) +
                                    " does not match channel input count " +
                                    std::to_string(channel.inputs()));
    }
    std::vector<double> r(channel.outputs(), 0.0);
    for (std::size_t j = 0; j < channel.inputs(); ++j) {
        const double pj = input[j];
        if (pj == 0.0) continue;
        auto col = channel.column(j);
        for (std::size_t k = 0; k < channel.outputs(); ++k) r[k] += pj * col[k];
    }
    return Pmf(std::move(r));
}

double mutual_information(const Dmc& channel, const Pmf& input) {
    const Pmf r = output_pmf(channel, input);
    double mi = entropy(r);
    for (std::size_t j = 0; j < channel.inputs(); ++j) {
        const double pj = input[j];
        if (pj == 0.0) continue;
        mi -= pj * entropy_bits(channel.column(j));
    }
    return mi < 0.0 ? 0.0 : mi;
}

}  // namespace bicmcap
