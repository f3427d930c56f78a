#ifndef BICMCAP_DMC_HPP
#define BICMCAP_DMC_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace bicmcap {

inline constexpr double kPmfSumTol = 1e-12;
inline constexpr double kLog2E = 1.4426950408889634074;  // 1/ln 2

/// Probability mass function over a finite alphabet. Entries in [0,1],
/// sum within kPmfSumTol of 1. Immutable after construction.
class Pmf {
public:
    explicit Pmf(std::vector<double> probs);
    static Pmf uniform(std::size_t len);

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<double>& probs() const { return probs_; }

private:
    std::vector<double> probs_;
};

/// Discrete memoryless channel with 2^m inputs and n outputs, stored as a
/// column-stochastic n x M transition matrix (column j = output pmf given
/// input j). Column-major storage; inputs are indexed by their m-bit label,
/// most significant bit first. Immutable after construction.
class Dmc {
public:
    Dmc(std::size_t n_outputs, std::size_t n_inputs, std::vector<double> column_major);

    std::size_t outputs() const { return n_; }
    std::size_t inputs() const { return m_inputs_; }
    int bits() const { return bits_; }

    double operator()(std::size_t output, std::size_t input) const {
        return data_[input * n_ + output];
    }
    std::span<const double> column(std::size_t input) const {
        return {data_.data() + input * n_, n_};
    }
    const std::vector<double>& raw() const { return data_; }

private:
    std::size_t n_ = 0;
    std::size_t m_inputs_ = 0;
    int bits_ = 0;
    std::vector<double> data_;
};

/// Shannon entropy in bits; zero summands are skipped (0 log 0 = 0).
double entropy(const Pmf& p);
double entropy_bits(std::span<const double> probs);

/// Output pmf r = H p.
Pmf output_pmf(const Dmc& channel, const Pmf& input);

/// I(X;Y) in bits, clamped to be nonnegative.
double mutual_information(const Dmc& channel, const Pmf& input);

}  // namespace bicmcap

#endif
