#ifndef BICMCAP_BICM_HPP
#define BICMCAP_BICM_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "bicmcap/dmc.hpp"

namespace bicmcap {

/// Bernoulli pmf of one label bit; stores P(bit = 0).
struct BitPmf {
    double p0 = 0.5;

    BitPmf() = default;
    explicit BitPmf(double prob0);
    double p1() const { return 1.0 - p0; }
    double prob(int bit) const { return bit == 0 ? p0 : 1.0 - p0; }
};

/// Per-position bit pmfs, index 0 = most significant label bit.
using BitPmfSet = std::vector<BitPmf>;

BitPmfSet uniform_bits(int m);

/// p = p^1 (x) ... (x) p^m; entry at label x is the product of the per-bit
/// probabilities of x's bits, MSB first.
Pmf kron_pmf(const BitPmfSet& bits);
double kron_prob(const BitPmfSet& bits, std::size_t label);

/// Binary reflected Gray code: maps amplitude rank r to label r ^ (r >> 1).
std::vector<std::uint32_t> brgc_permutation(int m);

/// n x 2 channel seen by one bit position when the other bit pmfs are fixed:
/// column b is the output pmf given that bit equal to b.
struct EffectiveBitChannel {
    int position = 0;  // 0-based, 0 = MSB
    std::vector<double> given0, given1;

    std::size_t outputs() const { return given0.size(); }
};

/// n x 4 channel seen jointly by bit positions (j, i); column index is the
/// two-bit value b_j b_i in {00,01,10,11}.
struct EffectivePairChannel {
    int pos_j = 0, pos_i = 0;
    std::array<std::vector<double>, 4> cols;

    std::size_t outputs() const { return cols[0].size(); }
};

EffectiveBitChannel effective_bit_channel(const Dmc& channel, const BitPmfSet& bits, int position);
EffectivePairChannel effective_pair_channel(const Dmc& channel, const BitPmfSet& bits, int pos_j,
                                            int pos_i);

/// H(Y|B_i) in bits; linear in p.
double conditional_entropy_bit(const EffectiveBitChannel& hi, const BitPmf& p);

/// I^bicm = sum_i [H(Y) - H(Y|B_i)] in bits, H(Y) computed once from the
/// Kronecker input pmf.
double bicm_mi(const Dmc& channel, const BitPmfSet& bits);

namespace detail {
/// I^bicm - lambda w^T p evaluated from raw p0 values without constructing
/// intermediate objects; hot path for grid searches. cost_out (optional)
/// receives w^T p.
double bicm_objective(const Dmc& channel, const double* p0s, double lambda,
                      const std::vector<double>* w, double* cost_out = nullptr);
}  // namespace detail

}  // namespace bicmcap

#endif
