#include "bicmcap/bicm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bicmcap {

namespace {

constexpr double kEffectiveColTol = 1e-10;

inline int bit_of(std::size_t label, int position, int m) {
    return static_cast<int>((label >> (m - 1 - position)) & 1u);
}

void check_position(int position, int m) {
    if (position < 0 || position >= m) {
        throw std::out_of_range("bit position " + std::to_string(position) +
                                " out of range [0," + std::to_string(m - 1) + "]");
    }
}

void check_bits(const Dmc& channel, const BitPmfSet& bits) {
    if (static_cast<int>(bits.size()) != channel.bits()) {
        throw std::invalid_argument("bit pmf count " + std::to_string(bits.size()) +
                                    " does not match channel bits " +
                                    std::to_string(channel.bits()));
    }
}

void check_column_sum(const std::vector<double>& col, const char* what) {
    double s = 0.0;
    for (double x : col) s += x;
    if (std::abs(s - 1.0) > kEffectiveColTol) {
        throw std::logic_error(std::string(what) + ": column sums to " + std::to_string(s));
    }
}

}  // namespace

BitPmf::BitPmf(double prob0) : p0(prob0) {
    if (!(p0 >= 0.0 && p0 <= 1.0)) {
        throw std::invalid_argument("BitPmf: p0 = " + std::to_string(prob0) + " outside [0,1]");
    }
}

BitPmfSet uniform_bits(int m) {
    if (m < 1) throw std::invalid_argument("uniform_bits: m must be >= 1");
    return BitPmfSet(static_cast<std::size_t>(m), BitPmf(0.5));
}

double kron_prob(const BitPmfSet& bits, std::size_t label) {
    const int m = static_cast<int>(bits.size());
    double p = 1.0;
    for (int i = 0; i < m; ++i) p *= bits[static_cast<std::size_t>(i)].prob(bit_of(label, i, m));
    return p;
}

Pmf kron_pmf(const BitPmfSet& bits) {
    if (bits.empty()) throw std::invalid_argument("kron_pmf: empty bit pmf set");
    const std::size_t M = std::size_t{1} << bits.size();
    std::vector<double> p(M);
    for (std::size_t x = 0; x < M; ++x) p[x] = kron_prob(bits, x);
    return Pmf(std::move(p));
}

std::vector<std::uint32_t> brgc_permutation(int m) {
    if (m < 1 || m > 31) throw std::invalid_argument("brgc_permutation: m out of range");
    const std::uint32_t M = std::uint32_t{1} << m;
    std::vector<std::uint32_t> sigma(M);
    for (std::uint32_t r = 0; r < M; ++r) sigma[r] = r ^ (r >> 1);
    return sigma;
}

EffectiveBitChannel effective_bit_channel(const Dmc& channel, const BitPmfSet& bits,
                                          int position) {
    check_bits(channel, bits);
    const int m = channel.bits();
    check_position(position, m);
    const std::size_t n = channel.outputs();
    const std::size_t M = channel.inputs();

    EffectiveBitChannel out;
    out.position = position;
    out.given0.assign(n, 0.0);
    out.given1.assign(n, 0.0);
    for (std::size_t x = 0; x < M; ++x) {
        double w = 1.0;
        for (int j = 0; j < m; ++j) {
            if (j == position) continue;
            w *= bits[static_cast<std::size_t>(j)].prob(bit_of(x, j, m));
        }
        if (w == 0.0) continue;
        auto col = channel.column(x);
        auto& dst = bit_of(x, position, m) == 0 ? out.given0 : out.given1;
        for (std::size_t k = 0; k < n; ++k) dst[k] += w * col[k];
    }
    check_column_sum(out.given0, "effective_bit_channel");
    check_column_sum(out.given1, "effective_bit_channel");
    return out;
}

EffectivePairChannel effective_pair_channel(const Dmc& channel, const BitPmfSet& bits, int pos_j,
                                            int pos_i) {
    check_bits(channel, bits);
    const int m = channel.bits();
    check_position(pos_j, m);
    check_position(pos_i, m);
    if (pos_j == pos_i) {
        throw std::invalid_argument("effective_pair_channel: positions must differ");
    }
    const std::size_t n = channel.outputs();
    const std::size_t M = channel.inputs();

    EffectivePairChannel out;
    out.pos_j = pos_j;
    out.pos_i = pos_i;
    for (auto& c : out.cols) c.assign(n, 0.0);
    for (std::size_t x = 0; x < M; ++x) {
        double w = 1.0;
        for (int j = 0; j < m; ++j) {
            if (j == pos_j || j == pos_i) continue;
            w *= bits[static_cast<std::size_t>(j)].prob(bit_of(x, j, m));
        }
        if (w == 0.0) continue;
        auto col = channel.column(x);
        const int b = (bit_of(x, pos_j, m) << 1) | bit_of(x, pos_i, m);
        auto& dst = out.cols[static_cast<std::size_t>(b)];
        for (std::size_t k = 0; k < n; ++k) dst[k] += w * col[k];
    }
    for (const auto& c : out.cols) check_column_sum(c, "effective_pair_channel");
    return out;
}

double conditional_entropy_bit(const EffectiveBitChannel& hi, const BitPmf& p) {
    return p.p0 * entropy_bits(hi.given0) + p.p1() * entropy_bits(hi.given1);
}

double bicm_mi(const Dmc& channel, const BitPmfSet& bits) {
    check_bits(channel, bits);
    std::vector<double> p0s(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) p0s[i] = bits[i].p0;
    return detail::bicm_objective(channel, p0s.data(), 0.0, nullptr);
}

namespace detail {

double bicm_objective(const Dmc& channel, const double* p0s, double lambda,
                      const std::vector<double>* w, double* cost_out) {
    const std::size_t n = channel.outputs();
    const std::size_t M = channel.inputs();
    const int m = channel.bits();

    // One pass over the input labels accumulates the output pmf and, per bit
    // position, the two conditional output columns weighted by the pmfs of
    // the other positions (prefix/suffix products avoid divisions at
    // degenerate bit pmfs).
    std::vector<double> r(n, 0.0);
    std::vector<double> cond(static_cast<std::size_t>(m) * 2 * n, 0.0);
    std::vector<double> prefix(static_cast<std::size_t>(m) + 1);
    std::vector<double> suffix(static_cast<std::size_t>(m) + 1);
    double cost = 0.0;

    for (std::size_t x = 0; x < M; ++x) {
        prefix[0] = 1.0;
        for (int i = 0; i < m; ++i) {
            const int b = static_cast<int>((x >> (m - 1 - i)) & 1u);
            const double f = b == 0 ? p0s[i] : 1.0 - p0s[i];
            prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] * f;
        }
        suffix[static_cast<std::size_t>(m)] = 1.0;
        for (int i = m - 1; i >= 0; --i) {
            const int b = static_cast<int>((x >> (m - 1 - i)) & 1u);
            const double f = b == 0 ? p0s[i] : 1.0 - p0s[i];
            suffix[static_cast<std::size_t>(i)] = f * suffix[static_cast<std::size_t>(i) + 1];
        }
        const double px = prefix[static_cast<std::size_t>(m)];
        auto col = channel.column(x);
        if (px > 0.0) {
            for (std::size_t k = 0; k < n; ++k) r[k] += px * col[k];
            if (w) cost += px * (*w)[x];
        }
        for (int i = 0; i < m; ++i) {
            const double excl =
                prefix[static_cast<std::size_t>(i)] * suffix[static_cast<std::size_t>(i) + 1];
            if (excl == 0.0) continue;
            const int b = static_cast<int>((x >> (m - 1 - i)) & 1u);
            double* dst = cond.data() + (static_cast<std::size_t>(i) * 2 + b) * n;
            for (std::size_t k = 0; k < n; ++k) dst[k] += excl * col[k];
        }
    }

    double hy = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        if (r[k] > 0.0) hy -= r[k] * std::log2(r[k]);

    double value = static_cast<double>(m) * hy;
    for (int i = 0; i < m; ++i) {
        const double* c0 = cond.data() + (static_cast<std::size_t>(i) * 2) * n;
        const double* c1 = c0 + n;
        double h0 = 0.0, h1 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (c0[k] > 0.0) h0 -= c0[k] * std::log2(c0[k]);
            if (c1[k] > 0.0) h1 -= c1[k] * std::log2(c1[k]);
        }
        value -= p0s[i] * h0 + (1.0 - p0s[i]) * h1;
    }
    if (cost_out) *cost_out = cost;
    return value - lambda * cost;
}

}  // namespace detail

}  // namespace bicmcap
