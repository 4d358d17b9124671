#ifndef MSDE_FAULT_HPP
#define MSDE_FAULT_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "msde/pmf.hpp"
#include "msde/quant.hpp"

namespace msde {

/// P(e) = delta^wH(e) * (1-delta)^(b-wH(e)) for a b-bit error word e.
inline double pattern_error_prob(std::uint32_t error_word, double delta, int bits) {
    if (!(delta >= 0.0 && delta <= 0.5))
        throw std::invalid_argument("pattern_error_prob: delta outside [0, 1/2]");
    if (bits < 1 || bits > 16)
        throw std::invalid_argument("pattern_error_prob: bits out of range");
    if (error_word >> bits)
        throw std::invalid_argument("pattern_error_prob: error word wider than b bits");
    int w = std::popcount(error_word);
    double p = 1.0;
    for (int i = 0; i < w; ++i) p *= delta;
    for (int i = 0; i < bits - w; ++i) p *= 1.0 - delta;
    return p;
}

/// i.i.d. per-bit BSC(delta) read-error model on b-bit sign-magnitude words.
/// The induced pattern-transition law is T[p -> p'] = delta^d (1-delta)^(b-d)
/// with d the Hamming distance; it is cached as a weight-per-distance table.
class FaultChannel {
  public:
    static FaultChannel make(double delta, int bits) {
        if (!(delta >= 0.0 && delta <= 0.5))
            throw std::invalid_argument("FaultChannel: delta outside [0, 1/2]");
        return FaultChannel(delta, bits);
    }

    // Test-only sampling paths may use any delta in [0, 1].
    static FaultChannel make_unchecked(double delta, int bits) {
        if (!(delta >= 0.0 && delta <= 1.0))
            throw std::invalid_argument("FaultChannel: delta outside [0, 1]");
        return FaultChannel(delta, bits);
    }

    double delta() const { return delta_; }
    int bits() const { return bits_; }
    std::uint32_t num_patterns() const { return 1u << bits_; }

    double transition(std::uint32_t from, std::uint32_t to) const {
        return weight_[std::popcount(from ^ to)];
    }

    /// Samples an error word with i.i.d. Bernoulli(delta) bits using a single
    /// uniform draw against the cached word CDF.
    template <class Rng>
    std::uint32_t sample_error_word(Rng& rng) const {
        if (delta_ == 0.0) return 0;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double u = unit(rng);
        if (u < cdf_[0]) return 0;
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        auto idx = static_cast<std::uint32_t>(it - cdf_.begin());
        return idx < num_patterns() ? idx : num_patterns() - 1;
    }

  private:
    FaultChannel(double delta, int bits) : delta_(delta), bits_(bits) {
        if (bits < 1 || bits > 16)
            throw std::invalid_argument("FaultChannel: bits out of range");
        weight_.resize(bits + 1);
        for (int d = 0; d <= bits; ++d) {
            double p = 1.0;
            for (int i = 0; i < d; ++i) p *= delta;
            for (int i = 0; i < bits - d; ++i) p *= 1.0 - delta;
            weight_[d] = p;
        }
        cdf_.resize(num_patterns());
        double acc = 0.0;
        for (std::uint32_t e = 0; e < num_patterns(); ++e) {
            acc += weight_[std::popcount(e)];
            cdf_[e] = acc;
        }
        cdf_.back() = 1.0;
    }

    double delta_;
    int bits_;
    std::vector<double> weight_;  // weight_[d] = delta^d (1-delta)^(b-d)
    std::vector<double> cdf_;
};

/// XORs a stored word with a sampled error pattern; one call per memory read.
template <class Rng>
inline SignMagPattern corrupt_message(SignMagPattern p, const FaultChannel& ch, Rng& rng) {
    return {p.word ^ ch.sample_error_word(rng)};
}

/// Exact fault transform f_delta on a level PMF: lift to the 2^b patterns
/// (level-0 mass split evenly between "+0" and "-0"), pass every bit through
/// BSC(delta), collapse back to levels.  The per-bit cascade is the exact
/// law of simultaneous i.i.d. flips.  Output is normalized; delta = 0 returns
/// the input bit-exactly.
inline LevelPmf corrupt_pmf(const LevelPmf& p, const FaultChannel& ch) {
    const QuantGrid& g = p.grid;
    if (ch.bits() != g.bits)
        throw std::invalid_argument("corrupt_pmf: bit-width mismatch");
    if (ch.delta() == 0.0) return p;

    const std::uint32_t n = ch.num_patterns();
    const std::uint32_t sbit = sign_bit_mask(g);
    const int M = g.max_mag;

    std::vector<double> pat(n, 0.0);
    for (int i = 0; i < g.num_levels(); ++i) {
        int v = i - M;
        if (v > 0)
            pat[static_cast<std::uint32_t>(v)] += p.mass[i];
        else if (v < 0)
            pat[sbit | static_cast<std::uint32_t>(-v)] += p.mass[i];
        else {
            pat[0] += p.mass[i] / 2.0;
            pat[sbit] += p.mass[i] / 2.0;
        }
    }

    const double d = ch.delta();
    std::vector<double> nxt(n);
    for (int j = 0; j < g.bits; ++j) {
        std::uint32_t m = 1u << j;
        for (std::uint32_t w = 0; w < n; ++w)
            nxt[w] = (1.0 - d) * pat[w] + d * pat[w ^ m];
        pat.swap(nxt);
    }

    LevelPmf out(g);
    for (std::uint32_t w = 0; w < n; ++w) {
        int mag = static_cast<int>(w & (sbit - 1));
        int idx = (w & sbit) ? M - mag : M + mag;
        out.mass[idx] += pat[w];
    }
    out.normalize();
    return out;
}

}  // namespace msde

#endif
