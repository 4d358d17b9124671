#ifndef MSDE_MC_HPP
#define MSDE_MC_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "msde/fault.hpp"
#include "msde/graph.hpp"
#include "msde/quant.hpp"

namespace msde {

/// splitmix64; used to derive independent per-trial streams from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct McParams {
    QuantGrid grid;
    double sigma2 = 0.5;
    double delta = 0.0;
    int iters = 20;

    McParams(const QuantGrid& g) : grid(g) {}

    void validate() const {
        if (!(sigma2 > 0.0)) throw std::invalid_argument("McParams: sigma2 must be positive");
        if (!(delta >= 0.0 && delta <= 0.5))
            throw std::invalid_argument("McParams: delta outside [0, 1/2]");
        if (iters < 1) throw std::invalid_argument("McParams: iters must be >= 1");
    }
};

struct TrialResult {
    int iterations = 0;
    std::vector<std::int64_t> error_counts;  // per iteration, coin-resolved
    std::vector<std::int64_t> neg_counts;    // strictly negative decisions
    std::vector<std::int64_t> zero_counts;   // decisions exactly zero
    std::int64_t final_errors = 0;

    bool operator==(const TrialResult&) const = default;
};

/// Min-sum check rule on level values: sign product times minimum magnitude;
/// any zero input forces a zero output.
inline int min_sum_check(std::span<const int> vals) {
    int minmag = std::numeric_limits<int>::max();
    unsigned parity = 0;
    for (int v : vals) {
        if (v < 0) parity ^= 1u;
        int m = v < 0 ? -v : v;
        if (m < minmag) minmag = m;
    }
    return minmag == 0 ? 0 : (parity ? -minmag : minmag);
}

/// Min-sum variable rule: channel term plus incoming messages, saturated once.
inline int min_sum_var(int chan, std::span<const int> vals, int max_mag) {
    long long s = chan;
    for (int v : vals) s += v;
    return static_cast<int>(s < -max_mag ? -max_mag : (s > max_mag ? max_mag : s));
}

namespace detail {

// Stored-message helpers on raw b-bit words (hot path of the decoder).
struct WordCodec {
    int bits;
    std::uint32_t sbit;
    std::uint32_t magmask;

    explicit WordCodec(const QuantGrid& g)
        : bits(g.bits), sbit(1u << (g.bits - 1)), magmask((1u << (g.bits - 1)) - 1u) {}

    // value in level units (.. -1, 0, +1 ..)
    int value(std::uint32_t w) const {
        int mag = static_cast<int>(w & magmask);
        return (w & sbit) ? -mag : mag;
    }

    // store a saturated value; zero gets a uniformly random sign bit
    template <class Rng>
    std::uint32_t store(int v, Rng& rng) const {
        if (v > 0) return static_cast<std::uint32_t>(v);
        if (v < 0) return sbit | static_cast<std::uint32_t>(-v);
        return (rng() & 1u) ? sbit : 0u;
    }
};

}  // namespace detail

/// Flooding quantized min-sum decoding of one noisy transmission with per-read
/// i.i.d. bit-flip injection.  bpsk_signs gives the transmitted BPSK symbol of
/// every variable (+1/-1); errors are counted against it.  Per iteration:
/// check pass (fresh corrupted reads of the stored v2c words per output),
/// decision pass (fresh corrupted reads of c2v, clean channel term, saturated
/// result stored as a word and read once through the fault channel), variable
/// pass (fresh corrupted reads of c2v per outgoing message).  Channel LLRs are
/// read uncorrupted throughout.  Zero decisions resolve to an error with a
/// fair coin from the trial's randomness stream.
inline TrialResult decode_transmission(const TannerGraph& graph, const McParams& params,
                                       std::uint64_t seed, std::span<const std::int8_t> bpsk_signs) {
    params.validate();
    if (static_cast<int>(bpsk_signs.size()) != graph.n_var)
        throw std::invalid_argument("decode_transmission: bpsk_signs size mismatch");

    const QuantGrid& g = params.grid;
    const detail::WordCodec cw(g);
    const int M = g.max_mag;
    const int N = graph.n_var;
    const int dv = graph.dv;
    const int dc = graph.dc;
    const int n_edges = graph.num_edges();

    FaultChannel ch = FaultChannel::make(params.delta, g.bits);
    std::mt19937_64 rng(derive_seed(seed, 0));

    // channel LLRs, quantized to level units; never corrupted on read
    std::vector<std::int16_t> chan(N);
    {
        std::normal_distribution<double> noise(0.0, std::sqrt(params.sigma2));
        for (int v = 0; v < N; ++v) {
            double y = static_cast<double>(bpsk_signs[v]) + noise(rng);
            double llr = 2.0 * y / params.sigma2;
            chan[v] = static_cast<std::int16_t>(quantize(llr, g) - M);
        }
    }

    auto read = [&](std::uint32_t word) { return cw.value(word ^ ch.sample_error_word(rng)); };

    std::vector<std::uint16_t> v2c(n_edges), c2v(n_edges);
    for (int v = 0; v < N; ++v)
        for (int k = 0; k < dv; ++k) {
            int e = graph.var_edges[static_cast<std::size_t>(v) * dv + k];
            v2c[e] = static_cast<std::uint16_t>(cw.store(chan[v], rng));
        }

    TrialResult res;
    res.iterations = params.iters;
    res.error_counts.resize(params.iters);
    res.neg_counts.resize(params.iters);
    res.zero_counts.resize(params.iters);

    std::vector<int> vals(std::max(dv, dc));
    for (int it = 0; it < params.iters; ++it) {
        // check pass
        for (int c = 0; c < graph.n_chk; ++c) {
            int base = c * dc;
            for (int j = 0; j < dc; ++j) {
                int n = 0;
                for (int k = 0; k < dc; ++k)
                    if (k != j) vals[n++] = read(v2c[base + k]);
                int out = min_sum_check({vals.data(), static_cast<std::size_t>(n)});
                c2v[base + j] = static_cast<std::uint16_t>(cw.store(out, rng));
            }
        }

        // decisions
        std::int64_t neg = 0, zero = 0, err = 0;
        for (int v = 0; v < N; ++v) {
            for (int k = 0; k < dv; ++k)
                vals[k] = read(c2v[graph.var_edges[static_cast<std::size_t>(v) * dv + k]]);
            int sat = min_sum_var(chan[v], {vals.data(), static_cast<std::size_t>(dv)}, M);
            std::uint32_t word = cw.store(sat, rng);
            int dec = cw.value(word ^ ch.sample_error_word(rng));
            int rel = bpsk_signs[v] < 0 ? -dec : dec;
            if (rel < 0) {
                ++neg;
                ++err;
            } else if (rel == 0) {
                ++zero;
                if (rng() & 1u) ++err;
            }
        }
        res.neg_counts[it] = neg;
        res.zero_counts[it] = zero;
        res.error_counts[it] = err;

        // variable pass
        for (int v = 0; v < N; ++v) {
            const std::int32_t* edges = &graph.var_edges[static_cast<std::size_t>(v) * dv];
            for (int j = 0; j < dv; ++j) {
                int n = 0;
                for (int k = 0; k < dv; ++k)
                    if (k != j) vals[n++] = read(c2v[edges[k]]);
                int out = min_sum_var(chan[v], {vals.data(), static_cast<std::size_t>(n)}, M);
                v2c[edges[j]] = static_cast<std::uint16_t>(cw.store(out, rng));
            }
        }
    }
    res.final_errors = res.error_counts.back();
    return res;
}

/// Transmits the all-one BPSK codeword and decodes it.
inline TrialResult simulate_and_decode(const TannerGraph& graph, const McParams& params,
                                       std::uint64_t seed) {
    std::vector<std::int8_t> ones(graph.n_var, 1);
    return decode_transmission(graph, params, seed, ones);
}

struct BerEstimate {
    int trials = 0;
    int n_var = 0;
    std::vector<double> ber_mean;    // per iteration
    std::vector<double> ber_stderr;  // standard error of the mean across trials
};

/// Independent trials with per-trial derived seeds; each trial samples a fresh
/// graph from the ensemble (density evolution is an ensemble-average
/// statement).  Results are deterministic for a given base seed regardless of
/// worker count.
inline BerEstimate estimate_ber(int n_var, int dv, int dc, const McParams& params,
                                int n_trials, std::uint64_t base_seed, int workers = 1) {
    params.validate();
    if (n_trials < 1) throw std::invalid_argument("estimate_ber: n_trials must be >= 1");
    if (workers < 1) workers = 1;

    std::vector<TrialResult> results(n_trials);
    auto run_trial = [&](int t) {
        TannerGraph graph = sample_graph(n_var, dv, dc, derive_seed(base_seed, 2 * t));
        results[t] = decode_transmission(graph, params, derive_seed(base_seed, 2 * t + 1),
                                         std::vector<std::int8_t>(n_var, 1));
    };

    if (workers == 1 || n_trials == 1) {
        for (int t = 0; t < n_trials; ++t) run_trial(t);
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int t = next.fetch_add(1); t < n_trials; t = next.fetch_add(1)) run_trial(t);
        };
        std::vector<std::thread> pool;
        int n_threads = std::min(workers, n_trials);
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    BerEstimate est;
    est.trials = n_trials;
    est.n_var = n_var;
    est.ber_mean.assign(params.iters, 0.0);
    est.ber_stderr.assign(params.iters, 0.0);
    for (int it = 0; it < params.iters; ++it) {
        double mean = 0.0;
        for (const auto& r : results)
            mean += static_cast<double>(r.error_counts[it]) / n_var;
        mean /= n_trials;
        est.ber_mean[it] = mean;
        if (n_trials > 1) {
            double ss = 0.0;
            for (const auto& r : results) {
                double x = static_cast<double>(r.error_counts[it]) / n_var - mean;
                ss += x * x;
            }
            est.ber_stderr[it] = std::sqrt(ss / (n_trials - 1)) / std::sqrt(static_cast<double>(n_trials));
        }
    }
    return est;
}

}  // namespace msde

#endif
