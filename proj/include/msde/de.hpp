#ifndef MSDE_DE_HPP
#define MSDE_DE_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "msde/fault.hpp"
#include "msde/pmf.hpp"
#include "msde/quant.hpp"

namespace msde {

struct EnsembleConfig {
    int dv;
    int dc;

    EnsembleConfig(int dv_, int dc_) : dv(dv_), dc(dc_) {
        if (dv < 2 || dc < 2)
            throw std::invalid_argument("EnsembleConfig: degrees must be >= 2");
    }
    // dv >= dc means non-positive design rate; callers may warn but it is not
    // an error.
    bool positive_rate() const { return dv < dc; }
    double rate() const { return 1.0 - static_cast<double>(dv) / dc; }
};

struct DeParams {
    QuantGrid grid;
    double delta = 0.0;
    int max_iters = 200;
    double alpha = 10.0;
    std::optional<double> eta_override;  // absolute target, needed when delta == 0

    DeParams(const QuantGrid& g) : grid(g) {}

    void validate() const {
        if (max_iters < 1) throw std::invalid_argument("DeParams: max_iters must be >= 1");
        if (!(alpha > 1.0)) throw std::invalid_argument("DeParams: alpha must be > 1");
        if (!(delta >= 0.0 && delta <= 0.5))
            throw std::invalid_argument("DeParams: delta outside [0, 1/2]");
    }

    double eta() const { return eta_override ? *eta_override : alpha * delta; }
};

enum class DeStop { ReachedTarget, ExhaustedIterations };

struct DeTrace {
    std::vector<double> pe;  // P_e at iterations 1..pe.size()
    DeStop stop = DeStop::ExhaustedIterations;
    double eta = 0.0;

    double min_pe() const {
        double m = pe.empty() ? 1.0 : pe.front();
        for (double v : pe) m = std::min(m, v);
        return m;
    }
};

/// PMF of the quantized channel LLR for BPSK over AWGN under the all-one
/// codeword: LLR ~ N(2/sigma2, 4/sigma2), integrated over the quantization
/// intervals; the open-ended end intervals absorb the tails.
inline LevelPmf channel_pmf(double sigma2, const QuantGrid& g) {
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("channel_pmf: sigma2 must be positive");
    double mu = 2.0 / sigma2;
    double sd = 2.0 / std::sqrt(sigma2);
    auto cdf = [&](double x) {
        if (x == std::numeric_limits<double>::infinity()) return 1.0;
        if (x == -std::numeric_limits<double>::infinity()) return 0.0;
        return 0.5 * std::erfc(-(x - mu) / (sd * std::numbers::sqrt2));
    };
    LevelPmf p(g);
    for (int i = 0; i < g.num_levels(); ++i)
        p.mass[i] = cdf(g.interval_hi(i)) - cdf(g.interval_lo(i));
    for (double& v : p.mass) v = std::max(v, 0.0);
    p.normalize();
    return p;
}

namespace detail {
inline double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}
}  // namespace detail

/// Exact law of the min-sum check update (sign product, minimum magnitude)
/// for d_c - 1 i.i.d. inputs distributed as p.  Evaluated with magnitude tail
/// sums and the even/odd sign-count split:
///   E(g) = P(all |X| >= g, even # negatives), O(g) likewise odd,
///   q(+g) = E(g) - E(g+1), q(-g) = O(g) - O(g+1), q(0) = 1 - (1 - p(0))^(dc-1).
inline LevelPmf check_update(const LevelPmf& p, int dc) {
    if (dc < 2) throw std::invalid_argument("check_update: dc must be >= 2");
    const QuantGrid& g = p.grid;
    const int M = g.max_mag;
    const int n = dc - 1;

    // tail sums over magnitudes g = 1..M on each side
    std::vector<double> tail_pos(M + 2, 0.0), tail_neg(M + 2, 0.0);
    for (int m = M; m >= 1; --m) {
        tail_pos[m] = tail_pos[m + 1] + p.mass[M + m];
        tail_neg[m] = tail_neg[m + 1] + p.mass[M - m];
    }

    LevelPmf q(g);
    q.mass[M] = 1.0 - detail::ipow(1.0 - p.mass[M], n);
    for (int m = 1; m <= M; ++m) {
        double s1 = detail::ipow(tail_pos[m] + tail_neg[m], n);
        double d1 = detail::ipow(tail_pos[m] - tail_neg[m], n);
        double s2 = detail::ipow(tail_pos[m + 1] + tail_neg[m + 1], n);
        double d2 = detail::ipow(tail_pos[m + 1] - tail_neg[m + 1], n);
        q.mass[M + m] = ((s1 + d1) - (s2 + d2)) / 2.0;
        q.mass[M - m] = ((s1 - d1) - (s2 - d2)) / 2.0;
    }
    for (double& v : q.mass) v = std::max(v, 0.0);
    q.normalize();
    return q;
}

namespace detail {

/// Convolves p0 with n copies of q exactly on the step lattice, then folds
/// all mass beyond +-M onto the saturation levels.  This is the law of the
/// exact sum saturated once.
inline LevelPmf conv_saturate(const LevelPmf& p0, const LevelPmf& q, int n) {
    if (!(p0.grid == q.grid))
        throw std::invalid_argument("var_update/decision_pmf: grid mismatch");
    const QuantGrid& g = p0.grid;
    const int M = g.max_mag;

    std::vector<double> acc = p0.mass;  // offsets -accM..accM
    int acc_m = M;
    std::vector<double> next;
    for (int k = 0; k < n; ++k) {
        next.assign(acc.size() + 2 * static_cast<std::size_t>(M), 0.0);
        for (std::size_t i = 0; i < acc.size(); ++i) {
            double a = acc[i];
            if (a == 0.0) continue;
            for (int j = 0; j < g.num_levels(); ++j)
                next[i + static_cast<std::size_t>(j)] += a * q.mass[j];
        }
        acc.swap(next);
        acc_m += M;
    }

    LevelPmf out(g);
    for (std::size_t i = 0; i < acc.size(); ++i) {
        int v = static_cast<int>(i) - acc_m;
        int idx = v <= -M ? 0 : (v >= M ? 2 * M : M + v);
        out.mass[idx] += acc[i];
    }
    out.normalize();
    return out;
}

}  // namespace detail

/// p0 convolved with d_v - 1 copies of q, saturated: the variable-to-check
/// message density.
inline LevelPmf var_update(const LevelPmf& p0, const LevelPmf& q, int dv) {
    if (dv < 2) throw std::invalid_argument("var_update: dv must be >= 2");
    return detail::conv_saturate(p0, q, dv - 1);
}

/// p0 convolved with d_v copies of q, saturated: the decision density.
inline LevelPmf decision_pmf(const LevelPmf& p0, const LevelPmf& q, int dv) {
    if (dv < 2) throw std::invalid_argument("decision_pmf: dv must be >= 2");
    return detail::conv_saturate(p0, q, dv);
}

/// P_e = 1/2 d(0) + sum over negative levels of d(m).
inline double bit_error_prob(const LevelPmf& d) {
    const int M = d.grid.max_mag;
    double s = d.mass[M] / 2.0;
    for (int i = 0; i < M; ++i) s += d.mass[i];
    return s;
}

/// Density evolution for quantized min-sum decoding with i.i.d. bit-flip read
/// errors.  Each iteration:
///   check input  p~ = f_delta(p),      q  = check_update(p~)
///   var/decision q~ = f_delta(q),      d  = decision_pmf(p0, q~)
///   decision read    d~ = f_delta(d),  P_e from d~
///   next state       p  = var_update(p0, q~)
/// The channel density p0 itself is never corrupted.  With delta = 0 every
/// fault transform is an exact identity, so the recursion degenerates
/// bit-exactly to noiseless density evolution.  Stops once P_e <= eta.
inline DeTrace de_run(const EnsembleConfig& ens, double sigma2, const DeParams& params) {
    params.validate();
    const double eta = params.eta();
    FaultChannel ch = FaultChannel::make(params.delta, params.grid.bits);

    LevelPmf p0 = channel_pmf(sigma2, params.grid);
    LevelPmf p = p0;

    DeTrace trace;
    trace.eta = eta;
    trace.pe.reserve(params.max_iters);
    for (int l = 1; l <= params.max_iters; ++l) {
        LevelPmf pt = corrupt_pmf(p, ch);
        LevelPmf q = check_update(pt, ens.dc);
        LevelPmf qt = corrupt_pmf(q, ch);
        LevelPmf d = decision_pmf(p0, qt, ens.dv);
        LevelPmf dt = corrupt_pmf(d, ch);
        double pe = bit_error_prob(dt);
        trace.pe.push_back(pe);
        if (pe <= eta) {
            trace.stop = DeStop::ReachedTarget;
            return trace;
        }
        p = var_update(p0, qt, ens.dv);
    }
    trace.stop = DeStop::ExhaustedIterations;
    return trace;
}

struct ThresholdResult {
    enum class Status { Converged, LoFails, HiSucceeds };
    Status status = Status::Converged;
    double sigma2_star = 0.0;  // midpoint of the final bracket when Converged
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    // Diagnosis for LoFails: smallest P_e seen at the lo endpoint.  If it
    // exceeds eta the target is below the achievable floor ("no threshold").
    double min_pe_at_lo = 0.0;
    bool no_threshold() const { return status == Status::LoFails; }
    bool converged() const { return status == Status::Converged; }
};

/// Bisection on sigma^2.  A point succeeds iff de_run reaches P_e <= eta at
/// some iteration <= max_iters.  Requires success at lo and failure at hi.
inline ThresholdResult threshold_search(const EnsembleConfig& ens, const DeParams& params,
                                        double sigma2_lo, double sigma2_hi,
                                        double resolution = 5e-4) {
    params.validate();
    if (!(resolution > 0.0))
        throw std::invalid_argument("threshold_search: resolution must be positive");
    if (!(sigma2_lo > 0.0 && sigma2_lo < sigma2_hi))
        throw std::invalid_argument("threshold_search: need 0 < lo < hi");

    auto succeeds = [&](double s2) { return de_run(ens, s2, params).stop == DeStop::ReachedTarget; };

    ThresholdResult r;
    r.bracket_lo = sigma2_lo;
    r.bracket_hi = sigma2_hi;

    DeTrace lo_trace = de_run(ens, sigma2_lo, params);
    if (lo_trace.stop != DeStop::ReachedTarget) {
        r.status = ThresholdResult::Status::LoFails;
        r.min_pe_at_lo = lo_trace.min_pe();
        return r;
    }
    if (succeeds(sigma2_hi)) {
        r.status = ThresholdResult::Status::HiSucceeds;
        return r;
    }

    double lo = sigma2_lo, hi = sigma2_hi;
    while (hi - lo > resolution) {
        double mid = (lo + hi) / 2.0;
        if (succeeds(mid))
            lo = mid;
        else
            hi = mid;
    }
    r.status = ThresholdResult::Status::Converged;
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    r.sigma2_star = (lo + hi) / 2.0;
    return r;
}

}  // namespace msde

#endif
