#ifndef MSDE_EXPERIMENTS_HPP
#define MSDE_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "msde/de.hpp"
#include "msde/mc.hpp"

namespace msde {

inline constexpr const char* kVersion = "0.1.0";

namespace detail {

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

/// Runs job(i) for i in [0, n) on a pool of `workers` threads; each job writes
/// its own output slot, so results are ordered by index no matter the
/// scheduling.
inline void parallel_for(int n, int workers, const std::function<void(int)>& job) {
    if (workers < 1) workers = 1;
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) job(i);
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace detail

inline std::string threshold_status_name(ThresholdResult::Status s) {
    switch (s) {
        case ThresholdResult::Status::Converged: return "ok";
        case ThresholdResult::Status::LoFails: return "no_threshold";
        case ThresholdResult::Status::HiSucceeds: return "bracket_too_low";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// trace: P_e per iteration for a list of (delta, sigma2) scenarios
// ---------------------------------------------------------------------------

struct TraceConfig {
    EnsembleConfig ensemble{3, 6};
    QuantGrid grid{5, 1.0};
    std::vector<double> deltas{0.0, 1e-5};
    std::vector<double> sigma2s{0.6576};
    double alpha = 10.0;
    int max_iters = 200;
    std::optional<double> eta_override;  // eta for the delta = 0 baseline
    int workers = 1;
};

struct TraceRow {
    double delta;
    double sigma2;
    int iteration;
    double pe;
};

/// The delta = 0 baseline is always included so iteration overheads are
/// computable downstream.  Its eta is eta_override when given, else
/// alpha * (smallest positive delta in the list), else 0 (full-length trace).
inline std::vector<TraceRow> run_trace(const TraceConfig& cfg) {
    std::vector<double> deltas = cfg.deltas;
    if (std::find(deltas.begin(), deltas.end(), 0.0) == deltas.end())
        deltas.insert(deltas.begin(), 0.0);

    double min_pos = 0.0;
    for (double d : deltas)
        if (d > 0.0 && (min_pos == 0.0 || d < min_pos)) min_pos = d;

    struct Cell {
        double delta, sigma2;
        DeTrace trace;
    };
    std::vector<Cell> cells;
    for (double d : deltas)
        for (double s2 : cfg.sigma2s) cells.push_back({d, s2, {}});

    detail::parallel_for(static_cast<int>(cells.size()), cfg.workers, [&](int i) {
        DeParams params(cfg.grid);
        params.delta = cells[i].delta;
        params.alpha = cfg.alpha;
        params.max_iters = cfg.max_iters;
        if (cells[i].delta == 0.0)
            params.eta_override = cfg.eta_override ? *cfg.eta_override : cfg.alpha * min_pos;
        cells[i].trace = de_run(cfg.ensemble, cells[i].sigma2, params);
    });

    std::vector<TraceRow> rows;
    for (const auto& c : cells)
        for (std::size_t l = 0; l < c.trace.pe.size(); ++l)
            rows.push_back({c.delta, c.sigma2, static_cast<int>(l) + 1, c.trace.pe[l]});
    return rows;
}

// ---------------------------------------------------------------------------
// table: thresholds over ensembles x {MS, F-MS} x deltas
// ---------------------------------------------------------------------------

struct TableConfig {
    std::vector<EnsembleConfig> ensembles{{3, 6}, {4, 8}, {5, 10}, {6, 12}};
    QuantGrid grid{5, 1.0};
    std::vector<double> deltas{1e-3, 1e-4, 1e-5, 1e-6};
    double alpha = 10.0;
    int max_iters = 200;
    double bracket_lo = 0.3;
    double bracket_hi = 0.9;
    double resolution = 5e-4;
    int workers = 1;
};

struct TableRow {
    int dv, dc;
    std::string mode;  // "MS" or "F-MS"
    double delta;      // column delta (the MS rows run with delta = 0)
    double eta;
    std::string status;
    double sigma2_star;  // meaningful when status == "ok"
};

/// MS rows use delta = 0 with the same eta = alpha * delta as the paired
/// faulty run, so both modes share the threshold definition.
inline std::vector<TableRow> run_table(const TableConfig& cfg) {
    struct Cell {
        EnsembleConfig ens;
        bool faulty;
        double delta;
    };
    std::vector<Cell> cells;
    for (const auto& ens : cfg.ensembles)
        for (bool faulty : {false, true})
            for (double d : cfg.deltas) cells.push_back({ens, faulty, d});

    std::vector<TableRow> rows(cells.size());
    detail::parallel_for(static_cast<int>(cells.size()), cfg.workers, [&](int i) {
        const Cell& c = cells[i];
        DeParams params(cfg.grid);
        params.alpha = cfg.alpha;
        params.max_iters = cfg.max_iters;
        params.delta = c.faulty ? c.delta : 0.0;
        if (!c.faulty) params.eta_override = cfg.alpha * c.delta;
        ThresholdResult r =
            threshold_search(c.ens, params, cfg.bracket_lo, cfg.bracket_hi, cfg.resolution);
        rows[i] = {c.ens.dv,
                   c.ens.dc,
                   c.faulty ? "F-MS" : "MS",
                   c.delta,
                   cfg.alpha * c.delta,
                   threshold_status_name(r.status),
                   r.converged() ? r.sigma2_star : 0.0};
    });
    return rows;
}

// ---------------------------------------------------------------------------
// bits-sweep: thresholds vs b for DR (fixed step) and PR (step 2^(3-b))
// ---------------------------------------------------------------------------

struct BitsSweepConfig {
    EnsembleConfig ensemble{3, 6};
    int b_min = 2;
    int b_max = 7;
    double delta = 1e-3;
    double alpha = 10.0;
    int max_iters = 200;
    double dr_step = 1.0;
    double bracket_lo = 0.2;
    double bracket_hi = 1.0;
    double resolution = 5e-4;
    int workers = 1;
};

struct BitsSweepRow {
    int bits;
    std::string quant_mode;  // "DR" or "PR"
    double delta;            // 0 for the fault-free companion rows
    double step;
    std::string status;
    double sigma2_star;
};

inline std::vector<BitsSweepRow> run_bits_sweep(const BitsSweepConfig& cfg) {
    struct Cell {
        int b;
        bool pr;
        bool faulty;
    };
    std::vector<Cell> cells;
    for (int b = cfg.b_min; b <= cfg.b_max; ++b)
        for (bool pr : {false, true})
            for (bool faulty : {false, true}) cells.push_back({b, pr, faulty});

    std::vector<BitsSweepRow> rows(cells.size());
    detail::parallel_for(static_cast<int>(cells.size()), cfg.workers, [&](int i) {
        const Cell& c = cells[i];
        double step = c.pr ? std::ldexp(1.0, 3 - c.b) : cfg.dr_step;
        DeParams params(QuantGrid(c.b, step));
        params.alpha = cfg.alpha;
        params.max_iters = cfg.max_iters;
        params.delta = c.faulty ? cfg.delta : 0.0;
        if (!c.faulty) params.eta_override = cfg.alpha * cfg.delta;
        ThresholdResult r = threshold_search(cfg.ensemble, params, cfg.bracket_lo,
                                             cfg.bracket_hi, cfg.resolution);
        rows[i] = {c.b,
                   c.pr ? "PR" : "DR",
                   c.faulty ? cfg.delta : 0.0,
                   step,
                   threshold_status_name(r.status),
                   r.converged() ? r.sigma2_star : 0.0};
    });
    return rows;
}

// ---------------------------------------------------------------------------
// mc: Monte Carlo BER with the DE prediction as reference columns
// ---------------------------------------------------------------------------

struct McRunConfig {
    EnsembleConfig ensemble{3, 6};
    QuantGrid grid{5, 1.0};
    int n_var = 100000;
    int trials = 20;
    int iters = 10;
    double sigma2 = 0.55;
    double delta = 1e-4;
    double alpha = 10.0;
    std::uint64_t seed = 1;
    int workers = 1;
};

struct McRow {
    int iteration;
    double mc_ber;
    double mc_stderr;
    double de_pe;
    bool within_tol;  // |mc - de| <= 3 stderr + 10% relative
};

inline std::vector<McRow> run_mc(const McRunConfig& cfg) {
    McParams mp(cfg.grid);
    mp.sigma2 = cfg.sigma2;
    mp.delta = cfg.delta;
    mp.iters = cfg.iters;
    BerEstimate est = estimate_ber(cfg.n_var, cfg.ensemble.dv, cfg.ensemble.dc, mp,
                                   cfg.trials, cfg.seed, cfg.workers);

    DeParams dp(cfg.grid);
    dp.delta = cfg.delta;
    dp.alpha = cfg.alpha;
    dp.max_iters = cfg.iters;
    dp.eta_override = 0.0;  // run the full horizon
    DeTrace de = de_run(cfg.ensemble, cfg.sigma2, dp);

    std::vector<McRow> rows;
    for (int it = 0; it < cfg.iters; ++it) {
        double ref = de.pe[it];
        double tol = 3.0 * est.ber_stderr[it] + 0.10 * ref;
        rows.push_back({it + 1, est.ber_mean[it], est.ber_stderr[it], ref,
                        std::abs(est.ber_mean[it] - ref) <= tol});
    }
    return rows;
}

}  // namespace msde

#endif
