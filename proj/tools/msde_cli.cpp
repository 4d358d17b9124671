// Command-line front end: configures experiments, runs DE/MC sweeps in
// parallel, and emits CSV or JSON artifacts.

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "msde/experiments.hpp"
#include "msde/io.hpp"

namespace {

using namespace msde;

struct CommonOpts {
    int dv = 3;
    int dc = 6;
    int bits = 5;
    double step = 1.0;
    double alpha = 10.0;
    int max_iters = 200;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    int workers = static_cast<int>(std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_ensemble = true) {
    if (with_ensemble) {
        cmd->add_option("--dv", o.dv, "variable node degree");
        cmd->add_option("--dc", o.dc, "check node degree");
    }
    cmd->add_option("--bits,-b", o.bits, "quantization bits b")->check(CLI::Range(2, 16));
    cmd->add_option("--step", o.step, "quantization step (LLR units)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", o.alpha, "target scaling, eta = alpha*delta");
    cmd->add_option("--max-iters,-l", o.max_iters, "iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "base seed for randomized commands");
    cmd->add_option("--out,-o", o.out, "output file (default: stdout)");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--workers,-j", o.workers, "worker thread count");
}

void validate_common(const CommonOpts& o) {
    if (!(o.alpha > 1.0)) throw CLI::ValidationError("--alpha must be > 1");
    if (o.dv < 2 || o.dc < 2) throw CLI::ValidationError("--dv/--dc must be >= 2");
    if (o.dv >= o.dc)
        std::cerr << "warning: dv >= dc gives a non-positive design rate\n";
}

void validate_deltas(const std::vector<double>& deltas) {
    for (double d : deltas)
        if (!(d >= 0.0 && d <= 0.5)) throw CLI::ValidationError("--delta must be in [0, 1/2]");
}

void emit(const CommonOpts& o, const std::string& csv, const nlohmann::json& json) {
    std::string content = o.format == "json" ? json.dump(2) + "\n" : csv;
    if (o.out.empty())
        std::cout << content;
    else
        write_file(o.out, content);
}

std::string num_str(double v) { return detail::fmt("%g", v); }

std::string list_str(const std::vector<double>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ";" : "") << num_str(v[i]);
    return os.str();
}

MetaList base_meta(const std::string& command, const CommonOpts& o, bool with_ensemble) {
    MetaList m{{"command", command}};
    if (with_ensemble) {
        m.emplace_back("dv", std::to_string(o.dv));
        m.emplace_back("dc", std::to_string(o.dc));
    }
    m.emplace_back("bits", std::to_string(o.bits));
    m.emplace_back("step", num_str(o.step));
    m.emplace_back("alpha", num_str(o.alpha));
    m.emplace_back("max_iters", std::to_string(o.max_iters));
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"density evolution and Monte Carlo simulation of quantized min-sum "
                 "LDPC decoding with unreliable message storage"};
    app.set_config("--config", "", "key-value config file; flags override it");
    app.require_subcommand(1);

    // trace ------------------------------------------------------------
    CommonOpts t_o;
    std::vector<double> t_deltas{0.0, 1e-5};
    std::vector<double> t_sigma2s{0.6576};
    double t_eta = -1.0;
    auto* trace = app.add_subcommand("trace", "P_e per iteration for (delta, sigma2) scenarios");
    add_common(trace, t_o);
    trace->add_option("--delta,-d", t_deltas, "bit-flip probabilities (delta = 0 always added)");
    trace->add_option("--sigma2,-s", t_sigma2s, "noise variances");
    trace->add_option("--eta", t_eta, "absolute eta for the delta = 0 baseline");

    // table ------------------------------------------------------------
    CommonOpts tb_o;
    std::vector<std::vector<int>> tb_ens;
    std::vector<double> tb_deltas{1e-3, 1e-4, 1e-5, 1e-6};
    double tb_lo = 0.3, tb_hi = 0.9, tb_res = 5e-4;
    auto* table = app.add_subcommand("table", "threshold grid over ensembles x {MS, F-MS} x delta");
    add_common(table, tb_o, false);
    table->add_option("--ensemble,-e", tb_ens,
                      "dv dc pair, repeatable (default: 3 6, 4 8, 5 10, 6 12)")
        ->expected(-1);
    table->add_option("--delta,-d", tb_deltas, "delta columns");
    table->add_option("--lo", tb_lo, "bracket low (must succeed)");
    table->add_option("--hi", tb_hi, "bracket high (must fail)");
    table->add_option("--resolution", tb_res, "bisection resolution in sigma^2");

    // bits-sweep ---------------------------------------------------------
    CommonOpts bs_o;
    int bs_bmin = 2, bs_bmax = 7;
    double bs_delta = 1e-3, bs_lo = 0.2, bs_hi = 1.0, bs_res = 5e-4;
    auto* bits = app.add_subcommand("bits-sweep", "threshold vs b for DR and PR quantization");
    add_common(bits, bs_o);
    bits->add_option("--b-min", bs_bmin, "smallest b")->check(CLI::Range(2, 16));
    bits->add_option("--b-max", bs_bmax, "largest b")->check(CLI::Range(2, 16));
    bits->add_option("--delta,-d", bs_delta, "bit-flip probability for the faulty rows");
    bits->add_option("--lo", bs_lo, "bracket low");
    bits->add_option("--hi", bs_hi, "bracket high");
    bits->add_option("--resolution", bs_res, "bisection resolution");

    // mc -----------------------------------------------------------------
    CommonOpts mc_o;
    int mc_n = 100000, mc_trials = 20, mc_iters = 10;
    double mc_sigma2 = 0.55, mc_delta = 1e-4;
    auto* mc = app.add_subcommand("mc", "finite-blocklength BER with DE reference columns");
    add_common(mc, mc_o);
    mc->add_option("-N,--n-var", mc_n, "blocklength")->check(CLI::PositiveNumber);
    mc->add_option("--trials", mc_trials, "independent trials")->check(CLI::PositiveNumber);
    mc->add_option("--iters", mc_iters, "decoding iterations")->check(CLI::PositiveNumber);
    mc->add_option("--sigma2,-s", mc_sigma2, "noise variance");
    mc->add_option("--delta,-d", mc_delta, "bit-flip probability");

    // threshold ------------------------------------------------------------
    CommonOpts th_o;
    double th_delta = 1e-3, th_lo = 0.3, th_hi = 0.9, th_res = 5e-4, th_eta = -1.0;
    auto* thr = app.add_subcommand("threshold", "single bisection threshold search");
    add_common(thr, th_o);
    thr->add_option("--delta,-d", th_delta, "bit-flip probability");
    thr->add_option("--eta", th_eta, "absolute eta (defaults to alpha*delta)");
    thr->add_option("--lo", th_lo, "bracket low");
    thr->add_option("--hi", th_hi, "bracket high");
    thr->add_option("--resolution", th_res, "bisection resolution");

    CLI11_PARSE(app, argc, argv);

    try {
        if (trace->parsed()) {
            validate_common(t_o);
            validate_deltas(t_deltas);
            TraceConfig cfg{EnsembleConfig(t_o.dv, t_o.dc), QuantGrid(t_o.bits, t_o.step)};
            cfg.deltas = t_deltas;
            cfg.sigma2s = t_sigma2s;
            cfg.alpha = t_o.alpha;
            cfg.max_iters = t_o.max_iters;
            if (t_eta >= 0.0) cfg.eta_override = t_eta;
            cfg.workers = t_o.workers;
            auto rows = run_trace(cfg);
            MetaList meta = base_meta("trace", t_o, true);
            meta.emplace_back("deltas", list_str(t_deltas));
            meta.emplace_back("sigma2s", list_str(t_sigma2s));
            if (t_eta >= 0.0) meta.emplace_back("eta0", num_str(t_eta));
            emit(t_o, trace_csv(meta, rows), trace_json(meta, rows));
        } else if (table->parsed()) {
            validate_deltas(tb_deltas);
            if (!(tb_o.alpha > 1.0)) throw CLI::ValidationError("--alpha must be > 1");
            TableConfig cfg;
            if (!tb_ens.empty()) {
                cfg.ensembles.clear();
                for (const auto& pr : tb_ens) {
                    if (pr.size() != 2) throw CLI::ValidationError("--ensemble needs dv dc pairs");
                    cfg.ensembles.emplace_back(pr[0], pr[1]);
                }
            }
            cfg.grid = QuantGrid(tb_o.bits, tb_o.step);
            cfg.deltas = tb_deltas;
            cfg.alpha = tb_o.alpha;
            cfg.max_iters = tb_o.max_iters;
            cfg.bracket_lo = tb_lo;
            cfg.bracket_hi = tb_hi;
            cfg.resolution = tb_res;
            cfg.workers = tb_o.workers;
            auto rows = run_table(cfg);
            MetaList meta = base_meta("table", tb_o, false);
            meta.emplace_back("deltas", list_str(tb_deltas));
            meta.emplace_back("bracket", num_str(tb_lo) + ";" + num_str(tb_hi));
            meta.emplace_back("resolution", num_str(tb_res));
            emit(tb_o, table_csv(meta, rows), table_json(meta, rows));
        } else if (bits->parsed()) {
            validate_common(bs_o);
            validate_deltas({bs_delta});
            if (bs_bmin > bs_bmax) throw CLI::ValidationError("--b-min must be <= --b-max");
            BitsSweepConfig cfg;
            cfg.ensemble = EnsembleConfig(bs_o.dv, bs_o.dc);
            cfg.b_min = bs_bmin;
            cfg.b_max = bs_bmax;
            cfg.delta = bs_delta;
            cfg.alpha = bs_o.alpha;
            cfg.max_iters = bs_o.max_iters;
            cfg.dr_step = bs_o.step;
            cfg.bracket_lo = bs_lo;
            cfg.bracket_hi = bs_hi;
            cfg.resolution = bs_res;
            cfg.workers = bs_o.workers;
            auto rows = run_bits_sweep(cfg);
            MetaList meta = base_meta("bits-sweep", bs_o, true);
            meta.emplace_back("delta", num_str(bs_delta));
            meta.emplace_back("b_range", std::to_string(bs_bmin) + ";" + std::to_string(bs_bmax));
            emit(bs_o, bits_sweep_csv(meta, rows), bits_sweep_json(meta, rows));
        } else if (mc->parsed()) {
            validate_common(mc_o);
            validate_deltas({mc_delta});
            if (static_cast<long long>(mc_n) * mc_o.dv % mc_o.dc != 0)
                throw CLI::ValidationError("N*dv must be divisible by dc");
            McRunConfig cfg;
            cfg.ensemble = EnsembleConfig(mc_o.dv, mc_o.dc);
            cfg.grid = QuantGrid(mc_o.bits, mc_o.step);
            cfg.n_var = mc_n;
            cfg.trials = mc_trials;
            cfg.iters = mc_iters;
            cfg.sigma2 = mc_sigma2;
            cfg.delta = mc_delta;
            cfg.alpha = mc_o.alpha;
            cfg.seed = mc_o.seed;
            cfg.workers = mc_o.workers;
            auto rows = run_mc(cfg);
            MetaList meta = base_meta("mc", mc_o, true);
            meta.emplace_back("n_var", std::to_string(mc_n));
            meta.emplace_back("trials", std::to_string(mc_trials));
            meta.emplace_back("iters", std::to_string(mc_iters));
            meta.emplace_back("sigma2", num_str(mc_sigma2));
            meta.emplace_back("delta", num_str(mc_delta));
            meta.emplace_back("seed", std::to_string(mc_o.seed));
            emit(mc_o, mc_csv(meta, rows), mc_json(meta, rows));
        } else if (thr->parsed()) {
            validate_common(th_o);
            validate_deltas({th_delta});
            DeParams params(QuantGrid(th_o.bits, th_o.step));
            params.delta = th_delta;
            params.alpha = th_o.alpha;
            params.max_iters = th_o.max_iters;
            if (th_eta >= 0.0) params.eta_override = th_eta;
            ThresholdResult r = threshold_search(EnsembleConfig(th_o.dv, th_o.dc), params,
                                                 th_lo, th_hi, th_res);
            std::vector<TableRow> rows{{th_o.dv, th_o.dc, th_delta > 0.0 ? "F-MS" : "MS",
                                        th_delta, params.eta(), threshold_status_name(r.status),
                                        r.converged() ? r.sigma2_star : 0.0}};
            MetaList meta = base_meta("threshold", th_o, true);
            meta.emplace_back("delta", num_str(th_delta));
            meta.emplace_back("eta", num_str(params.eta()));
            meta.emplace_back("bracket", num_str(th_lo) + ";" + num_str(th_hi));
            meta.emplace_back("resolution", num_str(th_res));
            emit(th_o, table_csv(meta, rows), table_json(meta, rows));
            if (!r.converged()) {
                std::cerr << "threshold: " << threshold_status_name(r.status);
                if (r.no_threshold())
                    std::cerr << " (min P_e at lo = " << r.min_pe_at_lo << " > eta)";
                std::cerr << '\n';
                return 2;
            }
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
