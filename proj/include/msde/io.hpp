#ifndef MSDE_IO_HPP
#define MSDE_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "msde/experiments.hpp"

namespace msde {

using MetaList = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string num(double v) { return fmt("%.17g", v); }
inline std::string num4(double v) { return fmt("%.4f", v); }

}  // namespace detail

/// CSV layout: one comment line holding the full parameter set and artifact
/// version, then the column header, then the data rows.  '.' is the decimal
/// separator; reruns with identical config and seeds are byte-identical.
inline std::string csv_document(const MetaList& meta, const std::string& header,
                                const std::vector<std::string>& rows) {
    std::ostringstream os;
    os << "# msde=" << kVersion;
    for (const auto& [k, v] : meta) os << ' ' << k << '=' << v;
    os << '\n' << header << '\n';
    for (const auto& r : rows) os << r << '\n';
    return os.str();
}

inline nlohmann::json json_document(const MetaList& meta, const nlohmann::json& rows) {
    nlohmann::json j;
    j["meta"]["msde"] = kVersion;
    for (const auto& [k, v] : meta) j["meta"][k] = v;
    j["rows"] = rows;
    return j;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

// --- per-command serialization -------------------------------------------

inline std::string trace_csv(const MetaList& meta, const std::vector<TraceRow>& rows) {
    std::vector<std::string> lines;
    lines.reserve(rows.size());
    for (const auto& r : rows)
        lines.push_back(detail::num(r.delta) + "," + detail::num(r.sigma2) + "," +
                        std::to_string(r.iteration) + "," + detail::num(r.pe));
    return csv_document(meta, "delta,sigma2,iteration,pe", lines);
}

inline nlohmann::json trace_json(const MetaList& meta, const std::vector<TraceRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"delta", r.delta},
                       {"sigma2", r.sigma2},
                       {"iteration", r.iteration},
                       {"pe", r.pe}});
    return json_document(meta, arr);
}

inline std::string table_csv(const MetaList& meta, const std::vector<TableRow>& rows) {
    std::vector<std::string> lines;
    for (const auto& r : rows)
        lines.push_back(std::to_string(r.dv) + "," + std::to_string(r.dc) + "," + r.mode + "," +
                        detail::num(r.delta) + "," + detail::num(r.eta) + "," + r.status + "," +
                        (r.status == "ok" ? detail::num4(r.sigma2_star) : std::string("")));
    return csv_document(meta, "dv,dc,mode,delta,eta,status,sigma2_star", lines);
}

inline nlohmann::json table_json(const MetaList& meta, const std::vector<TableRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json o{{"dv", r.dv},     {"dc", r.dc},   {"mode", r.mode},
                         {"delta", r.delta}, {"eta", r.eta}, {"status", r.status}};
        if (r.status == "ok") o["sigma2_star"] = r.sigma2_star;
        arr.push_back(o);
    }
    return json_document(meta, arr);
}

inline std::string bits_sweep_csv(const MetaList& meta, const std::vector<BitsSweepRow>& rows) {
    std::vector<std::string> lines;
    for (const auto& r : rows)
        lines.push_back(std::to_string(r.bits) + "," + r.quant_mode + "," + detail::num(r.delta) +
                        "," + detail::num(r.step) + "," + r.status + "," +
                        (r.status == "ok" ? detail::num4(r.sigma2_star) : std::string("")));
    return csv_document(meta, "bits,quant_mode,delta,step,status,sigma2_star", lines);
}

inline nlohmann::json bits_sweep_json(const MetaList& meta,
                                      const std::vector<BitsSweepRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json o{{"bits", r.bits},   {"quant_mode", r.quant_mode},
                         {"delta", r.delta}, {"step", r.step},
                         {"status", r.status}};
        if (r.status == "ok") o["sigma2_star"] = r.sigma2_star;
        arr.push_back(o);
    }
    return json_document(meta, arr);
}

inline std::string mc_csv(const MetaList& meta, const std::vector<McRow>& rows) {
    std::vector<std::string> lines;
    for (const auto& r : rows)
        lines.push_back(std::to_string(r.iteration) + "," + detail::num(r.mc_ber) + "," +
                        detail::num(r.mc_stderr) + "," + detail::num(r.de_pe) + "," +
                        (r.within_tol ? "1" : "0"));
    return csv_document(meta, "iteration,mc_ber,mc_stderr,de_pe,within_tol", lines);
}

inline nlohmann::json mc_json(const MetaList& meta, const std::vector<McRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"iteration", r.iteration},
                       {"mc_ber", r.mc_ber},
                       {"mc_stderr", r.mc_stderr},
                       {"de_pe", r.de_pe},
                       {"within_tol", r.within_tol}});
    return json_document(meta, arr);
}

}  // namespace msde

#endif
