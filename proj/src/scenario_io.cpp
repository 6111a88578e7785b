#include "relayperf/scenario_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace relayperf::io {

using nlohmann::json;

std::vector<double> SweepPlan::points() const {
    if (!(step_db > 0.0)) throw std::invalid_argument("sweep.step_db: must be > 0");
    if (start_db > stop_db) throw std::invalid_argument("sweep: start_db must be <= stop_db");
    std::vector<double> p;
    for (double v = start_db; v <= stop_db + 1e-9; v += step_db) p.push_back(v);
    return p;
}

engine::Scenario Experiment::scenario(engine::Protocol p, double snr_db) const {
    engine::Scenario s;
    s.links = links;
    s.protocol = p;
    s.snr_scale_db = snr_db;
    return s;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw std::invalid_argument("config error at " + path + ": " + why);
}

double get_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path + "." + key, "missing");
    const auto& v = j.at(key);
    if (!v.is_number()) fail(path + "." + key, "must be a number");
    return v.get<double>();
}

double get_number_or(const json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) fail(path + "." + key, "must be a number");
    return v.get<double>();
}

std::uint64_t get_uint_or(const json& j, const std::string& path, const char* key,
                          std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer()) fail(path + "." + key, "must be an integer");
    const auto n = v.get<std::int64_t>();
    if (n < 0) fail(path + "." + key, "must be non-negative");
    return static_cast<std::uint64_t>(n);
}

// "inf" (string) or a positive number.
double get_shadowing_figure(const json& j, const std::string& path) {
    if (!j.contains("n")) fail(path + ".n", "missing");
    const auto& v = j.at("n");
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return fading::kInfiniteShadowingFigure;
        fail(path + ".n", "string value must be \"inf\"");
    }
    if (!v.is_number()) fail(path + ".n", "must be a number or \"inf\"");
    return v.get<double>();
}

fading::EgkParams parse_hop(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "must be an object");
    const double m = get_number(j, path, "m");
    const double xi = get_number(j, path, "xi");
    const double n = get_shadowing_figure(j, path);
    const double zeta = get_number(j, path, "zeta");
    const double omega = get_number(j, path, "omega");
    try {
        return fading::EgkParams(m, xi, n, zeta, omega);
    } catch (const std::domain_error& e) {
        fail(path, e.what());
    }
}

perfkernel::PerfSpec parse_metric(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "must be an object");
    if (!j.contains("kind")) fail(path + ".kind", "missing");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "abep") {
        if (!j.contains("modulation")) fail(path + ".modulation", "missing for kind abep");
        const std::string mod = j.at("modulation").get<std::string>();
        if (mod == "bpsk") return perfkernel::PerfSpec::bep_coherent(1.0);
        if (mod == "bfsk") return perfkernel::PerfSpec::bep_coherent(0.5);
        if (mod == "bdpsk") return perfkernel::PerfSpec::bep_noncoherent(1.0);
        if (mod == "ncfsk") return perfkernel::PerfSpec::bep_noncoherent(0.5);
        fail(path + ".modulation", "must be one of bpsk, bfsk, bdpsk, ncfsk");
    }
    if (kind == "capacity") return perfkernel::PerfSpec::capacity(get_number_or(j, path, "bandwidth", 1.0));
    if (kind == "mgf") return perfkernel::PerfSpec::mgf(get_number(j, path, "p"));
    if (kind == "moment")
        return perfkernel::PerfSpec::moment(static_cast<int>(get_number(j, path, "k")));
    fail(path + ".kind", "must be one of abep, capacity, mgf, moment");
}

}  // namespace

Experiment parse_experiment(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config error: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config error at $: must be a JSON object");

    Experiment ex;

    if (!j.contains("relays") || !j.at("relays").is_array() || j.at("relays").empty())
        fail("relays", "must be a non-empty array");
    std::size_t idx = 0;
    for (const auto& r : j.at("relays")) {
        const std::string path = "relays[" + std::to_string(idx) + "]";
        if (!r.is_object()) fail(path, "must be an object");
        if (!r.contains("hop1")) fail(path + ".hop1", "missing");
        if (!r.contains("hop2")) fail(path + ".hop2", "missing");
        ex.links.push_back(
            {parse_hop(r.at("hop1"), path + ".hop1"), parse_hop(r.at("hop2"), path + ".hop2")});
        ++idx;
    }

    if (j.contains("protocols")) {
        if (!j.at("protocols").is_array() || j.at("protocols").empty())
            fail("protocols", "must be a non-empty array");
        for (const auto& p : j.at("protocols")) {
            try {
                ex.protocols.push_back(engine::protocol_from_name(p.get<std::string>()));
            } catch (const std::invalid_argument& e) {
                fail("protocols", e.what());
            }
        }
    } else if (j.contains("protocol")) {
        try {
            ex.protocols.push_back(engine::protocol_from_name(j.at("protocol").get<std::string>()));
        } catch (const std::invalid_argument& e) {
            fail("protocol", e.what());
        }
    } else {
        ex.protocols = {engine::Protocol::Ssi};
    }

    if (j.contains("metric")) ex.metric = parse_metric(j.at("metric"), "metric");

    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        ex.sweep.start_db = get_number(s, "sweep", "start_db");
        ex.sweep.stop_db = get_number(s, "sweep", "stop_db");
        ex.sweep.step_db = get_number(s, "sweep", "step_db");
        if (!(ex.sweep.step_db > 0.0)) fail("sweep.step_db", "must be > 0");
        if (ex.sweep.start_db > ex.sweep.stop_db) fail("sweep", "start_db must be <= stop_db");
    }

    if (j.contains("engine")) {
        const auto& e = j.at("engine");
        ex.engine_cfg.gcq_n = static_cast<int>(get_number_or(e, "engine", "gcq_N", 64));
        if (ex.engine_cfg.gcq_n < 8) fail("engine.gcq_N", "must be >= 8");
        const double rel = get_number_or(e, "engine", "rel_tol", ex.engine_cfg.u_tol.rel_tol);
        const double abs = get_number_or(e, "engine", "abs_tol", ex.engine_cfg.u_tol.abs_tol);
        if (!(rel > 0.0)) fail("engine.rel_tol", "must be > 0");
        if (!(abs >= 0.0)) fail("engine.abs_tol", "must be >= 0");
        ex.engine_cfg.u_tol.rel_tol = rel;
        ex.engine_cfg.u_tol.abs_tol = abs;
        ex.engine_cfg.max_u = get_number_or(e, "engine", "max_u", ex.engine_cfg.max_u);
        if (!(ex.engine_cfg.max_u > 0.0)) fail("engine.max_u", "must be > 0");
    }

    if (j.contains("mc")) {
        const auto& m = j.at("mc");
        ex.mc_enabled = true;
        ex.mc_cfg.samples = get_uint_or(m, "mc", "samples", ex.mc_cfg.samples);
        if (ex.mc_cfg.samples < 1000) fail("mc.samples", "must be >= 1000");
        ex.mc_cfg.seed = get_uint_or(m, "mc", "seed", ex.mc_cfg.seed);
        ex.mc_cfg.workers = static_cast<int>(get_uint_or(m, "mc", "workers", 1));
        if (ex.mc_cfg.workers < 1) fail("mc.workers", "must be >= 1");
        ex.mc_cfg.batch_size = get_uint_or(m, "mc", "batch_size", ex.mc_cfg.batch_size);
        if (ex.mc_cfg.batch_size < 1) fail("mc.batch_size", "must be >= 1");
        if (m.contains("enabled")) {
            if (!m.at("enabled").is_boolean()) fail("mc.enabled", "must be a boolean");
            ex.mc_enabled = m.at("enabled").get<bool>();
        }
    }

    return ex;
}

Experiment load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config error: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_experiment(ss.str());
}

std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string result_record(const std::string& op, const std::string& protocol, double snr_db,
                          const std::string& metric, const engine::PerfResult& r) {
    json j;
    j["op"] = op;
    j["protocol"] = protocol;
    j["snr_db"] = snr_db;
    j["metric"] = metric;
    j["analytic"] = r.analytic_value;
    j["analytic_err"] = r.error_estimate;
    j["norm_residual"] = r.normalization_residual;
    for (const auto& [k, v] : r.diagnostics) j["diagnostics"][k] = v;
    return j.dump();
}

std::string estimate_record(const std::string& protocol, double snr_db, const std::string& metric,
                            const montecarlo::McEstimate& e) {
    json j;
    j["op"] = "simulate";
    j["protocol"] = protocol;
    j["snr_db"] = snr_db;
    j["metric"] = metric;
    j["mc_mean"] = e.mean;
    j["mc_stderr"] = e.std_error;
    j["samples"] = e.samples_used;
    return j.dump();
}

std::string format_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "snr_db,protocol,metric,analytic,analytic_err,mc_mean,mc_stderr,samples,norm_residual\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_float(*v) : std::string(); };
    for (const auto& r : rows) {
        out += format_float(r.snr_db);
        out += ',';
        out += r.protocol;
        out += ',';
        out += r.metric;
        out += ',';
        out += opt(r.analytic);
        out += ',';
        out += opt(r.analytic_err);
        out += ',';
        out += opt(r.mc_mean);
        out += ',';
        out += opt(r.mc_stderr);
        out += ',';
        out += r.samples ? std::to_string(r.samples) : std::string();
        out += ',';
        out += opt(r.norm_residual);
        out += '\n';
    }
    return out;
}

std::string gnuplot_script(const std::string& csv_path, const std::string& metric,
                           const std::vector<std::string>& protocols, bool log_y) {
    std::string s;
    s += "set datafile separator \",\"\n";
    s += "set key top right\n";
    s += "set xlabel \"average SNR [dB]\"\n";
    s += "set ylabel \"" + metric + "\"\n";
    if (log_y) s += "set logscale y\n";
    s += "set grid\n";
    s += "plot ";
    bool first = true;
    for (const auto& p : protocols) {
        if (!first) s += ", \\\n     ";
        first = false;
        // analytic curve (column 4) where present, else the MC column (6)
        s += "\"" + csv_path + "\" using 1:(strcol(2) eq \"" + p +
             "\" ? ($4 == $4 ? $4 : $6) : 1/0) with linespoints title \"" + p + "\"";
    }
    s += "\n";
    return s;
}

}  // namespace relayperf::io
