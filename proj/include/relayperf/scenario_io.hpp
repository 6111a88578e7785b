#ifndef RELAYPERF_SCENARIO_IO_HPP
#define RELAYPERF_SCENARIO_IO_HPP

#include "relayperf/engine.hpp"
#include "relayperf/montecarlo.hpp"
#include "relayperf/perfkernel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace relayperf::io {

struct SweepPlan {
    double start_db = 0.0;
    double stop_db = 0.0;
    double step_db = 1.0;

    std::vector<double> points() const;
};

/// One experiment as described by a config file: the relay set, the
/// protocols to evaluate, one metric, the SNR sweep, and the engine/MC knobs.
struct Experiment {
    std::vector<engine::RelayLink> links;
    std::vector<engine::Protocol> protocols;
    perfkernel::PerfSpec metric = perfkernel::PerfSpec::bep_coherent(1.0);
    SweepPlan sweep;
    engine::EngineConfig engine_cfg;
    montecarlo::McConfig mc_cfg;
    bool mc_enabled = false;

    engine::Scenario scenario(engine::Protocol p, double snr_db) const;
};

/// Parse a UTF-8 JSON experiment document. Schema violations raise
/// std::invalid_argument with the offending field path in the message.
Experiment parse_experiment(const std::string& json_text);
Experiment load_experiment(const std::string& path);

/// Machine-readable one-line record (JSON object) for single results.
std::string result_record(const std::string& op, const std::string& protocol, double snr_db,
                          const std::string& metric, const engine::PerfResult& r);
std::string estimate_record(const std::string& protocol, double snr_db, const std::string& metric,
                            const montecarlo::McEstimate& e);

struct SweepRow {
    double snr_db = 0.0;
    std::string protocol;
    std::string metric;
    std::optional<double> analytic;
    std::optional<double> analytic_err;
    std::optional<double> mc_mean;
    std::optional<double> mc_stderr;
    std::uint64_t samples = 0;
    std::optional<double> norm_residual;
};

/// CSV with a fixed header, comma separator, '.' decimal point, LF line
/// endings, 17-significant-digit floats; byte-stable for a fixed config.
std::string format_csv(const std::vector<SweepRow>& rows);

/// gnuplot script plotting the per-protocol curves of a sweep CSV
/// (logarithmic y for error-rate metrics).
std::string gnuplot_script(const std::string& csv_path, const std::string& metric,
                           const std::vector<std::string>& protocols, bool log_y);

std::string format_float(double v);  // %.17g with '.' decimal point

}  // namespace relayperf::io

#endif
