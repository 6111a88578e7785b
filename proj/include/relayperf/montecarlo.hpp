#ifndef RELAYPERF_MONTECARLO_HPP
#define RELAYPERF_MONTECARLO_HPP

#include "relayperf/engine.hpp"
#include "relayperf/perfkernel.hpp"

#include <cstdint>
#include <vector>

namespace relayperf::montecarlo {

/// Simulation budget and determinism contract: results depend on (seed,
/// samples, batch_size) only, never on the worker count. Samples are split
/// into fixed batches, one seed-derived substream per batch, merged in batch
/// order.
struct McConfig {
    std::uint64_t samples = 10'000'000;  // paper-scale is 1e8; desk default trades 3x stderr
    std::uint64_t seed = 1;
    std::uint64_t batch_size = 1 << 16;
    int workers = 1;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples_used = 0;
};

/// End-to-end channel simulation of the selected protocol: per draw, sample
/// first-hop shadowing, select a relay (SSI: argmax shadow; CSI: argmax
/// shadow*fading; RR: cyclic; AP: fixed argmax omega), then form
/// gamma_end = g1 g2 / (g1 + g2) and average conditional_perf over draws.
McEstimate simulate(const engine::Scenario& scn, const perfkernel::PerfSpec& spec,
                    const McConfig& mc);

/// Empirical selection PMF over relays (SSI or CSI protocols).
std::vector<double> selection_frequencies(const engine::Scenario& scn, const McConfig& mc);

}  // namespace relayperf::montecarlo

#endif
