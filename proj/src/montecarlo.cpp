#include "relayperf/montecarlo.hpp"

#include "relayperf/fading.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace relayperf::montecarlo {

using engine::Protocol;
using fading::EgkParams;
using fading::RngStream;

namespace {

void validate(const McConfig& mc) {
    if (mc.samples < 1000) throw std::invalid_argument("McConfig: samples must be >= 1000");
    if (mc.batch_size < 1) throw std::invalid_argument("McConfig: batch_size must be >= 1");
    if (mc.workers < 1) throw std::invalid_argument("McConfig: workers must be >= 1");
}

// Flattened per-hop sampling constants; keeps the hot loop free of repeated
// pow/branch setup.
struct HopSampler {
    double m, inv_xi, inv_phi;
    bool shadow_inf;
    double n = 1.0, inv_zeta = 1.0, shadow_scale = 1.0;  // omega / phi_hat
    double omega;

    explicit HopSampler(const EgkParams& p)
        : m(p.m),
          inv_xi(1.0 / p.xi),
          inv_phi(1.0 / p.phi),
          shadow_inf(!p.has_shadowing()),
          omega(p.omega) {
        if (!shadow_inf) {
            n = p.n;
            inv_zeta = 1.0 / p.zeta;
            shadow_scale = p.omega / p.phi_hat;
        }
    }

    double sample_fading(RngStream& rng) const {
        const double w = rng.next_gamma(m);
        return (inv_xi == 1.0 ? w : std::pow(w, inv_xi)) * inv_phi;
    }
    double sample_shadow(RngStream& rng) const {
        if (shadow_inf) return omega;
        const double v = rng.next_gamma(n);
        return (inv_zeta == 1.0 ? v : std::pow(v, inv_zeta)) * shadow_scale;
    }
    double sample_snr(RngStream& rng) const { return sample_shadow(rng) * sample_fading(rng); }
};

struct BatchMoments {
    double sum = 0.0, sum_sq = 0.0;
    double comp = 0.0, comp_sq = 0.0;  // Neumaier compensation terms
    std::uint64_t count = 0;

    void add(double x) {
        auto cadd = [](double& s, double& c, double v) {
            const double t = s + v;
            c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
            s = t;
        };
        cadd(sum, comp, x);
        cadd(sum_sq, comp_sq, x * x);
        ++count;
    }
    double total() const { return sum + comp; }
    double total_sq() const { return sum_sq + comp_sq; }
};

struct Prepared {
    std::vector<HopSampler> hop1, hop2;
    Protocol protocol;
    std::size_t ap_index = 0;
};

Prepared prepare(const engine::Scenario& scn) {
    if (scn.links.empty()) throw std::invalid_argument("simulate: scenario has no links");
    Prepared p;
    p.protocol = scn.protocol;
    const double factor = scn.snr_factor();
    for (const auto& link : scn.links) {
        p.hop1.emplace_back(link.hop1.scaled(factor));
        p.hop2.emplace_back(link.hop2.scaled(factor));
    }
    for (std::size_t l = 1; l < p.hop1.size(); ++l)
        if (p.hop1[l].omega > p.hop1[p.ap_index].omega) p.ap_index = l;
    return p;
}

// One end-to-end draw; returns gamma_end. draw_index drives the round-robin
// rotation so the cycle is deterministic across any batch/worker layout.
double draw_gamma_end(const Prepared& p, RngStream& rng, std::uint64_t draw_index) {
    const std::size_t L = p.hop1.size();
    std::size_t sel = 0;
    double g1 = 0.0;

    switch (p.protocol) {
        case Protocol::Ssi: {
            double best = -1.0;
            for (std::size_t l = 0; l < L; ++l) {
                const double s = p.hop1[l].sample_shadow(rng);
                if (s > best) {
                    best = s;
                    sel = l;
                }
            }
            g1 = best * p.hop1[sel].sample_fading(rng);
            break;
        }
        case Protocol::CsiSimOnly: {
            double best = -1.0;
            for (std::size_t l = 0; l < L; ++l) {
                const double snr = p.hop1[l].sample_snr(rng);
                if (snr > best) {
                    best = snr;
                    sel = l;
                }
            }
            g1 = best;
            break;
        }
        case Protocol::RoundRobin:
            sel = static_cast<std::size_t>(draw_index % L);
            g1 = p.hop1[sel].sample_snr(rng);
            break;
        case Protocol::AveragePower:
            sel = p.ap_index;
            g1 = p.hop1[sel].sample_snr(rng);
            break;
    }

    const double g2 = p.hop2[sel].sample_snr(rng);
    const double denom = g1 + g2;
    return denom > 0.0 ? g1 * g2 / denom : 0.0;
}

}  // namespace

McEstimate simulate(const engine::Scenario& scn, const perfkernel::PerfSpec& spec,
                    const McConfig& mc) {
    validate(mc);
    const Prepared prep = prepare(scn);

    const std::uint64_t n_batches = (mc.samples + mc.batch_size - 1) / mc.batch_size;
    std::vector<BatchMoments> batches(n_batches);

    std::atomic<std::uint64_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= n_batches) return;
            const std::uint64_t begin = b * mc.batch_size;
            const std::uint64_t end = std::min(begin + mc.batch_size, mc.samples);
            RngStream rng(mc.seed, b);
            BatchMoments& acc = batches[b];
            for (std::uint64_t i = begin; i < end; ++i)
                acc.add(perfkernel::conditional_perf(spec, draw_gamma_end(prep, rng, i)));
        }
    };

    if (mc.workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < mc.workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Merge in batch order: identical result for any worker count.
    double sum = 0.0, sum_sq = 0.0, comp = 0.0, comp_sq = 0.0;
    std::uint64_t count = 0;
    auto cadd = [](double& s, double& c, double v) {
        const double t = s + v;
        c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
        s = t;
    };
    for (const auto& b : batches) {
        cadd(sum, comp, b.total());
        cadd(sum_sq, comp_sq, b.total_sq());
        count += b.count;
    }
    const double total = sum + comp;
    const double total_sq = sum_sq + comp_sq;

    McEstimate est;
    est.samples_used = count;
    est.mean = total / static_cast<double>(count);
    const double var =
        std::max(0.0, (total_sq - total * est.mean) / static_cast<double>(count - 1));
    est.std_error = std::sqrt(var / static_cast<double>(count));
    return est;
}

std::vector<double> selection_frequencies(const engine::Scenario& scn, const McConfig& mc) {
    validate(mc);
    if (scn.protocol != Protocol::Ssi && scn.protocol != Protocol::CsiSimOnly)
        throw std::invalid_argument("selection_frequencies: needs the SSI or CSI protocol");
    const Prepared prep = prepare(scn);
    const std::size_t L = prep.hop1.size();

    const std::uint64_t n_batches = (mc.samples + mc.batch_size - 1) / mc.batch_size;
    std::vector<std::vector<std::uint64_t>> counts(n_batches, std::vector<std::uint64_t>(L, 0));

    std::atomic<std::uint64_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= n_batches) return;
            const std::uint64_t begin = b * mc.batch_size;
            const std::uint64_t end = std::min(begin + mc.batch_size, mc.samples);
            RngStream rng(mc.seed, b);
            auto& cnt = counts[b];
            const bool csi = prep.protocol == Protocol::CsiSimOnly;
            for (std::uint64_t i = begin; i < end; ++i) {
                std::size_t sel = 0;
                double best = -1.0;
                for (std::size_t l = 0; l < L; ++l) {
                    const double v = csi ? prep.hop1[l].sample_snr(rng)
                                         : prep.hop1[l].sample_shadow(rng);
                    if (v > best) {
                        best = v;
                        sel = l;
                    }
                }
                ++cnt[sel];
            }
        }
    };
    if (mc.workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < mc.workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<double> freq(L, 0.0);
    for (const auto& cnt : counts)
        for (std::size_t l = 0; l < L; ++l) freq[l] += static_cast<double>(cnt[l]);
    for (auto& v : freq) v /= static_cast<double>(mc.samples);
    return freq;
}

}  // namespace relayperf::montecarlo
