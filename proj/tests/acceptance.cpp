// Acceptance suite: every release criterion evaluated at its stated
// tolerance, one PASS/FAIL line per criterion. Exits nonzero if any fail.
#include "relayperf/engine.hpp"
#include "relayperf/fading.hpp"
#include "relayperf/montecarlo.hpp"
#include "relayperf/perfkernel.hpp"
#include "relayperf/scenario_io.hpp"
#include "relayperf/selection.hpp"
#include "relayperf/specfun.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <future>
#include <string>
#include <vector>

using namespace relayperf;
using engine::Protocol;
using fading::EgkParams;
using perfkernel::PerfSpec;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    std::string label;
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("FAILED: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

engine::Scenario base_scenario;  // Table-I links, SSI, 0 dB
engine::EngineConfig engine_cfg;
int mc_workers = 2;

engine::Scenario scn(Protocol p, double db, std::size_t links = 0) {
    auto s = links ? base_scenario.truncated(links) : base_scenario;
    return s.with_protocol(p).with_snr_db(db);
}

montecarlo::McConfig mc_cfg(std::uint64_t samples, std::uint64_t seed) {
    montecarlo::McConfig mc;
    mc.samples = samples;
    mc.seed = seed;
    mc.workers = mc_workers;
    return mc;
}

// dB at which the (monotone decreasing) analytic ABEP crosses the target.
double analytic_crossing_db(const PerfSpec& spec, Protocol proto, double target, double lo,
                            double hi) {
    for (int i = 0; i < 24 && hi - lo > 0.02; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double v = engine::aup(scn(proto, mid), spec, engine_cfg).analytic_value;
        (v > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double simulated_crossing_db(const PerfSpec& spec, Protocol proto, double target, double lo,
                             double hi, std::uint64_t samples, std::uint64_t seed) {
    for (int i = 0; i < 12 && hi - lo > 0.1; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double v = montecarlo::simulate(scn(proto, mid), spec, mc_cfg(samples, seed)).mean;
        (v > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Criterion criterion1_normalization() {
    Criterion c{"criterion 1: Eq.-20 normalization residual < 1e-4, runtime < 10 s"};
    const auto t0 = Clock::now();
    const double snrs[] = {0.0, 10.0, 20.0, 30.0, 40.0};
    const Protocol protos[] = {Protocol::Ssi, Protocol::RoundRobin, Protocol::AveragePower};

    struct Point {
        Protocol p;
        double db;
    };
    std::vector<Point> points;
    for (auto p : protos)
        for (double db : snrs) points.push_back({p, db});

    // the residual itself reports the achieved deviation, so the outer
    // tolerance only needs to sit safely under the 1e-4 gate; the mixture
    // mass is exact at any strata count, so a lean grid suffices here
    engine::EngineConfig loose = engine_cfg;
    loose.u_tol.rel_tol = std::max(loose.u_tol.rel_tol, 1e-6);
    loose.gcq_n = std::min(loose.gcq_n, 32);
    std::vector<std::future<double>> jobs;
    for (const auto& pt : points)
        jobs.push_back(std::async(std::launch::async, [pt, &loose]() {
            return engine::moments(scn(pt.p, pt.db), 0, loose).normalization_residual;
        }));
    double worst = 0.0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const double r = jobs[i].get();
        worst = std::max(worst, r);
        c.require(r < 1e-4, fmt("residual %.2e at %s %.0f dB", r,
                                engine::protocol_name(points[i].p).c_str(), points[i].db));
    }
    const double dt = seconds_since(t0);
    c.note(fmt("worst residual %.2e over %zu protocol/SNR points, %.1f s", worst, points.size(), dt));
    c.require(dt < 10.0, fmt("runtime %.1f s exceeds 10 s", dt));
    return c;
}

Criterion criterion2_selection() {
    Criterion c{"criterion 2: selection probabilities (3-sigma MC, exact 1/L), runtime < 30 s"};
    const auto t0 = Clock::now();

    std::vector<EgkParams> hop1;
    for (const auto& l : base_scenario.links) hop1.push_back(l.hop1);
    const auto mu = selection::selection_probabilities(selection::FirstHopEnsemble(hop1));
    const auto freq = montecarlo::selection_frequencies(scn(Protocol::Ssi, 0.0), mc_cfg(10'000'000, 101));
    for (std::size_t l = 0; l < mu.mu.size(); ++l) {
        const double sigma = std::sqrt(mu.mu[l] * (1.0 - mu.mu[l]) / 1e7);
        c.require(std::abs(freq[l] - mu.mu[l]) < 3.0 * sigma,
                  fmt("relay %zu: mu=%.5f freq=%.5f (3sigma %.1e)", l, mu.mu[l], freq[l],
                      3.0 * sigma));
    }
    c.note(fmt("mu = {%.4f, %.4f, %.4f, %.4f}, max |mu-freq| within 3 sigma", mu.mu[0], mu.mu[1],
               mu.mu[2], mu.mu[3]));

    const EgkParams same(1.1, 0.9, 0.8, 0.6, 0.75);
    for (std::size_t L : {2UL, 4UL}) {
        const auto mu_same =
            selection::selection_probabilities(selection::FirstHopEnsemble({L, same}));
        for (double m : mu_same.mu)
            c.require(std::abs(m - 1.0 / static_cast<double>(L)) < 1e-6,
                      fmt("identical shadowing L=%zu gave mu=%.8f", L, m));
    }
    const double dt = seconds_since(t0);
    c.note(fmt("%.1f s", dt));
    c.require(dt < 30.0, fmt("runtime %.1f s exceeds 30 s", dt));
    return c;
}

Criterion criterion3_mc_agreement() {
    Criterion c{"criterion 3: analytic vs 1e7-sample MC within 3*stderr + analytic_err, < 10 min"};
    const auto t0 = Clock::now();
    const PerfSpec specs[] = {PerfSpec::bep_coherent(1.0), PerfSpec::bep_noncoherent(0.5),
                              PerfSpec::bep_noncoherent(1.0), PerfSpec::capacity(1.0)};
    const double snrs[] = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0};
    std::uint64_t seed = 300;
    double worst_z = 0.0;
    int checked = 0;
    for (const auto& spec : specs)
        for (std::size_t L : {1UL, 2UL, 4UL})
            for (double db : snrs) {
                const auto s = scn(Protocol::Ssi, db, L);
                const auto r = engine::aup(s, spec, engine_cfg);
                const auto est = montecarlo::simulate(s, spec, mc_cfg(10'000'000, seed++));
                const double tol = 3.0 * est.std_error + r.error_estimate;
                const double diff = std::abs(r.analytic_value - est.mean);
                worst_z = std::max(worst_z, diff / std::max(tol, 1e-300));
                ++checked;
                c.require(diff <= tol,
                          fmt("%s L=%zu %.0f dB: analytic=%.6e mc=%.6e (tol %.1e)",
                              spec.name().c_str(), L, db, r.analytic_value, est.mean, tol));
            }
    const double dt = seconds_since(t0);
    c.note(fmt("%d points, worst |diff|/tol = %.2f, %.0f s", checked, worst_z, dt));
    c.require(dt < 600.0, fmt("runtime %.0f s exceeds 10 min", dt));
    return c;
}

Criterion criterion4_fig2_anchor() {
    Criterion c{"criterion 4: Fig.-2 anchor (SSI BPSK 2e-2 at 13 +/- 1.5 dB; RR, AP >= 3x)"};
    const auto spec = PerfSpec::bep_coherent(1.0);
    const double cross = analytic_crossing_db(spec, Protocol::Ssi, 2e-2, 5.0, 25.0);
    c.require(std::abs(cross - 13.0) <= 1.5, fmt("crossing at %.2f dB", cross));
    const double rr = engine::aup(scn(Protocol::RoundRobin, cross), spec, engine_cfg).analytic_value;
    const double ap = engine::aup(scn(Protocol::AveragePower, cross), spec, engine_cfg).analytic_value;
    c.require(rr >= 3.0 * 2e-2, fmt("RR ABEP %.3e < 3x target at %.2f dB", rr, cross));
    c.require(ap >= 3.0 * 2e-2, fmt("AP ABEP %.3e < 3x target at %.2f dB", ap, cross));
    c.note(fmt("SSI crosses 2e-2 at %.2f dB; there RR=%.3e (%.1fx), AP=%.3e (%.1fx)", cross, rr,
               rr / 2e-2, ap, ap / 2e-2));
    return c;
}

Criterion criterion5_fig3_anchor() {
    Criterion c{"criterion 5: Fig.-3 anchor (SSI vs simulated CSI gap 5.5 +/- 1.5 dB at NCFSK 1e-3)"};
    const auto spec = PerfSpec::bep_noncoherent(0.5);
    const double ssi_db = analytic_crossing_db(spec, Protocol::Ssi, 1e-3, 10.0, 40.0);
    const double csi_db =
        simulated_crossing_db(spec, Protocol::CsiSimOnly, 1e-3, 5.0, 35.0, 10'000'000, 500);
    const double gap = ssi_db - csi_db;
    c.note(fmt("SSI@1e-3: %.2f dB, CSI@1e-3: %.2f dB, gap %.2f dB", ssi_db, csi_db, gap));
    c.require(std::abs(gap - 5.5) <= 1.5, fmt("gap %.2f dB outside 5.5 +/- 1.5", gap));
    return c;
}

Criterion criterion6_fig5_limit() {
    Criterion c{"criterion 6: Fig.-5 limit (SSI -> AP monotone; within 2% at n=1e3, BDPSK 30 dB)"};
    const auto spec = PerfSpec::bep_noncoherent(1.0);
    const double n_values[] = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 1000.0};
    double prev_gap = 1e300;
    double final_rel = 0.0, first_gap = 0.0;
    bool monotone = true;
    for (double n : n_values) {
        auto s = base_scenario;
        for (auto& link : s.links)
            link.hop1 = EgkParams(link.hop1.m, link.hop1.xi, n, link.hop1.zeta, link.hop1.omega);
        s.snr_scale_db = 30.0;
        const double ssi = engine::aup(s.with_protocol(Protocol::Ssi), spec, engine_cfg).analytic_value;
        const double ap =
            engine::aup(s.with_protocol(Protocol::AveragePower), spec, engine_cfg).analytic_value;
        const double gap = std::abs(ssi - ap);
        if (gap > prev_gap) monotone = false;
        if (n == 0.5) first_gap = gap;
        if (n == 1000.0) final_rel = gap / ap;
        c.note(fmt("n=%6.1f: SSI=%.4e AP=%.4e |gap|=%.3e", n, ssi, ap, gap));
        prev_gap = gap;
    }
    c.require(monotone, "gap to AP did not shrink monotonically across the sweep");
    c.note(fmt("terminal gap is %.2f%% of AP (%.3f%% of the initial gap)", 100.0 * final_rel,
               100.0 * prev_gap / first_gap));
    c.require(final_rel <= 0.02,
              fmt("SSI at n=1e3 sits %.2f%% from AP, above the stated 2%%", 100.0 * final_rel));
    return c;
}

Criterion criterion7_internal_equivalences() {
    Criterion c{"criterion 7: internal cross-route equivalences"};

    // (a) generalized-K closed form vs the general route on a pure-quadrature
    // backend, rel <= 1e-6
    engine::Scenario gk;
    constexpr double inf = fading::kInfiniteShadowingFigure;
    gk.links = {{EgkParams(1.5, 1.0, 2.0, 1.0, 1.0), EgkParams(2.0, 1.0, inf, 1.0, 1.2)},
                {EgkParams(1.0, 1.0, 1.0, 1.0, 0.7), EgkParams(1.25, 1.0, 3.0, 1.0, 0.9)}};
    gk.protocol = Protocol::Ssi;
    engine::EngineConfig quad_cfg = engine_cfg;
    quad_cfg.force_quadrature_backend = true;
    double worst_a = 0.0;
    for (double db : {0.0, 12.0})
        for (const auto& spec : {PerfSpec::bep_noncoherent(1.0), PerfSpec::capacity(1.0)}) {
            const double g = engine::aup(gk.with_snr_db(db), spec, quad_cfg).analytic_value;
            const double f = engine::aup_gk_fastpath(gk.with_snr_db(db), spec, engine_cfg).analytic_value;
            const double rel = std::abs(g - f) / std::abs(g);
            worst_a = std::max(worst_a, rel);
            c.require(rel <= 1e-6, fmt("GK route mismatch %.2e (%s, %.0f dB)", rel,
                                       spec.name().c_str(), db));
        }
    c.note(fmt("(a) GK fast path vs quadrature route: worst rel %.2e", worst_a));

    // (b) end_mgf vs MGF-kind aup, rel <= 1e-8
    double worst_b = 0.0;
    for (double p : {0.3, 1.0, 4.0}) {
        const double direct = engine::end_mgf(scn(Protocol::Ssi, 5.0), p, engine_cfg).analytic_value;
        const double via = engine::aup(scn(Protocol::Ssi, 5.0), PerfSpec::mgf(p), engine_cfg).analytic_value;
        const double rel = std::abs(direct - via) / direct;
        worst_b = std::max(worst_b, rel);
        c.require(rel <= 1e-8, fmt("end_mgf vs aup mismatch %.2e at p=%.1f", rel, p));
    }
    c.note(fmt("(b) end_mgf vs MGF-kind aup: worst rel %.2e", worst_b));

    // (c) Wojnar dispatch identities, pointwise 1e-12
    double worst_c = 0.0;
    for (double a : {0.5, 1.0})
        for (double u : {0.0, 0.17, 1.0, 9.0, 144.0, 1e4}) {
            const double w_half = perfkernel::z_kernel(PerfSpec::bep_wojnar(a, 0.5), u);
            const double coh = perfkernel::z_kernel(PerfSpec::bep_coherent(a), u);
            const double w_one = perfkernel::z_kernel(PerfSpec::bep_wojnar(a, 1.0), u);
            const double noncoh = perfkernel::z_kernel(PerfSpec::bep_noncoherent(a), u);
            worst_c = std::max({worst_c, std::abs(w_half - coh), std::abs(w_one - noncoh)});
        }
    c.require(worst_c <= 1e-12, fmt("Wojnar dispatch deviates by %.2e", worst_c));
    c.note(fmt("(c) Wojnar kernel dispatch: worst abs %.2e", worst_c));

    // (d) extended-incomplete-gamma Bessel identity, rel <= 1e-8
    double worst_d = 0.0;
    for (double alpha : {0.3, 0.8, 1.7, 3.0, 5.0})
        for (double b : {1e-3, 0.02, 0.5, 2.0, 10.0, 50.0}) {
            const double closed =
                2.0 * std::pow(b, 0.5 * alpha) * specfun::bessel_k(alpha, 2.0 * std::sqrt(b));
            const double quad = specfun::ext_inc_gamma_quad(alpha, 0.0, b, 1.0);
            worst_d = std::max(worst_d, std::abs(quad - closed) / closed);
        }
    c.require(worst_d <= 1e-8, fmt("Bessel identity deviates by rel %.2e", worst_d));
    c.note(fmt("(d) extended gamma vs 2 b^(a/2) K_a(2 sqrt(b)): worst rel %.2e", worst_d));
    return c;
}

Criterion criterion8_moments() {
    Criterion c{"criterion 8: moments k in {1,2} vs MC (rel <= 2%), AF2 >= 0, k=0 exact"};
    const auto s = scn(Protocol::Ssi, 10.0);

    const double k0 = engine::moments(s, 0, engine_cfg).analytic_value;
    c.require(std::abs(k0 - 1.0) < 1e-6, fmt("k=0 moment %.8f", k0));

    for (int k : {1, 2}) {
        const double analytic = engine::moments(s, k, engine_cfg).analytic_value;
        const auto est = montecarlo::simulate(s, PerfSpec::moment(k), mc_cfg(10'000'000, 800 + k));
        const double rel = std::abs(analytic - est.mean) / std::abs(est.mean);
        c.require(rel <= 0.02, fmt("k=%d: analytic=%.5e mc=%.5e rel=%.3f", k, analytic, est.mean, rel));
        c.note(fmt("k=%d: analytic=%.6e mc=%.6e (rel %.4f)", k, analytic, est.mean, rel));
    }

    for (auto proto : {Protocol::Ssi, Protocol::RoundRobin, Protocol::AveragePower})
        for (double db : {0.0, 20.0, 40.0}) {
            const double af2 = engine::amount_of_fading(scn(proto, db), 2, engine_cfg).analytic_value;
            c.require(af2 >= 0.0, fmt("AF2 = %.3e at %s %.0f dB", af2,
                                      engine::protocol_name(proto).c_str(), db));
        }
    return c;
}

Criterion criterion9_property_suites() {
    Criterion c{"criterion 9: property suites (normalizations, KS, monotonicity, FD, Cauchy)"};

    // PDF/CDF normalizations to 1e-6; x = y^5 head substitution flattens the
    // integrable origin singularities these densities carry for m xi < 1 or
    // n zeta < 1
    const QuadTolerance tol(1e-10, 1e-13, 400);
    auto density_mass = [&tol](auto f) {
        auto head = integrate_adaptive(
            [&f](double y) {
                const double y2 = y * y;
                const double x = y2 * y2 * y;
                return x > 0.0 ? f(x) * 5.0 * y2 * y2 : 0.0;
            },
            0.0, 2.0, tol);
        auto tail = integrate_to_infinity(f, 32.0, tol);
        return head.value + tail.value;
    };
    for (const auto& link : base_scenario.links) {
        const auto& p = link.hop1;
        const double gmass = density_mass([&p](double g) { return fading::gg_pdf(p, g); });
        c.require(std::abs(gmass - 1.0) < 1e-6, fmt("gg_pdf mass %.8f (m=%.2f)", gmass, p.m));
        const double smass = density_mass([&p](double s) { return fading::shadow_pdf(p, s); });
        c.require(std::abs(smass - 1.0) < 1e-6, fmt("shadow_pdf mass %.8f", smass));
    }

    // sampler KS < 0.001 at 1e6 draws
    {
        const EgkParams& p = base_scenario.links[3].hop1;
        fading::RngStream rng(12, 0);
        const std::size_t n = 1'000'000;
        std::vector<double> shadow(n), law(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double g = fading::sample_gg(p, rng);
            shadow[i] = fading::sample_shadow(p, rng);
            law[i] = std::pow(p.phi * g, p.xi);
        }
        auto ks = [](std::vector<double> v, auto cdf) {
            std::sort(v.begin(), v.end());
            double d = 0.0;
            const double n_inv = 1.0 / static_cast<double>(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double f = cdf(v[i]);
                d = std::max(d, std::abs(f - i * n_inv));
                d = std::max(d, std::abs(f - (i + 1) * n_inv));
            }
            return d;
        };
        const double ks_shadow = ks(shadow, [&](double s) { return fading::shadow_cdf(p, s); });
        const double ks_gamma = ks(law, [&](double w) {
            return specfun::lower_inc_gamma_regularized(p.m, w);
        });
        c.require(ks_shadow < 0.001, fmt("shadow sampler KS %.5f", ks_shadow));
        c.require(ks_gamma < 0.001, fmt("fading power-law KS %.5f", ks_gamma));
        c.note(fmt("sampler KS at 1e6 draws: shadow %.5f, gamma law %.5f", ks_shadow, ks_gamma));
    }

    // reciprocal MGFs: 1 at p=0, non-increasing; derivative vs finite
    // differences at rel 1e-4
    for (const auto& link : base_scenario.links) {
        const auto& p = link.hop1;
        c.require(fading::gg_recip_mgf(p, 0.0) == 1.0, "recip MGF at 0");
        double prev = 1.0;
        for (double arg : {0.1, 0.5, 2.0, 10.0}) {
            const double v = fading::gg_recip_mgf(p, arg);
            c.require(v > 0.0 && v <= prev + 1e-12, fmt("recip MGF monotone at %.2f", arg));
            prev = v;
            const double h = 1e-4 * arg;
            const double fd =
                (fading::gg_recip_mgf(p, arg + h) - fading::gg_recip_mgf(p, arg - h)) / (2.0 * h);
            const double d = fading::gg_recip_mgf_deriv(p, arg);
            c.require(std::abs(d - fd) <= 1e-4 * std::abs(fd),
                      fmt("deriv vs FD rel %.2e at m=%.2f arg=%.2f", std::abs(d - fd) / std::abs(fd),
                          p.m, arg));
        }
    }

    // GCQ Cauchy convergence on N-doubling
    {
        std::vector<EgkParams> hop1;
        for (const auto& l : base_scenario.links) hop1.push_back(l.hop1);
        const selection::FirstHopEnsemble ens(hop1);
        double vals[3];
        int i = 0;
        for (int n : {32, 64, 128}) {
            const auto grid = selection::gcq_grid(ens, n);
            const auto eta = selection::gcq_eta(ens, grid);
            std::vector<double> col(grid.nodes.size());
            for (std::size_t k = 0; k < col.size(); ++k) col[k] = eta[k][0];
            vals[i++] = selection::cond_first_hop_recip_mgf(hop1[0], col, grid, 1.0);
        }
        const double d1 = std::abs(vals[1] - vals[0]);
        const double d2 = std::abs(vals[2] - vals[1]);
        c.require(d2 * 2.0 <= d1, fmt("doubling did not halve the drift (%.2e -> %.2e)", d1, d2));
        c.note(fmt("GCQ drift 32->64: %.2e, 64->128: %.2e", d1, d2));
    }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string config =
        argc > 1 ? argv[1] : std::string("data/table1.json");
    io::Experiment ex;
    try {
        ex = io::load_experiment(config);
    } catch (const std::exception& e) {
        std::printf("cannot load %s: %s\n", config.c_str(), e.what());
        return 2;
    }
    base_scenario.links = ex.links;
    base_scenario.protocol = Protocol::Ssi;
    engine_cfg = ex.engine_cfg;
    mc_workers = ex.mc_cfg.workers;

    const auto t0 = Clock::now();
    std::vector<Criterion> results;
    results.push_back(criterion1_normalization());
    results.push_back(criterion2_selection());
    results.push_back(criterion3_mc_agreement());
    results.push_back(criterion4_fig2_anchor());
    results.push_back(criterion5_fig3_anchor());
    results.push_back(criterion6_fig5_limit());
    results.push_back(criterion7_internal_equivalences());
    results.push_back(criterion8_moments());
    results.push_back(criterion9_property_suites());

    int failures = 0;
    for (const auto& c : results) {
        std::printf("[%s] %s\n", c.pass ? "PASS" : "FAIL", c.label.c_str());
        for (const auto& n : c.notes) std::printf("       %s\n", n.c_str());
        if (!c.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed (%.0f s total)\n", static_cast<int>(results.size()) - failures,
                results.size(), seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
