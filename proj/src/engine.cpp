#include "relayperf/engine.hpp"

#include "relayperf/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace relayperf::engine {

namespace sf = relayperf::specfun;
using fading::EgkParams;

std::string protocol_name(Protocol p) {
    switch (p) {
        case Protocol::Ssi: return "ssi";
        case Protocol::RoundRobin: return "rr";
        case Protocol::AveragePower: return "ap";
        case Protocol::CsiSimOnly: return "csi";
    }
    return "unknown";
}

Protocol protocol_from_name(const std::string& name) {
    if (name == "ssi") return Protocol::Ssi;
    if (name == "rr" || name == "round_robin") return Protocol::RoundRobin;
    if (name == "ap" || name == "average_power") return Protocol::AveragePower;
    if (name == "csi" || name == "csi_sim_only") return Protocol::CsiSimOnly;
    throw std::invalid_argument("unknown protocol name: " + name);
}

double Scenario::snr_factor() const { return std::pow(10.0, snr_scale_db / 10.0); }

Scenario Scenario::with_snr_db(double db) const {
    Scenario s = *this;
    s.snr_scale_db = db;
    return s;
}

Scenario Scenario::with_protocol(Protocol p) const {
    Scenario s = *this;
    s.protocol = p;
    return s;
}

Scenario Scenario::truncated(std::size_t l) const {
    if (l < 1 || l > links.size()) throw std::invalid_argument("Scenario::truncated: bad link count");
    Scenario s = *this;
    s.links.assign(links.begin(), links.begin() + l);
    return s;
}

namespace {

// Strata boundary map on [0,1]: cubic clustering at both endpoints.
double strata_edge(double t) {
    const double a = t * t * t;
    const double b = (1.0 - t) * (1.0 - t) * (1.0 - t);
    return a / (a + b);
}

void prune_mixture(std::vector<double>& nodes, std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double cut = 1e-14 * total;
    std::size_t out = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (weights[i] > cut) {
            nodes[out] = nodes[i];
            weights[out] = weights[i];
            ++out;
        }
    }
    nodes.resize(out);
    weights.resize(out);
}

}  // namespace

Integrand::Integrand(const Scenario& scn, const EngineConfig& cfg, IntegrandRoute route)
    : inner_tol_(std::clamp(cfg.u_tol.rel_tol * 1e-2, 1e-12, 1e-8), 1e-14, 120), route_(route) {
    if (route_ == IntegrandRoute::General && cfg.force_quadrature_backend)
        route_ = IntegrandRoute::GeneralQuadBackend;
    if (scn.links.empty()) throw std::invalid_argument("Integrand: scenario has no links");
    if (scn.protocol == Protocol::CsiSimOnly)
        throw std::invalid_argument(
            "Integrand: the CSI-based protocol has no analytic path; use montecarlo::simulate");
    if (cfg.gcq_n < 8) throw std::invalid_argument("Integrand: gcq_n must be >= 8");
    if (!(cfg.max_u > 0.0)) throw std::invalid_argument("Integrand: max_u must be > 0");

    const double factor = scn.snr_factor();
    std::vector<EgkParams> hop1, hop2;
    for (const auto& link : scn.links) {
        hop1.push_back(link.hop1.scaled(factor));
        hop2.push_back(link.hop2.scaled(factor));
    }
    const std::size_t L = hop1.size();

    if (route_ == IntegrandRoute::GkClosedForm) {
        for (std::size_t l = 0; l < L; ++l) {
            if (hop1[l].xi != 1.0 || hop2[l].xi != 1.0 ||
                (hop1[l].has_shadowing() && hop1[l].zeta != 1.0) ||
                (hop2[l].has_shadowing() && hop2[l].zeta != 1.0))
                throw std::invalid_argument(
                    "Integrand: generalized-K route requires all shaping parameters equal to 1");
        }
    }

    // A hop side becomes a discrete shadow mixture: a single point mass for a
    // deterministic shadow, equal-probability quantile midpoints of its own
    // shadow law, or the eta columns of the shared max-shadowing grid under
    // SSI selection. Quantile midpoints carry exactly unit mass; the
    // rational-map grid cannot for laws singular at the origin (n zeta < 1).
    // The double-ended grading splits its resolution budget between the
    // deep-shadow and upper tails; the SSI ensemble gets twice the strata
    // since the Monte Carlo agreement criteria bind on it.
    const int n_strata = 2 * cfg.gcq_n;
    const int n_solo = cfg.gcq_n;
    auto make_single_side = [n_solo](const EgkParams& p, double weight_scale) {
        Side s;
        s.m = p.m;
        s.xi = p.xi;
        s.phi = p.phi;
        s.gamma_m = sf::gamma_fn(p.m);
        if (!p.has_shadowing()) {
            s.nodes = {p.omega};
            s.weights = {weight_scale};
            return s;
        }
        const int n_nodes = n_solo;
        s.nodes.resize(n_nodes);
        s.weights.resize(n_nodes);
        const double scale = p.omega / p.phi_hat;
        for (int i = 0; i < n_nodes; ++i) {
            // strata edges graded cubically toward both q = 0 and q = 1:
            // deep-shadow cells drive high-SNR error rates, upper-tail cells
            // drive the moments
            const double e0 = strata_edge(static_cast<double>(i) / n_nodes);
            const double e1 = strata_edge(static_cast<double>(i + 1) / n_nodes);
            const double q = 0.5 * (e0 + e1);
            const double w = sf::inverse_lower_inc_gamma(p.n, q);
            s.nodes[i] = scale * (p.zeta == 1.0 ? w : std::pow(w, 1.0 / p.zeta));
            s.weights[i] = weight_scale * (e1 - e0);
        }
        return s;
    };

    Protocol proto = scn.protocol;
    if (proto == Protocol::Ssi) {
        const std::size_t n_finite =
            static_cast<std::size_t>(std::count_if(hop1.begin(), hop1.end(), [](const EgkParams& p) {
                return p.has_shadowing();
            }));
        if (n_finite == 0 || L == 1) {
            // Selection is trivial: over deterministic shadows the argmax is
            // the largest omega, and with a single relay there is no choice.
            proto = Protocol::AveragePower;
        } else if (n_finite != L) {
            throw std::invalid_argument(
                "Integrand: SSI selection over mixed finite/deterministic first-hop shadowing is "
                "not defined; use RR or AP");
        }
    }

    switch (proto) {
        case Protocol::Ssi: {
            // Equal-probability strata of the max-shadowing law: nodes at the
            // quantile midpoints of F(s) = prod_k P_k(s), each 1/N cell split
            // across relays by their share of the max density there. Total
            // mass is exactly 1 and the quantile map absorbs both the origin
            // singularity (n zeta < 1 components) and very narrow laws.
            const int n_nodes = n_strata;
            gcq_n_eff_ = n_nodes;
            auto max_cdf = [&hop1](double s) {
                double v = 1.0;
                for (const auto& p : hop1) v *= fading::shadow_cdf(p, s);
                return v;
            };
            double hi0 = 0.0;
            for (const auto& p : hop1) hi0 = std::max(hi0, p.omega);

            std::vector<std::vector<double>> eta(n_nodes, std::vector<double>(L, 0.0));
            std::vector<double> nodes(n_nodes);
            for (int i = 0; i < n_nodes; ++i) {
                // graded strata, as for the single-relay sides
                const double e0 = strata_edge(static_cast<double>(i) / n_nodes);
                const double e1 = strata_edge(static_cast<double>(i + 1) / n_nodes);
                const double q = 0.5 * (e0 + e1);
                double hi = hi0;
                while (max_cdf(hi) < q) hi *= 2.0;
                double lo = hi;
                do {
                    lo *= 0.5;
                } while (max_cdf(lo) > q && lo > 1e-300);
                for (int it = 0; it < 90 && hi - lo > 1e-14 * hi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (max_cdf(mid) < q ? lo : hi) = mid;
                }
                const double s = 0.5 * (lo + hi);
                nodes[i] = s;
                // relay shares of the max density at s
                double denom = 0.0;
                std::vector<double> comp(L, 0.0);
                for (std::size_t l = 0; l < L; ++l) {
                    double v = fading::shadow_pdf(hop1[l], s);
                    for (std::size_t k = 0; k < L; ++k)
                        if (k != l) v *= fading::shadow_cdf(hop1[k], s);
                    comp[l] = v;
                    denom += v;
                }
                if (denom > 0.0)
                    for (std::size_t l = 0; l < L; ++l)
                        eta[i][l] = comp[l] / denom * (e1 - e0);
            }

            for (std::size_t l = 0; l < L; ++l) {
                LinkTerm t;
                t.hop1.m = hop1[l].m;
                t.hop1.xi = hop1[l].xi;
                t.hop1.phi = hop1[l].phi;
                t.hop1.gamma_m = sf::gamma_fn(hop1[l].m);
                t.hop1.nodes = nodes;
                t.hop1.weights.resize(nodes.size());
                for (std::size_t i = 0; i < nodes.size(); ++i) t.hop1.weights[i] = eta[i][l];
                prune_mixture(t.hop1.nodes, t.hop1.weights);
                t.hop2 = make_single_side(hop2[l], 1.0);
                terms_.push_back(std::move(t));
            }
            break;
        }
        case Protocol::RoundRobin: {
            for (std::size_t l = 0; l < L; ++l) {
                LinkTerm t;
                t.hop1 = make_single_side(hop1[l], 1.0 / static_cast<double>(L));
                t.hop2 = make_single_side(hop2[l], 1.0);
                terms_.push_back(std::move(t));
            }
            break;
        }
        case Protocol::AveragePower: {
            std::size_t best = 0;
            for (std::size_t l = 1; l < L; ++l)
                if (hop1[l].omega > hop1[best].omega) best = l;  // ties keep the lowest index
            LinkTerm t;
            t.hop1 = make_single_side(hop1[best], 1.0);
            t.hop2 = make_single_side(hop2[best], 1.0);
            terms_.push_back(std::move(t));
            break;
        }
        case Protocol::CsiSimOnly:
            break;  // rejected above
    }
    if (gcq_n_eff_ == 0) gcq_n_eff_ = n_strata;

    // Total discrete mass: the exact u-integral of the assembled integrand.
    mass_ = 0.0;
    for (const auto& t : terms_) {
        double m1 = 0.0, m2 = 0.0;
        for (double w : t.hop1.weights) m1 += w;
        for (double w : t.hop2.weights) m2 += w;
        mass_ += m1 * m2;
    }

    // Decay probe per side: v10 with M_{1/G}(v10) ~ 1e-6 fixes both the
    // characteristic u of each link term and the negligibility cutoff.
    auto probe = [this](Side& s) {
        auto g = [&s, this](double v) {
            return sf::ext_inc_gamma(s.m, 0.0, s.phi * v, 1.0 / s.xi, inner_tol_) / s.gamma_m;
        };
        double v10 = 1.0;
        while (g(v10) > 1e-6 && v10 < 1e200) v10 *= 4.0;
        s.v_cut = v10 * std::pow(460.0 / 13.8, (s.xi + 1.0) / s.xi);
        return v10;
    };
    scale_hint_ = 0.0;
    for (auto& t : terms_) {
        const double v1 = probe(t.hop1);
        const double v2 = probe(t.hop2);
        double s1 = t.hop1.nodes.empty() ? 0.0 : t.hop1.nodes[t.hop1.nodes.size() / 2];
        double s2 = t.hop2.nodes.empty() ? 0.0 : t.hop2.nodes[t.hop2.nodes.size() / 2];
        scale_hint_ = std::max(scale_hint_, std::min(v1 * s1, v2 * s2));
    }
    if (!(scale_hint_ > 0.0)) scale_hint_ = 1.0;
}

double Integrand::side_value(const Side& s, double u) const {
    double sum = 0.0;
    // nodes ascend, so v = u/s descends; once v < v_cut the rest contribute.
    for (std::size_t i = s.nodes.size(); i-- > 0;) {
        const double v = u / s.nodes[i];
        if (v > s.v_cut) break;
        const double g = route_ == IntegrandRoute::GeneralQuadBackend
                             ? sf::ext_inc_gamma_quad(s.m, 0.0, s.phi * v, 1.0 / s.xi, inner_tol_)
                             : sf::ext_inc_gamma(s.m, 0.0, s.phi * v, 1.0 / s.xi, inner_tol_);
        sum += s.weights[i] * g;
    }
    return sum / s.gamma_m;
}

double Integrand::side_dvalue(const Side& s, double u) const {
    const double alpha = s.m - 1.0 / s.xi;
    double sum = 0.0;
    for (std::size_t i = s.nodes.size(); i-- > 0;) {
        const double v = u / s.nodes[i];
        if (v > s.v_cut) break;
        const double d = route_ == IntegrandRoute::GeneralQuadBackend
                             ? sf::ext_inc_gamma_quad(alpha, 0.0, s.phi * v, 1.0 / s.xi, inner_tol_)
                             : sf::ext_inc_gamma(alpha, 0.0, s.phi * v, 1.0 / s.xi, inner_tol_);
        sum += s.weights[i] / s.nodes[i] * d;
    }
    return sum * s.phi / s.gamma_m;
}

double Integrand::eval_general(double u) const {
    double total = 0.0;
    for (const auto& t : terms_) {
        const double m1 = side_value(t.hop1, u);
        const double m2 = side_value(t.hop2, u);
        const double d1 = m2 > 0.0 ? side_dvalue(t.hop1, u) : 0.0;
        const double d2 = m1 > 0.0 ? side_dvalue(t.hop2, u) : 0.0;
        total += m1 * d2 + m2 * d1;
    }
    return total;
}

double Integrand::eval_gk(double u) const {
    // Generalized-K specialization: with all shaping parameters 1 each
    // extended incomplete gamma collapses to 2 b^{m/2} K_m(2 sqrt(b)) and the
    // exponents collect into
    //   4 u^{(m1+m2-1)/2} sqrt((m1/s)^{m1} (m2/t)^{m2})
    //     { sqrt(m1/s) K_{m1-1} K_{m2} + sqrt(m2/t) K_{m1} K_{m2-1} } / (G1 G2).
    double total = 0.0;
    for (const auto& t : terms_) {
        const double m1 = t.hop1.m, m2 = t.hop2.m;
        double a_km1 = 0.0, a_km1m = 0.0;  // sums over hop-1 nodes
        for (std::size_t i = 0; i < t.hop1.nodes.size(); ++i) {
            const double s = t.hop1.nodes[i];
            if (u / s > t.hop1.v_cut) continue;
            const double z = 2.0 * std::sqrt(m1 * u / s);
            if (z > 1400.0) continue;
            const double pre = t.hop1.weights[i] * std::sqrt(std::pow(m1 / s, m1));
            a_km1 += pre * sf::bessel_k(m1, z);
            a_km1m += pre * std::sqrt(m1 / s) * sf::bessel_k(m1 - 1.0, z);
        }
        double b_km2 = 0.0, b_km2m = 0.0;  // sums over hop-2 nodes
        for (std::size_t j = 0; j < t.hop2.nodes.size(); ++j) {
            const double s = t.hop2.nodes[j];
            if (u / s > t.hop2.v_cut) continue;
            const double z = 2.0 * std::sqrt(m2 * u / s);
            if (z > 1400.0) continue;
            const double pre = t.hop2.weights[j] * std::sqrt(std::pow(m2 / s, m2));
            b_km2 += pre * sf::bessel_k(m2, z);
            b_km2m += pre * std::sqrt(m2 / s) * sf::bessel_k(m2 - 1.0, z);
        }
        const double cross = a_km1m * b_km2 + a_km1 * b_km2m;
        if (cross != 0.0)
            total += 4.0 * std::pow(u, 0.5 * (m1 + m2 - 1.0)) * cross /
                     (t.hop1.gamma_m * t.hop2.gamma_m);
    }
    return total;
}

double Integrand::operator()(double u) const {
    if (!(u > 0.0)) throw std::domain_error("Integrand: requires u > 0");
    return route_ == IntegrandRoute::GkClosedForm ? eval_gk(u) : eval_general(u);
}

double integrand_ssi(const Scenario& scn, const EngineConfig& cfg, double u) {
    return Integrand(scn.with_protocol(Protocol::Ssi), cfg)(u);
}

namespace {

struct PairAccum {
    double kernel = 0.0, norm = 0.0;
    double err = 0.0;
    bool converged = false;
    int windows = 0;
};

// [0, u1] with the substitution u = u1 t^5: integrable endpoint singularities
// of the integrand (u^{m xi - 1} type and logarithmic) become smooth.
std::array<double, 2> head_pair(const std::function<std::array<double, 2>(double)>& f, double u1,
                                const QuadTolerance& tol, double* err) {
    auto sub = [&f, u1](double t) {
        if (t <= 0.0) return std::array<double, 2>{0.0, 0.0};
        const double t2 = t * t;
        const double jac = 5.0 * u1 * t2 * t2;
        auto v = f(u1 * t2 * t2 * t);
        return std::array<double, 2>{v[0] * jac, v[1] * jac};
    };
    const QuadResult2 r = integrate_adaptive2(sub, 0.0, 1.0, tol);
    *err += r.error_estimate[0] + r.error_estimate[1];
    return r.value;
}

// Decaying-kernel strategy: singular head, then octave windows until the
// contribution is negligible twice in a row.
PairAccum integrate_decaying(const std::function<std::array<double, 2>(double)>& f, double scale,
                             const QuadTolerance& tol, double max_u, bool diagnose_divergence) {
    PairAccum acc;
    const double u1 = std::max(scale / 64.0, 1e-280);
    auto head = head_pair(f, u1, tol, &acc.err);
    acc.kernel = head[0];
    acc.norm = head[1];

    double lo = u1;
    int quiet = 0, growing = 0;
    double prev_mag = std::abs(acc.kernel);
    while (lo < max_u) {
        const double hi = std::min(2.0 * lo, max_u);
        QuadTolerance wtol = tol;
        wtol.abs_tol = std::max(tol.abs_tol,
                                0.05 * tol.rel_tol * std::max(std::abs(acc.kernel), std::abs(acc.norm)));
        const QuadResult2 w = integrate_adaptive2(f, lo, hi, wtol);
        acc.kernel += w.value[0];
        acc.norm += w.value[1];
        acc.err += w.error_estimate[0] + w.error_estimate[1];
        ++acc.windows;

        const double mag = std::max(std::abs(w.value[0]), std::abs(w.value[1]));
        const bool small =
            mag <= std::max(tol.abs_tol,
                            0.5 * tol.rel_tol * std::max(std::abs(acc.kernel), std::abs(acc.norm)));
        quiet = small ? quiet + 1 : 0;
        if (quiet >= 2) {
            acc.converged = true;
            break;
        }
        if (diagnose_divergence) {
            growing = std::abs(w.value[0]) > prev_mag ? growing + 1 : 0;
            prev_mag = std::abs(w.value[0]);
            if (acc.windows > 12 && growing >= 6)
                throw QuadratureError("moment integral appears divergent (tail keeps growing)",
                                      acc.kernel, acc.err);
        }
        lo = hi;
    }
    return acc;
}

// Oscillatory strategy for the J0 kernel: partition at the kernel zeros
// u_j = j_{0,j}^2 / (4p), accelerate the alternating partial sums by repeated
// averaging.
struct OscAccum {
    double value = 0.0;
    double err = 0.0;
    bool converged = false;
    int segments = 0;
};

OscAccum integrate_oscillatory(const std::function<double(double)>& f, double p, double scale,
                               const QuadTolerance& tol, double max_u) {
    OscAccum acc;
    const double u1 = sf::bessel_j0_zero(1) * sf::bessel_j0_zero(1) / (4.0 * p);

    // Head [0, u1], power substitution, presplit near the mass location in
    // case the first kernel zero lies far beyond the integrand's decay.
    double qerr = 0.0;
    auto head_scalar = [&f](double u) { return std::array<double, 2>{f(u), 0.0}; };
    double head = 0.0;
    {
        const double t_spike = std::clamp(std::pow(scale / u1, 0.2), 1e-6, 0.5);
        auto sub = [&](double t) {
            if (t <= 0.0) return std::array<double, 2>{0.0, 0.0};
            const double t2 = t * t;
            const double jac = 5.0 * u1 * t2 * t2;
            auto v = head_scalar(u1 * t2 * t2 * t);
            return std::array<double, 2>{v[0] * jac, 0.0};
        };
        for (const auto& seg : {std::pair{0.0, t_spike}, {t_spike, std::min(1.0, 4.0 * t_spike)},
                                {std::min(1.0, 4.0 * t_spike), 1.0}}) {
            if (seg.first >= seg.second) continue;
            const QuadResult2 r = integrate_adaptive2(sub, seg.first, seg.second, tol);
            head += r.value[0];
            qerr += r.error_estimate[0];
        }
    }

    std::vector<double> partials{head};
    double total = head;
    int quiet = 0;
    const int max_segments = 400;
    for (int j = 2; j <= max_segments; ++j) {
        const double a = sf::bessel_j0_zero(j - 1), b = sf::bessel_j0_zero(j);
        const double ulo = a * a / (4.0 * p);
        const double uhi = std::min(b * b / (4.0 * p), max_u);
        if (ulo >= uhi) break;
        QuadTolerance wtol = tol;
        wtol.abs_tol = std::max(tol.abs_tol, 0.02 * tol.rel_tol * std::abs(total));
        const QuadResult seg = integrate_adaptive(f, ulo, uhi, wtol);
        total += seg.value;
        qerr += seg.error_estimate;
        partials.push_back(total);
        acc.segments = j;

        // Repeated averaging of the trailing partial sums.
        const int K = static_cast<int>(std::min<std::size_t>(partials.size(), 24));
        std::vector<double> v(partials.end() - K, partials.end());
        double prev_top = v.back();
        for (int m = 1; m < K; ++m) {
            for (int i = 0; i + m < K; ++i) v[i] = 0.5 * (v[i] + v[i + 1]);
            if (m == K - 2) prev_top = v[0];
        }
        const double est = v[0];
        const double aerr = K >= 3 ? std::abs(est - prev_top) : std::abs(seg.value);
        acc.value = est;
        acc.err = aerr + qerr;
        const bool ok = acc.err <= std::max(tol.abs_tol, tol.rel_tol * std::abs(est));
        const bool seg_tiny = std::abs(seg.value) <= std::max(tol.abs_tol, 0.01 * tol.rel_tol * std::abs(est));
        quiet = seg_tiny ? quiet + 1 : 0;
        if ((ok && j >= 4) || quiet >= 3) {
            acc.converged = true;
            break;
        }
    }
    if (partials.size() == 1) {  // kernel never oscillated inside the domain
        acc.value = head;
        acc.err = qerr;
        acc.converged = true;
    }
    return acc;
}

PerfResult aup_impl(const Scenario& scn, const perfkernel::PerfSpec& spec, const EngineConfig& cfg,
                    IntegrandRoute route) {
    using perfkernel::PerfKind;
    if (spec.kind == PerfKind::Moment)
        throw std::invalid_argument("aup: moment kind is served by engine::moments");
    const Integrand f(scn, cfg, route);

    // J0-family kernels oscillate: partitioning at the kernel zeros beats
    // brute subdivision once the decay scale passes the first zero.
    const bool j0_kernel = spec.kind == PerfKind::Mgf || spec.kind == PerfKind::BepNoncoherent ||
                           (spec.kind == PerfKind::BepWojnar && spec.b == 1.0);
    UStrategy strategy = cfg.u_strategy;
    if (strategy == UStrategy::Auto)
        strategy = j0_kernel ? UStrategy::Oscillatory : UStrategy::Decaying;

    PerfResult out;
    out.diagnostics["gcq_n_eff"] = f.effective_gcq_n();
    out.diagnostics["mass_deficit"] = std::abs(f.mass() - 1.0);
    // shadow-stratification truncation allowance, calibrated against
    // N-refinement on the heaviest Table-style ensembles
    const double n_eff = f.effective_gcq_n();
    const double strat_rel = 10.0 / (n_eff * n_eff);

    if (strategy == UStrategy::Decaying) {
        auto pair = [&](double u) -> std::array<double, 2> {
            const double a = f(u);
            return {perfkernel::z_kernel(spec, u) * a, a};
        };
        const PairAccum acc = integrate_decaying(pair, f.scale_hint(), cfg.u_tol, cfg.max_u, false);
        if (!acc.converged)
            throw QuadratureError("aup: outer integral did not settle below max_u", acc.kernel,
                                  acc.err);
        out.analytic_value = acc.kernel;
        out.error_estimate = acc.err + (std::abs(f.mass() - 1.0) + strat_rel) * std::abs(acc.kernel);
        out.normalization_residual = std::abs(acc.norm - 1.0);
        out.diagnostics["u_windows"] = acc.windows;
    } else {
        auto kf = [&](double u) { return perfkernel::z_kernel(spec, u) * f(u); };
        const OscAccum acc = integrate_oscillatory(kf, spec.a, f.scale_hint(), cfg.u_tol, cfg.max_u);
        if (!acc.converged)
            throw QuadratureError("aup: oscillatory acceleration did not converge", acc.value,
                                  acc.err);
        // Residual pass with the kernel replaced by 1.
        auto norm_pair = [&](double u) -> std::array<double, 2> {
            const double a = f(u);
            return {a, a};
        };
        const PairAccum nrm =
            integrate_decaying(norm_pair, f.scale_hint(), cfg.u_tol, cfg.max_u, false);
        out.analytic_value = acc.value;
        out.error_estimate = acc.err + strat_rel * std::abs(acc.value);
        out.normalization_residual = std::abs(nrm.norm - 1.0);
        out.diagnostics["osc_segments"] = acc.segments;
    }
    return out;
}

}  // namespace

PerfResult aup(const Scenario& scn, const perfkernel::PerfSpec& spec, const EngineConfig& cfg) {
    return aup_impl(scn, spec, cfg, IntegrandRoute::General);
}

PerfResult aup_gk_fastpath(const Scenario& scn, const perfkernel::PerfSpec& spec,
                           const EngineConfig& cfg) {
    return aup_impl(scn, spec, cfg, IntegrandRoute::GkClosedForm);
}

PerfResult end_mgf(const Scenario& scn, double p, const EngineConfig& cfg) {
    if (!(p > 0.0)) throw std::domain_error("end_mgf: requires p > 0");
    const Integrand f(scn, cfg);
    auto kf = [&](double u) { return sf::bessel_j0(2.0 * std::sqrt(p * u)) * f(u); };
    const OscAccum acc = integrate_oscillatory(kf, p, f.scale_hint(), cfg.u_tol, cfg.max_u);
    if (!acc.converged)
        throw QuadratureError("end_mgf: oscillatory acceleration did not converge", acc.value,
                              acc.err);
    auto norm_pair = [&](double u) -> std::array<double, 2> {
        const double a = f(u);
        return {a, a};
    };
    const PairAccum nrm = integrate_decaying(norm_pair, f.scale_hint(), cfg.u_tol, cfg.max_u, false);

    PerfResult out;
    out.analytic_value = acc.value;
    const double strat_rel = 10.0 / (static_cast<double>(f.effective_gcq_n()) * f.effective_gcq_n());
    out.error_estimate = acc.err + strat_rel * std::abs(acc.value);
    out.normalization_residual = std::abs(nrm.norm - 1.0);
    out.diagnostics["osc_segments"] = acc.segments;
    out.diagnostics["gcq_n_eff"] = f.effective_gcq_n();
    return out;
}

PerfResult moments(const Scenario& scn, int k, const EngineConfig& cfg) {
    if (k < 0) throw std::domain_error("moments: requires k >= 0");
    const Integrand f(scn, cfg);
    auto pair = [&](double u) -> std::array<double, 2> {
        const double a = f(u);
        return {perfkernel::z_mgf_derivative_at_zero(k, u) * a, a};
    };
    const PairAccum acc = integrate_decaying(pair, f.scale_hint(), cfg.u_tol, cfg.max_u, k >= 1);
    if (!acc.converged)
        throw QuadratureError("moments: tail not resolved below max_u (possibly divergent)",
                              acc.kernel, acc.err);
    PerfResult out;
    // Ratio form: the discrete-mixture mass cancels, so k = 0 is exactly 1.
    out.analytic_value = acc.kernel / acc.norm;
    const double strat_rel = 10.0 / (static_cast<double>(f.effective_gcq_n()) * f.effective_gcq_n());
    out.error_estimate = acc.err * (1.0 + std::abs(out.analytic_value)) / std::max(acc.norm, 0.5) +
                         strat_rel * std::abs(out.analytic_value);
    out.normalization_residual = std::abs(acc.norm - 1.0);
    out.diagnostics["u_windows"] = acc.windows;
    return out;
}

PerfResult amount_of_fading(const Scenario& scn, int k, const EngineConfig& cfg) {
    if (k < 1) throw std::domain_error("amount_of_fading: requires k >= 1");
    const PerfResult m1 = moments(scn, 1, cfg);
    if (k == 1) {
        PerfResult out = m1;
        out.analytic_value = 0.0;
        return out;
    }
    const PerfResult mk = moments(scn, k, cfg);
    PerfResult out;
    out.analytic_value = mk.analytic_value / std::pow(m1.analytic_value, k) - 1.0;
    out.error_estimate = mk.error_estimate / std::pow(m1.analytic_value, k) +
                         k * mk.analytic_value * m1.error_estimate /
                             std::pow(m1.analytic_value, k + 1);
    out.normalization_residual = std::max(m1.normalization_residual, mk.normalization_residual);
    return out;
}

}  // namespace relayperf::engine
