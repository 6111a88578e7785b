#include "relayperf/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace relayperf::selection {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

// l-th summand of the max-shadowing density: p_l(s) * prod_{k != l} P_k(s).
double max_density_component(const FirstHopEnsemble& ens, std::size_t l, double s) {
    double v = fading::shadow_pdf(ens.relays[l], s);
    if (v == 0.0) return 0.0;
    for (std::size_t k = 0; k < ens.size(); ++k) {
        if (k == l) continue;
        v *= fading::shadow_cdf(ens.relays[k], s);
        if (v == 0.0) return 0.0;
    }
    return v;
}

double cdf_product(const FirstHopEnsemble& ens, double s) {
    double v = 1.0;
    for (const auto& r : ens.relays) v *= fading::shadow_cdf(r, s);
    return v;
}

}  // namespace

FirstHopEnsemble::FirstHopEnsemble(std::vector<fading::EgkParams> hop1_params)
    : relays(std::move(hop1_params)) {
    if (relays.empty()) throw std::domain_error("FirstHopEnsemble: needs at least one relay");
    for (const auto& r : relays)
        if (!r.has_shadowing())
            throw std::domain_error(
                "FirstHopEnsemble: infinite shadowing figure; use the RR/AP protocols for "
                "deterministic shadowing");
}

SelectionProbabilities selection_probabilities(const FirstHopEnsemble& ens,
                                               const QuadTolerance& tol) {
    const std::size_t L = ens.size();
    SelectionProbabilities out;
    out.mu.resize(L);
    if (L == 1) {
        out.mu[0] = 1.0;
        return out;
    }
    for (std::size_t l = 0; l < L; ++l) {
        auto f = [&ens, l](double s) { return s > 0.0 ? max_density_component(ens, l, s) : 0.0; };
        const QuadResult r = integrate_to_infinity(f, 0.0, tol);
        if (!r.converged)
            throw QuadratureError("selection_probabilities: quadrature did not converge", r.value,
                                  r.error_estimate);
        out.mu[l] = r.value;
    }
    const double sum = std::accumulate(out.mu.begin(), out.mu.end(), 0.0);
    out.raw_sum_deviation = std::abs(sum - 1.0);
    if (out.raw_sum_deviation > 1e-6)
        throw QuadratureError("selection_probabilities: raw sum deviates from 1", sum,
                              out.raw_sum_deviation);
    for (double& m : out.mu) m /= sum;
    return out;
}

double max_shadow_pdf(const FirstHopEnsemble& ens, double s) {
    if (!(s > 0.0)) throw std::domain_error("max_shadow_pdf: requires s > 0");
    double v = 0.0;
    for (std::size_t l = 0; l < ens.size(); ++l) v += max_density_component(ens, l, s);
    return v;
}

double max_shadow_median(const FirstHopEnsemble& ens) {
    // CDF of the max is the product of the per-relay CDFs; bisect it at 1/2.
    double hi = 0.0;
    for (const auto& r : ens.relays) hi = std::max(hi, r.omega);
    while (cdf_product(ens, hi) < 0.5) hi *= 2.0;
    double lo = hi;
    do {
        lo *= 0.5;
    } while (cdf_product(ens, lo) > 0.5 && lo > 1e-300);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf_product(ens, mid) < 0.5 ? lo : hi) = mid;
        if (hi - lo < 1e-14 * hi) break;
    }
    return 0.5 * (lo + hi);
}

GcqGrid gcq_grid(const FirstHopEnsemble& ens, int n_nodes) {
    if (n_nodes < 8) throw std::domain_error("gcq_grid: N must be >= 8");
    GcqGrid g;
    g.scale = max_shadow_median(ens);
    g.nodes.resize(n_nodes);
    g.weights.resize(n_nodes);
    // Chebyshev (first kind) abscissas x_i = cos((2i-1)pi/2N) taken in
    // increasing order, mapped by s = sigma (1+x)/(1-x). The weight folds the
    // Chebyshev weight sqrt(1-x^2) and the map Jacobian 2 sigma/(1-x)^2.
    for (int i = 0; i < n_nodes; ++i) {
        const double theta = (2.0 * (n_nodes - i) - 1.0) * kPi / (2.0 * n_nodes);
        const double x = std::cos(theta);
        const double om = 1.0 - x;
        g.nodes[i] = g.scale * (1.0 + x) / om;
        g.weights[i] = (kPi / n_nodes) * std::sin(theta) * 2.0 * g.scale / (om * om);
    }
    return g;
}

std::vector<std::vector<double>> gcq_eta(const FirstHopEnsemble& ens, const GcqGrid& grid) {
    const std::size_t N = grid.nodes.size();
    const std::size_t L = ens.size();
    std::vector<std::vector<double>> eta(N, std::vector<double>(L, 0.0));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t l = 0; l < L; ++l)
            eta[i][l] = grid.weights[i] * max_density_component(ens, l, grid.nodes[i]);
    return eta;
}

double cond_first_hop_recip_mgf(const fading::EgkParams& relay, const std::vector<double>& eta_col,
                                const GcqGrid& grid, double p, const QuadTolerance& tol) {
    if (!(p >= 0.0)) throw std::domain_error("cond_first_hop_recip_mgf: requires p >= 0");
    if (eta_col.size() != grid.nodes.size())
        throw std::invalid_argument("cond_first_hop_recip_mgf: eta column/grid size mismatch");
    double mass = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < eta_col.size(); ++i) {
        const double w = eta_col[i];
        if (w == 0.0) continue;
        mass += w;
        sum += w * fading::gg_recip_mgf(relay, p / grid.nodes[i], tol);
    }
    if (!(mass > 0.0))
        throw std::domain_error("cond_first_hop_recip_mgf: zero selection mass for this relay");
    return sum / mass;
}

double cond_first_hop_recip_mgf_deriv(const fading::EgkParams& relay,
                                      const std::vector<double>& eta_col, const GcqGrid& grid,
                                      double p, const QuadTolerance& tol) {
    if (!(p > 0.0)) throw std::domain_error("cond_first_hop_recip_mgf_deriv: requires p > 0");
    if (eta_col.size() != grid.nodes.size())
        throw std::invalid_argument("cond_first_hop_recip_mgf_deriv: eta column/grid size mismatch");
    double mass = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < eta_col.size(); ++i) {
        const double w = eta_col[i];
        if (w == 0.0) continue;
        mass += w;
        sum += (w / grid.nodes[i]) * fading::gg_recip_mgf_deriv(relay, p / grid.nodes[i], tol);
    }
    if (!(mass > 0.0))
        throw std::domain_error("cond_first_hop_recip_mgf_deriv: zero selection mass for this relay");
    return sum / mass;
}

}  // namespace relayperf::selection
