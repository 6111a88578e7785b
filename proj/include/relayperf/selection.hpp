#ifndef RELAYPERF_SELECTION_HPP
#define RELAYPERF_SELECTION_HPP

#include "relayperf/fading.hpp"
#include "relayperf/quad.hpp"

#include <vector>

namespace relayperf::selection {

/// The first-hop shadowing ensemble the selection rule argmax_l S_{1,l} acts
/// on. Finite shadowing figures only; degenerate shadowing belongs to the
/// RR/AP protocols.
struct FirstHopEnsemble {
    std::vector<fading::EgkParams> relays;  // full per-relay hop-1 params

    explicit FirstHopEnsemble(std::vector<fading::EgkParams> hop1_params);

    std::size_t size() const { return relays.size(); }
};

/// Gauss-Chebyshev nodes mapped to (0, inf), with weights carrying the map
/// Jacobian and the Chebyshev weight function.
struct GcqGrid {
    std::vector<double> nodes;    // strictly increasing, > 0
    std::vector<double> weights;  // finite
    double scale = 1.0;           // map scale (median of the max-shadowing law)
};

/// Per-relay selection probabilities mu_l = Pr[relay l selected], summing to 1.
struct SelectionProbabilities {
    std::vector<double> mu;
    double raw_sum_deviation = 0.0;  // |sum of raw quadratures - 1| before renormalization
};

/// mu_l by adaptive quadrature of p_l(s) * prod_{k != l} P_k(s) over (0, inf).
/// The raw sum must land within 1e-6 of 1; it is then renormalized.
SelectionProbabilities selection_probabilities(const FirstHopEnsemble& ens,
                                               const QuadTolerance& tol = QuadTolerance());

/// Density of the max shadow power S_hat = max_k S_{1,k}.
double max_shadow_pdf(const FirstHopEnsemble& ens, double s);

/// Median of S_hat (bisection on the CDF product); the GCQ map scale.
double max_shadow_median(const FirstHopEnsemble& ens);

/// N-node grid for integrals against the max-shadowing law.
GcqGrid gcq_grid(const FirstHopEnsemble& ens, int n_nodes);

/// eta[n][l] = w_n * p_l(s_n) * prod_{k != l} P_k(s_n): the l-th summand of
/// the max density at node n. Column sums over n approach mu_l as N grows.
std::vector<std::vector<double>> gcq_eta(const FirstHopEnsemble& ens, const GcqGrid& grid);

/// Conditional first-hop reciprocal MGF of S_hat * G_{1,l} given relay l is
/// selected: (1/sum_n eta) * sum_n eta_n M_{1/G}(p / s_n). Equals 1 at p = 0.
double cond_first_hop_recip_mgf(const fading::EgkParams& relay, const std::vector<double>& eta_col,
                                const GcqGrid& grid, double p,
                                const QuadTolerance& tol = QuadTolerance());

/// d/dp of the above; <= 0 for p > 0.
double cond_first_hop_recip_mgf_deriv(const fading::EgkParams& relay,
                                      const std::vector<double>& eta_col, const GcqGrid& grid,
                                      double p, const QuadTolerance& tol = QuadTolerance());

}  // namespace relayperf::selection

#endif
