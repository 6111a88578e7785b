#ifndef RELAYPERF_ENGINE_HPP
#define RELAYPERF_ENGINE_HPP

#include "relayperf/fading.hpp"
#include "relayperf/perfkernel.hpp"
#include "relayperf/quad.hpp"

#include <map>
#include <string>
#include <vector>

namespace relayperf::engine {

enum class Protocol { Ssi, RoundRobin, AveragePower, CsiSimOnly };

std::string protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

/// One source->relay->destination link: two composite-fading hops.
struct RelayLink {
    fading::EgkParams hop1;
    fading::EgkParams hop2;
};

/// L relay links, a selection protocol, and a common dB offset applied to
/// every omega (the sweep variable).
struct Scenario {
    std::vector<RelayLink> links;
    Protocol protocol = Protocol::Ssi;
    double snr_scale_db = 0.0;

    double snr_factor() const;
    Scenario with_snr_db(double db) const;
    Scenario with_protocol(Protocol p) const;
    Scenario truncated(std::size_t l) const;  // first l links
};

enum class UStrategy { Auto, Decaying, Oscillatory };

struct EngineConfig {
    int gcq_n = 64;
    QuadTolerance u_tol{1e-7, 1e-13, 1500};  // outer u-integral
    UStrategy u_strategy = UStrategy::Auto;
    double max_u = 1e15;  // truncation cap for decaying kernels
    // Evaluate every extended incomplete gamma by its defining integral,
    // bypassing the Bessel shortcut; keeps the generalized-K cross-check an
    // honest two-backend comparison.
    bool force_quadrature_backend = false;
};

struct PerfResult {
    double analytic_value = 0.0;
    double error_estimate = 0.0;
    double normalization_residual = 0.0;
    std::map<std::string, double> diagnostics;
};

/// Evaluation route for the prepared integrand. General composes the hop
/// reciprocal-MGF factors through the extended incomplete gamma (which may
/// take its own Bessel shortcut); GeneralQuadBackend forces the defining
/// integral everywhere; GkClosedForm is the generalized-K specialization with
/// all exponents collected analytically (valid only when every shaping
/// parameter is 1).
enum class IntegrandRoute { General, GeneralQuadBackend, GkClosedForm };

/// Theorem-1 integrand (kernel excluded), folded non-negative: the thing
/// whose integral over u equals 1. Prepared once per scenario, cheap to
/// evaluate repeatedly.
class Integrand {
  public:
    Integrand(const Scenario& scn, const EngineConfig& cfg,
              IntegrandRoute route = IntegrandRoute::General);

    double operator()(double u) const;
    /// Total discrete mixture mass; the exact u-integral of the integrand.
    double mass() const { return mass_; }
    /// Characteristic u beyond which the integrand has decayed.
    double scale_hint() const { return scale_hint_; }
    int effective_gcq_n() const { return gcq_n_eff_; }

  private:
    struct Side {
        double m = 1.0, xi = 1.0, phi = 1.0, gamma_m = 1.0;
        std::vector<double> nodes;
        std::vector<double> weights;
        double v_cut = 1e300;  // argument beyond which M_{1/G} is negligible
    };
    struct LinkTerm {
        Side hop1, hop2;
    };

    double side_value(const Side& s, double u) const;   // sum_i w_i M_{1/G}(u/s_i)
    double side_dvalue(const Side& s, double u) const;  // sum_i (w_i/s_i) * (-M')(u/s_i)
    double eval_general(double u) const;
    double eval_gk(double u) const;

    std::vector<LinkTerm> terms_;
    double mass_ = 0.0;
    double scale_hint_ = 1.0;
    int gcq_n_eff_ = 0;
    QuadTolerance inner_tol_;
    IntegrandRoute route_;
};

/// Theorem-1 integrand for the SSI protocol at a single point (test surface).
double integrand_ssi(const Scenario& scn, const EngineConfig& cfg, double u);

/// Average unified performance for SSI / round-robin / average-power
/// protocols; spec must not be the moment kind (see moments()).
PerfResult aup(const Scenario& scn, const perfkernel::PerfSpec& spec, const EngineConfig& cfg);

/// Same quantity through the generalized-K specialization: every extended
/// incomplete gamma replaced by its Bessel-K closed form with the exponents
/// collected analytically. Requires all shaping parameters equal to 1.
PerfResult aup_gk_fastpath(const Scenario& scn, const perfkernel::PerfSpec& spec,
                           const EngineConfig& cfg);

/// MGF of the end-to-end SNR, E[exp(-p gamma_end)], p > 0; oscillatory
/// J0-partition evaluation.
PerfResult end_mgf(const Scenario& scn, double p, const EngineConfig& cfg);

/// k-th moment E[gamma_end^k] (normalized by the realized integrand mass so
/// k = 0 is exactly 1), and the amount of fading E[g^k]/E[g]^k - 1.
PerfResult moments(const Scenario& scn, int k, const EngineConfig& cfg);
PerfResult amount_of_fading(const Scenario& scn, int k, const EngineConfig& cfg);

}  // namespace relayperf::engine

#endif
