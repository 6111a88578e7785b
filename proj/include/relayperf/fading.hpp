#ifndef RELAYPERF_FADING_HPP
#define RELAYPERF_FADING_HPP

#include "relayperf/quad.hpp"

#include <cstdint>
#include <limits>
#include <random>

namespace relayperf::fading {

/// Sentinel shadowing figure meaning "no shadowing": the shadow power is the
/// point mass at omega.
inline constexpr double kInfiniteShadowingFigure = std::numeric_limits<double>::infinity();

/// Five-parameter description of one hop's composite fading: generalized-gamma
/// multipath (m, xi) times generalized-gamma shadowing (n, zeta) with mean
/// power omega. The normalizers phi and phi_hat are cached at construction.
struct EgkParams {
    double m;      // fading figure, >= 0.5
    double xi;     // fading shaping factor, > 0
    double n;      // shadowing severity, >= 0.5 or infinite
    double zeta;   // shadowing shaping factor, > 0
    double omega;  // long-term average SNR, > 0 (linear)

    double phi;      // Gamma(m + 1/xi) / Gamma(m)
    double phi_hat;  // Gamma(n + 1/zeta) / Gamma(n); 1 when n is infinite

    EgkParams(double m, double xi, double n, double zeta, double omega);

    bool has_shadowing() const { return std::isfinite(n); }

    /// Same channel with omega multiplied by a positive linear factor.
    EgkParams scaled(double factor) const;
};

/// Deterministic random stream: same (seed, stream_id) gives a bit-identical
/// sample sequence regardless of platform or thread placement.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Uniform on (0, 1].
    double next_u01();
    /// Standard normal (Box-Muller, one value per call).
    double next_normal();
    /// Unit-scale gamma variate, shape >= 0.5 (Marsaglia-Tsang).
    double next_gamma(double shape);

  private:
    std::uint64_t seed_, stream_id_;
    std::mt19937_64 eng_;
};

/// Multipath fast-fading density (unit mean), Eq.-style
///   p(g) = (xi * phi / Gamma(m)) (phi g)^{m xi - 1} exp(-(phi g)^xi).
double gg_pdf(const EgkParams& p, double g);

/// Shadow power density with mean omega; finite n only.
double shadow_pdf(const EgkParams& p, double s);

/// Shadow power CDF; rises 0 -> 1. For infinite n this is the unit step at
/// omega.
double shadow_cdf(const EgkParams& p, double s);

/// Composite SNR density (validation surface; the engine never needs it).
double egk_snr_pdf(const EgkParams& p, double gamma,
                   const QuadTolerance& tol = QuadTolerance());

/// Reciprocal MGF of the multipath part, M_{1/G}(p) = E[exp(-p/G)] in (0,1].
double gg_recip_mgf(const EgkParams& p, double arg,
                    const QuadTolerance& tol = QuadTolerance());

/// d/dp M_{1/G}(p), <= 0. Diverges at p = 0 when m*xi <= 1.
double gg_recip_mgf_deriv(const EgkParams& p, double arg,
                          const QuadTolerance& tol = QuadTolerance());

/// Reciprocal MGF of the full composite SNR, E[exp(-p / (S G))]. Computed as
/// the shadow-mixture of gg_recip_mgf; collapses to gg_recip_mgf(p/omega)
/// when n is infinite.
double egk_recip_mgf(const EgkParams& p, double arg,
                     const QuadTolerance& tol = QuadTolerance());

/// Exact samplers matching the densities above.
double sample_gg(const EgkParams& p, RngStream& rng);
double sample_shadow(const EgkParams& p, RngStream& rng);
double sample_egk_snr(const EgkParams& p, RngStream& rng);

}  // namespace relayperf::fading

#endif
