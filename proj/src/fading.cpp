#include "relayperf/fading.hpp"

#include "relayperf/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace relayperf::fading {

namespace sf = relayperf::specfun;

EgkParams::EgkParams(double m_, double xi_, double n_, double zeta_, double omega_)
    : m(m_), xi(xi_), n(n_), zeta(zeta_), omega(omega_) {
    if (!(m >= 0.5)) throw std::domain_error("EgkParams: fading figure m must be >= 0.5");
    if (!(xi > 0.0)) throw std::domain_error("EgkParams: fading shaping xi must be > 0");
    if (!(n >= 0.5)) throw std::domain_error("EgkParams: shadowing severity n must be >= 0.5 or infinite");
    if (!(zeta > 0.0)) throw std::domain_error("EgkParams: shadowing shaping zeta must be > 0");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw std::domain_error("EgkParams: omega must be finite and > 0");

    // Ratios via lgamma: the direct Gamma quotient overflows for large m or n.
    phi = std::exp(sf::lgamma_fn(m + 1.0 / xi) - sf::lgamma_fn(m));
    phi_hat = std::isfinite(n) ? std::exp(sf::lgamma_fn(n + 1.0 / zeta) - sf::lgamma_fn(n)) : 1.0;
}

EgkParams EgkParams::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::domain_error("EgkParams::scaled: factor must be > 0");
    return EgkParams(m, xi, n, zeta, omega * factor);
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    std::uint64_t st = seed ^ (stream_id * 0xD1342543DE82EF95ULL);
    splitmix64(st);
    eng_.seed(splitmix64(st));
}

double RngStream::next_u01() {
    // (0, 1]: 53-bit mantissa, never exactly zero so log() is safe.
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::next_normal() {
    const double u1 = next_u01();
    const double u2 = next_u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
}

double RngStream::next_gamma(double shape) {
    if (!(shape >= 0.5)) throw std::domain_error("RngStream::next_gamma: shape must be >= 0.5");
    // Marsaglia-Tsang squeeze/rejection for shape >= 1; boost with U^{1/shape}
    // below that.
    double boost = 1.0;
    double a = shape;
    if (a < 1.0) {
        boost = std::pow(next_u01(), 1.0 / a);
        a += 1.0;
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = next_u01();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return boost * d * v;
    }
}

double gg_pdf(const EgkParams& p, double g) {
    if (!(g > 0.0)) throw std::domain_error("gg_pdf: requires g > 0");
    const double z = p.phi * g;
    const double mexp = p.m * p.xi;
    // log form: densities with m*xi < 1 blow up at the origin but must stay
    // evaluable at small g.
    const double lp = std::log(p.xi) + std::log(p.phi) + (mexp - 1.0) * std::log(z) -
                      std::pow(z, p.xi) - sf::lgamma_fn(p.m);
    return std::exp(lp);
}

double shadow_pdf(const EgkParams& p, double s) {
    if (!p.has_shadowing())
        throw std::domain_error("shadow_pdf: point mass at omega for infinite shadowing figure");
    if (!(s > 0.0)) throw std::domain_error("shadow_pdf: requires s > 0");
    const double z = p.phi_hat * s / p.omega;
    const double lp = std::log(p.zeta) + std::log(p.phi_hat / p.omega) +
                      (p.n * p.zeta - 1.0) * std::log(z) - std::pow(z, p.zeta) - sf::lgamma_fn(p.n);
    return std::exp(lp);
}

double shadow_cdf(const EgkParams& p, double s) {
    if (!(s >= 0.0)) throw std::domain_error("shadow_cdf: requires s >= 0");
    if (!p.has_shadowing()) return s >= p.omega ? 1.0 : 0.0;
    if (s == 0.0) return 0.0;
    return sf::lower_inc_gamma_regularized(p.n, std::pow(p.phi_hat * s / p.omega, p.zeta));
}

double egk_snr_pdf(const EgkParams& p, double gamma, const QuadTolerance& tol) {
    if (!(gamma > 0.0)) throw std::domain_error("egk_snr_pdf: requires gamma > 0");
    // Deterministic shadowing: gamma = omega * G exactly.
    if (!p.has_shadowing()) return gg_pdf(p, gamma / p.omega) / p.omega;
    const double scale = p.phi * p.phi_hat / p.omega;
    const double mexp = p.m * p.xi;
    const double b = std::pow(scale * gamma, p.xi);
    const double tail = sf::ext_inc_gamma(p.n - mexp / p.zeta, 0.0, b, p.xi / p.zeta, tol);
    const double lpref = std::log(p.xi) + mexp * std::log(scale) + (mexp - 1.0) * std::log(gamma) -
                         sf::lgamma_fn(p.m) - sf::lgamma_fn(p.n);
    return std::exp(lpref) * tail;
}

double gg_recip_mgf(const EgkParams& p, double arg, const QuadTolerance& tol) {
    if (!(arg >= 0.0)) throw std::domain_error("gg_recip_mgf: requires p >= 0");
    if (arg == 0.0) return 1.0;
    return sf::ext_inc_gamma(p.m, 0.0, p.phi * arg, 1.0 / p.xi, tol) / sf::gamma_fn(p.m);
}

double gg_recip_mgf_deriv(const EgkParams& p, double arg, const QuadTolerance& tol) {
    if (!(arg > 0.0)) {
        if (arg == 0.0 && p.m * p.xi <= 1.0)
            throw std::domain_error("gg_recip_mgf_deriv: divergent at p = 0 for m*xi <= 1");
        if (arg == 0.0)
            return -p.phi * sf::gamma_fn(p.m - 1.0 / p.xi) / sf::gamma_fn(p.m);
        throw std::domain_error("gg_recip_mgf_deriv: requires p >= 0");
    }
    return -p.phi * sf::ext_inc_gamma(p.m - 1.0 / p.xi, 0.0, p.phi * arg, 1.0 / p.xi, tol) /
           sf::gamma_fn(p.m);
}

double egk_recip_mgf(const EgkParams& p, double arg, const QuadTolerance& tol) {
    if (!(arg >= 0.0)) throw std::domain_error("egk_recip_mgf: requires p >= 0");
    if (arg == 0.0) return 1.0;
    if (!p.has_shadowing()) return gg_recip_mgf(p, arg / p.omega, tol);

    auto integrand = [&](double s) {
        if (!(s > 0.0)) return 0.0;
        const double w = shadow_pdf(p, s);
        return w > 0.0 ? w * gg_recip_mgf(p, arg / s, tol) : 0.0;
    };
    const QuadResult r = integrate_to_infinity(integrand, 0.0, tol);
    if (!r.converged)
        throw QuadratureError("egk_recip_mgf: shadow mixture quadrature did not converge", r.value,
                              r.error_estimate);
    return r.value;
}

double sample_gg(const EgkParams& p, RngStream& rng) {
    const double w = rng.next_gamma(p.m);
    return (p.xi == 1.0 ? w : std::pow(w, 1.0 / p.xi)) / p.phi;
}

double sample_shadow(const EgkParams& p, RngStream& rng) {
    if (!p.has_shadowing()) return p.omega;
    const double v = rng.next_gamma(p.n);
    return (p.omega / p.phi_hat) * (p.zeta == 1.0 ? v : std::pow(v, 1.0 / p.zeta));
}

double sample_egk_snr(const EgkParams& p, RngStream& rng) {
    return sample_shadow(p, rng) * sample_gg(p, rng);
}

}  // namespace relayperf::fading
