#include "relayperf/perfkernel.hpp"

#include "relayperf/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace relayperf::perfkernel {

namespace sf = relayperf::specfun;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kLn2 = 0.69314718055994530941723212145817657;

bool is_half_or_one(double v) { return v == 0.5 || v == 1.0; }

// log(u) - Ei(-u) + C, with the cancellation-free series
// sum_{k>=1} (-1)^{k+1} u^k / (k k!) near the origin.
double capacity_core(double u) {
    if (u == 0.0) return 0.0;
    if (u < 1e-3) {
        double term = u;  // k = 1
        double sum = u;
        for (int k = 2; k < 12; ++k) {
            term *= -u / k;
            sum += term / k;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::log(u) - sf::exp_integral_ei(-u) + sf::kEulerGamma;
}

}  // namespace

PerfSpec PerfSpec::bep_coherent(double a) {
    if (!is_half_or_one(a)) throw std::domain_error("PerfSpec: BEP requires a in {1/2, 1}");
    return {PerfKind::BepCoherent, a, 0.5, 1.0, 1, 1.0, 0};
}

PerfSpec PerfSpec::bep_noncoherent(double a) {
    if (!is_half_or_one(a)) throw std::domain_error("PerfSpec: BEP requires a in {1/2, 1}");
    return {PerfKind::BepNoncoherent, a, 1.0, 1.0, 1, 1.0, 0};
}

PerfSpec PerfSpec::bep_wojnar(double a, double b) {
    if (!is_half_or_one(a) || !is_half_or_one(b))
        throw std::domain_error("PerfSpec: Wojnar BEP requires a, b in {1/2, 1}");
    return {PerfKind::BepWojnar, a, b, 1.0, 1, 1.0, 0};
}

PerfSpec PerfSpec::capacity(double bandwidth_w) {
    if (!(bandwidth_w > 0.0)) throw std::domain_error("PerfSpec: bandwidth must be > 0");
    return {PerfKind::Capacity, 1.0, 1.0, bandwidth_w / kLn2, 2, bandwidth_w, 0};
}

PerfSpec PerfSpec::mgf(double p) {
    if (!(p > 0.0)) throw std::domain_error("PerfSpec: MGF argument p must be > 0");
    return {PerfKind::Mgf, p, 1.0, 2.0, 1, 1.0, 0};
}

PerfSpec PerfSpec::moment(int k) {
    if (k < 0) throw std::domain_error("PerfSpec: moment order must be >= 0");
    return {PerfKind::Moment, 1.0, 1.0, 1.0, 1, 1.0, k};
}

std::string PerfSpec::name() const {
    switch (kind) {
        case PerfKind::BepCoherent: return a == 1.0 ? "abep_bpsk" : "abep_bfsk";
        case PerfKind::BepNoncoherent: return a == 1.0 ? "abep_bdpsk" : "abep_ncfsk";
        case PerfKind::BepWojnar: return "abep_wojnar";
        case PerfKind::Capacity: return "capacity";
        case PerfKind::Mgf: return "mgf";
        case PerfKind::Moment: return "moment" + std::to_string(moment_k);
    }
    return "unknown";
}

double z_kernel(const PerfSpec& spec, double u) {
    if (!(u >= 0.0)) throw std::domain_error("z_kernel: requires u >= 0");
    switch (spec.kind) {
        case PerfKind::BepCoherent:
            return 0.5 - sf::sine_integral(2.0 * std::sqrt(spec.a * u)) / kPi;
        case PerfKind::BepNoncoherent:
            return 0.5 * sf::bessel_j0(2.0 * std::sqrt(spec.a * u));
        case PerfKind::BepWojnar:
            if (spec.b == 0.5) return 0.5 - sf::sine_integral(2.0 * std::sqrt(spec.a * u)) / kPi;
            if (spec.b == 1.0) return 0.5 * sf::bessel_j0(2.0 * std::sqrt(spec.a * u));
            throw std::domain_error("z_kernel: Wojnar kernel needs b in {1/2, 1}");
        case PerfKind::Capacity:
            return spec.c * capacity_core(u);
        case PerfKind::Mgf:
            return sf::bessel_j0(2.0 * std::sqrt(spec.a * u));
        case PerfKind::Moment:
            throw std::domain_error("z_kernel: moments use z_mgf_derivative_at_zero");
    }
    throw std::domain_error("z_kernel: unknown kind");
}

double z_mgf_derivative_at_zero(int k, double u) {
    if (k < 0) throw std::domain_error("z_mgf_derivative_at_zero: requires k >= 0");
    if (!(u >= 0.0)) throw std::domain_error("z_mgf_derivative_at_zero: requires u >= 0");
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v *= u / i;
    return v;
}

double conditional_perf(const PerfSpec& spec, double gamma) {
    if (!(gamma >= 0.0)) throw std::domain_error("conditional_perf: requires gamma >= 0");
    switch (spec.kind) {
        case PerfKind::BepCoherent:
            // Gamma(1/2, x)/(2 Gamma(1/2)) = erfc(sqrt(x))/2
            return 0.5 * std::erfc(std::sqrt(spec.a * gamma));
        case PerfKind::BepNoncoherent:
            return 0.5 * std::exp(-spec.a * gamma);
        case PerfKind::BepWojnar:
            if (spec.b == 0.5) return 0.5 * std::erfc(std::sqrt(spec.a * gamma));
            if (spec.b == 1.0) return 0.5 * std::exp(-spec.a * gamma);
            throw std::domain_error("conditional_perf: Wojnar BEP needs b in {1/2, 1}");
        case PerfKind::Capacity:
            return spec.bandwidth_w * std::log1p(gamma) / kLn2;
        case PerfKind::Mgf:
            return std::exp(-spec.a * gamma);
        case PerfKind::Moment: {
            double v = 1.0;
            for (int i = 0; i < spec.moment_k; ++i) v *= gamma;
            return v;
        }
    }
    throw std::domain_error("conditional_perf: unknown kind");
}

}  // namespace relayperf::perfkernel
