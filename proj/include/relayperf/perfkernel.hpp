#ifndef RELAYPERF_PERFKERNEL_HPP
#define RELAYPERF_PERFKERNEL_HPP

#include <string>

namespace relayperf::perfkernel {

enum class PerfKind {
    BepCoherent,     // b = 1/2 detection
    BepNoncoherent,  // b = 1 detection
    BepWojnar,       // dispatches on b in {1/2, 1}
    Capacity,
    Mgf,
    Moment,
};

/// The (a, b, c, n) parameterization selecting ABEP / capacity / MGF / moment
/// semantics. Construct through the factories; they pin the parameter
/// combinations that have closed-form kernels.
struct PerfSpec {
    PerfKind kind;
    double a = 1.0;        // modulation constant, or the MGF argument p
    double b = 1.0;        // detection constant (BEP kinds)
    double c = 1.0;        // overall scale (capacity: W/log 2)
    int n_param = 1;
    double bandwidth_w = 1.0;  // capacity only
    int moment_k = 0;          // moment only

    static PerfSpec bep_coherent(double a);     // BFSK a=1/2, BPSK a=1
    static PerfSpec bep_noncoherent(double a);  // NCFSK a=1/2, BDPSK a=1
    static PerfSpec bep_wojnar(double a, double b);
    static PerfSpec capacity(double bandwidth_w);
    static PerfSpec mgf(double p);
    static PerfSpec moment(int k);

    std::string name() const;
};

/// Auxiliary kernel Z(u) of the unified average-performance integral,
/// realized through its closed-form special cases.
double z_kernel(const PerfSpec& spec, double u);

/// (-1)^k d^k/dp^k J0(2 sqrt(p u)) at p = 0, i.e. u^k / k!: the moment kernel.
double z_mgf_derivative_at_zero(int k, double u);

/// Conditional per-sample performance at SNR gamma; the quantity the Monte
/// Carlo harness averages.
double conditional_perf(const PerfSpec& spec, double gamma);

}  // namespace relayperf::perfkernel

#endif
