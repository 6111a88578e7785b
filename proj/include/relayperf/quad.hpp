#ifndef RELAYPERF_QUAD_HPP
#define RELAYPERF_QUAD_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace relayperf {

/// Tolerances and subdivision budget for one adaptive integration.
struct QuadTolerance {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 200;

    QuadTolerance() = default;
    QuadTolerance(double rel, double abs, int max_subdiv);
};

/// Outcome of an adaptive integration: value, error estimate, and whether
/// the requested tolerance was met within the subdivision budget.
struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
    int subdivisions = 0;
};

/// Thrown when a quadrature fails to converge and the caller asked for a
/// hard failure; carries the achieved estimate.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double value, double error_estimate)
        : std::runtime_error(what), value(value), error_estimate(error_estimate) {}
    double value;
    double error_estimate;
};

/// Adaptive Gauss-Kronrod (G7,K15) on a finite interval. Worst-error-first
/// segment refinement until |err| <= max(abs_tol, rel_tol*|value|) or the
/// subdivision budget is exhausted.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              const QuadTolerance& tol);

/// Same refinement driven by a two-component integrand; both components must
/// satisfy the tolerance. Used to integrate a weighted kernel and its
/// normalization in one pass over shared abscissas.
struct QuadResult2 {
    std::array<double, 2> value{0.0, 0.0};
    std::array<double, 2> error_estimate{0.0, 0.0};
    bool converged = false;
    int subdivisions = 0;
};
QuadResult2 integrate_adaptive2(const std::function<std::array<double, 2>(double)>& f, double a,
                                double b, const QuadTolerance& tol);

/// Integral over [a, inf) via the rational map x = a + t/(1-t). The integrand
/// must decay fast enough that the transformed integrand vanishes at t -> 1.
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 const QuadTolerance& tol);

}  // namespace relayperf

#endif
