#ifndef RELAYPERF_SPECFUN_HPP
#define RELAYPERF_SPECFUN_HPP

#include "relayperf/quad.hpp"

namespace relayperf::specfun {

/// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Gamma function, positive arguments only.
double gamma_fn(double x);

/// log(Gamma(x)), positive arguments only. Needed where Gamma ratios with
/// large arguments would overflow.
double lgamma_fn(double x);

/// Upper incomplete gamma Gamma(b, x) = int_x^inf t^{b-1} e^{-t} dt, b > 0.
double upper_inc_gamma(double b, double x);

/// Regularized lower incomplete gamma P(n, x) = gamma(n, x)/Gamma(n) in [0,1].
double lower_inc_gamma_regularized(double n, double x);

/// Inverse of the above in x: quantiles of the unit-scale gamma law.
double inverse_lower_inc_gamma(double n, double q);

/// Extended incomplete gamma
///   Gamma(alpha, x, b, beta) = int_x^inf r^{alpha-1} exp(-r - b r^{-beta}) dr.
/// For b > 0 the exp(-b r^{-beta}) factor regularizes the origin, so alpha may
/// be any real. For b = 0 the integral reduces to the (generalized) upper
/// incomplete gamma and requires alpha > 0 when x = 0.
/// beta = 1 with x = 0 evaluates through 2 b^{alpha/2} K_alpha(2 sqrt(b)).
double ext_inc_gamma(double alpha, double x, double b, double beta,
                     const QuadTolerance& tol = QuadTolerance());

/// Same integral evaluated by quadrature unconditionally (no Bessel-K
/// shortcut at beta = 1). Kept public so the closed form and the defining
/// integral can be checked against each other.
double ext_inc_gamma_quad(double alpha, double x, double b, double beta,
                          const QuadTolerance& tol = QuadTolerance());

/// Bessel functions of the first kind, orders 0 and 1, x >= 0.
double bessel_j0(double x);
double bessel_j1(double x);

/// k-th positive zero of J0 (k >= 1).
double bessel_j0_zero(int k);

/// Modified Bessel function of the second kind, real order (K_nu = K_{-nu}).
double bessel_k(double nu, double x);

/// Sine integral Si(x) = int_0^x sin(u)/u du, x >= 0.
double sine_integral(double x);

/// Exponential integral Ei(x) for x < 0 (strictly negative there).
double exp_integral_ei(double x);

}  // namespace relayperf::specfun

#endif
