// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace mfso {

struct SeriesControl {
    double abs_tol = 1e-12;
    int max_terms = 500;

    // Throws DomainError if abs_tol <= 0 or max_terms < 1.
    void validate() const;
};

namespace specfun {

double erf(double x);

// ln Gamma(x), x > 0.
double log_gamma(double x);

// Lower incomplete gamma gamma(a, x) = int_0^x t^(a-1) e^-t dt.
// Negative x is accepted for integer a (the value is real there).
double lower_inc_gamma(double a, double x);

// x^-a gamma(a, x) = int_0^1 u^(a-1) e^(-x u) du. Entire in x, so any real
// x is valid for any a > 0. Used wherever gamma(a, x) appears next to x^-a.
double scaled_lower_gamma(double a, double x);

// Regularized P(a, x) and Q(a, x) = 1 - P(a, x) for x >= 0.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double bessel_i0(double x);

// e^-|x| I0(x); never overflows.
double bessel_i0_scaled(double x);

// Gauss hypergeometric 2F1(a, b; c; x) for |x| < 1.
double hyp2f1(double a, double b, double c, double x);

// Generalized binomial coefficient C(k_minus_1, n).
double gen_binomial(double k_minus_1, int n);

// int_alpha^beta gamma(a, b x) e^(-c x) x^k dx by the finite i-sum identity.
double gamma_exp_moment(double a, double b, double c, int k, double alpha, double beta);

// e^log_scale * b^-a * int_0^Y gamma(a, b x) e^(-c x) x^p dx, written through
// scaled_lower_gamma so that b may be negative or tiny:
//   sum_i p!/(i! c^(p-i+1)) Y^(a+i) [g*(a+i, (b+c)Y) - g*(a, bY) e^(-cY)].
// log_scale keeps large Y^(a+i) factors in range when the caller multiplies by a
// small prefactor anyway. The sum of absolute term magnitudes goes to *abs_sum.
double scaled_gamma_exp_moment(double a, double b, double c, int p, double Y, double log_scale = 0.0,
                               double* abs_sum = nullptr);

} // namespace specfun
} // namespace mfso
