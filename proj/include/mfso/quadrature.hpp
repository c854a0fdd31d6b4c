// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

namespace mfso::quad {

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod on [a, b].
double integrate(const Integrand& f, double a, double b, double rel_tol = 1e-12);

// Adaptive Gauss-Kronrod over consecutive panels of a sorted breakpoint list.
double integrate_panels(const Integrand& f, const std::vector<double>& points, double rel_tol = 1e-12);

// Double-exponential rule, tolerant of integrable endpoint singularities.
double integrate_singular(const Integrand& f, double a, double b, double rel_tol = 1e-12);

// int_a^inf f, for f decaying at infinity.
double integrate_to_inf(const Integrand& f, double a, double rel_tol = 1e-12);

} // namespace mfso::quad
