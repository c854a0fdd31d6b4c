// SPDX-License-Identifier: Apache-2.0
#include "mfso/quadrature.hpp"

#include "mfso/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>

namespace mfso::quad {

double integrate(const Integrand& f, double a, double b, double rel_tol)
{
    if (a == b)
        return 0.0;
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 8, rel_tol, &err);
    // algebraic endpoint behaviour defeats bisection; tanh-sinh handles it
    if (std::isfinite(v) && !(err <= rel_tol * std::fabs(v)) && err > 0.0) {
        thread_local boost::math::quadrature::tanh_sinh<double> ts;
        double t_err = 0.0;
        double t = ts.integrate(f, a, b, rel_tol, &t_err);
        if (std::isfinite(t) && t_err < err)
            v = t;
    }
    if (!std::isfinite(v))
        throw NonConvergenceError("quadrature: non-finite integral");
    return v;
}

double integrate_panels(const Integrand& f, const std::vector<double>& points, double rel_tol)
{
    std::vector<double> p(points);
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    double s = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i)
        s += integrate(f, p[i - 1], p[i], rel_tol);
    return s;
}

double integrate_singular(const Integrand& f, double a, double b, double rel_tol)
{
    if (a == b)
        return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    double v = ts.integrate(f, a, b, rel_tol);
    if (!std::isfinite(v))
        throw NonConvergenceError("quadrature: non-finite integral");
    return v;
}

double integrate_to_inf(const Integrand& f, double a, double rel_tol)
{
    thread_local boost::math::quadrature::exp_sinh<double> es;
    auto g = [&](double t) { return f(a + t); };
    double v = es.integrate(g, rel_tol);
    if (!std::isfinite(v))
        throw NonConvergenceError("quadrature: non-finite integral");
    return v;
}

} // namespace mfso::quad
