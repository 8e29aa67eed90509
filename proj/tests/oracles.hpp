#pragma once

// Independent reference computations for the tests. Nothing here calls the
// closed forms under test.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// Plain bisection to full double resolution; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 2000; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Positive root of (delta - Delta) sqrt(delta) = 2 beta^{3/2} by bisection.
inline double bound_state_root(double Delta, double beta) {
    const double target = 2.0 * std::pow(beta, 1.5);
    auto f = [&](double d) { return (d - Delta) * std::sqrt(d) - target; };
    const double lo = std::max(Delta, 0.0);
    double hi = lo + beta;
    while (f(hi) < 0.0) hi = lo + 2.0 * (hi - lo);
    return bisect(f, lo, hi);
}

/// delta = 2 Delta / 3 + beta (lambda_+^{1/3} + lambda_-^{1/3}),
/// lambda_pm = (1 +- sqrt(1 - Delta^3 / (27 beta^3)))^2, with principal complex roots.
inline double bound_state_radical_formula(double Delta, double beta) {
    using cd = std::complex<double>;
    const cd root = std::sqrt(cd(1.0 - Delta * Delta * Delta / (27.0 * beta * beta * beta), 0.0));
    const cd lp = (1.0 + root) * (1.0 + root);
    const cd lm = (1.0 - root) * (1.0 - root);
    auto cbrt = [](cd z) { return z == cd(0.0) ? cd(0.0) : std::pow(z, 1.0 / 3.0); };
    return (2.0 * Delta / 3.0 + beta * (cbrt(lp) + cbrt(lm))).real();
}

/// K0(x) = int_0^inf exp(-x cosh t) dt.
inline double bessel_k0(double x) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate([x](double t) { return std::exp(-x * std::cosh(t)); }, 0.0,
                                std::numeric_limits<double>::infinity());
}

/// Gamma(s) = int_0^inf t^{s-1} e^{-t} dt, as (1/s) int_0^inf exp(-u^{1/s}) du.
inline double gamma_function(double s) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate([s](double u) { return std::exp(-std::pow(u, 1.0 / s)); }, 0.0,
                                std::numeric_limits<double>::infinity()) /
           s;
}

/// int_{-inf}^{inf} dq cos(q z) / (Delta + c q^2): the photon sum over a quadratic
/// band at zero loss, before the coupling prefactor.
inline double band_integral_1d(double Delta, double c, double z) {
    auto f = [&](double q) { return 1.0 / (Delta + c * q * q); };
    if (z == 0.0) {
        boost::math::quadrature::exp_sinh<double> integrator;
        return 2.0 * integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    }
    boost::math::quadrature::ooura_fourier_cos<double> integrator;
    return 2.0 * integrator.integrate(f, std::abs(z)).first;
}

/// (1/pi^2) int d^2q cos(q . r) / (1 + q^2) for |r| = u, by nested quadrature
/// (inner q_y numerically, outer q_x as a Fourier-cosine integral).
inline double band_integral_2d(double u) {
    boost::math::quadrature::exp_sinh<double> inner;
    auto column = [&](double qx) {
        const double a = 1.0 + qx * qx;
        return 2.0 * inner.integrate([a](double qy) { return 1.0 / (a + qy * qy); }, 0.0,
                                     std::numeric_limits<double>::infinity());
    };
    boost::math::quadrature::ooura_fourier_cos<double> outer(1e-12);
    return 2.0 * outer.integrate(column, u).first / (std::numbers::pi * std::numbers::pi);
}

/// exp(-i H t) psi0 by eigendecomposition of the (possibly non-Hermitian) H.
inline Eigen::VectorXcd propagate(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& psi0, double t) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H);
    const Eigen::MatrixXcd& V = es.eigenvectors();
    const Eigen::VectorXcd c = V.partialPivLu().solve(psi0);
    Eigen::VectorXcd phases(H.rows());
    for (Eigen::Index k = 0; k < H.rows(); ++k)
        phases(k) = std::exp(std::complex<double>(0.0, -1.0) * es.eigenvalues()(k) * t);
    return V * phases.cwiseProduct(c);
}

/// Sorted eigenvalues of a Hermitian matrix.
inline Eigen::VectorXd hermitian_spectrum(const Eigen::MatrixXcd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    return es.eigenvalues();
}

/// Deterministic generator for property tests.
struct Sampler {
    std::mt19937_64 rng;
    explicit Sampler(std::uint64_t seed) : rng(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    double sign() { return uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0; }
};

} // namespace oracle
