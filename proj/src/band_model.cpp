#include "bandedge/band_model.hpp"

#include "bandedge/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace bandedge {

using detail::require;

namespace {

bool finite(double x) { return std::isfinite(x); }

} // namespace

double BandEdge::dispersion(double k) const {
    const double q = (k - k0) / k0;
    return omega_b * (1.0 - alpha * q * q);
}

void BandEdge::validate() const {
    require(finite(omega_b) && finite(alpha) && finite(k0) && finite(a),
            "band edge parameters must be finite");
    require(omega_b > 0.0, "band edge: omega_b must be positive");
    require(alpha != 0.0, "band edge: alpha must be non-zero");
    require(k0 > 0.0, "band edge: k0 must be positive");
    require(a > 0.0, "band edge: lattice constant must be positive");
}

BandEdge BandEdge::at_zone_boundary(double omega_b, double alpha, double a) {
    BandEdge band{omega_b, alpha, std::numbers::pi / a, a};
    band.validate();
    return band;
}

double beta_from_g_cell(const BandEdge& band, double g_cell, double bloch_amplitude) {
    band.validate();
    require(finite(g_cell) && g_cell >= 0.0, "g_cell must be finite and non-negative");
    const double u2 = bloch_amplitude * bloch_amplitude;
    const double beta32 = g_cell * g_cell * band.a * u2 * band.k0 /
                          (4.0 * std::sqrt(std::abs(band.alpha) * band.omega_b));
    return std::pow(beta32, 2.0 / 3.0);
}

double g_cell_from_beta(const BandEdge& band, double beta, double bloch_amplitude) {
    band.validate();
    require(finite(beta) && beta > 0.0, "beta must be finite and positive");
    require(bloch_amplitude > 0.0, "Bloch amplitude must be positive");
    const double beta32 = std::pow(beta, 1.5);
    const double u2 = bloch_amplitude * bloch_amplitude;
    return std::sqrt(beta32 * 4.0 * std::sqrt(std::abs(band.alpha) * band.omega_b) /
                     (band.a * u2 * band.k0));
}

void AtomCoupling::validate() const {
    require(finite(beta) && finite(Delta) && finite(gamma) && finite(g_cell) &&
                finite(bloch_amplitude),
            "coupling parameters must be finite");
    require(beta > 0.0, "coupling: beta must be positive");
    require(gamma >= 0.0, "coupling: gamma must be non-negative");
    require(g_cell >= 0.0, "coupling: g_cell must be non-negative");
    require(bloch_amplitude > 0.0, "coupling: Bloch amplitude must be positive");
}

AtomCoupling AtomCoupling::from_beta(const BandEdge& band, double beta, double Delta,
                                     double gamma, double bloch_amplitude) {
    AtomCoupling c{beta, Delta, gamma, g_cell_from_beta(band, beta, bloch_amplitude),
                   bloch_amplitude};
    c.validate();
    return c;
}

AtomCoupling AtomCoupling::from_g_cell(const BandEdge& band, double g_cell, double Delta,
                                       double gamma, double bloch_amplitude) {
    AtomCoupling c{beta_from_g_cell(band, g_cell, bloch_amplitude), Delta, gamma, g_cell,
                   bloch_amplitude};
    c.validate();
    return c;
}

AtomCoupling AtomCoupling::from_both(const BandEdge& band, double beta, double g_cell,
                                     double Delta, double gamma, double bloch_amplitude,
                                     double tolerance) {
    const double implied = beta_from_g_cell(band, g_cell, bloch_amplitude);
    const double mismatch = std::abs(implied - beta) / beta;
    if (!(mismatch <= tolerance)) {
        throw InvalidParameter("beta and g_cell describe different atoms: g_cell implies beta = " +
                               std::to_string(implied) + ", given " + std::to_string(beta) +
                               " (relative mismatch " + std::to_string(mismatch) + ")");
    }
    AtomCoupling c{beta, Delta, gamma, g_cell, bloch_amplitude};
    c.validate();
    return c;
}

double solve_delta_explicit(double Delta, double beta) {
    require(finite(Delta) && finite(beta), "solve_delta: non-finite input");
    require(beta > 0.0, "solve_delta: beta must be positive");

    // x = sqrt(delta) solves x^3 - Delta x - 2 beta^(3/2) = 0. Work in units of
    // beta so that the branch arguments are O(1) numbers.
    const double d = Delta / beta;
    double x = 0.0;
    if (d == 0.0) {
        x = std::cbrt(2.0);
    } else if (d < 0.0) {
        const double p = -d;
        const double arg = (3.0 / p) * std::sqrt(3.0 / p);
        x = 2.0 * std::sqrt(p / 3.0) * std::sinh(std::asinh(arg) / 3.0);
    } else {
        const double arg = 3.0 * std::sqrt(3.0) / (d * std::sqrt(d));
        const double scale = 2.0 * std::sqrt(d / 3.0);
        if (arg >= 1.0) {
            x = scale * std::cosh(std::acosh(arg) / 3.0);
        } else {
            x = scale * std::cos(std::acos(arg) / 3.0);
        }
    }
    return beta * x * x;
}

double solve_delta_bracketed(double Delta, double beta) {
    require(finite(Delta) && finite(beta), "solve_delta: non-finite input");
    require(beta > 0.0, "solve_delta: beta must be positive");

    const double d = Delta / beta;
    auto f = [d](double delta) { return (delta - d) * std::sqrt(delta) - 2.0; };
    const double lo = std::max(d, 0.0);
    const double hi = lo + std::cbrt(4.0);
    if (f(lo) == 0.0) return beta * lo;

    std::uintmax_t max_iter = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, boost::math::tools::eps_tolerance<double>(), max_iter);
    if (max_iter >= 200) throw NumericalFailure("solve_delta: bracketed root did not converge");
    return beta * 0.5 * (a + b);
}

double solve_delta(const BandEdge& band, const AtomCoupling& coupling) {
    band.validate();
    coupling.validate();
    if (band.is_lower_edge()) return solve_delta_explicit(coupling.Delta, coupling.beta);
    return -solve_delta_explicit(-coupling.Delta, coupling.beta);
}

double root_residual(double delta, double Delta, double beta) {
    const double target = 2.0 * std::pow(beta, 1.5);
    return std::abs((delta - Delta) * std::sqrt(delta) - target) / target;
}

double MixingAngles::theta() const { return std::atan2(sin_theta, cos_theta); }

MixingAngles mixing_angles(double delta, double beta) {
    require(finite(delta) && finite(beta), "mixing_angles: non-finite input");
    require(delta > 0.0 && beta > 0.0, "mixing_angles: delta and beta must be positive");
    const double ratio = std::pow(beta / delta, 1.5);
    return {1.0 / std::sqrt(1.0 + ratio), 1.0 / std::sqrt(1.0 + 1.0 / ratio)};
}

double decay_length(const BandEdge& band, double delta) {
    band.validate();
    require(finite(delta) && delta != 0.0, "decay_length: delta must be finite and non-zero");
    const double radicand = band.alpha * band.omega_b / delta;
    if (!(radicand > 0.0)) {
        throw InvalidParameter(
            "decay_length: detuning lies inside the band for this edge (alpha and delta "
            "have opposite signs)");
    }
    return std::sqrt(radicand) / band.k0;
}

BoundState effective_cavity(const BandEdge& band, const AtomCoupling& coupling) {
    BoundState s;
    s.delta = solve_delta(band, coupling);
    s.L = decay_length(band, s.delta);
    s.angles = mixing_angles(std::abs(s.delta), coupling.beta);
    s.gbar_c = coupling.g_cell * std::sqrt(band.a / s.L);
    s.omega_c_eff = band.omega_b - s.delta;
    s.Delta_c_eff = coupling.Delta + s.delta;
    s.validity = std::sqrt(s.delta / (band.alpha * band.omega_b));
    return s;
}

BlochFunction plane_wave_bloch(const BandEdge& band, double amplitude) {
    const double k0 = band.k0;
    return [k0, amplitude](double z) { return std::polar(amplitude, k0 * z); };
}

std::complex<double> photon_mode_profile(const BoundState& state, const BlochFunction& bloch,
                                         double z) {
    require(state.L > 0.0, "photon_mode_profile: L must be positive");
    const double envelope = std::sqrt(2.0 * std::numbers::pi / state.L) * std::exp(-std::abs(z) / state.L);
    return envelope * bloch(z);
}

double mode_weight(const BoundState& state, const BandEdge& band, double k) {
    require(state.delta != 0.0, "mode_weight: delta must be non-zero");
    const double c = std::abs(band.curvature());
    const double d = std::abs(state.delta);
    const double q = k - band.k0;
    const double denom = d + c * q * q;
    const double norm = 2.0 * d * std::sqrt(d) * std::sqrt(c) / std::numbers::pi;
    return norm / (denom * denom);
}

double mode_weight_half_width(const BoundState& state, const BandEdge& band) {
    return std::sqrt(state.delta / (band.alpha * band.omega_b)) * band.k0;
}

} // namespace bandedge
