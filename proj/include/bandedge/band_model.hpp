#pragma once

// Single-atom bound state near a photonic band edge and its effective-cavity
// description.
//
// All frequencies are angular (rad/s, or units of omega_b in dimensionless
// runs); lengths share one unit with the lattice constant. Every formula here
// is homogeneous, so the same code serves both unit systems.
//
// Sign convention: alpha > 0 is a lower band edge (gap above, delta > 0);
// alpha < 0 is an upper band edge (gap below). For an upper edge the
// detunings Delta and delta are negative and every closed form below keeps
// its lower-edge shape with signed quantities.

#include <complex>
#include <functional>

namespace bandedge {

struct BandEdge {
    double omega_b = 0.0; ///< band-edge angular frequency
    double alpha = 0.0;   ///< dimensionless curvature
    double k0 = 0.0;      ///< band-edge wavevector
    double a = 0.0;       ///< lattice constant

    [[nodiscard]] bool is_lower_edge() const { return alpha > 0.0; }
    /// Curvature scale alpha*omega_b/k0^2 of the quadratic dispersion.
    [[nodiscard]] double curvature() const { return alpha * omega_b / (k0 * k0); }
    /// Dispersion omega_k = omega_b (1 - alpha (k - k0)^2 / k0^2).
    [[nodiscard]] double dispersion(double k) const;

    void validate() const;

    /// Lattice-site band edge k0 = pi / a.
    static BandEdge at_zone_boundary(double omega_b, double alpha, double a);
};

/// Coupling of one atom to the band. beta and g_cell describe the same atom
/// and are kept mutually consistent by the factories.
struct AtomCoupling {
    double beta = 0.0;            ///< bound-state coupling scale
    double Delta = 0.0;           ///< omega_a - omega_b
    double gamma = 0.0;           ///< free-space emission rate
    double g_cell = 0.0;          ///< per-unit-cell coupling, gbar_c = g_cell sqrt(a/L)
    double bloch_amplitude = 1.0; ///< |u_k0| at the atom

    static AtomCoupling from_beta(const BandEdge& band, double beta, double Delta,
                                  double gamma, double bloch_amplitude = 1.0);
    static AtomCoupling from_g_cell(const BandEdge& band, double g_cell, double Delta,
                                    double gamma, double bloch_amplitude = 1.0);
    /// Both parametrizations given: throws InvalidParameter when they disagree
    /// by more than `tolerance` (relative, on beta).
    static AtomCoupling from_both(const BandEdge& band, double beta, double g_cell,
                                  double Delta, double gamma,
                                  double bloch_amplitude = 1.0, double tolerance = 1e-6);

    void validate() const;
};

/// beta = (pi g^2 |u|^2 k0 / sqrt(4 |alpha| omega_b))^(2/3) with g^2 = g_cell^2 a / (2 pi).
double beta_from_g_cell(const BandEdge& band, double g_cell, double bloch_amplitude = 1.0);
double g_cell_from_beta(const BandEdge& band, double beta, double bloch_amplitude = 1.0);

struct MixingAngles {
    double cos_theta = 0.0;
    double sin_theta = 0.0;

    [[nodiscard]] double theta() const;
    [[nodiscard]] double excited_population() const { return cos_theta * cos_theta; }
    [[nodiscard]] double photon_population() const { return sin_theta * sin_theta; }
};

struct BoundState {
    double delta = 0.0;       ///< omega - omega_b (signed by edge)
    double L = 0.0;           ///< photon-cloud decay length
    MixingAngles angles;
    double gbar_c = 0.0;      ///< effective cavity coupling
    double omega_c_eff = 0.0; ///< omega_b - delta
    double Delta_c_eff = 0.0; ///< Delta + delta
    double validity = 0.0;    ///< sqrt(delta / (alpha omega_b)); the model needs this << 1

    [[nodiscard]] double theta() const { return angles.theta(); }
    [[nodiscard]] bool is_valid(double threshold = 0.1) const { return validity < threshold; }
};

/// Positive root of (delta - Delta) sqrt(delta) = 2 beta^(3/2) for a lower
/// band edge, from the closed form of the depressed cubic in sqrt(delta).
/// Uses the hyperbolic branch for Delta < 3 beta and the trigonometric branch
/// above, so no complex cube roots are needed.
double solve_delta_explicit(double Delta, double beta);

/// Same root by bracketed TOMS 748 iteration on the original equation.
double solve_delta_bracketed(double Delta, double beta);

/// Signed bound-state detuning for either band edge (explicit route).
double solve_delta(const BandEdge& band, const AtomCoupling& coupling);

/// Relative residual |(delta - Delta) sqrt(delta) - 2 beta^(3/2)| / (2 beta^(3/2))
/// in lower-edge orientation.
double root_residual(double delta, double Delta, double beta);

MixingAngles mixing_angles(double delta, double beta);

/// L = sqrt(alpha omega_b / delta) / k0; throws when alpha and delta disagree in sign.
double decay_length(const BandEdge& band, double delta);

BoundState effective_cavity(const BandEdge& band, const AtomCoupling& coupling);

/// Bloch mode E_k0(z) sampled at arbitrary z.
using BlochFunction = std::function<std::complex<double>(double)>;

/// |u| e^{i k0 z}: at lattice sites of a k0 = pi/a edge this is |u| (-1)^{z/a}.
BlochFunction plane_wave_bloch(const BandEdge& band, double amplitude = 1.0);

/// phi(z) = sqrt(2 pi / L) e^{-|z|/L} E_k0(z)
std::complex<double> photon_mode_profile(const BoundState& state, const BlochFunction& bloch,
                                         double z);

/// Normalized photon weight density |c_k|^2, a squared Lorentzian in k centred
/// at k0 with integral one over the real line.
double mode_weight(const BoundState& state, const BandEdge& band, double k);

/// Half width at half maximum of |c_k|: sqrt(delta / (alpha omega_b)) k0.
double mode_weight_half_width(const BoundState& state, const BandEdge& band);

} // namespace bandedge
