#pragma once

// Effective spin-exchange matrices mediated by atom-induced band-edge cavities.
//
// Every builder returns U_jl in angular-frequency units such that the
// Hamiltonian reads H = hbar sum_{j,l} U_jl S_j^dagger S_l, where S is the
// lowering operator of the relevant transition (sigma_ge for two-level atoms,
// the Raman spin operator for driven schemes).

#include "bandedge/band_model.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

namespace bandedge {

enum class CouplingKind { two_level_1d, two_level_2d, lambda_driven, four_level, multi_drive, mechanical };

const char* to_string(CouplingKind kind);

struct CouplingMatrix {
    Eigen::MatrixXcd values;
    CouplingKind kind = CouplingKind::two_level_1d;
    /// Regime warnings and flagged conventions (never errors).
    std::vector<std::string> warnings;

    [[nodiscard]] Eigen::Index size() const { return values.rows(); }
    /// max |U - U^dagger| / max |U|
    [[nodiscard]] double hermiticity_defect() const;
};

/// Atoms along a 1D waveguide; positions share the band's length unit.
struct AtomArray {
    std::vector<double> positions;
    std::vector<std::complex<double>> bloch_values;
    double gamma = 0.0;

    void validate() const;

    /// Atoms on the given lattice sites with the default plane-wave Bloch values.
    static AtomArray on_sites(const BandEdge& band, std::span<const int> sites, double gamma,
                              double bloch_amplitude = 1.0);
    /// Arbitrary positions with the default plane-wave Bloch values.
    static AtomArray at_positions(const BandEdge& band, std::vector<double> positions,
                                  double gamma, double bloch_amplitude = 1.0);
};

/// Atoms above a 2D photonic crystal.
struct PlanarAtomArray {
    std::vector<std::array<double, 2>> positions;
    std::vector<std::complex<double>> bloch_values;
    double gamma = 0.0;

    void validate() const;
};

/// Raman drive on |s>-|e> (Omega) and optionally |g>-|e'> (Omega' = Omega_prime e^{i phi}).
struct DriveField {
    double Omega = 0.0;
    double Omega_prime = 0.0;
    double delta_L = 0.0; ///< drive detuning from the atomic resonance
    double phi = 0.0;

    /// Delta_L = delta_L + omega_a - omega_b, the detuning that sets L.
    [[nodiscard]] double band_detuning(const AtomCoupling& coupling) const {
        return delta_L + coupling.Delta;
    }
};

/// Spin operator S = c_x sigma_x + c_y sigma_y carried by the four-level scheme.
struct SpinOperator {
    double x_coefficient = 0.0;
    double y_coefficient = 0.0;
};

/// Exponential envelope e^{-|z|/L}.
double exponential_kernel(double separation, double L);
/// 2D envelope (2/pi) K0(r / L).
double bessel_kernel(double r, double L);

/// U_jl = gbar_c^2 f(z_j, z_l) / (2 Delta) with gbar_c and L evaluated at Delta.
CouplingMatrix coupling_matrix_1d(const AtomArray& atoms, const BandEdge& band,
                                  const AtomCoupling& coupling);

/// Off-diagonal U_jl = gbar_c^2 (2/pi) K0(r_jl/L) E_j E_l^* / (2 Delta); the
/// divergent self term uses r_min = a/2 and is flagged in the warnings.
CouplingMatrix coupling_matrix_2d(const PlanarAtomArray& atoms, const BandEdge& band,
                                  const AtomCoupling& coupling);

struct DrivenCoupling {
    CouplingMatrix matrix;           ///< coefficients of S_j^dagger S_l
    double gamma_tilde = 0.0;        ///< |Omega|^2 gamma / delta_L^2
    double gamma_tilde_prime = 0.0;  ///< |Omega'|^2 gamma / delta_L^2
    double decay_length = 0.0;       ///< L at Delta_L
    double scale = 0.0;              ///< |Omega|^2 gbar_c^2 / (2 Delta_L delta_L^2)
};

DrivenCoupling driven_coupling_matrix(const AtomArray& atoms, const BandEdge& band,
                                      const AtomCoupling& coupling, const DriveField& drive);

/// S_j = 2 cos(phi/2) sigma_x - 2 sin(phi/2) sigma_y for Omega' = Omega e^{i phi}.
SpinOperator spin_rotation(const DriveField& drive);

/// Transverse-Ising descriptor of the four-level scheme with Omega' = Omega:
/// H = hbar omega_s sum sigma_z + hbar J sum_{j != l} sigma_x^j sigma_x^l f_jl.
struct IsingModel {
    double omega_s = 0.0;
    double coupling_J = 0.0; ///< 2 |Omega|^2 gbar_c^2 / (Delta_L delta_L^2)
    double decay_length = 0.0;
};

IsingModel transverse_ising(const BandEdge& band, const AtomCoupling& coupling,
                            const DriveField& drive, double omega_s);

/// Cooperativity of the Raman-dressed system: (Omega gbar_c / delta_L)^2 / (kappa_p gamma_tilde).
double driven_cooperativity(const BandEdge& band, const AtomCoupling& coupling,
                            const DriveField& drive, double kappa_p);

/// Element-wise sum of per-drive matrices; drives must have distinct delta_L.
CouplingMatrix multi_drive_sum(const AtomArray& atoms, const BandEdge& band,
                               const AtomCoupling& coupling, std::span<const DriveField> drives);

/// Spatial decay rate s = a / L(Delta_L) per lattice constant.
double rate_for_detuning(const BandEdge& band, double Delta_L);
/// Inverse of rate_for_detuning: Delta_L = alpha omega_b (s / (k0 a))^2.
double detuning_for_rate(const BandEdge& band, double rate);

/// Lambda-scheme drive at band detuning Delta_L whose matrix scale equals
/// weight * reference_scale.
DriveField drive_for_weight(const BandEdge& band, const AtomCoupling& coupling, double Delta_L,
                            double weight, double reference_scale);

/// Pair potentials U = |Omega|^2 gbar_c^2 f / (2 (omega_L - omega_b)(omega_L - omega_a)^2)
/// for a weak far-detuned drive at absolute frequency omega_L.
CouplingMatrix mechanical_potential(const AtomArray& atoms, const BandEdge& band,
                                    const AtomCoupling& coupling, double omega_L, double Omega);

} // namespace bandedge
