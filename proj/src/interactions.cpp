#include "bandedge/interactions.hpp"

#include "bandedge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace bandedge {

using detail::require;

namespace {

constexpr double kDriveRatioWarning = 0.3;
constexpr double kDispersiveRegime = 10.0;

std::string format_ratio(const char* what, double value) {
    std::ostringstream os;
    os << what << " = " << value;
    return os.str();
}

void require_in_gap(const BandEdge& band, double detuning, const char* who) {
    if (!(band.alpha * detuning > 0.0)) {
        throw InvalidParameter(std::string(who) +
                               ": detuning lies inside the band for this edge");
    }
}

double cavity_coupling(const BandEdge& band, const AtomCoupling& coupling, double L) {
    return coupling.g_cell * std::sqrt(band.a / L);
}

// U_jl = scale * e^{-|z_j - z_l|/L} E_j E_l^*. Each entry is an independent
// closed-form evaluation; conj symmetry holds exactly in IEEE arithmetic.
Eigen::MatrixXcd exponential_matrix(const AtomArray& atoms, double scale, double L) {
    const auto n = static_cast<Eigen::Index>(atoms.positions.size());
    Eigen::MatrixXcd U(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index l = 0; l < n; ++l) {
            const double f = exponential_kernel(atoms.positions[j] - atoms.positions[l], L);
            U(j, l) = scale * f * (atoms.bloch_values[j] * std::conj(atoms.bloch_values[l]));
        }
    }
    return U;
}

} // namespace

const char* to_string(CouplingKind kind) {
    switch (kind) {
    case CouplingKind::two_level_1d: return "two_level_1d";
    case CouplingKind::two_level_2d: return "two_level_2d";
    case CouplingKind::lambda_driven: return "lambda_driven";
    case CouplingKind::four_level: return "four_level";
    case CouplingKind::multi_drive: return "multi_drive";
    case CouplingKind::mechanical: return "mechanical";
    }
    return "unknown";
}

double CouplingMatrix::hermiticity_defect() const {
    const double scale = values.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (values - values.adjoint()).cwiseAbs().maxCoeff() / scale;
}

void AtomArray::validate() const {
    require(positions.size() == bloch_values.size(),
            "atom array: positions and Bloch values differ in length");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        require(std::isfinite(positions[i]), "atom array: non-finite position");
        require(std::isfinite(bloch_values[i].real()) && std::isfinite(bloch_values[i].imag()),
                "atom array: non-finite Bloch value");
    }
    require(std::isfinite(gamma) && gamma >= 0.0, "atom array: gamma must be non-negative");
}

AtomArray AtomArray::on_sites(const BandEdge& band, std::span<const int> sites, double gamma,
                              double bloch_amplitude) {
    std::vector<double> z;
    z.reserve(sites.size());
    for (int n : sites) z.push_back(n * band.a);
    return at_positions(band, std::move(z), gamma, bloch_amplitude);
}

AtomArray AtomArray::at_positions(const BandEdge& band, std::vector<double> positions,
                                  double gamma, double bloch_amplitude) {
    AtomArray atoms;
    const auto bloch = plane_wave_bloch(band, bloch_amplitude);
    atoms.bloch_values.reserve(positions.size());
    for (double z : positions) atoms.bloch_values.push_back(bloch(z));
    atoms.positions = std::move(positions);
    atoms.gamma = gamma;
    atoms.validate();
    return atoms;
}

void PlanarAtomArray::validate() const {
    require(positions.size() == bloch_values.size(),
            "planar atom array: positions and Bloch values differ in length");
    for (const auto& p : positions)
        require(std::isfinite(p[0]) && std::isfinite(p[1]), "planar atom array: non-finite position");
    for (const auto& e : bloch_values)
        require(std::isfinite(e.real()) && std::isfinite(e.imag()),
                "planar atom array: non-finite Bloch value");
}

double exponential_kernel(double separation, double L) { return std::exp(-std::abs(separation) / L); }

double bessel_kernel(double r, double L) {
    return (2.0 / std::numbers::pi) * std::cyl_bessel_k(0.0, r / L);
}

CouplingMatrix coupling_matrix_1d(const AtomArray& atoms, const BandEdge& band,
                                  const AtomCoupling& coupling) {
    band.validate();
    coupling.validate();
    atoms.validate();
    require_in_gap(band, coupling.Delta, "coupling_matrix_1d");

    CouplingMatrix out;
    out.kind = CouplingKind::two_level_1d;
    if (std::abs(coupling.Delta) < kDispersiveRegime * coupling.beta)
        out.warnings.push_back(format_ratio("dispersive regime violated: |Delta|/beta",
                                            std::abs(coupling.Delta) / coupling.beta));

    const double L = decay_length(band, coupling.Delta);
    const double g = cavity_coupling(band, coupling, L);
    out.values = exponential_matrix(atoms, g * g / (2.0 * coupling.Delta), L);
    return out;
}

CouplingMatrix coupling_matrix_2d(const PlanarAtomArray& atoms, const BandEdge& band,
                                  const AtomCoupling& coupling) {
    band.validate();
    coupling.validate();
    atoms.validate();
    require_in_gap(band, coupling.Delta, "coupling_matrix_2d");

    CouplingMatrix out;
    out.kind = CouplingKind::two_level_2d;
    if (std::abs(coupling.Delta) < kDispersiveRegime * coupling.beta)
        out.warnings.push_back(format_ratio("dispersive regime violated: |Delta|/beta",
                                            std::abs(coupling.Delta) / coupling.beta));
    out.warnings.emplace_back("diagonal self-energy regularized with r_min = a/2");

    const double L = decay_length(band, coupling.Delta);
    const double g = cavity_coupling(band, coupling, L);
    const double scale = g * g / (2.0 * coupling.Delta);
    const double r_min = 0.5 * band.a;

    const auto n = static_cast<Eigen::Index>(atoms.positions.size());
    out.values.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index l = 0; l < n; ++l) {
            double r = r_min;
            if (j != l) {
                r = std::hypot(atoms.positions[j][0] - atoms.positions[l][0],
                               atoms.positions[j][1] - atoms.positions[l][1]);
                if (r == 0.0)
                    throw InvalidParameter("coupling_matrix_2d: duplicate atom positions");
            }
            out.values(j, l) =
                scale * bessel_kernel(r, L) * (atoms.bloch_values[j] * std::conj(atoms.bloch_values[l]));
        }
    }
    return out;
}

DrivenCoupling driven_coupling_matrix(const AtomArray& atoms, const BandEdge& band,
                                      const AtomCoupling& coupling, const DriveField& drive) {
    band.validate();
    coupling.validate();
    atoms.validate();
    require(std::isfinite(drive.Omega) && std::isfinite(drive.Omega_prime) &&
                std::isfinite(drive.delta_L) && std::isfinite(drive.phi),
            "drive: non-finite parameter");
    require(drive.delta_L != 0.0, "driven_coupling_matrix: drive detuning delta_L must be non-zero");

    const double Delta_L = drive.band_detuning(coupling);
    require_in_gap(band, Delta_L, "driven_coupling_matrix");

    DrivenCoupling out;
    out.matrix.kind = drive.Omega_prime == 0.0 ? CouplingKind::lambda_driven : CouplingKind::four_level;

    const double drive_ratio = std::abs(drive.Omega / drive.delta_L);
    if (drive_ratio > kDriveRatioWarning)
        out.matrix.warnings.push_back(format_ratio("weak-drive regime violated: |Omega/delta_L|", drive_ratio));
    if (std::abs(drive.Omega_prime / drive.delta_L) > kDriveRatioWarning)
        out.matrix.warnings.push_back(format_ratio("weak-drive regime violated: |Omega'/delta_L|",
                                                   std::abs(drive.Omega_prime / drive.delta_L)));
    if (atoms.gamma / std::abs(drive.delta_L) > kDriveRatioWarning)
        out.matrix.warnings.push_back(format_ratio("gamma/|delta_L|", atoms.gamma / std::abs(drive.delta_L)));
    if (std::abs(Delta_L) < kDispersiveRegime * coupling.beta)
        out.matrix.warnings.push_back(
            format_ratio("dispersive regime violated: |Delta_L|/beta", std::abs(Delta_L) / coupling.beta));

    const double suppression = drive.Omega * drive.Omega / (drive.delta_L * drive.delta_L);
    out.decay_length = decay_length(band, Delta_L);
    const double g = cavity_coupling(band, coupling, out.decay_length);
    out.scale = suppression * g * g / (2.0 * Delta_L);
    out.matrix.values = exponential_matrix(atoms, out.scale, out.decay_length);
    out.gamma_tilde = suppression * atoms.gamma;
    out.gamma_tilde_prime = drive.Omega_prime * drive.Omega_prime * atoms.gamma / (drive.delta_L * drive.delta_L);
    return out;
}

SpinOperator spin_rotation(const DriveField& drive) {
    return {2.0 * std::cos(0.5 * drive.phi), -2.0 * std::sin(0.5 * drive.phi)};
}

IsingModel transverse_ising(const BandEdge& band, const AtomCoupling& coupling,
                            const DriveField& drive, double omega_s) {
    require(drive.delta_L != 0.0, "transverse_ising: delta_L must be non-zero");
    const double Delta_L = drive.band_detuning(coupling);
    require_in_gap(band, Delta_L, "transverse_ising");
    IsingModel model;
    model.omega_s = omega_s;
    model.decay_length = decay_length(band, Delta_L);
    const double g = cavity_coupling(band, coupling, model.decay_length);
    // S^dagger S = 4 sigma_x sigma_x for Omega' = Omega.
    model.coupling_J = 2.0 * drive.Omega * drive.Omega * g * g /
                       (Delta_L * drive.delta_L * drive.delta_L);
    return model;
}

double driven_cooperativity(const BandEdge& band, const AtomCoupling& coupling,
                            const DriveField& drive, double kappa_p) {
    require(kappa_p > 0.0 && coupling.gamma > 0.0, "driven_cooperativity: loss rates must be positive");
    require(drive.Omega != 0.0 && drive.delta_L != 0.0, "driven_cooperativity: drive must be on");
    const double Delta_L = drive.band_detuning(coupling);
    require_in_gap(band, Delta_L, "driven_cooperativity");
    const double L = decay_length(band, Delta_L);
    const double g_eff = drive.Omega * cavity_coupling(band, coupling, L) / drive.delta_L;
    const double gamma_tilde = drive.Omega * drive.Omega * coupling.gamma / (drive.delta_L * drive.delta_L);
    return g_eff * g_eff / (kappa_p * gamma_tilde);
}

CouplingMatrix multi_drive_sum(const AtomArray& atoms, const BandEdge& band,
                               const AtomCoupling& coupling, std::span<const DriveField> drives) {
    if (drives.empty()) throw InvalidParameter("multi_drive_sum: empty drive list");
    for (std::size_t i = 0; i < drives.size(); ++i)
        for (std::size_t j = i + 1; j < drives.size(); ++j)
            if (drives[i].delta_L == drives[j].delta_L)
                throw InvalidParameter("multi_drive_sum: drives must have distinct delta_L");

    CouplingMatrix out;
    out.kind = CouplingKind::multi_drive;
    const auto n = static_cast<Eigen::Index>(atoms.positions.size());
    out.values = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& drive : drives) {
        auto single = driven_coupling_matrix(atoms, band, coupling, drive);
        out.values += single.matrix.values;
        for (auto& w : single.matrix.warnings) out.warnings.push_back(std::move(w));
    }
    return out;
}

double rate_for_detuning(const BandEdge& band, double Delta_L) {
    return band.a / decay_length(band, Delta_L);
}

double detuning_for_rate(const BandEdge& band, double rate) {
    band.validate();
    require(std::isfinite(rate) && rate > 0.0, "detuning_for_rate: rate must be positive");
    const double q = rate / (band.k0 * band.a);
    return band.alpha * band.omega_b * q * q;
}

DriveField drive_for_weight(const BandEdge& band, const AtomCoupling& coupling, double Delta_L,
                            double weight, double reference_scale) {
    require_in_gap(band, Delta_L, "drive_for_weight");
    const double L = decay_length(band, Delta_L);
    const double g = cavity_coupling(band, coupling, L);
    const double ratio = weight * reference_scale * 2.0 * Delta_L / (g * g);
    require(ratio >= 0.0, "drive_for_weight: weight sign cannot be realized at this detuning");
    DriveField drive;
    drive.delta_L = Delta_L - coupling.Delta;
    require(drive.delta_L != 0.0, "drive_for_weight: drive would be resonant with the atom");
    drive.Omega = std::abs(drive.delta_L) * std::sqrt(ratio);
    return drive;
}

CouplingMatrix mechanical_potential(const AtomArray& atoms, const BandEdge& band,
                                    const AtomCoupling& coupling, double omega_L, double Omega) {
    band.validate();
    coupling.validate();
    atoms.validate();
    require(std::isfinite(omega_L) && std::isfinite(Omega), "mechanical_potential: non-finite drive");
    const double from_edge = omega_L - band.omega_b;
    const double from_atom = from_edge - coupling.Delta;
    // omega_L and omega_a are absolute frequencies; resonance is judged at their rounding scale.
    const double resolution = 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(omega_L), band.omega_b);
    if (std::abs(from_atom) <= resolution)
        throw InvalidParameter("mechanical_potential: drive resonant with the atom");
    require_in_gap(band, from_edge, "mechanical_potential");

    CouplingMatrix out;
    out.kind = CouplingKind::mechanical;
    if (std::abs(Omega / from_atom) > kDriveRatioWarning)
        out.warnings.push_back(format_ratio("weak-drive regime violated: |Omega/(omega_L - omega_a)|",
                                            std::abs(Omega / from_atom)));
    if (atoms.gamma / std::abs(from_atom) > kDriveRatioWarning)
        out.warnings.push_back(format_ratio("gamma/|omega_L - omega_a|", atoms.gamma / std::abs(from_atom)));

    const double L = decay_length(band, from_edge);
    const double g = cavity_coupling(band, coupling, L);
    const double scale = Omega * Omega * g * g / (2.0 * from_edge * from_atom * from_atom);
    out.values = exponential_matrix(atoms, scale, L);
    return out;
}

} // namespace bandedge
