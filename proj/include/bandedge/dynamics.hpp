#pragma once

// Loss-limited excitation exchange and single-excitation transport.
//
// Losses enter as a no-jump non-Hermitian term: each atom decays at
// Gamma_eff = gamma cos^2(theta) + kappa_p sin^2(theta).

#include "bandedge/band_model.hpp"
#include "bandedge/errors.hpp"
#include "bandedge/interactions.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace bandedge {

struct LossModel {
    double kappa_p = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
    /// Optional per-atom mixing angles; when empty every atom uses `theta`.
    std::vector<double> per_atom_theta;

    void validate() const;
    [[nodiscard]] double effective_rate() const;
    [[nodiscard]] double effective_rate(std::size_t atom) const;
};

struct ExchangeTrajectory {
    std::vector<double> times;
    std::vector<double> p1;
    std::vector<double> p2;
    std::vector<double> norm;
    double tau = 0.0;   ///< pi / (2 |U12|)
    double error = 0.0; ///< 1 - P2(tau)
};

/// Two atoms, one excitation starting on atom 1, exact 2x2 propagator.
ExchangeTrajectory exchange_simulate(double U12, const LossModel& losses,
                                     std::span<const double> t_grid);

struct ExchangeResult {
    double tau = 0.0;
    double error = 0.0;
    double optimal_Delta = 0.0;
    double cooperativity = 0.0;  ///< gbar_c^2 / (kappa_p gamma) at the reference length
    double decay_length = 0.0;   ///< reference L, held fixed during the scan
    double gbar_c = 0.0;
    double exchange_rate = 0.0;  ///< |U12| at the optimum
    double mixing_angle = 0.0;   ///< theta at the optimum
};

/// Minimizes the exchange error over Delta at fixed cavity length L (the band
/// curvature is rescaled with Delta so that L(Delta) stays at its value for
/// coupling.Delta). Coarse 400-point log scan, restricted to |Delta| >= 10 beta,
/// then golden-section refinement.
ExchangeResult optimize_exchange(const BandEdge& band, const AtomCoupling& coupling,
                                 const LossModel& losses, double separation);

/// C = gbar_c^2 / (kappa_p gamma)
double cooperativity(double gbar_c, double kappa_p, double gamma);
/// C_L = lambda C_lambda / L
double cooperativity_at_length(double C_lambda, double L, double lambda);

/// kappa / (4 Delta): ratio of the photon-loss dissipator to the coherent exchange.
double dissipator_ratio(double kappa, double Delta);

/// Collective photon-loss coefficients g_c^2 kappa f_jl / (8 Delta^2), i.e.
/// U_jl kappa / (4 Delta). Emitted for inspection; not used by the evolution.
Eigen::MatrixXcd kappa_dissipator_matrix(const AtomArray& atoms, const BandEdge& band,
                                         const AtomCoupling& coupling, double kappa);

struct AmplitudeState {
    Eigen::VectorXcd amplitudes;
    double time = 0.0;
};

struct IntegratorOptions {
    double relative_tolerance = 1e-9;
    double absolute_tolerance = 1e-12;
    std::size_t max_steps = 1'000'000;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;

    [[nodiscard]] Eigen::VectorXd populations(std::size_t i) const { return states[i].cwiseAbs2(); }
    [[nodiscard]] double norm(std::size_t i) const { return states[i].norm(); }
};

class IntegrationFailure : public NumericalFailure {
public:
    IntegrationFailure(const std::string& message, AmplitudeState last_good)
        : NumericalFailure(message), last_good_(std::move(last_good)) {}
    [[nodiscard]] const AmplitudeState& last_good() const { return last_good_; }

private:
    AmplitudeState last_good_;
};

/// i dpsi/dt = (U - i Gamma/2) psi with adaptive Dormand-Prince 5(4) steps;
/// the trajectory holds psi at every time of t_grid (which must start at psi0.time).
Trajectory evolve_single_excitation(const CouplingMatrix& U, const LossModel& losses,
                                    const AmplitudeState& psi0, std::span<const double> t_grid,
                                    const IntegratorOptions& options = {});

} // namespace bandedge
