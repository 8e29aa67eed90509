#pragma once

// Band-edge localization in a weakly disordered two-layer dielectric stack.
//
// The analytic route maps the stack onto a disordered Kronig-Penney lattice
// and applies the universal band-edge law xi/a ~ sigma^{-2/3}. The Monte-Carlo
// route multiplies 2x2 layer transfer matrices at the clean stack's band edge.
//
// Stack model: n_h / n_l = r, both layers with design phase phi_b (quarter
// wave for phi_b = pi/2), fractional thickness disorder of standard deviation
// epsilon drawn independently per layer (Gaussian, clipped at +-4 epsilon).
//
// Localization-length convention: amplitude. xi = N / <ln |psi_N / psi_0|>,
// equivalently 2 N / <ln(intensity growth)>.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

namespace bandedge {

struct DielectricStack {
    double r = 2.0;       ///< n_h / n_l
    double phi_b = 1.5707963267948966;
    double epsilon = 0.0; ///< standard deviation of the fractional layer phase
    std::size_t n_cells = 10'000;
    std::uint64_t seed = 1;

    void validate() const;
    [[nodiscard]] bool weak_disorder() const { return epsilon <= 0.05; }
};

/// First-order map of layer disorder onto Kronig-Penney variables:
///   beta_n  = beta_coeff * eps_h
///   alpha_n = alpha_coeff_low * eps_l + alpha_coeff_high * eps_h
struct KronigPenneyMap {
    double beta_coeff = 0.0;
    double alpha_coeff_low = 0.0;
    double alpha_coeff_high = 0.0;
    double phi_kp = 0.0;
    double sin2_phi_kp = 0.0;
    bool degenerate = false; ///< r = 1: sin^2(phi_KP) = 1
};

KronigPenneyMap kp_map(const DielectricStack& stack);

/// sigma = 2 phi_b epsilon sqrt(2(r^2+1)(r-1)^2/(r(r+1)^2) + r(r-1)^2/(r^2-r+1)^2)
double sigma_of(const DielectricStack& stack);

/// 2 Gamma(1/6) / (6^{1/3} sqrt(pi))
double localization_prefactor();

inline constexpr double unbounded_length = std::numeric_limits<double>::infinity();

/// xi/a = prefactor * sigma^{-2/3}; unbounded_length for sigma = 0.
double xi_analytic(double sigma);

/// Phase of each layer at the lower edge of the first gap of the clean,
/// equal-optical-thickness stack: sin^2(phi) = 4 r / (r + 1)^2.
double band_edge_layer_phase(double r);

/// Field-vector (E, E' / k) transfer matrix of one lossless layer; det = 1.
Eigen::Matrix2d layer_transfer_matrix(double index, double phase);

struct LocalizationResult {
    double sigma = 0.0;
    double xi_analytic = 0.0;
    double xi_mc = 0.0;
    double xi_mc_stderr = 0.0;
    /// false when the exponential growth does not dominate the algebraic growth
    /// of the clean band edge within n_cells; xi_mc is then unbounded_length.
    bool resolved = false;
    std::size_t n_trials = 0;
    std::size_t n_cells = 0;
    double max_det_defect = 0.0; ///< max ||det M| - 1| over every layer matrix used
    std::string convention = "amplitude: xi = N / <ln|psi_N|>";
};

/// Independent trials with per-trial RNG streams seeded from (seed, trial);
/// trial results are combined in trial order, so the output does not depend on
/// `workers` (0 picks the hardware concurrency).
LocalizationResult lyapunov_mc(const DielectricStack& stack, std::size_t n_trials,
                               unsigned workers = 0);

} // namespace bandedge
