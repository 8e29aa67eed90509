#pragma once

// Synthesis of power-law interactions from sums of drive-induced exponentials:
// z^{-eta} ~ sum_i w_i exp(-s_i z) on the integer lattice sites of a window.

#include "bandedge/band_model.hpp"
#include "bandedge/errors.hpp"

#include <vector>

namespace bandedge {

struct PowerLawTarget {
    double eta = 0.0;
    double z_min = 1.0; ///< window start, lattice units
    double z_max = 50.0;
    int n_terms = 1;
    double s_min = 1e-4;   ///< lower bound on every rate
    double s_start_max = 1.0; ///< upper end of the multistart grid
    int starts_per_axis = 8;
    int max_iterations = 500;
};

struct ExponentialSumFit {
    std::vector<double> weights;
    std::vector<double> rates;      ///< per lattice constant, descending
    std::vector<double> detunings;  ///< band detuning realizing each rate (filled by the designer)
    double max_error = 0.0;         ///< max |fit - z^-eta| over the grid
    double rms_error = 0.0;
    int iterations = 0;
    bool converged = false;

    [[nodiscard]] double evaluate(double z) const;
};

/// Thrown when the best candidate did not converge; carries it anyway.
class FitFailure : public NumericalFailure {
public:
    FitFailure(const std::string& message, ExponentialSumFit best)
        : NumericalFailure(message), best_(std::move(best)) {}
    [[nodiscard]] const ExponentialSumFit& best() const { return best_; }

private:
    ExponentialSumFit best_;
};

/// Integer sites z_min, z_min + 1, ..., <= z_max.
std::vector<double> fit_grid(const PowerLawTarget& target);

/// Variable-projection least squares: rates by Levenberg-Marquardt from a
/// multistart grid, weights by linear least squares at every evaluation.
ExponentialSumFit fit_power_law(const PowerLawTarget& target);

/// fit_power_law plus the band detunings Delta_L,i = alpha omega_b (s_i / (k0 a))^2.
ExponentialSumFit power_law_designer(const PowerLawTarget& target, const BandEdge& band);

} // namespace bandedge
