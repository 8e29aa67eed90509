#pragma once

// Run configuration: one JSON document in a declared unit system.
//
//   "si"            frequencies are ordinary frequencies in Hz (converted to
//                   rad/s on use), lengths in metres, times in seconds.
//   "dimensionless" frequencies in units of omega_b (angular), lengths in
//                   units of a, times in units of 1/omega_b.
//
// Unknown keys are rejected. Canonical serialization: keys sorted, two-space
// indent, trailing newline; loading a canonical document and re-emitting it
// reproduces it byte for byte.

#include "bandedge/band_model.hpp"
#include "bandedge/disorder.hpp"
#include "bandedge/dynamics.hpp"
#include "bandedge/errors.hpp"
#include "bandedge/interactions.hpp"
#include "bandedge/power_law.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace bandedge {

class ConfigError : public InvalidParameter {
public:
    using InvalidParameter::InvalidParameter;
};

enum class UnitSystem { si, dimensionless };

struct BandConfig {
    double omega_b = 0.0;
    double alpha = 0.0;
    double a = 0.0;
    std::optional<double> k0; ///< default pi / a
};

struct CouplingConfig {
    double Delta = 0.0;
    double gamma = 0.0;
    std::optional<double> beta;
    std::optional<double> g_cell;
    std::optional<double> bloch_amplitude;
};

struct AtomsConfig {
    std::optional<std::vector<int>> sites;          ///< lattice sites
    std::optional<std::vector<double>> positions;   ///< length unit
    std::optional<std::vector<std::array<double, 2>>> bloch; ///< [re, im] per atom
};

struct DriveConfig {
    double Omega = 0.0;
    double delta_L = 0.0;
    std::optional<double> Omega_prime;
    std::optional<double> phi;
};

struct LossConfig {
    std::optional<double> kappa_p;
    std::optional<double> theta;
};

struct DisorderConfig {
    double r = 2.0;
    double epsilon = 0.0;
    std::optional<double> phi_b;
    std::optional<int> n_cells;
    std::optional<int> n_trials;
    std::optional<std::uint64_t> seed;
};

struct BoundStateConfig {
    std::optional<double> beta_over_omega_b; ///< overrides the coupling's beta for this table
    std::optional<double> Delta_over_beta_min;
    std::optional<double> Delta_over_beta_max;
    std::optional<int> points;
};

struct InteractionsConfig {
    std::optional<std::vector<double>> detunings; ///< frequency unit
    std::optional<int> max_separation;            ///< lattice sites
};

struct PowerLawConfig {
    double eta = 0.0;
    double z_min = 1.0;
    double z_max = 50.0;
    int n_drives = 1;
    std::optional<double> alpha; ///< curvature used for the detuning map
    std::optional<double> s_min;
    std::optional<int> max_iterations;
};

struct ExchangeConfig {
    std::optional<double> Delta; ///< reference detuning fixing L; default coupling.Delta
    std::optional<double> separation_cells;
    std::optional<double> cooperativity; ///< sets kappa_p = gbar_c^2 / (C gamma)
    std::optional<int> t_points;
};

struct EvolveConfig {
    double t_max = 0.0; ///< time unit
    std::optional<int> n_sites;
    std::optional<int> initial_site;
    std::optional<int> t_points;
};

struct SweepConfig {
    std::optional<double> epsilon_min;
    std::optional<double> epsilon_max;
    std::optional<int> points;
};

struct RunConfig {
    UnitSystem units = UnitSystem::si;
    std::optional<BandConfig> band;
    std::optional<CouplingConfig> coupling;
    std::optional<AtomsConfig> atoms;
    std::optional<std::vector<DriveConfig>> drives;
    std::optional<LossConfig> losses;
    std::optional<DisorderConfig> disorder;
    std::optional<BoundStateConfig> bound_state;
    std::optional<InteractionsConfig> interactions;
    std::optional<PowerLawConfig> powerlaw;
    std::optional<ExchangeConfig> exchange;
    std::optional<EvolveConfig> evolve;
    std::optional<SweepConfig> disorder_sweep;

    /// Frequency in the declared unit -> angular frequency.
    [[nodiscard]] double angular(double frequency) const;
    /// Angular frequency -> declared frequency unit.
    [[nodiscard]] double declared(double angular_frequency) const;

    // Physical records; each throws ConfigError if its section is missing.
    [[nodiscard]] BandEdge band_edge() const;
    [[nodiscard]] AtomCoupling atom_coupling() const;
    [[nodiscard]] AtomArray atom_array() const;
    [[nodiscard]] std::vector<DriveField> drive_fields() const;
    [[nodiscard]] LossModel loss_model() const;
    [[nodiscard]] DielectricStack stack() const;
};

/// Parses and validates (schema plus every physical invariant of the present sections).
RunConfig load_config(const nlohmann::json& document);
RunConfig load_config_text(const std::string& text);

nlohmann::json to_json(const RunConfig& config);
std::string canonical_dump(const RunConfig& config);

/// Recursive object merge: keys in `overlay` replace those in `base`.
nlohmann::json merge_documents(nlohmann::json base, const nlohmann::json& overlay);

/// Named presets bundled with the tool.
std::vector<std::string> preset_names();
nlohmann::json preset_document(const std::string& name);

} // namespace bandedge
