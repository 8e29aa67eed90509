#include "bandedge/commands.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace bandedge {

using nlohmann::json;

namespace {

void require_csv(OutputFormat format, const char* command) {
    if (format != OutputFormat::csv)
        throw ConfigError(std::string(command) + ": only --format csv is supported");
}

std::vector<double> linear_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return g;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

// JSON has no infinity; unbounded lengths become null.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string short_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

BandEdge powerlaw_band(const RunConfig& config) {
    const auto& p = *config.powerlaw;
    if (config.band) {
        BandEdge b = config.band_edge();
        if (p.alpha) b.alpha = *p.alpha;
        return b;
    }
    if (!p.alpha) throw ConfigError("design-powerlaw: give powerlaw.alpha or a band section");
    return BandEdge::at_zone_boundary(1.0, *p.alpha, 1.0);
}

json fit_json(const PowerLawConfig& p, const ExponentialSumFit& fit, const BandEdge& band) {
    json j;
    j["eta"] = p.eta;
    j["z_min"] = p.z_min;
    j["z_max"] = p.z_max;
    j["n_drives"] = p.n_drives;
    j["alpha"] = band.alpha;
    j["weights"] = fit.weights;
    j["rates"] = fit.rates;
    std::vector<double> detunings;
    for (double d : fit.detunings) detunings.push_back(d / band.omega_b);
    j["detunings_over_omega_b"] = detunings;
    j["max_error"] = fit.max_error;
    j["rms_error"] = fit.rms_error;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    return j;
}

std::string fit_csv(const PowerLawTarget& target, const ExponentialSumFit& fit) {
    std::vector<std::vector<double>> rows;
    for (double z : fit_grid(target)) {
        const double y = std::pow(z, -target.eta);
        const double f = fit.evaluate(z);
        rows.push_back({z, y, f, f - y});
    }
    return csv_table({"z", "target", "fit", "residual"}, rows);
}

} // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    // Guard against a locale with a ',' decimal separator.
    for (char* c = buf; *c; ++c)
        if (*c == ',') *c = '.';
    return buf;
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

CommandOutput cmd_bound_state(const RunConfig& config, OutputFormat format) {
    require_csv(format, "bound-state");
    const BandEdge band = config.band_edge();
    const AtomCoupling base = config.atom_coupling();
    const BoundStateConfig bs = config.bound_state.value_or(BoundStateConfig{});
    const double beta = bs.beta_over_omega_b ? *bs.beta_over_omega_b * band.omega_b : base.beta;
    const double sign = band.is_lower_edge() ? 1.0 : -1.0;
    const auto grid = linear_grid(bs.Delta_over_beta_min.value_or(-10.0),
                                  bs.Delta_over_beta_max.value_or(10.0), bs.points.value_or(401));

    std::vector<std::vector<double>> rows;
    int invalid = 0;
    for (double x : grid) {
        const auto c = AtomCoupling::from_beta(band, beta, sign * x * beta, base.gamma, base.bloch_amplitude);
        const BoundState s = effective_cavity(band, c);
        if (!s.is_valid()) ++invalid;
        rows.push_back({x, sign * s.delta / beta, s.angles.excited_population(), s.angles.photon_population(),
                        s.L / band.a, config.declared(s.gbar_c), s.validity});
    }
    CommandOutput out;
    out.data = csv_table({"Delta_over_beta", "delta_over_beta", "P_e", "P_p", "L_over_a", "gbar_c", "validity"},
                         rows);
    std::ostringstream os;
    os << "bound-state: " << grid.size() << " rows, beta/omega_b = " << short_number(beta / band.omega_b);
    if (invalid) os << ", " << invalid << " rows outside the quadratic-band regime (validity >= 0.1)";
    out.summary = os.str();
    return out;
}

CommandOutput cmd_interactions(const RunConfig& config, OutputFormat format) {
    require_csv(format, "interactions");
    const BandEdge band = config.band_edge();
    const AtomCoupling base = config.atom_coupling();
    if (!(base.gamma > 0.0)) throw ConfigError("interactions: gamma must be positive");
    const InteractionsConfig ic = config.interactions.value_or(InteractionsConfig{});
    const std::vector<double> detunings = ic.detunings.value_or(std::vector<double>{config.declared(base.Delta)});
    const int max_sep = ic.max_separation.value_or(55);

    std::vector<int> sites;
    for (int j = 0; j <= max_sep; ++j) sites.push_back(j);
    const AtomArray atoms = AtomArray::on_sites(band, sites, base.gamma, base.bloch_amplitude);

    std::vector<std::string> header{"separation_over_a"};
    std::vector<Eigen::MatrixXcd> matrices;
    std::vector<std::string> warnings;
    for (double d : detunings) {
        AtomCoupling c = base;
        c.Delta = config.angular(d);
        c.validate();
        CouplingMatrix U = coupling_matrix_1d(atoms, band, c);
        header.push_back("U_over_gamma_Delta_" + short_number(d));
        for (auto& w : U.warnings) warnings.push_back(w);
        matrices.push_back(std::move(U.values));
    }
    std::vector<std::vector<double>> rows;
    for (int j = 0; j <= max_sep; ++j) {
        std::vector<double> row{static_cast<double>(j)};
        for (const auto& U : matrices) row.push_back(std::abs(U(0, j)) / base.gamma);
        rows.push_back(row);
    }
    CommandOutput out;
    out.data = csv_table(header, rows);
    std::ostringstream os;
    os << "interactions: " << detunings.size() << " detunings, separations 0.." << max_sep;
    for (const auto& w : warnings) os << "\nwarning: " << w;
    out.summary = os.str();
    return out;
}

CommandOutput cmd_design_powerlaw(const RunConfig& config, OutputFormat format) {
    if (!config.powerlaw) throw ConfigError("design-powerlaw: missing 'powerlaw' section");
    const PowerLawConfig& p = *config.powerlaw;
    const BandEdge band = powerlaw_band(config);

    PowerLawTarget target;
    target.eta = p.eta;
    target.z_min = p.z_min;
    target.z_max = p.z_max;
    target.n_terms = p.n_drives;
    if (p.s_min) target.s_min = *p.s_min;
    if (p.max_iterations) target.max_iterations = *p.max_iterations;

    CommandOutput out;
    ExponentialSumFit fit;
    try {
        fit = power_law_designer(target, band);
    } catch (const FitFailure& failure) {
        fit = failure.best();
        out.exit_code = exit_code::fit;
        out.summary = std::string("design-powerlaw: ") + failure.what() + "\n";
    }
    out.data = format == OutputFormat::json ? fit_json(p, fit, band).dump(2) + "\n" : fit_csv(target, fit);
    std::ostringstream os;
    os << "design-powerlaw: eta = " << p.eta << ", " << p.n_drives << " drives, max error "
       << short_number(fit.max_error) << ", rms " << short_number(fit.rms_error);
    out.summary += os.str();
    return out;
}

CommandOutput cmd_exchange(const RunConfig& config, OutputFormat format) {
    const BandEdge band = config.band_edge();
    const ExchangeConfig ec = config.exchange.value_or(ExchangeConfig{});
    AtomCoupling coupling = config.atom_coupling();
    if (ec.Delta) {
        coupling.Delta = config.angular(*ec.Delta);
        coupling.validate();
    }
    LossModel losses = config.loss_model();
    if (ec.cooperativity) {
        const double L = decay_length(band, coupling.Delta);
        const double gbar = coupling.g_cell * std::sqrt(band.a / L);
        if (!(losses.gamma > 0.0)) throw ConfigError("exchange: gamma must be positive");
        losses.kappa_p = gbar * gbar / (*ec.cooperativity * losses.gamma);
    }
    const double separation = ec.separation_cells.value_or(1.0) * band.a;
    const ExchangeResult r = optimize_exchange(band, coupling, losses, separation);
    const double law = std::numbers::pi / std::sqrt(r.cooperativity);

    CommandOutput out;
    if (format == OutputFormat::json) {
        json j;
        j["tau"] = r.tau;
        j["error"] = r.error;
        j["pi_over_sqrt_C"] = law;
        j["error_over_law"] = r.error / law;
        j["optimal_Delta"] = config.declared(r.optimal_Delta);
        j["cooperativity"] = r.cooperativity;
        j["decay_length_over_a"] = r.decay_length / band.a;
        j["gbar_c"] = config.declared(r.gbar_c);
        j["exchange_rate"] = config.declared(r.exchange_rate);
        j["mixing_angle"] = r.mixing_angle;
        j["kappa_p"] = config.declared(losses.kappa_p);
        j["separation_over_a"] = separation / band.a;
        out.data = j.dump(2) + "\n";
    } else {
        LossModel l = losses;
        l.theta = r.mixing_angle;
        l.per_atom_theta.clear();
        const auto times = linear_grid(0.0, 2.0 * r.tau, ec.t_points.value_or(201));
        const ExchangeTrajectory t = exchange_simulate(r.exchange_rate, l, times);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < t.times.size(); ++i) rows.push_back({t.times[i], t.p1[i], t.p2[i], t.norm[i]});
        out.data = csv_table({"t", "P_1", "P_2", "norm"}, rows);
    }
    std::ostringstream os;
    os << "exchange: C = " << short_number(r.cooperativity) << ", error = " << short_number(r.error)
       << " (pi/sqrt(C) = " << short_number(law) << "), tau = " << short_number(r.tau);
    out.summary = os.str();
    return out;
}

CommandOutput cmd_evolve(const RunConfig& config, OutputFormat format) {
    require_csv(format, "evolve");
    if (!config.evolve) throw ConfigError("evolve: missing 'evolve' section");
    const EvolveConfig& ev = *config.evolve;
    const BandEdge band = config.band_edge();
    const AtomCoupling coupling = config.atom_coupling();

    AtomArray atoms;
    if (config.atoms) {
        atoms = config.atom_array();
    } else {
        std::vector<int> sites;
        for (int j = 0; j < ev.n_sites.value_or(50); ++j) sites.push_back(j);
        atoms = AtomArray::on_sites(band, sites, coupling.gamma, coupling.bloch_amplitude);
    }
    const auto n = static_cast<Eigen::Index>(atoms.positions.size());
    const int start = ev.initial_site.value_or(0);
    if (start >= n) throw ConfigError("evolve: initial_site is outside the array");

    const CouplingMatrix U = coupling_matrix_1d(atoms, band, coupling);
    const LossModel losses = config.loss_model();
    AmplitudeState psi0;
    psi0.amplitudes = Eigen::VectorXcd::Zero(n);
    psi0.amplitudes(start) = 1.0;
    const auto times = linear_grid(0.0, ev.t_max, ev.t_points.value_or(101));
    const Trajectory traj = evolve_single_excitation(U, losses, psi0, times);

    std::vector<std::string> header{"t"};
    for (Eigen::Index j = 0; j < n; ++j) header.push_back("P_" + std::to_string(j + 1));
    header.push_back("norm");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::vector<double> row{traj.times[i]};
        const Eigen::VectorXd p = traj.populations(i);
        for (Eigen::Index j = 0; j < n; ++j) row.push_back(p(j));
        row.push_back(traj.norm(i));
        rows.push_back(row);
    }
    CommandOutput out;
    out.data = csv_table(header, rows);
    std::ostringstream os;
    os << "evolve: " << n << " atoms, " << traj.times.size() << " samples, final norm "
       << short_number(traj.norm(traj.times.size() - 1));
    for (const auto& w : U.warnings) os << "\nwarning: " << w;
    out.summary = os.str();
    return out;
}

CommandOutput cmd_disorder(const RunConfig& config, OutputFormat format, unsigned workers) {
    const DielectricStack stack = config.stack();
    const auto n_trials = static_cast<std::size_t>(config.disorder->n_trials.value_or(200));
    CommandOutput out;
    std::ostringstream os;
    if (format == OutputFormat::json) {
        const LocalizationResult r = lyapunov_mc(stack, n_trials, workers);
        json j;
        j["r"] = stack.r;
        j["phi_b"] = stack.phi_b;
        j["epsilon"] = stack.epsilon;
        j["seed"] = stack.seed;
        j["sigma"] = r.sigma;
        j["xi_analytic"] = finite_or_null(r.xi_analytic);
        j["xi_mc"] = finite_or_null(r.xi_mc);
        j["xi_mc_stderr"] = r.xi_mc_stderr;
        j["resolved"] = r.resolved;
        j["n_trials"] = r.n_trials;
        j["n_cells"] = r.n_cells;
        j["max_det_defect"] = r.max_det_defect;
        j["convention"] = r.convention;
        out.data = j.dump(2) + "\n";
        os << "disorder: sigma = " << short_number(r.sigma) << ", xi_analytic/a = " << short_number(r.xi_analytic)
           << ", xi_mc/a = " << short_number(r.xi_mc) << " +- " << short_number(r.xi_mc_stderr);
        if (!stack.weak_disorder()) os << "\nwarning: epsilon > 0.05, outside the weak-disorder regime";
    } else {
        const SweepConfig sw = config.disorder_sweep.value_or(SweepConfig{});
        const auto eps = log_grid(sw.epsilon_min.value_or(1e-4), sw.epsilon_max.value_or(1e-2), sw.points.value_or(9));
        std::vector<std::vector<double>> rows;
        for (double e : eps) {
            DielectricStack s = stack;
            s.epsilon = e;
            const LocalizationResult r = lyapunov_mc(s, n_trials, workers);
            rows.push_back({e, r.sigma, r.xi_analytic, r.xi_mc, r.xi_mc_stderr});
        }
        out.data = csv_table({"epsilon", "sigma", "xi_analytic", "xi_mc", "stderr"}, rows);
        os << "disorder: sweep of " << eps.size() << " epsilon values, " << n_trials << " trials each";
    }
    out.summary = os.str();
    return out;
}

CommandOutput cmd_preset_list() {
    CommandOutput out;
    for (const auto& name : preset_names()) out.data += name + "\n";
    out.summary = "preset: " + std::to_string(preset_names().size()) + " bundled";
    return out;
}

} // namespace bandedge
