#include "bandedge/dynamics.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace bandedge {

using detail::require;

namespace {

using cd = std::complex<double>;

// exp(-i H t) applied to |1> for H = [[-i g1/2, U], [U, -i g2/2]]:
// H = m I + K with K^2 = w^2 I.
std::pair<cd, cd> two_site_amplitudes(double U, double g1, double g2, double t) {
    const cd I(0.0, 1.0);
    const cd m = -I * (g1 + g2) / 4.0;
    const cd d = -I * (g1 - g2) / 4.0;
    const cd w = std::sqrt(d * d + U * U);
    const cd phase = std::exp(-I * m * t);
    const cd c = std::cos(w * t);
    // sin(w t) / w, continuous at w = 0
    const cd sinc = std::abs(w) * t < 1e-8 ? cd(t) : std::sin(w * t) / w;
    const cd a1 = phase * (c - I * sinc * d);
    const cd a2 = phase * (-I * sinc * U);
    return {a1, a2};
}

} // namespace

void LossModel::validate() const {
    require(std::isfinite(kappa_p) && kappa_p >= 0.0, "losses: kappa_p must be non-negative");
    require(std::isfinite(gamma) && gamma >= 0.0, "losses: gamma must be non-negative");
    require(std::isfinite(theta), "losses: theta must be finite");
    for (double t : per_atom_theta) require(std::isfinite(t), "losses: per-atom theta must be finite");
}

double LossModel::effective_rate() const {
    const double c = std::cos(theta), s = std::sin(theta);
    return gamma * c * c + kappa_p * s * s;
}

double LossModel::effective_rate(std::size_t atom) const {
    if (per_atom_theta.empty()) return effective_rate();
    require(atom < per_atom_theta.size(), "losses: per-atom theta list is too short");
    const double c = std::cos(per_atom_theta[atom]), s = std::sin(per_atom_theta[atom]);
    return gamma * c * c + kappa_p * s * s;
}

ExchangeTrajectory exchange_simulate(double U12, const LossModel& losses,
                                     std::span<const double> t_grid) {
    losses.validate();
    require(std::isfinite(U12), "exchange_simulate: non-finite U12");
    if (U12 == 0.0) throw InvalidParameter("exchange_simulate: U12 = 0, no exchange");

    const double g1 = losses.effective_rate(0);
    const double g2 = losses.effective_rate(1);
    ExchangeTrajectory out;
    out.tau = std::numbers::pi / (2.0 * std::abs(U12));
    for (double t : t_grid) {
        const auto [a1, a2] = two_site_amplitudes(U12, g1, g2, t);
        out.times.push_back(t);
        out.p1.push_back(std::norm(a1));
        out.p2.push_back(std::norm(a2));
        out.norm.push_back(std::sqrt(std::norm(a1) + std::norm(a2)));
    }
    const auto [a1, a2] = two_site_amplitudes(U12, g1, g2, out.tau);
    (void)a1;
    out.error = 1.0 - std::norm(a2);
    return out;
}

double cooperativity(double gbar_c, double kappa_p, double gamma) {
    require(std::isfinite(gbar_c) && std::isfinite(kappa_p) && std::isfinite(gamma),
            "cooperativity: non-finite input");
    if (kappa_p * gamma == 0.0) throw InvalidParameter("cooperativity: zero loss rate");
    return gbar_c * gbar_c / (kappa_p * gamma);
}

double cooperativity_at_length(double C_lambda, double L, double lambda) {
    if (L == 0.0) throw InvalidParameter("cooperativity_at_length: zero length");
    return lambda * C_lambda / L;
}

double dissipator_ratio(double kappa, double Delta) {
    require(Delta > 0.0, "dissipator_ratio: Delta must be positive");
    return kappa / (4.0 * Delta);
}

Eigen::MatrixXcd kappa_dissipator_matrix(const AtomArray& atoms, const BandEdge& band,
                                         const AtomCoupling& coupling, double kappa) {
    require(kappa >= 0.0, "kappa_dissipator_matrix: kappa must be non-negative");
    const CouplingMatrix U = coupling_matrix_1d(atoms, band, coupling);
    return U.values * (kappa / (4.0 * coupling.Delta));
}

ExchangeResult optimize_exchange(const BandEdge& band, const AtomCoupling& coupling,
                                 const LossModel& losses, double separation) {
    band.validate();
    coupling.validate();
    losses.validate();
    require(losses.kappa_p > 0.0 && losses.gamma > 0.0,
            "optimize_exchange: cooperativity needs kappa_p > 0 and gamma > 0");
    require(std::isfinite(separation), "optimize_exchange: non-finite separation");

    ExchangeResult result;
    result.decay_length = decay_length(band, coupling.Delta);
    result.gbar_c = coupling.g_cell * std::sqrt(band.a / result.decay_length);
    result.cooperativity = cooperativity(result.gbar_c, losses.kappa_p, losses.gamma);

    const auto atoms = AtomArray::at_positions(band, {0.0, separation}, losses.gamma,
                                               coupling.bloch_amplitude);

    struct Point {
        double error, tau, U, theta;
    };
    auto evaluate = [&](double Delta) {
        BandEdge scaled = band;
        scaled.alpha = band.alpha * Delta / coupling.Delta; // keeps L(Delta) = L_ref
        const auto c = AtomCoupling::from_g_cell(scaled, coupling.g_cell, Delta, losses.gamma,
                                                 coupling.bloch_amplitude);
        const BoundState state = effective_cavity(scaled, c);
        const double U = std::abs(coupling_matrix_1d(atoms, scaled, c).values(0, 1));
        LossModel l = losses;
        l.per_atom_theta.clear();
        l.theta = state.theta();
        const double tau = std::numbers::pi / (2.0 * U);
        const auto [a1, a2] = two_site_amplitudes(U, l.effective_rate(), l.effective_rate(), tau);
        (void)a1;
        return Point{1.0 - std::norm(a2), tau, U, l.theta};
    };

    // Scan around the dispersive-regime optimum gbar_c sqrt(kappa / (4 gamma)).
    // The exchange formula needs |Delta| >= 10 beta; with alpha scaled along
    // Delta, beta ~ |Delta|^(-1/3), which fixes the lower end of the scan.
    const double sign = band.is_lower_edge() ? 1.0 : -1.0;
    const double centre = std::log(result.gbar_c * std::sqrt(losses.kappa_p / (4.0 * losses.gamma)));
    const double floor = 0.75 * std::log(10.0 * coupling.beta) + 0.25 * std::log(std::abs(coupling.Delta));
    const double half_width = std::log(1e3);
    if (centre <= floor) {
        std::ostringstream os;
        os << "optimize_exchange: dispersive optimum |Delta| = " << std::exp(centre)
           << " lies below 10 beta = " << std::exp(floor) << " (C = " << result.cooperativity << ")";
        throw NumericalFailure(os.str());
    }
    const double x_lo = std::max(centre - half_width, floor);
    const double x_hi = centre + half_width;
    constexpr int n_scan = 400;
    std::vector<double> xs(n_scan), errs(n_scan);
    int best = 0;
    for (int i = 0; i < n_scan; ++i) {
        xs[i] = x_lo + (x_hi - x_lo) * i / (n_scan - 1);
        errs[i] = evaluate(sign * std::exp(xs[i])).error;
        if (errs[i] < errs[best]) best = i;
    }
    if (best == 0 || best == n_scan - 1) {
        std::ostringstream os;
        os << "optimize_exchange: minimum at scan boundary |Delta| = " << std::exp(xs[best])
           << " (error " << errs[best] << ", C = " << result.cooperativity << ")";
        throw NumericalFailure(os.str());
    }

    double lo = xs[best - 1], hi = xs[best + 1];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = evaluate(sign * std::exp(x1)).error, f2 = evaluate(sign * std::exp(x2)).error;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = evaluate(sign * std::exp(x1)).error;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = evaluate(sign * std::exp(x2)).error;
        }
    }
    const double x_opt = 0.5 * (lo + hi);
    const Point p = evaluate(sign * std::exp(x_opt));
    result.optimal_Delta = sign * std::exp(x_opt);
    result.error = p.error;
    result.tau = p.tau;
    result.exchange_rate = p.U;
    result.mixing_angle = p.theta;

    const double bound = 2.0 * std::numbers::pi / std::sqrt(result.cooperativity);
    if (!(result.error <= bound)) {
        std::ostringstream os;
        os << "optimize_exchange: optimized error " << result.error << " exceeds 2 pi / sqrt(C) = " << bound;
        throw NumericalFailure(os.str());
    }
    return result;
}

Trajectory evolve_single_excitation(const CouplingMatrix& U, const LossModel& losses,
                                    const AmplitudeState& psi0, std::span<const double> t_grid,
                                    const IntegratorOptions& options) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<cd>;

    losses.validate();
    const auto n = U.values.rows();
    require(U.values.cols() == n, "evolve: coupling matrix must be square");
    require(psi0.amplitudes.size() == n, "evolve: state size differs from the coupling matrix");
    require(n <= 10'000, "evolve: at most 10^4 atoms");
    require(std::abs(psi0.amplitudes.norm() - 1.0) <= 1e-10, "evolve: initial state must be normalized");
    require(!t_grid.empty(), "evolve: empty time grid");
    require(t_grid.front() == psi0.time, "evolve: time grid must start at the initial state's time");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        require(t_grid[i] > t_grid[i - 1], "evolve: time grid must be strictly increasing");
    if (!losses.per_atom_theta.empty())
        require(static_cast<Eigen::Index>(losses.per_atom_theta.size()) == n,
                "evolve: per-atom theta list must match the number of atoms");

    Eigen::VectorXd half_rates(n);
    for (Eigen::Index j = 0; j < n; ++j) half_rates(j) = 0.5 * losses.effective_rate(static_cast<std::size_t>(j));

    // -i (U - i Gamma/2) = -i U - Gamma/2
    const Eigen::MatrixXcd generator =
        cd(0.0, -1.0) * U.values - Eigen::MatrixXcd(half_rates.cast<cd>().asDiagonal());

    auto rhs = [&generator, n](const State& x, State& dxdt, double) {
        Eigen::Map<const Eigen::VectorXcd> psi(x.data(), n);
        Eigen::Map<Eigen::VectorXcd> out(dxdt.data(), n);
        out.noalias() = generator * psi;
    };

    Trajectory traj;
    traj.times.reserve(t_grid.size());
    traj.states.reserve(t_grid.size());
    auto observer = [&traj, n](const State& x, double t) {
        traj.times.push_back(t);
        traj.states.emplace_back(Eigen::Map<const Eigen::VectorXcd>(x.data(), n));
    };

    State x(psi0.amplitudes.data(), psi0.amplitudes.data() + n);
    if (t_grid.size() == 1) {
        observer(x, t_grid.front());
        return traj;
    }

    const double spectral = std::max(generator.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
    const double dt = std::min((t_grid.back() - t_grid.front()) / 100.0, 0.01 / spectral);

    auto stepper = odeint::make_controlled(options.absolute_tolerance, options.relative_tolerance,
                                           odeint::runge_kutta_dopri5<State>());
    try {
        odeint::integrate_times(stepper, rhs, x, t_grid.begin(), t_grid.end(), dt, observer,
                                odeint::max_step_checker(options.max_steps));
    } catch (const std::exception& e) {
        AmplitudeState last;
        if (!traj.states.empty()) {
            last.amplitudes = traj.states.back();
            last.time = traj.times.back();
        } else {
            last = psi0;
        }
        throw IntegrationFailure(std::string("evolve: integrator failure: ") + e.what(), last);
    }
    return traj;
}

} // namespace bandedge
