#include "bandedge/power_law.hpp"

#include "bandedge/interactions.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bandedge {

using detail::require;

namespace {

struct Problem {
    Eigen::VectorXd z;
    Eigen::VectorXd y;
    double s_min = 0.0;

    [[nodiscard]] Eigen::VectorXd rates(const Eigen::VectorXd& p) const {
        return (p.array().exp() + s_min).matrix();
    }

    [[nodiscard]] Eigen::MatrixXd basis(const Eigen::VectorXd& s) const {
        Eigen::MatrixXd A(z.size(), s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i) A.col(i) = (-s(i) * z.array()).exp().matrix();
        return A;
    }

    [[nodiscard]] Eigen::VectorXd weights(const Eigen::MatrixXd& A) const {
        return A.colPivHouseholderQr().solve(y);
    }

    /// Residual after projecting out the linear weights.
    [[nodiscard]] Eigen::VectorXd residual(const Eigen::VectorXd& p) const {
        const Eigen::MatrixXd A = basis(rates(p));
        return A * weights(A) - y;
    }
};

struct LocalResult {
    Eigen::VectorXd p;
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
};

LocalResult levenberg_marquardt(const Problem& problem, Eigen::VectorXd p, int max_iterations) {
    const Eigen::Index n = p.size();
    Eigen::VectorXd r = problem.residual(p);
    double cost = r.squaredNorm();
    double lambda = 1e-3;

    LocalResult out;
    for (int it = 0; it < max_iterations; ++it) {
        out.iterations = it + 1;
        Eigen::MatrixXd J(r.size(), n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(p(k)));
            Eigen::VectorXd hi = p, lo = p;
            hi(k) += h;
            lo(k) -= h;
            J.col(k) = (problem.residual(hi) - problem.residual(lo)) / (2.0 * h);
        }
        const Eigen::VectorXd g = J.transpose() * r;
        const Eigen::MatrixXd H = J.transpose() * J;
        if (g.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(cost, 1e-300)) {
            out.converged = true;
            break;
        }

        bool accepted = false;
        while (lambda < 1e16) {
            Eigen::MatrixXd damped = H;
            damped.diagonal() += lambda * (H.diagonal().array() + 1e-12).matrix();
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            const Eigen::VectorXd trial = p + step;
            const Eigen::VectorXd r_trial = problem.residual(trial);
            const double trial_cost = r_trial.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                const double drop = (cost - trial_cost) / cost;
                const double move = step.lpNorm<Eigen::Infinity>();
                p = trial;
                r = r_trial;
                cost = trial_cost;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (drop < 1e-14 || move < 1e-12) out.converged = true;
                break;
            }
            lambda *= 4.0;
        }
        // No descent direction left at any damping: local minimum to working precision.
        if (!accepted) out.converged = true;
        if (out.converged) break;
    }
    out.p = p;
    out.cost = cost;
    return out;
}

void combinations(int m, int k, int start, std::vector<int>& current,
                  std::vector<std::vector<int>>& out) {
    if (static_cast<int>(current.size()) == k) {
        out.push_back(current);
        return;
    }
    for (int i = start; i < m; ++i) {
        current.push_back(i);
        combinations(m, k, i + 1, current, out);
        current.pop_back();
    }
}

double rate_spread(const Eigen::VectorXd& s) { return s.maxCoeff() / s.minCoeff(); }

} // namespace

double ExponentialSumFit::evaluate(double z) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) sum += weights[i] * std::exp(-rates[i] * z);
    return sum;
}

std::vector<double> fit_grid(const PowerLawTarget& target) {
    std::vector<double> z;
    for (double v = std::ceil(target.z_min); v <= target.z_max; v += 1.0) z.push_back(v);
    return z;
}

ExponentialSumFit fit_power_law(const PowerLawTarget& target) {
    require(std::isfinite(target.eta) && target.eta >= 0.0, "power law: eta must be >= 0");
    require(target.z_min >= 1.0, "power law: z_min must be >= 1");
    require(target.z_max > target.z_min, "power law: empty fit window");
    require(target.n_terms >= 1, "power law: need at least one exponential");
    require(target.s_min > 0.0 && target.s_start_max > target.s_min,
            "power law: need 0 < s_min < s_start_max");

    const auto grid = fit_grid(target);
    require(static_cast<int>(grid.size()) > 2 * target.n_terms,
            "power law: window has too few sites for the requested number of terms");

    Problem problem;
    problem.z = Eigen::Map<const Eigen::VectorXd>(grid.data(), static_cast<Eigen::Index>(grid.size()));
    problem.y = problem.z.array().pow(-target.eta).matrix();
    problem.s_min = target.s_min;

    // Log-spaced starting rates strictly above s_min.
    const int m = std::max(target.starts_per_axis, target.n_terms);
    const double lo = std::log(1.5 * target.s_min);
    const double hi = std::log(target.s_start_max);
    std::vector<double> start_rates(m);
    for (int i = 0; i < m; ++i) start_rates[i] = std::exp(m == 1 ? hi : lo + (hi - lo) * i / (m - 1));

    std::vector<std::vector<int>> starts;
    std::vector<int> scratch;
    combinations(m, target.n_terms, 0, scratch, starts);

    LocalResult best;
    best.cost = std::numeric_limits<double>::infinity();
    double best_max_error = std::numeric_limits<double>::infinity();
    double best_spread = std::numeric_limits<double>::infinity();

    for (const auto& combo : starts) {
        Eigen::VectorXd p(target.n_terms);
        for (int k = 0; k < target.n_terms; ++k) p(k) = std::log(start_rates[combo[k]] - target.s_min);
        LocalResult local = levenberg_marquardt(problem, p, target.max_iterations);
        if (!std::isfinite(local.cost)) continue;

        const Eigen::VectorXd s = problem.rates(local.p);
        const double max_error = problem.residual(local.p).lpNorm<Eigen::Infinity>();
        const double spread = rate_spread(s);
        const double tie = 1e-10 * std::max(best.cost, 1e-300);

        bool better = local.cost < best.cost - tie;
        if (!better && std::abs(local.cost - best.cost) <= tie) {
            better = max_error < best_max_error ||
                     (max_error == best_max_error && spread < best_spread);
        }
        if (better) {
            best = local;
            best_max_error = max_error;
            best_spread = spread;
        }
    }
    if (!std::isfinite(best.cost)) throw NumericalFailure("power law: every start diverged");

    ExponentialSumFit fit;
    const Eigen::VectorXd s = problem.rates(best.p);
    const Eigen::MatrixXd A = problem.basis(s);
    const Eigen::VectorXd w = problem.weights(A);
    std::vector<Eigen::Index> order(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s(a) > s(b); });
    for (auto i : order) {
        fit.rates.push_back(s(i));
        fit.weights.push_back(w(i));
    }
    const Eigen::VectorXd err = A * w - problem.y;
    fit.max_error = err.lpNorm<Eigen::Infinity>();
    fit.rms_error = std::sqrt(err.squaredNorm() / static_cast<double>(err.size()));
    fit.iterations = best.iterations;
    fit.converged = best.converged;
    if (!fit.converged)
        throw FitFailure("power law: best start did not converge within max_iterations", fit);
    return fit;
}

ExponentialSumFit power_law_designer(const PowerLawTarget& target, const BandEdge& band) {
    band.validate();
    require(band.is_lower_edge(), "power law designer: drives are placed in the gap above a lower edge");
    auto attach = [&](ExponentialSumFit& fit) {
        fit.detunings.clear();
        for (double s : fit.rates) fit.detunings.push_back(detuning_for_rate(band, s));
    };
    try {
        ExponentialSumFit fit = fit_power_law(target);
        attach(fit);
        return fit;
    } catch (const FitFailure& failure) {
        ExponentialSumFit best = failure.best();
        attach(best);
        throw FitFailure(failure.what(), best);
    }
}

} // namespace bandedge
