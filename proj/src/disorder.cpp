#include "bandedge/disorder.hpp"

#include "bandedge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

namespace bandedge {

using detail::require;

namespace {

constexpr std::size_t kRenormalizeEvery = 32; // layers

struct TrialOutcome {
    double log_growth = 0.0;      // ln |psi_N| over all cells
    double late_log_growth = 0.0; // ln |psi_N| - ln |psi_{N/2}|
    double max_det_defect = 0.0;
};

TrialOutcome run_trial(const DielectricStack& stack, double edge_phase, std::size_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(stack.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(stack.seed >> 32),
                      static_cast<std::uint32_t>(trial & 0xffffffffu),
                      static_cast<std::uint32_t>(trial >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double clip = 4.0 * stack.epsilon;
    auto draw = [&] { return std::clamp(stack.epsilon * normal(rng), -clip, clip); };

    const double indices[2] = {stack.r, 1.0};
    Eigen::Vector2d v(1.0, 0.0);
    TrialOutcome out;
    double log_norm = 0.0;
    double log_at_half = 0.0;
    std::size_t layer = 0;
    for (std::size_t cell = 0; cell < stack.n_cells; ++cell) {
        if (cell == stack.n_cells / 2) log_at_half = log_norm + std::log(v.norm());
        for (double n : indices) {
            const Eigen::Matrix2d M = layer_transfer_matrix(n, edge_phase * (1.0 + draw()));
            out.max_det_defect = std::max(out.max_det_defect, std::abs(std::abs(M.determinant()) - 1.0));
            v = M * v;
            if (++layer % kRenormalizeEvery == 0) {
                const double norm = v.norm();
                if (!std::isfinite(norm) || norm == 0.0)
                    throw NumericalFailure("lyapunov_mc: field vector overflowed between renormalizations");
                log_norm += std::log(norm);
                v /= norm;
            }
        }
    }
    out.log_growth = log_norm + std::log(v.norm());
    out.late_log_growth = out.log_growth - log_at_half;
    if (!std::isfinite(out.log_growth)) throw NumericalFailure("lyapunov_mc: non-finite growth");
    return out;
}

} // namespace

void DielectricStack::validate() const {
    require(std::isfinite(r) && r > 0.0, "stack: index ratio r must be positive");
    require(std::isfinite(phi_b) && phi_b > 0.0 && phi_b < std::numbers::pi,
            "stack: phi_b must lie in (0, pi)");
    require(std::isfinite(epsilon) && epsilon >= 0.0, "stack: epsilon must be non-negative");
    require(n_cells >= 2, "stack: need at least two cells");
}

KronigPenneyMap kp_map(const DielectricStack& stack) {
    stack.validate();
    const double nh = stack.r, nl = 1.0;
    KronigPenneyMap m;
    m.sin2_phi_kp = 4.0 * nh * nl / ((nh + nl) * (nh + nl));
    m.degenerate = m.sin2_phi_kp >= 1.0;
    m.phi_kp = std::asin(std::sqrt(std::min(m.sin2_phi_kp, 1.0)));
    m.beta_coeff = stack.phi_b * (nh - nl) / (2.0 * std::sqrt(nh * nl));
    m.alpha_coeff_low = stack.phi_b / m.phi_kp;
    m.alpha_coeff_high = stack.phi_b * nh * nl / (m.phi_kp * (nh * nh - nh * nl + nl * nl));
    return m;
}

double sigma_of(const DielectricStack& stack) {
    stack.validate();
    const double r = stack.r;
    const double rm1 = r - 1.0;
    const double bracket = 2.0 * (r * r + 1.0) * rm1 * rm1 / (r * (r + 1.0) * (r + 1.0)) +
                           r * rm1 * rm1 / ((r * r - r + 1.0) * (r * r - r + 1.0));
    return 2.0 * stack.phi_b * std::sqrt(bracket) * stack.epsilon;
}

double localization_prefactor() {
    return 2.0 * std::tgamma(1.0 / 6.0) / (std::cbrt(6.0) * std::sqrt(std::numbers::pi));
}

double xi_analytic(double sigma) {
    require(std::isfinite(sigma) && sigma >= 0.0, "xi_analytic: sigma must be non-negative");
    if (sigma == 0.0) return unbounded_length;
    return localization_prefactor() * std::pow(sigma, -2.0 / 3.0);
}

double band_edge_layer_phase(double r) {
    require(std::isfinite(r) && r > 0.0, "band_edge_layer_phase: r must be positive");
    return std::asin(std::sqrt(4.0 * r / ((r + 1.0) * (r + 1.0))));
}

Eigen::Matrix2d layer_transfer_matrix(double index, double phase) {
    const double c = std::cos(phase), s = std::sin(phase);
    Eigen::Matrix2d M;
    M << c, s / index, -index * s, c;
    return M;
}

LocalizationResult lyapunov_mc(const DielectricStack& stack, std::size_t n_trials, unsigned workers) {
    stack.validate();
    require(n_trials >= 2, "lyapunov_mc: need at least two trials for a standard error");

    const double edge_phase = band_edge_layer_phase(stack.r);
    std::vector<TrialOutcome> outcomes(n_trials);

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_trials));
    {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t t = w; t < n_trials; t += workers)
                        outcomes[t] = run_trial(stack, edge_phase, t);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    LocalizationResult res;
    res.sigma = sigma_of(stack);
    res.xi_analytic = xi_analytic(res.sigma);
    res.n_trials = n_trials;
    res.n_cells = stack.n_cells;

    const double N = static_cast<double>(stack.n_cells);
    double sum = 0.0, late = 0.0;
    for (const auto& o : outcomes) {
        sum += o.log_growth / N;
        late += o.late_log_growth;
        res.max_det_defect = std::max(res.max_det_defect, o.max_det_defect);
    }
    const double T = static_cast<double>(n_trials);
    const double mean = sum / T;
    double var = 0.0;
    for (const auto& o : outcomes) var += (o.log_growth / N - mean) * (o.log_growth / N - mean);
    var /= (T - 1.0);
    const double stderr_lambda = std::sqrt(var / T);

    // A clean band edge grows algebraically (~N), adding ln 2 over the second
    // half of the stack; demand a clear excess before calling it exponential.
    res.resolved = late / T > 4.0 * std::numbers::ln2 && mean > 0.0;
    if (res.resolved) {
        res.xi_mc = 1.0 / mean;
        res.xi_mc_stderr = stderr_lambda / (mean * mean);
    } else {
        res.xi_mc = unbounded_length;
        res.xi_mc_stderr = 0.0;
    }
    return res;
}

} // namespace bandedge
