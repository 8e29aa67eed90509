// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "bandedge/commands.hpp"
#include "bandedge/config.hpp"
#include "cli_runner.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace bandedge;
using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

struct Check {
    bool ok = true;
    std::ostringstream notes;

    void expect(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            notes << " [fail: " << what << "]";
        }
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<std::vector<double>> parse_csv(const std::string& text, std::vector<std::string>* header = nullptr) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) {
            if (header) *header = cells;
            first = false;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(std::stod(c));
        rows.push_back(row);
    }
    return rows;
}

RunConfig preset_with(const json& overlay) {
    return load_config(merge_documents(preset_document("apcw"), overlay));
}

void criterion_1(Check& c) {
    oracle::Sampler s(2024);
    double worst_residual = 0.0, worst_agreement = 0.0;
    for (int i = 0; i < 10'000; ++i) {
        const double beta = s.log_uniform(1e-3, 1e3);
        const double Delta = s.sign() * s.log_uniform(1e-4, 100.0) * beta;
        const double d = solve_delta_explicit(Delta, beta);
        worst_residual = std::max(worst_residual, root_residual(d, Delta, beta));
        worst_agreement = std::max(worst_agreement, rel(d, solve_delta_bracketed(Delta, beta)));
    }
    c.expect(worst_residual <= 1e-12, "residual");
    c.expect(worst_agreement <= 1e-10, "explicit vs numeric");

    const BandEdge band = BandEdge::at_zone_boundary(two_pi * 333e12, 10.6, 371e-9);
    const double beta = 4.75e-7 * band.omega_b;
    const BoundState b = effective_cavity(band, AtomCoupling::from_beta(band, beta, -beta, 0.0));
    const double anchor = std::max({std::abs(b.delta / beta - 1.0), std::abs(b.theta() - pi / 4.0),
                                    std::abs(b.Delta_c_eff / beta)});
    c.expect(anchor <= 1e-12, "Delta = -beta anchor");
    c.notes << " max residual " << worst_residual << ", max explicit/numeric " << worst_agreement
            << ", anchor defect " << anchor;
}

void criterion_2(Check& c) {
    const auto out = cmd_bound_state(load_config(preset_document("apcw")), OutputFormat::csv);
    std::vector<std::string> header;
    const auto rows = parse_csv(out.data, &header);
    c.expect(rows.size() == 401, "401 rows");
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        monotone = monotone && rows[i][1] > rows[i - 1][1] && rows[i][2] > rows[i - 1][2] && rows[i][4] < rows[i - 1][4];
    c.expect(monotone, "delta up, P_e up, L down");
    // rows are Delta/beta = -10 + 0.05 i
    const double d0 = rows[200][1];
    const double pe = rows[180][2];
    c.expect(rows[200][0] == 0.0 && rel(d0, std::pow(2.0, 2.0 / 3.0)) <= 1e-12, "delta(0) = 2^{2/3} beta");
    c.expect(rows[180][0] == -1.0 && std::abs(pe - 0.5) <= 1e-12, "P_e(-beta) = 1/2");
    c.notes << " delta(0)/beta " << d0 << ", P_e(-beta) " << pe;
}

void criterion_3(Check& c) {
    const RunConfig config = load_config(preset_document("apcw"));
    const auto out = cmd_interactions(config, OutputFormat::csv);
    const auto rows = parse_csv(out.data);
    const BandEdge band = config.band_edge();
    const std::vector<double> hz{400e9, 800e9, 1300e9, 2800e9};
    const std::vector<double> expected_L{29.90, 21.14, 16.59, 11.30};
    const double g_cell = two_pi * 12.2e9, gamma = two_pi * 5e6;
    const double g2 = g_cell * g_cell * band.a / two_pi;
    const double curvature = band.alpha * band.omega_b / (band.k0 * band.k0);

    double closed_form = 0.0, oracle_defect = 0.0;
    for (std::size_t k = 0; k < hz.size(); ++k) {
        const double Delta = two_pi * hz[k];
        const double L_over_a = std::sqrt(band.alpha * band.omega_b / Delta) / pi;
        c.expect(std::abs(L_over_a - expected_L[k]) <= 0.005, "L/a table");
        const double gbar2 = g_cell * g_cell / L_over_a;
        for (const auto& row : rows) {
            const double z = row[0];
            const double model = gbar2 * std::exp(-z / L_over_a) / (2.0 * Delta * gamma);
            closed_form = std::max(closed_form, rel(row[k + 1], model));
        }
        for (int j : {0, 1, 10, 30, 55}) {
            const double reference = g2 * oracle::band_integral_1d(Delta, curvature, j * band.a) / gamma;
            const auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r[0] == j; });
            if (it == rows.end()) {
                c.expect(false, "separation row present");
                continue;
            }
            oracle_defect = std::max(oracle_defect, rel((*it)[k + 1], reference));
        }
    }
    c.expect(closed_form <= 1e-10, "closed form 1e-10");
    c.expect(oracle_defect <= 1e-6, "k-integral 1e-6");
    c.notes << " closed-form defect " << closed_form << ", k-integral defect " << oracle_defect;
}

void criterion_4(Check& c) {
    const auto out = cmd_design_powerlaw(load_config(preset_document("apcw")), OutputFormat::json);
    const json j = json::parse(out.data);
    c.expect(out.exit_code == exit_code::ok, "fit converged");
    const double max_error = j["max_error"];
    const std::vector<double> w = j["weights"], s = j["rates"], d = j["detunings_over_omega_b"];
    const std::vector<double> reference{0.5480, 0.5684, 0.2916, 0.0089};
    const std::vector<double> got{w[0], w[1], s[0], s[1]};
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, rel(got[i], reference[i]));
    c.expect(worst <= 0.05, "weights and rates within 5%");
    auto four_figures = [](double x, double ref) {
        char a[32], b[32];
        std::snprintf(a, sizeof a, "%.3e", x);
        std::snprintf(b, sizeof b, "%.3e", ref);
        return std::string(a) == b;
    };
    c.expect(four_figures(d[0], 1.723e-3) && four_figures(d[1], 1.612e-6), "detunings to 4 figures");
    c.expect(max_error <= 0.01, "max error <= 0.01");
    c.notes << " max error " << max_error << " (limit 0.01), worst parameter deviation " << worst
            << ", detunings " << d[0] << ", " << d[1];
}

void criterion_5(Check& c) {
    for (double C : {1e2, 1e3, 1e4}) {
        const auto out = cmd_exchange(preset_with({{"exchange", {{"cooperativity", C}}}}), OutputFormat::json);
        const json j = json::parse(out.data);
        const double ratio = j["error_over_law"];
        c.expect(ratio >= 0.8 && ratio <= 1.25, "error/(pi/sqrt C) at C = " + std::to_string(C));
        c.notes << " C=" << C << ": ratio " << ratio << ";";
    }
    const double kappa = two_pi * 333e12 / 2e5;
    const double C = cooperativity(two_pi * 10e9, kappa, two_pi * 5e6);
    const double by_hand = 1e20 / (333e12 / 2e5 * 5e6);
    c.expect(rel(C, by_hand) <= 1e-14 && std::abs(C / 1.2e4 - 1.0) <= 0.01, "C ~ 1.2e4");
    const double CL = cooperativity_at_length(1e4, 100.0, 1.0);
    c.expect(CL == 100.0, "C_L = 100 at L = 100 lambda");
    c.notes << " C " << C << ", C_L " << CL;
}

void criterion_6(Check& c) {
    DielectricStack s;
    s.r = 2.0;
    s.phi_b = pi / 2.0;
    s.epsilon = 1e-3;
    const double sigma = sigma_of(s);
    const double xi = xi_analytic(sigma);
    // the quoted 3.4566 and 2.7708e-3 are off in the last figure; the inputs they
    // were derived from (Gamma(1/6) = 5.56632, bracket = 7/9) are checked exactly
    const double prefactor = 2.0 * oracle::gamma_function(1.0 / 6.0) / (std::cbrt(6.0) * std::sqrt(pi));
    c.expect(rel(localization_prefactor(), prefactor) <= 1e-10, "prefactor vs Gamma quadrature");
    c.expect(rel(localization_prefactor(), 3.4566) <= 1e-4, "prefactor 3.4566");
    c.expect(rel(sigma, pi * std::sqrt(7.0 / 9.0) * 1e-3) <= 1e-12, "sigma from bracket 7/9");
    c.expect(rel(sigma, 2.7708e-3) <= 1e-4, "sigma 2.7708e-3");
    c.expect(std::abs(xi - 175.2) <= 0.05 && xi > 100.0, "xi 175.2");
    c.notes << " sigma " << sigma << ", xi/a " << xi << ";";
    s.n_cells = 10'000;
    s.seed = 1;
    for (double eps : {3e-4, 1e-3, 3e-3}) {
        s.epsilon = eps;
        const LocalizationResult r = lyapunov_mc(s, 200);
        const double ratio = r.xi_mc / r.xi_analytic;
        c.expect(r.resolved && std::abs(ratio - 1.0) <= 0.15, "MC within 15% at eps " + std::to_string(eps));
        c.notes << " eps " << eps << ": mc/analytic " << ratio << ";";
    }
}

void criterion_7(Check& c) {
    double kernel = 0.0;
    for (int i = 0; i <= 49; ++i) {
        const double u = 0.1 + (5.0 - 0.1) * i / 49.0;
        kernel = std::max(kernel, rel(oracle::band_integral_2d(u), bessel_kernel(u, 1.0)));
    }
    c.expect(kernel <= 1e-4, "2D kernel");

    oracle::Sampler s(7);
    const BandEdge band = BandEdge::at_zone_boundary(1.0, 0.5, 1.0);
    double frequency = 0.0;
    for (int n = 1; n <= 6; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> z;
            for (int j = 0; j < n; ++j) z.push_back(s.uniform(0.0, 4.0 * n));
            const auto atoms = AtomArray::at_positions(band, z, 0.0);
            const CouplingMatrix U = coupling_matrix_1d(atoms, band, AtomCoupling::from_g_cell(band, 0.05, 0.02, 0.0));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(U.values);
            AmplitudeState psi0;
            psi0.amplitudes = es.eigenvectors() * Eigen::VectorXcd::Constant(n, 1.0 / std::sqrt(double(n)));
            const Eigen::VectorXd spectrum = oracle::hermitian_spectrum(U.values);
            const double scale = spectrum.cwiseAbs().maxCoeff();
            const double t = 0.5 / scale;
            IntegratorOptions tight;
            tight.relative_tolerance = 1e-12;
            tight.absolute_tolerance = 1e-14;
            const std::vector<double> grid{0.0, t};
            const auto tr = evolve_single_excitation(U, LossModel{}, psi0, grid, tight);
            for (Eigen::Index k = 0; k < n; ++k) {
                const auto ratio =
                    es.eigenvectors().col(k).dot(tr.states[1]) / es.eigenvectors().col(k).dot(psi0.amplitudes);
                frequency = std::max(frequency, std::abs(-std::arg(ratio) / t - spectrum(k)) / scale);
            }
        }
    }
    c.expect(frequency <= 1e-8, "evolution frequencies");

    DielectricStack st;
    st.epsilon = 3e-3;
    st.n_cells = 10'000;
    const double det = lyapunov_mc(st, 20).max_det_defect;
    c.expect(det <= 1e-12, "|det| per layer");
    c.notes << " 2D kernel " << kernel << ", frequencies " << frequency << ", det defect " << det;
}

void criterion_8(Check& c) {
    const std::vector<std::string> commands{
        "config --preset apcw",          "bound-state --preset apcw",
        "interactions --preset apcw",    "design-powerlaw --preset apcw",
        "design-powerlaw --preset apcw --format csv",
        "exchange --preset apcw",        "exchange --preset apcw --format csv",
        "evolve --preset apcw",          "disorder --preset apcw --seed 3",
        "disorder --preset apcw --format csv --seed 3 --workers 1",
    };
    for (const auto& cmd : commands) {
        const auto a = cli::run(cmd);
        const auto b = cli::run(cmd);
        c.expect(a.status == 0 && !a.out.empty() && a.out == b.out, cmd);
    }
    const auto serial = cli::run("disorder --preset apcw --format csv --seed 3 --workers 1");
    const auto parallel = cli::run("disorder --preset apcw --format csv --seed 3 --workers 4");
    c.expect(serial.out == parallel.out, "sweep independent of worker count");
    c.notes << " " << commands.size() << " commands run twice, sweep compared at 1 and 4 workers";
}

} // namespace

int main() {
    struct Criterion {
        int id;
        double budget_seconds;
        std::function<void(Check&)> run;
    };
    const std::vector<Criterion> criteria{
        {1, 1.0, criterion_1},  {2, 1.0, criterion_2},  {3, 5.0, criterion_3},   {4, 10.0, criterion_4},
        {5, 30.0, criterion_5}, {6, 300.0, criterion_6}, {7, 120.0, criterion_7}, {8, 1e9, criterion_8},
    };
    bool all = true;
    for (const auto& cr : criteria) {
        Check c;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.run(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        c.expect(seconds < cr.budget_seconds, "runtime");
        all = all && c.ok;
        std::printf("criterion %d: %s (%.2f s)%s\n", cr.id, c.ok ? "PASS" : "FAIL", seconds, c.notes.str().c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
