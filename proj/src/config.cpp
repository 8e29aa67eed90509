#include "bandedge/config.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace bandedge {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config: " + where + ": " + what);
}

// Reads typed fields out of one JSON object and remembers which keys were used.
class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) fail(path_, "expected an object");
    }

    [[nodiscard]] bool has(const std::string& key) const { return node_.contains(key); }

    double number(const std::string& key) {
        auto v = opt_number(key);
        if (!v) fail(path_, "missing required key '" + key + "'");
        return *v;
    }

    std::optional<double> opt_number(const std::string& key) {
        if (!take(key)) return std::nullopt;
        return as_number(node_.at(key), path_ + "." + key);
    }

    int integer(const std::string& key) {
        auto v = opt_integer(key);
        if (!v) fail(path_, "missing required key '" + key + "'");
        return *v;
    }

    std::optional<int> opt_integer(const std::string& key) {
        if (!take(key)) return std::nullopt;
        return as_integer(node_.at(key), path_ + "." + key);
    }

    std::optional<std::uint64_t> opt_unsigned(const std::string& key) {
        if (!take(key)) return std::nullopt;
        const json& v = node_.at(key);
        const bool non_negative = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
        if (!non_negative) fail(path_ + "." + key, "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::optional<std::string> opt_string(const std::string& key) {
        if (!take(key)) return std::nullopt;
        const json& v = node_.at(key);
        if (!v.is_string()) fail(path_ + "." + key, "expected a string");
        return v.get<std::string>();
    }

    std::optional<std::vector<double>> opt_numbers(const std::string& key) {
        if (!take(key)) return std::nullopt;
        const json& v = node_.at(key);
        if (!v.is_array()) fail(path_ + "." + key, "expected an array");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(as_number(v[i], path_ + "." + key + "[" + std::to_string(i) + "]"));
        return out;
    }

    std::optional<std::vector<int>> opt_integers(const std::string& key) {
        if (!take(key)) return std::nullopt;
        const json& v = node_.at(key);
        if (!v.is_array()) fail(path_ + "." + key, "expected an array");
        std::vector<int> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(as_integer(v[i], path_ + "." + key + "[" + std::to_string(i) + "]"));
        return out;
    }

    const json* opt_node(const std::string& key) {
        if (!take(key)) return nullptr;
        return &node_.at(key);
    }

    /// Rejects every key that no accessor asked for.
    void finish() const {
        for (const auto& [key, value] : node_.items()) {
            (void)value;
            if (!used_.count(key)) fail(path_, "unknown key '" + key + "'");
        }
    }

    [[nodiscard]] const std::string& path() const { return path_; }

private:
    bool take(const std::string& key) {
        used_.insert(key);
        return node_.contains(key) && !node_.at(key).is_null();
    }

    static double as_number(const json& v, const std::string& where) {
        if (!v.is_number()) fail(where, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(where, "expected a finite number");
        return x;
    }

    static int as_integer(const json& v, const std::string& where) {
        if (!v.is_number_integer()) fail(where, "expected an integer");
        const auto x = v.get<std::int64_t>();
        if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
            fail(where, "integer out of range");
        return static_cast<int>(x);
    }

    const json& node_;
    std::string path_;
    std::set<std::string> used_;
};

template <typename T>
void put(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

// Doubles always serialize as floating-point literals so that re-emission is stable.
json number_list(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(x);
    return out;
}

BandConfig read_band(Reader r) {
    BandConfig b;
    b.omega_b = r.number("omega_b");
    b.alpha = r.number("alpha");
    b.a = r.number("a");
    b.k0 = r.opt_number("k0");
    r.finish();
    return b;
}

CouplingConfig read_coupling(Reader r) {
    CouplingConfig c;
    c.Delta = r.number("Delta");
    c.gamma = r.number("gamma");
    c.beta = r.opt_number("beta");
    c.g_cell = r.opt_number("g_cell");
    c.bloch_amplitude = r.opt_number("bloch_amplitude");
    r.finish();
    return c;
}

AtomsConfig read_atoms(Reader r) {
    AtomsConfig a;
    a.sites = r.opt_integers("sites");
    a.positions = r.opt_numbers("positions");
    if (const json* bloch = r.opt_node("bloch")) {
        if (!bloch->is_array()) fail(r.path() + ".bloch", "expected an array of [re, im] pairs");
        std::vector<std::array<double, 2>> values;
        for (const auto& pair : *bloch) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
                fail(r.path() + ".bloch", "expected an array of [re, im] pairs");
            values.push_back({pair[0].get<double>(), pair[1].get<double>()});
        }
        a.bloch = values;
    }
    r.finish();
    return a;
}

DriveConfig read_drive(Reader r) {
    DriveConfig d;
    d.Omega = r.number("Omega");
    d.delta_L = r.number("delta_L");
    d.Omega_prime = r.opt_number("Omega_prime");
    d.phi = r.opt_number("phi");
    r.finish();
    return d;
}

LossConfig read_losses(Reader r) {
    LossConfig l;
    l.kappa_p = r.opt_number("kappa_p");
    l.theta = r.opt_number("theta");
    r.finish();
    return l;
}

DisorderConfig read_disorder(Reader r) {
    DisorderConfig d;
    d.r = r.number("r");
    d.epsilon = r.number("epsilon");
    d.phi_b = r.opt_number("phi_b");
    d.n_cells = r.opt_integer("n_cells");
    d.n_trials = r.opt_integer("n_trials");
    d.seed = r.opt_unsigned("seed");
    r.finish();
    return d;
}

BoundStateConfig read_bound_state(Reader r) {
    BoundStateConfig b;
    b.beta_over_omega_b = r.opt_number("beta_over_omega_b");
    b.Delta_over_beta_min = r.opt_number("Delta_over_beta_min");
    b.Delta_over_beta_max = r.opt_number("Delta_over_beta_max");
    b.points = r.opt_integer("points");
    r.finish();
    return b;
}

InteractionsConfig read_interactions(Reader r) {
    InteractionsConfig c;
    c.detunings = r.opt_numbers("detunings");
    c.max_separation = r.opt_integer("max_separation");
    r.finish();
    return c;
}

PowerLawConfig read_powerlaw(Reader r) {
    PowerLawConfig p;
    p.eta = r.number("eta");
    p.z_min = r.number("z_min");
    p.z_max = r.number("z_max");
    p.n_drives = r.integer("n_drives");
    p.alpha = r.opt_number("alpha");
    p.s_min = r.opt_number("s_min");
    p.max_iterations = r.opt_integer("max_iterations");
    r.finish();
    return p;
}

ExchangeConfig read_exchange(Reader r) {
    ExchangeConfig e;
    e.Delta = r.opt_number("Delta");
    e.separation_cells = r.opt_number("separation_cells");
    e.cooperativity = r.opt_number("cooperativity");
    e.t_points = r.opt_integer("t_points");
    r.finish();
    return e;
}

EvolveConfig read_evolve(Reader r) {
    EvolveConfig e;
    e.t_max = r.number("t_max");
    e.n_sites = r.opt_integer("n_sites");
    e.initial_site = r.opt_integer("initial_site");
    e.t_points = r.opt_integer("t_points");
    r.finish();
    return e;
}

SweepConfig read_sweep(Reader r) {
    SweepConfig s;
    s.epsilon_min = r.opt_number("epsilon_min");
    s.epsilon_max = r.opt_number("epsilon_max");
    s.points = r.opt_integer("points");
    r.finish();
    return s;
}

void check(bool ok, const std::string& where, const std::string& what) {
    if (!ok) fail(where, what);
}

// Physical invariants of every present section; the accessors do the heavy lifting.
void validate(const RunConfig& c) {
    try {
        if (c.band) {
            (void)c.band_edge();
            if (c.units == UnitSystem::dimensionless)
                check(c.band->omega_b == 1.0 && c.band->a == 1.0, "band",
                      "dimensionless units require omega_b = 1 and a = 1");
        }
        if (c.coupling) (void)c.atom_coupling();
        if (c.atoms) (void)c.atom_array();
        if (c.drives) (void)c.drive_fields();
        if (c.losses && c.coupling) (void)c.loss_model();
        if (c.disorder) (void)c.stack();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const NumericalFailure& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (c.losses) {
        if (c.losses->kappa_p) check(*c.losses->kappa_p >= 0.0, "losses.kappa_p", "must be non-negative");
    }
    if (c.bound_state) {
        const auto& b = *c.bound_state;
        if (b.beta_over_omega_b) check(*b.beta_over_omega_b > 0.0, "bound_state.beta_over_omega_b", "must be positive");
        if (b.points) check(*b.points >= 2, "bound_state.points", "need at least two points");
        if (b.Delta_over_beta_min && b.Delta_over_beta_max)
            check(*b.Delta_over_beta_min < *b.Delta_over_beta_max, "bound_state", "min must be below max");
    }
    if (c.interactions) {
        const auto& i = *c.interactions;
        if (i.detunings) check(!i.detunings->empty(), "interactions.detunings", "empty list");
        if (i.max_separation) check(*i.max_separation >= 0, "interactions.max_separation", "must be non-negative");
    }
    if (c.powerlaw) {
        const auto& p = *c.powerlaw;
        check(p.eta > 0.0, "powerlaw.eta", "must be positive");
        check(p.z_min > 0.0 && p.z_min < p.z_max, "powerlaw", "need 0 < z_min < z_max");
        check(p.n_drives >= 1, "powerlaw.n_drives", "need at least one drive");
        if (p.alpha) check(*p.alpha > 0.0, "powerlaw.alpha", "must be positive (lower band edge)");
        if (p.s_min) check(*p.s_min > 0.0, "powerlaw.s_min", "must be positive");
        if (p.max_iterations) check(*p.max_iterations >= 1, "powerlaw.max_iterations", "must be at least 1");
    }
    if (c.exchange) {
        const auto& e = *c.exchange;
        if (e.cooperativity) check(*e.cooperativity > 0.0, "exchange.cooperativity", "must be positive");
        if (e.t_points) check(*e.t_points >= 2, "exchange.t_points", "need at least two points");
    }
    if (c.evolve) {
        const auto& e = *c.evolve;
        check(e.t_max > 0.0, "evolve.t_max", "must be positive");
        if (e.n_sites) check(*e.n_sites >= 1 && *e.n_sites <= 10'000, "evolve.n_sites", "must lie in [1, 10^4]");
        if (e.t_points) check(*e.t_points >= 2, "evolve.t_points", "need at least two points");
        if (e.initial_site) check(*e.initial_site >= 0, "evolve.initial_site", "must be non-negative");
    }
    if (c.disorder) {
        const auto& d = *c.disorder;
        if (d.n_trials) check(*d.n_trials >= 2, "disorder.n_trials", "need at least two trials");
    }
    if (c.disorder_sweep) {
        const auto& s = *c.disorder_sweep;
        if (s.epsilon_min) check(*s.epsilon_min > 0.0, "disorder_sweep.epsilon_min", "must be positive");
        if (s.epsilon_min && s.epsilon_max)
            check(*s.epsilon_min < *s.epsilon_max, "disorder_sweep", "epsilon_min must be below epsilon_max");
        if (s.points) check(*s.points >= 2, "disorder_sweep.points", "need at least two points");
    }
}

} // namespace

double RunConfig::angular(double frequency) const {
    return units == UnitSystem::si ? 2.0 * std::numbers::pi * frequency : frequency;
}

double RunConfig::declared(double angular_frequency) const {
    return units == UnitSystem::si ? angular_frequency / (2.0 * std::numbers::pi) : angular_frequency;
}

BandEdge RunConfig::band_edge() const {
    if (!band) throw ConfigError("config: missing 'band' section");
    BandEdge b;
    b.omega_b = angular(band->omega_b);
    b.alpha = band->alpha;
    b.a = band->a;
    b.k0 = band->k0 ? *band->k0 : std::numbers::pi / band->a;
    b.validate();
    return b;
}

AtomCoupling RunConfig::atom_coupling() const {
    if (!coupling) throw ConfigError("config: missing 'coupling' section");
    const BandEdge b = band_edge();
    const double amp = coupling->bloch_amplitude.value_or(1.0);
    const double Delta = angular(coupling->Delta);
    const double gamma = angular(coupling->gamma);
    if (coupling->beta && coupling->g_cell)
        return AtomCoupling::from_both(b, angular(*coupling->beta), angular(*coupling->g_cell), Delta,
                                       gamma, amp);
    if (coupling->beta) return AtomCoupling::from_beta(b, angular(*coupling->beta), Delta, gamma, amp);
    if (coupling->g_cell) return AtomCoupling::from_g_cell(b, angular(*coupling->g_cell), Delta, gamma, amp);
    throw ConfigError("config: coupling: give beta, g_cell, or both");
}

AtomArray RunConfig::atom_array() const {
    if (!atoms) throw ConfigError("config: missing 'atoms' section");
    if (static_cast<bool>(atoms->sites) == static_cast<bool>(atoms->positions))
        throw ConfigError("config: atoms: give exactly one of 'sites' or 'positions'");
    const BandEdge b = band_edge();
    const AtomCoupling c = atom_coupling();
    AtomArray arr = atoms->sites
                        ? AtomArray::on_sites(b, *atoms->sites, c.gamma, c.bloch_amplitude)
                        : AtomArray::at_positions(b, *atoms->positions, c.gamma, c.bloch_amplitude);
    if (atoms->bloch) {
        if (atoms->bloch->size() != arr.positions.size())
            throw ConfigError("config: atoms.bloch: one [re, im] pair per atom required");
        arr.bloch_values.clear();
        for (const auto& [re, im] : *atoms->bloch) arr.bloch_values.emplace_back(re, im);
    }
    arr.validate();
    return arr;
}

std::vector<DriveField> RunConfig::drive_fields() const {
    if (!drives) throw ConfigError("config: missing 'drives' section");
    std::vector<DriveField> out;
    for (const auto& d : *drives) {
        DriveField f;
        f.Omega = angular(d.Omega);
        f.delta_L = angular(d.delta_L);
        f.Omega_prime = angular(d.Omega_prime.value_or(0.0));
        f.phi = d.phi.value_or(0.0);
        if (f.delta_L == 0.0) throw ConfigError("config: drives: delta_L must be non-zero");
        out.push_back(f);
    }
    return out;
}

LossModel RunConfig::loss_model() const {
    const AtomCoupling c = atom_coupling();
    LossModel l;
    l.gamma = c.gamma;
    if (losses && losses->kappa_p) l.kappa_p = angular(*losses->kappa_p);
    if (losses && losses->theta) {
        l.theta = *losses->theta;
    } else {
        l.theta = effective_cavity(band_edge(), c).theta();
    }
    l.validate();
    return l;
}

DielectricStack RunConfig::stack() const {
    if (!disorder) throw ConfigError("config: missing 'disorder' section");
    DielectricStack s;
    s.r = disorder->r;
    s.epsilon = disorder->epsilon;
    if (disorder->phi_b) s.phi_b = *disorder->phi_b;
    if (disorder->n_cells) {
        if (*disorder->n_cells < 2) throw ConfigError("config: disorder.n_cells must be at least 2");
        s.n_cells = static_cast<std::size_t>(*disorder->n_cells);
    }
    if (disorder->seed) s.seed = *disorder->seed;
    s.validate();
    return s;
}

RunConfig load_config(const json& document) {
    Reader root(document, "$");
    RunConfig c;
    const auto units = root.opt_string("units");
    if (!units) fail("$", "missing required key 'units'");
    if (*units == "si") c.units = UnitSystem::si;
    else if (*units == "dimensionless") c.units = UnitSystem::dimensionless;
    else fail("$.units", "expected \"si\" or \"dimensionless\"");

    if (const json* n = root.opt_node("band")) c.band = read_band(Reader(*n, "band"));
    if (const json* n = root.opt_node("coupling")) c.coupling = read_coupling(Reader(*n, "coupling"));
    if (const json* n = root.opt_node("atoms")) c.atoms = read_atoms(Reader(*n, "atoms"));
    if (const json* n = root.opt_node("drives")) {
        if (!n->is_array()) fail("drives", "expected an array");
        std::vector<DriveConfig> drives;
        for (std::size_t i = 0; i < n->size(); ++i)
            drives.push_back(read_drive(Reader((*n)[i], "drives[" + std::to_string(i) + "]")));
        c.drives = drives;
    }
    if (const json* n = root.opt_node("losses")) c.losses = read_losses(Reader(*n, "losses"));
    if (const json* n = root.opt_node("disorder")) c.disorder = read_disorder(Reader(*n, "disorder"));
    if (const json* n = root.opt_node("bound_state")) c.bound_state = read_bound_state(Reader(*n, "bound_state"));
    if (const json* n = root.opt_node("interactions")) c.interactions = read_interactions(Reader(*n, "interactions"));
    if (const json* n = root.opt_node("powerlaw")) c.powerlaw = read_powerlaw(Reader(*n, "powerlaw"));
    if (const json* n = root.opt_node("exchange")) c.exchange = read_exchange(Reader(*n, "exchange"));
    if (const json* n = root.opt_node("evolve")) c.evolve = read_evolve(Reader(*n, "evolve"));
    if (const json* n = root.opt_node("disorder_sweep")) c.disorder_sweep = read_sweep(Reader(*n, "disorder_sweep"));
    root.finish();

    validate(c);
    return c;
}

RunConfig load_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return load_config(doc);
}

json to_json(const RunConfig& c) {
    json j;
    j["units"] = c.units == UnitSystem::si ? "si" : "dimensionless";
    if (c.band) {
        json b;
        b["omega_b"] = c.band->omega_b;
        b["alpha"] = c.band->alpha;
        b["a"] = c.band->a;
        put(b, "k0", c.band->k0);
        j["band"] = b;
    }
    if (c.coupling) {
        json k;
        k["Delta"] = c.coupling->Delta;
        k["gamma"] = c.coupling->gamma;
        put(k, "beta", c.coupling->beta);
        put(k, "g_cell", c.coupling->g_cell);
        put(k, "bloch_amplitude", c.coupling->bloch_amplitude);
        j["coupling"] = k;
    }
    if (c.atoms) {
        json a = json::object();
        put(a, "sites", c.atoms->sites);
        if (c.atoms->positions) a["positions"] = number_list(*c.atoms->positions);
        if (c.atoms->bloch) {
            json pairs = json::array();
            for (const auto& [re, im] : *c.atoms->bloch) pairs.push_back(json::array({re, im}));
            a["bloch"] = pairs;
        }
        j["atoms"] = a;
    }
    if (c.drives) {
        json list = json::array();
        for (const auto& d : *c.drives) {
            json e;
            e["Omega"] = d.Omega;
            e["delta_L"] = d.delta_L;
            put(e, "Omega_prime", d.Omega_prime);
            put(e, "phi", d.phi);
            list.push_back(e);
        }
        j["drives"] = list;
    }
    if (c.losses) {
        json l = json::object();
        put(l, "kappa_p", c.losses->kappa_p);
        put(l, "theta", c.losses->theta);
        j["losses"] = l;
    }
    if (c.disorder) {
        json d;
        d["r"] = c.disorder->r;
        d["epsilon"] = c.disorder->epsilon;
        put(d, "phi_b", c.disorder->phi_b);
        put(d, "n_cells", c.disorder->n_cells);
        put(d, "n_trials", c.disorder->n_trials);
        put(d, "seed", c.disorder->seed);
        j["disorder"] = d;
    }
    if (c.bound_state) {
        json b = json::object();
        put(b, "beta_over_omega_b", c.bound_state->beta_over_omega_b);
        put(b, "Delta_over_beta_min", c.bound_state->Delta_over_beta_min);
        put(b, "Delta_over_beta_max", c.bound_state->Delta_over_beta_max);
        put(b, "points", c.bound_state->points);
        j["bound_state"] = b;
    }
    if (c.interactions) {
        json i = json::object();
        if (c.interactions->detunings) i["detunings"] = number_list(*c.interactions->detunings);
        put(i, "max_separation", c.interactions->max_separation);
        j["interactions"] = i;
    }
    if (c.powerlaw) {
        json p;
        p["eta"] = c.powerlaw->eta;
        p["z_min"] = c.powerlaw->z_min;
        p["z_max"] = c.powerlaw->z_max;
        p["n_drives"] = c.powerlaw->n_drives;
        put(p, "alpha", c.powerlaw->alpha);
        put(p, "s_min", c.powerlaw->s_min);
        put(p, "max_iterations", c.powerlaw->max_iterations);
        j["powerlaw"] = p;
    }
    if (c.exchange) {
        json e = json::object();
        put(e, "Delta", c.exchange->Delta);
        put(e, "separation_cells", c.exchange->separation_cells);
        put(e, "cooperativity", c.exchange->cooperativity);
        put(e, "t_points", c.exchange->t_points);
        j["exchange"] = e;
    }
    if (c.evolve) {
        json e;
        e["t_max"] = c.evolve->t_max;
        put(e, "n_sites", c.evolve->n_sites);
        put(e, "initial_site", c.evolve->initial_site);
        put(e, "t_points", c.evolve->t_points);
        j["evolve"] = e;
    }
    if (c.disorder_sweep) {
        json s = json::object();
        put(s, "epsilon_min", c.disorder_sweep->epsilon_min);
        put(s, "epsilon_max", c.disorder_sweep->epsilon_max);
        put(s, "points", c.disorder_sweep->points);
        j["disorder_sweep"] = s;
    }
    return j;
}

std::string canonical_dump(const RunConfig& config) {
    // nlohmann::json objects are std::map-backed, so keys come out sorted.
    return to_json(config).dump(2) + "\n";
}

json merge_documents(json base, const json& overlay) {
    if (!base.is_object() || !overlay.is_object()) return overlay;
    for (const auto& [key, value] : overlay.items()) {
        if (base.contains(key) && base[key].is_object() && value.is_object())
            base[key] = merge_documents(base[key], value);
        else
            base[key] = value;
    }
    return base;
}

std::vector<std::string> preset_names() { return {"apcw"}; }

json preset_document(const std::string& name) {
    if (name != "apcw") throw ConfigError("config: unknown preset '" + name + "'");
    // Alligator photonic-crystal waveguide near its lower (TE) band edge.
    return json::parse(R"({
  "units": "si",
  "band": {"omega_b": 3.33e14, "alpha": 10.6, "a": 3.71e-7},
  "coupling": {"Delta": 4.0e11, "gamma": 5.0e6, "g_cell": 1.22e10},
  "losses": {"kappa_p": 1.665e9},
  "bound_state": {"beta_over_omega_b": 4.75e-7, "Delta_over_beta_min": -10.0,
                  "Delta_over_beta_max": 10.0, "points": 401},
  "interactions": {"detunings": [4.0e11, 8.0e11, 1.3e12, 2.8e12], "max_separation": 55},
  "powerlaw": {"eta": 0.25, "z_min": 1.0, "z_max": 50.0, "n_drives": 2, "alpha": 0.2},
  "exchange": {"Delta": 2.8e12, "separation_cells": 1.0, "t_points": 201},
  "evolve": {"t_max": 2.0e-7, "n_sites": 50, "initial_site": 25, "t_points": 201},
  "disorder": {"r": 2.0, "phi_b": 1.5707963267948966, "epsilon": 1.0e-3,
               "n_cells": 10000, "n_trials": 200, "seed": 1},
  "disorder_sweep": {"epsilon_min": 1.0e-4, "epsilon_max": 1.0e-2, "points": 9}
})");
}

} // namespace bandedge
