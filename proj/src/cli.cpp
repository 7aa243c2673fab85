#include "rel_euler/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "rel_euler/analysis.hpp"
#include "rel_euler/eos.hpp"
#include "rel_euler/geometry.hpp"
#include "rel_euler/jet.hpp"
#include "rel_euler/kernels.hpp"
#include "rel_euler/schema_text.hpp"

namespace fs = std::filesystem;

namespace rel_euler::cli {

// ---------------------------------------------------------------- config

const json& schema() {
    static const json s = json::parse(kSchemaText);
    return s;
}

json default_config() {
    return json{
        {"vartheta", 2.0},
        {"seed", 0},
        {"output_dir", "rel_euler_out"},
        {"identities", json::array()},
        {"grid", {{"dim", 2}, {"n", 32}, {"L", 2.0 * std::numbers::pi}}},
        {"run",
         {{"cfl", 0.4},
          {"t_max", 3.0},
          {"fixed_dt", 0.0},
          {"snapshot_every", 1},
          {"speed_every", 1},
          {"dealias", true},
          {"gradient_ceiling", 1000.0},
          {"max_steps", 1000000}}},
        {"initial",
         {{"kind", "smooth_random"},
          {"rho", 0.25},
          {"amplitude", 0.1},
          {"mode", 1},
          {"travelling", true},
          {"velocity", {0.0, 0.0, 0.0}},
          {"max_mode", 2}}},
        {"jet", {{"order", 2}, {"count", 100}, {"amplitude", 0.1}, {"base_density", 0.25}, {"negative_control", false}}},
        {"grid_identities", {{"dt", 0.08}, {"nt", 5}, {"refinements", 2}}},
        {"energy", {{"s", 2.5}, {"s0", 2.25}, {"s_star", 2.25}}},
        {"probe",
         {{"kind", "both"},
          {"count", 200},
          {"n", 128},
          {"dim", 2},
          {"a", 0.0},
          {"bandwidth", 8},
          {"adversarial", false}}},
        {"geometry",
         {{"trace_steps", 1000},
          {"ds", 0.002},
          {"x0", {0.0, 1.0, 2.0, 0.5}},
          {"xi0", {0.0, 1.0, 0.5, 0.2}},
          {"phi_gradient", {0.1, -0.2}},
          {"minor_samples", 10000},
          {"elliptic_n", 16},
          {"elliptic_nt", 16},
          {"elliptic_amplitude", 0.3},
          {"ellip_count", 20},
          {"ellip_dim", 2},
          {"ellip_resolutions", {8, 16, 32}}}},
        {"duhamel", {{"dim", 2}, {"n", 32}, {"T", 1.0}, {"steps", {16, 32, 64}}, {"amplitude", 0.05}}},
        {"tolerances",
         {{"jet_order1", 1e-9},
          {"jet_order2", 1e-9},
          {"jet_order3", 1e-8},
          {"jet_order4", 1e-7},
          {"negative_control", 1e-3},
          {"constraint", 1e-9},
          {"grid_identity", 1e-4},
          {"grid_refinement_factor", 8.0},
          {"acoustic_order", 0.2},
          {"phase_speed", 0.01},
          {"metric", 1e-12},
          {"frame", 1e-9},
          {"hamiltonian", 1e-8},
          {"minors", 1e-12},
          {"manufactured", 1e-8},
          {"ellip_refinement", 0.25},
          {"duhamel_constant", 1e-12},
          {"duhamel_order", 0.2},
          {"lp_reconstruction", 1e-11},
          {"parseval", 1e-10},
          {"gronwall_refinement", 0.1},
          {"probe_refinement", 0.2}}},
    };
}

namespace {

std::string type_of(const json& v) {
    if (v.is_object()) return "object";
    if (v.is_array()) return "array";
    if (v.is_string()) return "string";
    if (v.is_boolean()) return "boolean";
    if (v.is_number_integer()) return "integer";
    if (v.is_number()) return "number";
    return "null";
}

bool type_matches(const json& v, const std::string& t) {
    if (t == "number") return v.is_number();
    if (t == "integer") return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
    return type_of(v) == t;
}

void validate_at(const json& v, const json& s, const std::string& path, std::vector<std::string>& out) {
    const std::string where = path.empty() ? "/" : path;
    if (s.contains("type") && !type_matches(v, s["type"].get<std::string>())) {
        out.push_back(where + ": expected " + s["type"].get<std::string>() + ", got " + type_of(v));
        return;
    }
    if (s.contains("enum")) {
        bool found = false;
        for (const auto& e : s["enum"]) found = found || e == v;
        if (!found) out.push_back(where + ": value " + v.dump() + " not in " + s["enum"].dump());
    }
    if (v.is_number()) {
        const double x = v.get<double>();
        if (s.contains("minimum") && x < s["minimum"].get<double>())
            out.push_back(where + ": " + v.dump() + " < minimum " + s["minimum"].dump());
        if (s.contains("maximum") && x > s["maximum"].get<double>())
            out.push_back(where + ": " + v.dump() + " > maximum " + s["maximum"].dump());
        if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
            out.push_back(where + ": " + v.dump() + " <= exclusive minimum " + s["exclusiveMinimum"].dump());
        if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>())
            out.push_back(where + ": " + v.dump() + " >= exclusive maximum " + s["exclusiveMaximum"].dump());
    }
    if (v.is_array()) {
        if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
            out.push_back(where + ": fewer than " + s["minItems"].dump() + " items");
        if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
            out.push_back(where + ": more than " + s["maxItems"].dump() + " items");
        if (s.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i)
                validate_at(v[i], s["items"], path + "/" + std::to_string(i), out);
    }
    if (v.is_object()) {
        const json props = s.value("properties", json::object());
        const bool closed = s.contains("additionalProperties") && s["additionalProperties"] == false;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (props.contains(it.key()))
                validate_at(it.value(), props[it.key()], path + "/" + it.key(), out);
            else if (closed)
                out.push_back(where + ": unknown key '" + it.key() + "'");
        }
    }
}

}  // namespace

std::vector<std::string> validate(const json& instance, const json& s) {
    std::vector<std::string> out;
    validate_at(instance, s, "", out);
    return out;
}

json merge(json base, const json& patch) {
    if (!base.is_object() || !patch.is_object()) return patch;
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object())
            base[it.key()] = merge(base[it.key()], it.value());
        else
            base[it.key()] = it.value();
    }
    return base;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json user;
    try {
        user = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON", {e.what()});
    }
    auto diags = validate(user, schema());
    if (!diags.empty()) throw ConfigError("config '" + path + "' violates the schema", diags);
    return merge(default_config(), user);
}

// ---------------------------------------------------------------- checks

Check check_le(std::string name, std::string anchor, double value, double tol, json detail) {
    Check c{std::move(name), std::move(anchor), value, tol, "<=", false, std::move(detail)};
    c.pass = std::isfinite(value) && value <= tol;
    return c;
}

Check check_ge(std::string name, std::string anchor, double value, double tol, json detail) {
    Check c{std::move(name), std::move(anchor), value, tol, ">=", false, std::move(detail)};
    c.pass = std::isfinite(value) && value >= tol;
    return c;
}

namespace {

// nlohmann writes NaN and inf as null
json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

}  // namespace

json to_json(const Check& c) {
    return json{{"name", c.name},         {"anchor", c.anchor}, {"value", num(c.value)},
                {"tolerance", num(c.tolerance)}, {"relation", c.relation}, {"pass", c.pass},
                {"detail", c.detail}};
}

// ---------------------------------------------------------------- config to objects

namespace {

Grid grid_of(const json& cfg) {
    Grid g;
    g.dim = cfg["grid"]["dim"].get<int>();
    g.n = cfg["grid"]["n"].get<int>();
    g.L = cfg["grid"]["L"].get<double>();
    return g;
}

std::array<double, 3> arr3(const json& a) { return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()}; }

geometry::Vec4 vec4(const json& a) {
    return geometry::Vec4(a[0].get<double>(), a[1].get<double>(), a[2].get<double>(), a[3].get<double>());
}

}  // namespace

dynamics::RunConfig run_config(const json& cfg) {
    dynamics::RunConfig rc;
    const json& r = cfg["run"];
    rc.grid = grid_of(cfg);
    rc.cfl = r["cfl"].get<double>();
    rc.t_max = r["t_max"].get<double>();
    rc.fixed_dt = r["fixed_dt"].get<double>();
    rc.snapshot_every = r["snapshot_every"].get<int>();
    rc.speed_every = r["speed_every"].get<int>();
    rc.dealias = r["dealias"].get<bool>();
    rc.gradient_ceiling = r["gradient_ceiling"].get<double>();
    rc.max_steps = r["max_steps"].get<long>();
    rc.seed = cfg["seed"].get<std::uint64_t>();
    rc.theta = cfg["vartheta"].get<double>();
    return rc;
}

dynamics::HyperbolicState initial_state(const json& cfg) {
    const Grid g = grid_of(cfg);
    const json& i = cfg["initial"];
    const double theta = cfg["vartheta"].get<double>();
    const std::string kind = i["kind"].get<std::string>();
    const double rho = i["rho"].get<double>();
    if (kind == "constant") return dynamics::constant_state(g, theta, rho, arr3(i["velocity"]));
    if (kind == "acoustic")
        return dynamics::acoustic_wave(g, theta, rho, i["amplitude"].get<double>(), i["mode"].get<int>(),
                                       i["travelling"].get<bool>());
    return dynamics::smooth_random(g, theta, rho, i["amplitude"].get<double>(), cfg["seed"].get<std::uint64_t>(),
                                   i["max_mode"].get<int>());
}

std::vector<calc::Id> parse_identities(const std::vector<std::string>& names) {
    std::vector<calc::Id> ids;
    std::vector<std::string> bad;
    for (const auto& n : names) {
        auto id = calc::parse_identity(n);
        if (id)
            ids.push_back(*id);
        else
            bad.push_back("unknown identity '" + n + "'");
    }
    if (!bad.empty()) throw ConfigError("bad identity list", bad);
    return ids;
}

double density_for_cs2(double cs2, double theta) {
    eos::check_theta(theta);
    // cs2 = theta expm1(h (theta - 1) / theta)
    const double h = std::log1p(cs2 / theta) * theta / (theta - 1.0);
    return eos::density_from_enthalpy(h, theta);
}

// ---------------------------------------------------------------- studies

namespace {

std::complex<double> mode_coefficient(const Grid& g, const Scalar& f, int m) {
    std::complex<double> c = 0.0;
    const double k = 2.0 * std::numbers::pi * m / g.L;
    for (std::size_t j = 0; j < f.size(); ++j) c += f[j] * std::exp(std::complex<double>(0.0, -k * g.coord(j)[0]));
    return c / static_cast<double>(f.size());
}

double state_distance(const FieldSet& a, const FieldSet& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.h.size(); ++j) {
        s += (a.h[j] - b.h[j]) * (a.h[j] - b.h[j]);
        for (int c = 1; c < 4; ++c) s += (a.u[c][j] - b.u[c][j]) * (a.u[c][j] - b.u[c][j]);
    }
    return std::sqrt(s / static_cast<double>(a.h.size()));
}

}  // namespace

AcousticStudy acoustic_convergence(int n, double theta, double rho, double amplitude, int mode, double dt0, double T) {
    AcousticStudy st;
    st.cs = std::sqrt(eos::cs2_from_density(rho, theta));
    const Grid g{1, n, 2.0 * std::numbers::pi};
    const auto s0 = dynamics::acoustic_wave(g, theta, rho, amplitude, mode, true);
    std::vector<FieldSet> finals;
    for (int lvl = 0; lvl < 3; ++lvl) {
        dynamics::RunConfig rc;
        rc.grid = g;
        rc.theta = theta;
        rc.fixed_dt = dt0 / (1 << lvl);
        rc.t_max = T;
        rc.dealias = true;
        // about a tenth of a period between snapshots for phase unwrapping
        const double omega = st.cs * 2.0 * std::numbers::pi * mode / g.L;
        rc.snapshot_every = std::max(1, static_cast<int>(0.6 / (omega * rc.fixed_dt)));
        auto tr = dynamics::simulate(s0, rc);
        if (tr.aborted) throw std::runtime_error("acoustic run aborted: " + tr.abort_reason);
        st.dts.push_back(rc.fixed_dt);
        finals.push_back(tr.snapshots.back());
        if (lvl == 2) {
            double phase = 0.0, prev = std::arg(mode_coefficient(g, tr.snapshots.front().h, mode));
            for (std::size_t k = 1; k < tr.snapshots.size(); ++k) {
                const double a = std::arg(mode_coefficient(g, tr.snapshots[k].h, mode));
                double d = a - prev;
                while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
                while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
                phase += d;
                prev = a;
            }
            const double k = 2.0 * std::numbers::pi * mode / g.L;
            const double dt_span = tr.snapshots.back().t - tr.snapshots.front().t;
            // right-moving: exp(i k (x - c t)) has phase -k c t
            st.phase_speed = -phase / (k * dt_span);
        }
    }
    st.differences = {state_distance(finals[0], finals[1]), state_distance(finals[1], finals[2])};
    st.order = std::log2(st.differences[0] / st.differences[1]);
    return st;
}

std::vector<GridLevel> grid_refinement(const dynamics::HyperbolicState& s0, const dynamics::RunConfig& base,
                                       const std::vector<calc::Id>& ids, double dt0, int levels, double t_c, int nt) {
    if (nt < 3 || nt % 2 == 0) throw std::invalid_argument("grid_refinement: nt must be odd and >= 3");
    std::vector<GridLevel> out;
    for (int lvl = 0; lvl < levels; ++lvl) {
        GridLevel L;
        L.dt = dt0 / (1 << lvl);
        const long center = std::lround(t_c / L.dt);
        if (center < nt / 2) throw std::invalid_argument("grid_refinement: stack centre too close to t = 0");
        dynamics::RunConfig rc = base;
        rc.fixed_dt = L.dt;
        rc.t_max = (center + nt / 2) * L.dt;
        rc.snapshot_every = 1;
        auto tr = dynamics::simulate(s0, rc);
        if (tr.aborted) throw std::runtime_error("identity run aborted: " + tr.abort_reason);
        for (const auto& d : tr.diagnostics) L.normalization_defect = std::max(L.normalization_defect, d.normalization_defect);
        const auto S = vorticity::stack_from_snapshots(tr.snapshots, static_cast<int>(center), nt, base.dealias);
        for (auto id : ids) L.reports.push_back(vorticity::grid_identity(S, id));
        L.orth = vorticity::orthogonality(S);
        out.push_back(std::move(L));
    }
    return out;
}

namespace {

Scalar product_field(const Grid& g, double phase, double kx, double ky) {
    Scalar F(g.size());
    for (std::size_t i = 0; i < F.size(); ++i) {
        const auto x = g.coord(i);
        F[i] = std::sin(kx * x[0] + phase) * std::cos(ky * x[1]);
    }
    return F;
}

}  // namespace

DuhamelStudy duhamel_study(int dim, int n, double T, const std::vector<int>& steps, double amplitude,
                           std::uint64_t seed) {
    DuhamelStudy st;
    st.steps = steps;
    const Grid g{dim, n, 2.0 * std::numbers::pi};
    const double ky = dim >= 2 ? 1.0 : 0.0;
    const geometry::SpatialMetric flat = geometry::flat_metric(g);
    const geometry::DuhamelSource src{
        [&](double t) {
            Scalar F = product_field(g, 0.0, 1.0, ky);
            for (auto& v : F) v *= std::sin(t + 0.3);
            return F;
        },
        [&](double t) {
            Scalar F = product_field(g, 0.0, 1.0, ky);
            for (auto& v : F) v *= std::cos(t + 0.3);
            return F;
        }};
    const auto fs = dynamics::to_fieldset(dynamics::smooth_random(g, 2.0, 0.25, amplitude, seed, 2));
    const auto var = geometry::spatial_part(geometry::acoustic_metric(fs));
    for (int k : steps) {
        st.flat.push_back(geometry::duhamel_check(flat, src, T, k).residual);
        const auto r = geometry::duhamel_check(var, src, T, k);
        st.variable.push_back(r.residual);
        st.variable_printed.push_back(r.printed_residual);
    }
    if (steps.size() >= 2) {
        const std::size_t m = steps.size();
        st.flat_order = std::log(st.flat[m - 2] / st.flat[m - 1]) / std::log(double(steps[m - 1]) / steps[m - 2]);
    }
    const geometry::DuhamelSource cst{[&](double) { return Scalar(g.size(), 0.7); },
                                      [&](double) { return Scalar(g.size(), 0.0); }};
    st.constant = geometry::duhamel_check(var, cst, T, steps.front()).residual;
    return st;
}

// ---------------------------------------------------------------- commands

namespace {

struct Outcome {
    std::vector<Check> checks;
    json data = json::object();
};

struct Context {
    json cfg;
    fs::path out;
    bool trace = false, frame = false, duhamel = false, split = false;
};

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream o(p, std::ios::binary);
    if (!o) throw std::runtime_error("cannot write " + p.string());
    o << s;
}

std::string diag_csv(const std::vector<dynamics::DiagRow>& rows) {
    std::string s = dynamics::diag_csv_header() + "\n";
    for (const auto& r : rows) s += dynamics::diag_csv_row(r) + "\n";
    return s;
}

std::string energy_csv(const std::vector<analysis::EnergyRecord>& recs) {
    std::string s = analysis::energy_csv_header() + "\n";
    for (const auto& r : recs) s += analysis::energy_csv_row(r) + "\n";
    return s;
}

double tol(const Context& c, const std::string& key) { return c.cfg["tolerances"][key].get<double>(); }

std::vector<std::string> identity_names(const Context& c) { return c.cfg["identities"].get<std::vector<std::string>>(); }

Outcome cmd_simulate(const Context& c) {
    Outcome o;
    const auto s0 = initial_state(c.cfg);
    const auto rc = run_config(c.cfg);
    const auto tr = dynamics::simulate(s0, rc);
    fs::create_directories(c.out / "snapshots");
    json files = json::array();
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%04zu.bin", k);
        write_snapshot((c.out / "snapshots" / name).string(), to_snapshot(tr.snapshots[k]));
        files.push_back(std::string("snapshots/") + name);
    }
    if (tr.aborted) {
        write_snapshot((c.out / "snapshots" / "last_valid.bin").string(),
                       to_snapshot(dynamics::to_fieldset(tr.last_valid)));
        files.push_back("snapshots/last_valid.bin");
    }
    write_text(c.out / "diagnostics.csv", diag_csv(tr.diagnostics));

    double norm = 0.0, orth = 0.0, res = 0.0, smin = INFINITY, smax = 0.0;
    for (const auto& d : tr.diagnostics) {
        norm = std::max(norm, d.normalization_defect);
        orth = std::max(orth, d.orthogonality_defect);
        res = std::max(res, d.l2_euler_residual);
        smin = std::min(smin, d.max_speed);
        smax = std::max(smax, d.max_speed);
    }
    o.checks.push_back(check_le("run completed", "admissibility: c_s <= 1, u^0 >= 1, p > 0 along the run",
                                tr.aborted ? 1.0 : 0.0, 0.0, {{"abort_reason", tr.abort_reason}}));
    o.checks.push_back(check_le("normalization", "u^a u_a = -1", norm, tol(c, "constraint")));
    o.checks.push_back(check_le("orthogonality", "u_a w^a = 0", orth, tol(c, "constraint")));
    o.data = {{"steps", tr.steps},
              {"t_final", tr.snapshots.back().t},
              {"aborted", tr.aborted},
              {"snapshots", files},
              {"max_speed_range", {num(smin), num(smax)}},
              {"max_l2_euler_residual", num(res)}};
    return o;
}

Outcome cmd_jet_verify(const Context& c) {
    Outcome o;
    const json& j = c.cfg["jet"];
    jet::BatchParams p;
    p.order = j["order"].get<int>();
    p.count = j["count"].get<int>();
    p.amplitude = j["amplitude"].get<double>();
    p.base_density = j["base_density"].get<double>();
    p.theta = c.cfg["vartheta"].get<double>();
    p.seed = c.cfg["seed"].get<std::uint64_t>();
    std::vector<calc::Id> ids;
    if (identity_names(c).empty()) {
        for (const auto& i : calc::identity_table())
            if (i.depth <= p.order) ids.push_back(i.id);
    } else {
        ids = parse_identities(identity_names(c));
    }
    const double t = tol(c, "jet_order" + std::to_string(p.order));
    json rows = json::array();
    for (auto id : ids) {
        const auto b = jet::verify_batch(id, p);
        json row = {{"identity", b.identity},
                    {"anchor", b.anchor},
                    {"jet_order", b.jet_order},
                    {"count", b.count},
                    {"max_rel_residual", num(b.max_rel_residual)},
                    {"median_rel_residual", num(b.median_rel_residual)},
                    {"l2_rel_residual", num(b.max_l2_rel_residual)},
                    {"n_points", b.n_points}};
        o.checks.push_back(check_le(b.identity, b.anchor, b.max_rel_residual, t,
                                    {{"median_rel_residual", num(b.median_rel_residual)}, {"jet_order", b.jet_order}}));
        if (j["negative_control"].get<bool>() && calc::info(id).solution_only) {
            jet::BatchParams q = p;
            q.constrained = false;
            const auto nb = jet::verify_batch(id, q);
            row["negative_control_median"] = num(nb.median_rel_residual);
            o.checks.push_back(check_ge(b.identity + " negative control", b.anchor, nb.median_rel_residual,
                                        tol(c, "negative_control"), {{"statistic", "median over jets"}}));
        }
        rows.push_back(row);
    }
    o.data = {{"identities", rows}};
    return o;
}

std::vector<calc::Id> default_grid_ids() {
    using calc::Id;
    return {Id::WTe_h, Id::WTe_u, Id::CEQ, Id::CEQ0, Id::CEQ1, Id::HDe, Id::OEe,
            Id::c2,    Id::d5,    Id::OE00, Id::cr04, Id::cra0, Id::cra1};
}

json report_json(const vorticity::Report& r) {
    return {{"identity", r.identity},
            {"anchor", r.anchor},
            {"max_rel_residual", num(r.max_rel_residual)},
            {"l2_rel_residual", num(r.l2_rel_residual)},
            {"n_points", r.n_points},
            {"jet_order", r.jet_order}};
}

Outcome cmd_verify_identities(const Context& c) {
    Outcome o;
    auto ids = identity_names(c).empty() ? default_grid_ids() : parse_identities(identity_names(c));
    for (auto id : ids) {
        const auto& inf = calc::info(id);
        if (inf.needs_one_form || inf.needs_u_minus)
            throw jet::PreconditionError(std::string("identity ") + inf.name +
                                         " needs auxiliary fields and is checked by jet-verify only");
    }
    const json& gi = c.cfg["grid_identities"];
    const double dt0 = gi["dt"].get<double>();
    const int nt = gi["nt"].get<int>();
    const int levels = gi["refinements"].get<int>() + 1;
    const double t_c = (nt / 2 + 2) * dt0;
    const auto levs = grid_refinement(initial_state(c.cfg), run_config(c.cfg), ids, dt0, levels, t_c, nt);

    json lv = json::array();
    for (const auto& L : levs) {
        json reps = json::array();
        for (const auto& r : L.reports) reps.push_back(report_json(r));
        lv.push_back({{"dt", L.dt},
                      {"identities", reps},
                      {"orthogonality", {{"uw", num(L.orth.uw)}, {"uW", num(L.orth.uW)}}},
                      {"normalization_defect", num(L.normalization_defect)}});
        o.checks.push_back(check_le("orthogonality dt=" + std::to_string(L.dt), "u_a w^a = 0", L.orth.uw,
                                    tol(c, "constraint")));
    }
    const auto& fine = levs.back();
    for (const auto& r : fine.reports)
        o.checks.push_back(check_le(r.identity, r.anchor, r.max_rel_residual, tol(c, "grid_identity"),
                                    {{"dt", fine.dt}, {"l2_rel_residual", num(r.l2_rel_residual)}}));
    if (levels >= 3) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (ids[i] != calc::Id::WTe_h && ids[i] != calc::Id::WTe_u) continue;
            const double a = levs[levels - 3].reports[i].l2_rel_residual, b = fine.reports[i].l2_rel_residual;
            o.checks.push_back(check_ge(fine.reports[i].identity + " refinement", fine.reports[i].anchor, a / b,
                                        tol(c, "grid_refinement_factor"),
                                        {{"coarse_l2", num(a)}, {"fine_l2", num(b)}, {"dt_ratio", 4}}));
        }
    }
    const auto S = vorticity::local_stack(dynamics::to_fieldset(initial_state(c.cfg)), fine.dt, nt);
    const auto d17 = vorticity::d17_ratio(S, c.cfg["energy"]["s0"].get<double>());
    o.data = {{"levels", lv}, {"t_c", t_c}, {"d17", {{"lhs", num(d17.lhs)}, {"rhs", num(d17.rhs)}, {"ratio", num(d17.ratio)}}}};
    return o;
}

Outcome cmd_norms(const Context& c) {
    Outcome o;
    // Littlewood-Paley partition and the single-frequency example
    {
        const Grid g{2, 64, 2.0 * std::numbers::pi};
        const auto s = dynamics::smooth_random(g, 2.0, 0.25, 0.3, c.cfg["seed"].get<std::uint64_t>(), 5);
        const Scalar& f = s.u[0];
        double mean = 0.0;
        for (double v : f) mean += v;
        mean /= f.size();
        const auto R = analysis::dyadic_range(g);
        Scalar sum(f.size(), mean);
        for (int j = R.jmin; j <= R.jmax; ++j) {
            const Scalar pj = analysis::lp_project(g, f, j);
            for (std::size_t i = 0; i < f.size(); ++i) sum[i] += pj[i];
        }
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            err = std::max(err, std::abs(sum[i] - f[i]));
            scale = std::max(scale, std::abs(f[i]));
        }
        o.checks.push_back(check_le("LP reconstruction", "sum_j P_j f = f - mean(f)", err / scale,
                                    tol(c, "lp_reconstruction"), {{"jmin", R.jmin}, {"jmax", R.jmax}}));
        const Grid g1{1, 64, 2.0 * std::numbers::pi};
        Scalar sn(g1.size());
        for (std::size_t i = 0; i < sn.size(); ++i) sn[i] = std::sin(g1.coord(i)[0]);
        const double l2 = analysis::l2_norm(g1, sn);
        const double hs = analysis::sobolev_norm_weighted(g1, sn, 2.0, true).value;
        const double want = std::sqrt(std::numbers::pi);
        o.checks.push_back(check_le("Parseval sin(x) L2", "||sin x||_{L2(0,2pi)} = sqrt(pi)", std::abs(l2 - want),
                                    tol(c, "parseval"), {{"value", l2}}));
        o.checks.push_back(check_le("Parseval sin(x) H^2 homogeneous", "||sin x||_{dot H^2} = sqrt(pi)",
                                    std::abs(hs - want), tol(c, "parseval"), {{"value", hs}}));
    }
    // energies along the configured run and along a run at twice the resolution
    analysis::EnergyParams ep;
    ep.s = c.cfg["energy"]["s"].get<double>();
    ep.s0 = c.cfg["energy"]["s0"].get<double>();
    ep.s_star = c.cfg["energy"]["s_star"].get<double>();
    json runs = json::array();
    std::vector<double> Ks;
    for (int lvl = 0; lvl < 2; ++lvl) {
        json cfg = c.cfg;
        cfg["grid"]["n"] = c.cfg["grid"]["n"].get<int>() << lvl;
        cfg["run"]["snapshot_every"] = std::max(1, c.cfg["run"]["snapshot_every"].get<int>()) << lvl;
        const auto tr = dynamics::simulate(initial_state(cfg), run_config(cfg));
        if (tr.aborted) throw std::runtime_error("norms run aborted: " + tr.abort_reason);
        const auto recs = analysis::energy_functionals(tr.snapshots, ep);
        write_text(c.out / (lvl == 0 ? "energy.csv" : "energy_refined.csv"), energy_csv(recs));
        const auto gr = analysis::gronwall_diagnostic(recs);
        runs.push_back({{"n", cfg["grid"]["n"]},
                        {"K", num(gr.K)},
                        {"bounded", gr.bounded},
                        {"skipped", gr.skipped},
                        {"note", gr.note},
                        {"E0", num(recs.front().E_s)},
                        {"M_final", num(recs.back().M)}});
        Check k{"Gronwall K finite n=" + cfg["grid"]["n"].dump(), "E(t) <= E(0) exp(K M(t))", gr.K,
                std::numeric_limits<double>::max(), "finite", gr.skipped || (gr.bounded && std::isfinite(gr.K)),
                {{"note", gr.note}}};
        o.checks.push_back(k);
        Ks.push_back(gr.K);
    }
    const double rel = Ks[0] != 0.0 ? std::abs(Ks[1] - Ks[0]) / std::abs(Ks[0]) : std::abs(Ks[1]);
    o.checks.push_back(check_le("Gronwall K refinement", "E(t) <= E(0) exp(K M(t))", rel, tol(c, "gronwall_refinement"),
                                {{"K", {num(Ks[0]), num(Ks[1])}}}));
    o.data = {{"runs", runs}};
    return o;
}

Outcome geometry_frame(const Context& c, const geometry::AcousticMetric& M) {
    Outcome o;
    const json& gc = c.cfg["geometry"];
    const double p1 = gc["phi_gradient"][0].get<double>(), p2 = gc["phi_gradient"][1].get<double>();
    const double theta = c.cfg["vartheta"].get<double>();
    const double h0 = eos::enthalpy_from_density(c.cfg["initial"]["rho"].get<double>(), theta);
    double rest = 0.0, pert = 0.0;
    bool other_neg = true;
    {
        const auto up = geometry::rest_metric_upper(h0, theta);
        const auto f = geometry::null_frame(up, p1, p2);
        rest = geometry::frame_relations(up.inverse(), f).max();
        other_neg = other_neg && f.other_branch_negative;
    }
    const std::size_t stride = std::max<std::size_t>(1, M.grid.size() / 256);
    for (std::size_t j = 0; j < M.grid.size(); j += stride) {
        const auto f = geometry::null_frame(M.upper_at(j), p1, p2);
        pert = std::max(pert, geometry::frame_relations(M.lower_at(j), f).max());
        other_neg = other_neg && f.other_branch_negative;
    }
    const std::string anchor = "null frame: <l,l> = <lbar,lbar> = 0, <l,lbar> = 2, <e_a,e_b> = delta, <l,e_a> = <lbar,e_a> = 0";
    o.checks.push_back(check_le("frame relations, constant metric", anchor, rest, tol(c, "frame")));
    o.checks.push_back(check_le("frame relations, perturbed metric", anchor, pert, tol(c, "frame")));
    o.checks.push_back(check_le("discarded null root has <dt,k> < 0", "future-directed choice of phi_t",
                                other_neg ? 0.0 : 1.0, 0.0));

    std::mt19937_64 rng(c.cfg["seed"].get<std::uint64_t>());
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    double min_minor = INFINITY, closed_vs_det = 0.0;
    const int ns = gc["minor_samples"].get<int>();
    for (int k = 0; k < ns; ++k) {
        Eigen::Vector3d v;
        do v = Eigen::Vector3d(ud(rng), ud(rng), ud(rng)); while (v.norm() > 1.0);
        v *= 3.0 * std::cbrt(std::abs(ud(rng)));
        const geometry::Vec4 u(std::sqrt(1.0 + v.squaredNorm()), v[0], v[1], v[2]);
        const auto a = geometry::minors(u), b = geometry::minors_determinant(u);
        for (int i = 0; i < 4; ++i) {
            min_minor = std::min(min_minor, a[i]);
            closed_vs_det = std::max(closed_vs_det, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
        }
    }
    o.checks.push_back(check_ge("leading minors of m + 2uu", "p_1..p_4 >= 1 for normalized u", min_minor,
                                1.0 - tol(c, "minors"), {{"samples", ns}, {"closed_vs_determinant", num(closed_vs_det)}}));
    o.data["frame"] = {{"constant", num(rest)}, {"perturbed", num(pert)}};
    return o;
}

Outcome geometry_trace(const Context& c, const geometry::AcousticMetric& M) {
    Outcome o;
    const json& gc = c.cfg["geometry"];
    const int steps = gc["trace_steps"].get<int>();
    const double ds = gc["ds"].get<double>();
    const auto tr = geometry::null_geodesic_trace(geometry::interpolated_sampler(M), vec4(gc["x0"]), vec4(gc["xi0"]), ds, steps);
    write_text(c.out / "trace.csv", geometry::trace_csv(tr));
    const auto tc = geometry::null_geodesic_trace(geometry::constant_sampler(M.upper_at(0)), vec4(gc["x0"]),
                                                  vec4(gc["xi0"]), ds, steps);
    const std::string anchor = "Hamiltonian g^{ab} xi_a xi_b = 0 along null geodesics";
    o.checks.push_back(check_le("Hamiltonian, acoustic metric", anchor, tr.max_abs_H, tol(c, "hamiltonian"),
                                {{"steps", steps}, {"projected", tr.projected}, {"truncated", tr.truncated}}));
    o.checks.push_back(check_le("Hamiltonian, constant metric", anchor, tc.max_abs_H, tol(c, "hamiltonian")));
    o.data["trace"] = {{"points", tr.points.size()}, {"file", "trace.csv"}};
    return o;
}

Outcome geometry_elliptic(const Context& c) {
    Outcome o;
    const json& gc = c.cfg["geometry"];
    const auto seed = c.cfg["seed"].get<std::uint64_t>();
    const int dim = gc["ellip_dim"].get<int>();
    const double amp = gc["elliptic_amplitude"].get<double>();
    const auto mr = geometry::manufactured_solve(3, gc["elliptic_n"].get<int>(), gc["elliptic_nt"].get<int>(), amp, seed);
    o.checks.push_back(check_le("manufactured solve of P", "P f = f - (m^{bc} + 2 u^b u^c) d_b d_c f",
                                mr.rel_l2_error, tol(c, "manufactured"),
                                {{"iterations", mr.stats.iterations}, {"residual", num(mr.stats.residual)}}));
    std::vector<std::vector<geometry::EllipConstant>> cs;
    const auto res = gc["ellip_resolutions"].get<std::vector<int>>();
    for (int n : res) cs.push_back(geometry::ellip_constants(dim, n, n, gc["ellip_count"].get<int>(), seed, amp));
    json table = json::array();
    for (std::size_t a = 0; a < cs[0].size(); ++a) {
        json vals = json::array();
        double worst = 0.0;
        for (std::size_t r = 0; r < cs.size(); ++r) {
            vals.push_back(num(cs[r][a].max_ratio));
            if (r > 0) worst = std::max(worst, std::abs(cs[r][a].max_ratio / cs[r - 1][a].max_ratio - 1.0));
        }
        table.push_back({{"a", cs[0][a].a}, {"max_ratio", vals}});
        o.checks.push_back(check_le("ellip constant a=" + json(cs[0][a].a).dump(),
                                    "||v||_{L2 H^a} <= C ||P v||_{L2 H^{a-2}}", worst, tol(c, "ellip_refinement"),
                                    {{"resolutions", res}, {"max_ratio", vals}}));
    }
    // split of a smooth periodic state
    const Grid g{dim, 8, 2.0 * std::numbers::pi};
    const auto L = StLayout::periodic(g, 8, 2.0 * std::numbers::pi);
    const auto u = geometry::synthetic_velocity(L, 0.2, seed, 1);
    const StField h = 0.05 * geometry::random_spacetime(L, seed + 1, 1) + 0.2;
    const auto S = vorticity::make_state(L, h, u, c.cfg["vartheta"].get<double>());
    auto f = vorticity::make_fluid(S);
    geometry::StVector W;
    for (int a = 0; a < 4; ++a) W[a] = f.W(a);
    const auto sp = geometry::elliptic_split(S, W);
    double rec = 0.0;
    for (int a = 0; a < 4; ++a) rec = std::max(rec, magnitude(sp.u_minus[a] + sp.u_plus[a] - u[a]));
    o.checks.push_back(check_le("elliptic split solve", "P u_- = e^{-h} W, u = u_- + u_+", sp.max_residual,
                                tol(c, "manufactured"),
                                {{"iterations", sp.max_iterations}, {"recombination", num(rec)}}));
    o.data["ellip"] = table;
    return o;
}

Outcome cmd_duhamel(const Context& c) {
    Outcome o;
    const json& d = c.cfg["duhamel"];
    const auto steps = d["steps"].get<std::vector<int>>();
    const auto st = duhamel_study(d["dim"].get<int>(), d["n"].get<int>(), d["T"].get<double>(), steps,
                                  d["amplitude"].get<double>(), c.cfg["seed"].get<std::uint64_t>());
    const std::string anchor = "modified Duhamel: box_g phi = -d_t F + 2 g^{0i} d_i F";
    o.checks.push_back(check_le("flat residual order", anchor, std::abs(st.flat_order - 2.0), tol(c, "duhamel_order"),
                                {{"observed_order", num(st.flat_order)}, {"expected_order", 2}}));
    double worst = 0.0;
    for (std::size_t k = 1; k < st.variable.size(); ++k) worst = std::max(worst, st.variable[k] / st.variable[k - 1]);
    o.checks.push_back(check_le("variable-metric residual decreases", anchor, worst, 1.0,
                                {{"statistic", "max ratio of successive residuals"}}));
    o.checks.push_back(check_le("constant F", anchor, st.constant, tol(c, "duhamel_constant")));
    json flat = json::array(), var = json::array(), pr = json::array();
    for (std::size_t k = 0; k < steps.size(); ++k) {
        flat.push_back(num(st.flat[k]));
        var.push_back(num(st.variable[k]));
        pr.push_back(num(st.variable_printed[k]));
    }
    o.data["duhamel"] = {{"steps", steps}, {"flat", flat}, {"variable", var}, {"variable_printed_form", pr}};
    return o;
}

Outcome cmd_geometry(const Context& c) {
    Outcome o;
    const auto fs0 = dynamics::to_fieldset(initial_state(c.cfg));
    const auto M = geometry::acoustic_metric(fs0);
    const auto mc = geometry::check_metric(M);
    o.checks.push_back(check_le("g^{00} = -1", "acoustical metric normalization", mc.g00_defect, tol(c, "metric")));
    o.checks.push_back(check_le("g^{ab} g_{bc} = delta", "acoustical metric inverse", mc.inverse_defect, 1e-10));
    o.checks.push_back(check_le("Lorentzian signature", "acoustical metric", mc.lorentzian ? 0.0 : 1.0, 0.0));
    const bool any = c.trace || c.frame || c.duhamel || c.split;
    auto add = [&](Outcome x) {
        for (auto& k : x.checks) o.checks.push_back(std::move(k));
        o.data.update(x.data);
    };
    if (!any || c.frame) add(geometry_frame(c, M));
    if (!any || c.trace) add(geometry_trace(c, M));
    if (!any || c.split) add(geometry_elliptic(c));
    if (c.duhamel) add(cmd_duhamel(c));
    return o;
}

Outcome cmd_probe(const Context& c) {
    Outcome o;
    const json& p = c.cfg["probe"];
    const std::string kind = p["kind"].get<std::string>();
    std::vector<std::pair<analysis::ProbeKind, std::string>> kinds;
    if (kind != "lp_product") kinds.push_back({analysis::ProbeKind::KatoPonceCommutator, "Kato-Ponce commutator"});
    if (kind != "kato_ponce_commutator") kinds.push_back({analysis::ProbeKind::LpProduct, "LP product"});
    json rows = json::array();
    for (const auto& [k, name] : kinds) {
        analysis::ProbeParams pp;
        pp.dim = p["dim"].get<int>();
        pp.a = p["a"].get<double>();
        pp.bandwidth = p["bandwidth"].get<int>();
        pp.adversarial = p["adversarial"].get<bool>();
        std::vector<analysis::ProbeResult> rs;
        for (int lvl = 0; lvl < 2; ++lvl) {
            pp.n = p["n"].get<int>() << lvl;
            rs.push_back(analysis::inequality_probe(k, c.cfg["seed"].get<std::uint64_t>(), p["count"].get<int>(), pp));
        }
        const double rel = std::abs(rs[1].max_ratio / rs[0].max_ratio - 1.0);
        const std::string anchor = k == analysis::ProbeKind::KatoPonceCommutator
                                       ? "||[Lambda^a, f] g||_{L2} <= C (||df||_inf ||g||_{H^{a-1}} + ||f||_{H^a} ||g||_inf)"
                                       : "||fg||_{H^a} <= C (||f||_inf ||g||_{H^a} + ||f||_{H^a} ||g||_inf)";
        o.checks.push_back(check_le(name + " refinement", anchor, rel, tol(c, "probe_refinement"),
                                    {{"max_ratio", {num(rs[0].max_ratio), num(rs[1].max_ratio)}}}));
        rows.push_back({{"kind", name},
                        {"anchor", anchor},
                        {"n", {p["n"].get<int>(), p["n"].get<int>() * 2}},
                        {"max_ratio", {num(rs[0].max_ratio), num(rs[1].max_ratio)}},
                        {"mean_ratio", {num(rs[0].mean_ratio), num(rs[1].mean_ratio)}},
                        {"count", rs[0].count}});
    }
    o.data = {{"probes", rows}};
    return o;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

int finish(const std::string& command, const Context& c, const Outcome& o) {
    bool pass = true;
    json checks = json::array();
    for (const auto& k : o.checks) {
        pass = pass && k.pass;
        checks.push_back(to_json(k));
    }
    const int code = pass ? 0 : 1;
    json report = {{"command", command}, {"config", c.cfg}, {"checks", checks},
                   {"data", o.data},     {"passed", pass},  {"exit_code", code}};
    write_text(c.out / "report.json", report.dump(2) + "\n");
    for (const auto& k : o.checks)
        std::printf("%s  %-44s %.6g %s %.3g\n", k.pass ? "PASS" : "FAIL", k.name.c_str(), k.value, k.relation.c_str(),
                    k.tolerance);
    std::printf("%s: %s, report %s\n", command.c_str(), pass ? "all checks passed" : "check failure",
                (c.out / "report.json").string().c_str());
    return code;
}

void report_error(const Context& c, const std::string& command, const std::string& what,
                  const std::vector<std::string>& diags) {
    std::fprintf(stderr, "error: %s\n", what.c_str());
    for (const auto& d : diags) std::fprintf(stderr, "  %s\n", d.c_str());
    if (c.out.empty()) return;
    try {
        fs::create_directories(c.out);
        json report = {{"command", command}, {"error", what}, {"diagnostics", diags}, {"passed", false}, {"exit_code", 2}};
        write_text(c.out / "report.json", report.dump(2) + "\n");
    } catch (...) {
    }
}

}  // namespace

int run(int argc, char** argv) {
    kernels::apply_thread_env();
    CLI::App app{"Relativistic Euler simulation and verification lab"};
    app.require_subcommand(1);

    std::string config_path, output_dir, identities;
    std::uint64_t seed = 0;
    int order = 0, count = 0, resolution = 0;
    double tolerance = 0.0, vartheta = 0.0, tmax = 0.0, cfl = 0.0, amplitude = 0.0;
    bool negative = false, f_trace = false, f_frame = false, f_duhamel = false, f_split = false;

    struct Opts {
        CLI::Option *config, *out, *seed, *order, *count, *ids, *tol, *res, *vartheta, *tmax, *cfl, *amp, *neg;
    };
    std::map<std::string, Opts> opts;
    const std::vector<std::pair<std::string, std::string>> cmds = {
        {"simulate", "Run the pseudo-spectral solver and write snapshots and diagnostics"},
        {"jet-verify", "Check identities on random Taylor jets"},
        {"verify-identities", "Check identities on numerical trajectories"},
        {"norms", "Littlewood-Paley checks, energies and the Gronwall diagnostic"},
        {"geometry", "Acoustical metric, null frames, geodesics and the elliptic split"},
        {"duhamel", "Modified Duhamel residuals"},
        {"probe", "Inequality probes on random band-limited pairs"}};
    for (const auto& [name, help] : cmds) {
        auto* sc = app.add_subcommand(name, help);
        Opts o;
        o.config = sc->add_option("--config", config_path, "JSON config file");
        o.out = sc->add_option("--output-dir", output_dir, "Output directory");
        o.seed = sc->add_option("--seed", seed, "Random seed");
        o.order = sc->add_option("--order", order, "Jet order")->check(CLI::Range(1, 4));
        o.count = sc->add_option("--count", count, "Number of samples")->check(CLI::PositiveNumber);
        o.ids = sc->add_option("--identities", identities, "Comma-separated identity labels");
        o.tol = sc->add_option("--tolerance", tolerance, "Override the main tolerance of the subcommand");
        o.res = sc->add_option("--resolution", resolution, "Grid points per axis");
        o.vartheta = sc->add_option("--vartheta", vartheta, "Polytropic exponent");
        o.tmax = sc->add_option("--tmax", tmax, "Final time");
        o.cfl = sc->add_option("--cfl", cfl, "CFL number");
        o.amp = sc->add_option("--amplitude", amplitude, "Data amplitude");
        o.neg = sc->add_flag("--negative", negative, "Also run the negative control (jet-verify)");
        if (name == "geometry") {
            sc->add_flag("--trace", f_trace, "Null geodesic trace");
            sc->add_flag("--frame-check", f_frame, "Null frame relations and minors");
            sc->add_flag("--duhamel", f_duhamel, "Modified Duhamel residuals");
            sc->add_flag("--elliptic-split", f_split, "Elliptic operator P and the split of u");
        }
        opts[name] = o;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const Opts& o = opts[command];
    Context c;
    c.out = o.out->count() ? output_dir : default_config()["output_dir"].get<std::string>();
    try {
        json cfg = o.config->count() ? load_config(config_path) : default_config();
        auto set = [&](CLI::Option* op, const json::json_pointer& ptr, const json& v) {
            if (op->count()) cfg[ptr] = v;
        };
        set(o.out, json::json_pointer("/output_dir"), output_dir);
        set(o.seed, json::json_pointer("/seed"), seed);
        set(o.order, json::json_pointer("/jet/order"), order);
        set(o.vartheta, json::json_pointer("/vartheta"), vartheta);
        set(o.tmax, json::json_pointer("/run/t_max"), tmax);
        set(o.cfl, json::json_pointer("/run/cfl"), cfl);
        if (o.ids->count()) cfg["identities"] = split_list(identities);
        if (o.res->count()) {
            cfg["grid"]["n"] = resolution;
            if (command == "probe") cfg["probe"]["n"] = resolution;
            if (command == "duhamel") cfg["duhamel"]["n"] = resolution;
        }
        if (o.count->count()) {
            cfg["jet"]["count"] = count;
            cfg["probe"]["count"] = count;
            cfg["geometry"]["ellip_count"] = count;
        }
        if (o.amp->count()) {
            if (command == "jet-verify") cfg["jet"]["amplitude"] = amplitude;
            else if (command == "duhamel") cfg["duhamel"]["amplitude"] = amplitude;
            else cfg["initial"]["amplitude"] = amplitude;
        }
        if (o.neg->count()) cfg["jet"]["negative_control"] = negative;
        if (o.tol->count()) {
            static const std::map<std::string, std::string> main_tol = {
                {"simulate", "constraint"},        {"verify-identities", "grid_identity"},
                {"norms", "gronwall_refinement"},  {"geometry", "frame"},
                {"duhamel", "duhamel_constant"},   {"probe", "probe_refinement"}};
            const std::string key = command == "jet-verify"
                                        ? "jet_order" + std::to_string(cfg["jet"]["order"].get<int>())
                                        : main_tol.at(command);
            cfg["tolerances"][key] = tolerance;
        }
        c.out = cfg["output_dir"].get<std::string>();
        auto diags = validate(cfg, schema());
        if (!diags.empty()) throw ConfigError("effective configuration violates the schema", diags);
        c.cfg = cfg;
        c.trace = f_trace;
        c.frame = f_frame;
        c.duhamel = f_duhamel;
        c.split = f_split;
        fs::create_directories(c.out);

        Outcome out;
        if (command == "simulate") out = cmd_simulate(c);
        else if (command == "jet-verify") out = cmd_jet_verify(c);
        else if (command == "verify-identities") out = cmd_verify_identities(c);
        else if (command == "norms") out = cmd_norms(c);
        else if (command == "geometry") out = cmd_geometry(c);
        else if (command == "duhamel") out = cmd_duhamel(c);
        else out = cmd_probe(c);
        return finish(command, c, out);
    } catch (const ConfigError& e) {
        report_error(c, command, e.what(), e.diagnostics);
        return 2;
    } catch (const jet::PreconditionError& e) {
        report_error(c, command, e.what(), {});
        return 2;
    } catch (const std::invalid_argument& e) {
        report_error(c, command, e.what(), {});
        return 2;
    } catch (const std::exception& e) {
        report_error(c, command, e.what(), {});
        return 1;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<std::string> a = args;
    a.insert(a.begin(), "rel_euler");
    std::vector<char*> argv;
    for (auto& s : a) argv.push_back(s.data());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace rel_euler::cli
