#pragma once

// Configuration, checks, the verification studies shared with the acceptance
// suite, and the subcommand front-end.

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "rel_euler/dynamics.hpp"
#include "rel_euler/identities.hpp"
#include "rel_euler/vorticity.hpp"

namespace rel_euler::cli {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    std::vector<std::string> diagnostics;
    ConfigError(const std::string& m, std::vector<std::string> d = {})
        : std::runtime_error(m), diagnostics(std::move(d)) {}
};

const json& schema();
json default_config();
// Diagnostics of the form "/path: message"; empty when valid.
std::vector<std::string> validate(const json& instance, const json& schema);
// Recursive object merge; patch wins.
json merge(json base, const json& patch);
// Reads, validates and completes a config file.  Throws ConfigError.
json load_config(const std::string& path);

struct Check {
    std::string name;
    std::string anchor;
    double value = 0.0;
    double tolerance = 0.0;
    std::string relation = "<=";
    bool pass = false;
    json detail = json::object();
};
Check check_le(std::string name, std::string anchor, double value, double tol, json detail = json::object());
Check check_ge(std::string name, std::string anchor, double value, double tol, json detail = json::object());
json to_json(const Check& c);

dynamics::RunConfig run_config(const json& cfg);
dynamics::HyperbolicState initial_state(const json& cfg);
std::vector<calc::Id> parse_identities(const std::vector<std::string>& names);

// Temporal self-convergence and phase speed of a travelling acoustic mode.
struct AcousticStudy {
    double cs = 0.0;
    double phase_speed = 0.0;
    std::vector<double> dts;
    std::vector<double> differences;  // ||U_dt - U_dt/2||, successive pairs
    double order = 0.0;
};
AcousticStudy acoustic_convergence(int n, double theta, double rho, double amplitude, int mode, double dt0, double T);

// Grid identity residuals along trajectories with dt, dt/2, ...; the stack is
// centred at the same physical time t_c in every run.
struct GridLevel {
    double dt = 0.0;
    std::vector<vorticity::Report> reports;
    vorticity::Orthogonality orth;
    double normalization_defect = 0.0;
};
std::vector<GridLevel> grid_refinement(const dynamics::HyperbolicState& s0, const dynamics::RunConfig& base,
                                       const std::vector<calc::Id>& ids, double dt0, int levels, double t_c,
                                       int nt = 5);

struct DuhamelStudy {
    std::vector<int> steps;
    std::vector<double> flat, variable, variable_printed;
    double flat_order = 0.0;
    double constant = 0.0;  // residual for F constant in time and space
};
DuhamelStudy duhamel_study(int dim, int n, double T, const std::vector<int>& steps, double amplitude,
                           std::uint64_t seed);

// Rest density with the given sound speed squared.
double density_for_cs2(double cs2, double theta);

// Entry point; returns the process exit code (0 pass, 1 check failure, 2 usage/config/precondition).
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace rel_euler::cli
