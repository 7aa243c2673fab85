#pragma once

// w, W, G, Gamma, F, E on grids and the grid-level identity residuals.

#include <optional>
#include <string>
#include <vector>

#include "rel_euler/fields.hpp"
#include "rel_euler/fluid_calculus.hpp"
#include "rel_euler/identities.hpp"
#include "rel_euler/stfield.hpp"

namespace rel_euler::vorticity {

// A state sampled on a short stack of time levels.
struct StState {
    std::shared_ptr<const StLayout> layout;
    double theta = 2.0;
    StField h;
    std::array<StField, 4> u;
};

// nt equally spaced snapshots centred on snaps[center].
StState stack_from_snapshots(const std::vector<FieldSet>& snaps, int center, int nt = 5, bool dealias = false);
// Stack around f built by RK4 steps of size dt forwards and backwards.
StState local_stack(const FieldSet& f, double dt, int nt = 5, bool dealias = true);
StState make_state(std::shared_ptr<const StLayout> L, const StField& h, const std::array<StField, 4>& u, double theta);
calc::Fluid<StField> make_fluid(const StState& s);

// w^a = vort^a(e^h u), both printed forms; the time derivative comes from dfdt.
FourVector modified_vorticity(const FieldSet& f, const FieldSet& dfdt, bool dealias = false);
FourVector modified_vorticity_extracted(const FieldSet& f, const FieldSet& dfdt, bool dealias = false);

struct VorticityBundle {
    FourVector w, W, G, F, E;
    Scalar gamma;
};
// All quantities at the evaluation slice of the stack.
VorticityBundle compute_bundle(const StState& s);
// W from the expanded formula and G = vort(W)
FourVector fluid_W(const StState& s);
FourVector fluid_G(const StState& s);
// vort^a(e^h w), the label form, evaluated directly
FourVector vort_ehw(const StState& s);

// Alternate form of Gamma: w^k W_k replaced by -eps^{kbcd} w_k u_b d_c w_d.
Scalar gamma_alternate(const StState& s);

struct Report {
    std::string identity;
    std::string anchor;
    double max_rel_residual = 0.0;
    double l2_rel_residual = 0.0;
    long n_points = 0;
    int jet_order = 0;  // 0 for grid evaluations
    bool operator==(const Report&) const = default;
};

struct Extras {
    std::optional<std::array<StField, 4>> one_form;
    std::optional<std::array<StField, 4>> u_minus;
};

Report grid_identity(const StState& s, calc::Id id, const Extras& extras = {});
std::vector<Report> transport_residuals(const StState& s);  // CEQ, CEQ0, CEQ1, SDe
std::vector<Report> divcurl_residuals(const StState& s);    // HDe, OEe, c2, d5

// Left side |grad W_ring| in H^{s0-2} and the sum of the right-side norms.
struct D17 {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};
D17 d17_ratio(const StState& s, double s0);

struct Orthogonality {
    double uw = 0.0;  // max |u_a w^a|
    double uW = 0.0;  // max |u_a W^a|
    double w0 = 0.0;  // max |w^0 - u^i w_i / u^0|
    double W0 = 0.0;  // max |W^0 - u^i W_i / u^0|
};
Orthogonality orthogonality(const StState& s);

}  // namespace rel_euler::vorticity
