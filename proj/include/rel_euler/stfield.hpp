#pragma once

// Space-time sampled scalar: a stack of nt spatial slices.  Spatial
// derivatives are spectral.  The time derivative is either a polynomial
// collocation derivative over equally spaced slices, or spectral when the
// stack is one period of a time-periodic field.  Satisfies the scalar
// interface used by calc::Fluid.

#include <memory>
#include <vector>

#include "rel_euler/fields.hpp"

namespace rel_euler {

enum class TimeMode { Collocation, Periodic };

struct StLayout {
    Grid grid;
    int nt = 1;
    TimeMode mode = TimeMode::Collocation;
    double t0 = 0.0;      // time of slice 0
    double spacing = 0.0; // slice spacing (period / nt when periodic)
    bool dealias = false;
    int eval_slice = 0;   // slice used for reductions
    std::size_t slice = 0;
    std::shared_ptr<const SpectralBox> space;      // batch of nt spatial boxes
    std::shared_ptr<const SpectralBox> spacetime;  // periodic: (nt, n, ...)
    std::vector<double> Dt;                         // collocation: nt x nt

    std::size_t size() const { return slice * nt; }
    double time(int k) const { return t0 + spacing * k; }

    static std::shared_ptr<const StLayout> collocation(const Grid& g, int nt, double t0, double dt, bool dealias = false);
    static std::shared_ptr<const StLayout> periodic(const Grid& g, int nt, double period, bool dealias = false);
};

class StField {
public:
    StField() = default;
    StField(std::shared_ptr<const StLayout> L, double c = 0.0);
    StField(std::shared_ptr<const StLayout> L, std::vector<double> v);
    // Stack of slices, one per time level.
    static StField from_slices(std::shared_ptr<const StLayout> L, const std::vector<const Scalar*>& slices);

    const StLayout& layout() const { return *L_; }
    const std::shared_ptr<const StLayout>& layout_ptr() const { return L_; }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }
    Scalar slice(int k) const;
    Scalar eval() const { return slice(L_->eval_slice); }

    // derivative along space-time axis var (0 = t)
    StField d(int var) const;

    StField& operator+=(const StField& o);
    StField& operator-=(const StField& o);
    StField& operator*=(const StField& o);
    StField& operator*=(double s);
    StField& operator+=(double s);
    StField operator-() const;

private:
    std::shared_ptr<const StLayout> L_;
    std::vector<double> v_;
};

StField operator+(StField a, const StField& b);
StField operator-(StField a, const StField& b);
StField operator*(StField a, const StField& b);
StField operator*(double s, StField a);
StField operator*(StField a, double s);
StField operator+(StField a, double s);
StField operator+(double s, StField a);
StField operator-(StField a, double s);
StField operator-(double s, StField a);

StField exp(const StField& a);
StField log(const StField& a);
StField sqrt(const StField& a);
StField pow(const StField& a, double s);
StField recip(const StField& a);
inline StField zero_like(const StField& a) { return StField(a.layout_ptr(), 0.0); }
// max |a| over the evaluation slice (periodic: over the whole stack)
double magnitude(const StField& a);
double l2_norm(const StField& a);  // root mean square over the same set

}  // namespace rel_euler
