#include "rel_euler/fields.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "rel_euler/tensor.hpp"

namespace rel_euler {

void Grid::validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dim must be 1, 2 or 3");
    if (n < 4 || (n & (n - 1))) throw std::invalid_argument("grid: n must be a power of two >= 4");
    if (!(L > 0.0)) throw std::invalid_argument("grid: L must be positive");
}

std::size_t Grid::size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
    return s;
}

std::array<double, 3> Grid::coord(std::size_t idx) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = dim - 1; a >= 0; --a) {
        x[a] = dx() * static_cast<double>(idx % n);
        idx /= n;
    }
    return x;
}

std::shared_ptr<const SpectralBox> Grid::box(int batch) const {
    return SpectralBox::get(std::vector<int>(dim, n), std::vector<double>(dim, L), batch);
}

namespace {

VectorField toggle(const VectorField& v, Variance target) {
    if (v.var == target) return v;
    VectorField r = v;
    r.var = target;
    for (double& x : r.c[0]) x = -x;
    return r;
}

TensorField toggle(const TensorField& t, int slot, Variance target) {
    if (slot < 0 || slot > 1) throw std::out_of_range("tensor slot");
    if (t.var[slot] == target) return t;
    TensorField r = t;
    r.var[slot] = target;
    for (int k = 0; k < 4; ++k) {
        Scalar& s = slot == 0 ? r.c[0][k] : r.c[k][0];
        for (double& x : s) x = -x;
    }
    return r;
}

}  // namespace

VectorField lower(const VectorField& v) { return toggle(v, Variance::Down); }
VectorField raise(const VectorField& v) { return toggle(v, Variance::Up); }
TensorField lower(const TensorField& t, int slot) { return toggle(t, slot, Variance::Down); }
TensorField raise(const TensorField& t, int slot) { return toggle(t, slot, Variance::Up); }

FieldInvariants check_invariants(const FieldSet& f) {
    FieldInvariants r;
    r.min_u0 = INFINITY;
    for (std::size_t i = 0; i < f.h.size(); ++i) {
        const double n = -f.u[0][i] * f.u[0][i] + f.u[1][i] * f.u[1][i] + f.u[2][i] * f.u[2][i] +
                         f.u[3][i] * f.u[3][i] + 1.0;
        r.normalization_defect = std::max(r.normalization_defect, std::abs(n));
        r.min_u0 = std::min(r.min_u0, f.u[0][i]);
    }
    return r;
}

Scalar spectral_derivative(const Grid& g, const Scalar& f, int axis, int order, bool dealias) {
    if (axis < 1 || axis > 3) throw std::out_of_range("spectral_derivative: axis must be 1..3");
    if (f.size() != g.size()) throw std::invalid_argument("spectral_derivative: field does not conform to grid");
    Scalar out(f.size(), 0.0);
    if (axis > g.dim || order == 0) {
        if (order == 0) out = f;
        return out;
    }
    g.box()->derivative(f.data(), out.data(), axis - 1, order, dealias);
    return out;
}

Scalar spectral_derivative(const Grid& g, const Scalar& f, int axis, bool dealias) {
    return spectral_derivative(g, f, axis, 1, dealias);
}

FourVector normalize_velocity(const std::array<Scalar, 3>& ur) {
    FourVector u;
    const std::size_t n = ur[0].size();
    u[0].resize(n);
    for (std::size_t i = 0; i < n; ++i)
        u[0][i] = std::sqrt(1.0 + ur[0][i] * ur[0][i] + ur[1][i] * ur[1][i] + ur[2][i] * ur[2][i]);
    for (int k = 0; k < 3; ++k) u[k + 1] = ur[k];
    return u;
}

FourVector vort(const Grid& g, const FourVector& A, const FourVector& dtA, const FourVector& u, bool dealias) {
    // dA[c][d] = d_c A_d
    std::array<std::array<Scalar, 4>, 4> dA;
    for (int d = 0; d < 4; ++d) {
        dA[0][d] = dtA[d];
        for (int c = 1; c < 4; ++c) dA[c][d] = spectral_derivative(g, A[d], c, dealias);
    }
    const std::size_t n = g.size();
    FourVector out;
    for (int a = 0; a < 4; ++a) {
        out[a].assign(n, 0.0);
        for (const auto& p : tensor::eps_tail(a)) {
            const double s = p.sign * tensor::eta(p.b);  // -eps^{abcd} u_b = eps_{abcd} m_bb u^b
            const Scalar& ub = u[p.b];
            const Scalar& da = dA[p.c][p.d];
            for (std::size_t i = 0; i < n; ++i) out[a][i] += s * ub[i] * da[i];
        }
    }
    return out;
}

Scalar contract(const FourVector& u, const FourVector& v) {
    Scalar r(u[0].size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = -u[0][i] * v[0][i] + u[1][i] * v[1][i] + u[2][i] * v[2][i] + u[3][i] * v[3][i];
    return r;
}

double parseval_defect(const Grid& g, const Scalar& f) {
    auto box = g.box();
    auto spec = box->forward(f.data());
    const double vol = std::pow(g.L, g.dim);
    double phys = 0.0, four = 0.0;
    for (double x : f) phys += x * x;
    phys *= vol / static_cast<double>(g.size());
    for (std::size_t i = 0; i < spec.size(); ++i) four += box->hermitian_weight(i) * std::norm(spec[i]);
    four *= vol;
    return phys > 0.0 ? std::abs(phys - four) / phys : std::abs(four);
}

namespace {

void put_le(std::ostream& os, const Scalar& v) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    } else {
        for (double x : v) {
            auto b = std::bit_cast<std::uint64_t>(x);
            b = __builtin_bswap64(b);
            os.write(reinterpret_cast<const char*>(&b), 8);
        }
    }
}

void get_le(std::istream& is, Scalar& v) {
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if constexpr (std::endian::native != std::endian::little)
        for (double& x : v) x = std::bit_cast<double>(__builtin_bswap64(std::bit_cast<std::uint64_t>(x)));
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& s) {
    if (s.names.size() != s.data.size()) throw FormatError("snapshot: names and data disagree");
    std::size_t count = 1;
    for (int d : s.dims) count *= static_cast<std::size_t>(d);
    for (const auto& f : s.data)
        if (f.size() != count) throw FormatError("snapshot: field size does not match dims");
    nlohmann::ordered_json h;
    h["dims"] = s.dims;
    h["L"] = s.L;
    h["t"] = s.t;
    h["fields"] = s.names;
    h["dtype"] = "f64le";
    h["order"] = "C";
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("snapshot: cannot open " + path);
    os << h.dump() << '\n';
    for (const auto& f : s.data) put_le(os, f);
    if (!os) throw FormatError("snapshot: write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("snapshot: cannot open " + path);
    std::string line;
    std::getline(is, line);
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
        throw FormatError(std::string("snapshot: bad header: ") + e.what());
    }
    if (h.value("dtype", "") != "f64le" || h.value("order", "") != "C")
        throw FormatError("snapshot: unsupported dtype/order");
    Snapshot s;
    s.dims = h.at("dims").get<std::vector<int>>();
    s.L = h.at("L").get<double>();
    s.t = h.at("t").get<double>();
    s.names = h.at("fields").get<std::vector<std::string>>();
    std::size_t count = 1;
    for (int d : s.dims) count *= static_cast<std::size_t>(d);
    for (std::size_t k = 0; k < s.names.size(); ++k) {
        Scalar v(count);
        get_le(is, v);
        if (!is) throw FormatError("snapshot: truncated data in " + path);
        s.data.push_back(std::move(v));
    }
    return s;
}

Snapshot to_snapshot(const FieldSet& f) {
    Snapshot s;
    s.dims.assign(f.grid.dim, f.grid.n);
    s.L = f.grid.L;
    s.t = f.t;
    s.names = {"h", "u0", "u1", "u2", "u3"};
    s.data = {f.h, f.u[0], f.u[1], f.u[2], f.u[3]};
    return s;
}

FieldSet from_snapshot(const Snapshot& s, double theta) {
    FieldSet f;
    f.grid.dim = static_cast<int>(s.dims.size());
    f.grid.n = s.dims.empty() ? 0 : s.dims[0];
    f.grid.L = s.L;
    f.grid.validate();
    for (int d : s.dims)
        if (d != f.grid.n) throw FormatError("snapshot: non-cubic grids are not supported");
    f.t = s.t;
    f.theta = theta;
    auto find = [&](const std::string& name) -> const Scalar& {
        for (std::size_t k = 0; k < s.names.size(); ++k)
            if (s.names[k] == name) return s.data[k];
        throw FormatError("snapshot: missing field " + name);
    };
    f.h = find("h");
    for (int a = 0; a < 4; ++a) f.u[a] = find("u" + std::to_string(a));
    return f;
}

}  // namespace rel_euler
