#include "rel_euler/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace rel_euler {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t bytes) : p(fftw_malloc(bytes)) {
        if (!p) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(p); }
    void* p;
};

int signed_mode(int k, int n) { return k <= n / 2 ? k : k - n; }

}  // namespace

SpectralBox::SpectralBox(std::vector<int> shape, std::vector<double> lengths, int batch)
    : shape_(std::move(shape)), lengths_(std::move(lengths)), batch_(batch) {
    if (shape_.empty() || shape_.size() != lengths_.size() || batch_ < 1)
        throw std::invalid_argument("SpectralBox: bad shape");
    box_ = 1;
    for (int n : shape_) {
        if (n < 2 || n % 2) throw std::invalid_argument("SpectralBox: axis sizes must be even");
        box_ *= static_cast<std::size_t>(n);
    }
    half_ = box_ / shape_.back() * (shape_.back() / 2 + 1);
    mode_table_.reserve(half_ * shape_.size());
    for (std::size_t i = 0; i < half_; ++i)
        for (int m : compute_modes(i)) mode_table_.push_back(m);
    FftwBuffer r(sizeof(double) * total_size());
    FftwBuffer c(sizeof(fftw_complex) * spectrum_size());
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int rk = rank();
    fwd_ = fftw_plan_many_dft_r2c(rk, shape_.data(), batch_, static_cast<double*>(r.p), nullptr, 1,
                                  static_cast<int>(box_), static_cast<fftw_complex*>(c.p), nullptr, 1,
                                  static_cast<int>(half_), FFTW_ESTIMATE);
    inv_ = fftw_plan_many_dft_c2r(rk, shape_.data(), batch_, static_cast<fftw_complex*>(c.p), nullptr, 1,
                                  static_cast<int>(half_), static_cast<double*>(r.p), nullptr, 1,
                                  static_cast<int>(box_), FFTW_ESTIMATE);
    if (!fwd_ || !inv_) throw std::runtime_error("SpectralBox: FFTW planning failed");
}

SpectralBox::~SpectralBox() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

std::vector<int> SpectralBox::modes(std::size_t idx) const {
    return {mode_table_.begin() + idx * shape_.size(), mode_table_.begin() + (idx + 1) * shape_.size()};
}

std::vector<int> SpectralBox::compute_modes(std::size_t idx) const {
    std::vector<int> m(shape_.size());
    const int last = shape_.back() / 2 + 1;
    int k = static_cast<int>(idx % last);
    idx /= last;
    m.back() = k;
    for (int a = rank() - 2; a >= 0; --a) {
        const int ka = static_cast<int>(idx % shape_[a]);
        idx /= shape_[a];
        m[a] = signed_mode(ka, shape_[a]);
    }
    return m;
}

WaveVec SpectralBox::wave(std::size_t idx) const {
    auto m = modes(idx);
    WaveVec k(m.size());
    for (std::size_t a = 0; a < m.size(); ++a) k[a] = 2.0 * std::numbers::pi * m[a] / lengths_[a];
    return k;
}

double SpectralBox::hermitian_weight(std::size_t idx) const {
    const int n = shape_.back();
    const int k = static_cast<int>(idx % (n / 2 + 1));
    return (k == 0 || k == n / 2) ? 1.0 : 2.0;
}

std::vector<std::complex<double>> SpectralBox::forward(const double* in) const {
    FftwBuffer r(sizeof(double) * total_size());
    std::vector<std::complex<double>> out(spectrum_size());
    FftwBuffer c(sizeof(fftw_complex) * spectrum_size());
    std::copy(in, in + total_size(), static_cast<double*>(r.p));
    fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), static_cast<double*>(r.p), static_cast<fftw_complex*>(c.p));
    auto* cc = static_cast<std::complex<double>*>(c.p);
    const double s = 1.0 / static_cast<double>(box_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = cc[i] * s;
    return out;
}

void SpectralBox::inverse(const std::vector<std::complex<double>>& spec, double* out) const {
    FftwBuffer r(sizeof(double) * total_size());
    FftwBuffer c(sizeof(fftw_complex) * spectrum_size());
    std::copy(spec.begin(), spec.end(), static_cast<std::complex<double>*>(c.p));
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_), static_cast<fftw_complex*>(c.p), static_cast<double*>(r.p));
    std::copy(static_cast<double*>(r.p), static_cast<double*>(r.p) + total_size(), out);
}

void SpectralBox::apply(const double* in, double* out, const Multiplier& m) const {
    auto spec = forward(in);
    std::vector<std::complex<double>> mult(half_);
    for (std::size_t i = 0; i < half_; ++i) mult[i] = m(wave(i));
    for (int b = 0; b < batch_; ++b)
        for (std::size_t i = 0; i < half_; ++i) spec[b * half_ + i] *= mult[i];
    inverse(spec, out);
}

void SpectralBox::derivative(const double* in, double* out, int axis, int order, bool dealias) const {
    if (axis < 0 || axis >= rank()) throw std::out_of_range("SpectralBox::derivative: axis");
    auto spec = forward(in);
    std::vector<std::complex<double>> mult(half_);
    for (std::size_t i = 0; i < half_; ++i) {
        const int* md = &mode_table_[i * shape_.size()];
        bool keep = true;
        if (dealias)
            for (int a = 0; a < rank(); ++a)
                if (3 * std::abs(md[a]) > shape_[a]) keep = false;
        if (order % 2 == 1 && 2 * std::abs(md[axis]) == shape_[axis]) keep = false;
        const double k = 2.0 * std::numbers::pi * md[axis] / lengths_[axis];
        std::complex<double> f = keep ? 1.0 : 0.0;
        for (int o = 0; o < order; ++o) f *= std::complex<double>(0.0, k);
        mult[i] = f;
    }
    for (int b = 0; b < batch_; ++b)
        for (std::size_t i = 0; i < half_; ++i) spec[b * half_ + i] *= mult[i];
    inverse(spec, out);
}

std::shared_ptr<const SpectralBox> SpectralBox::get(const std::vector<int>& shape, const std::vector<double>& lengths,
                                                    int batch) {
    static std::mutex m;
    static std::map<std::tuple<std::vector<int>, std::vector<double>, int>, std::shared_ptr<const SpectralBox>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto key = std::make_tuple(shape, lengths, batch);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto p = std::make_shared<const SpectralBox>(shape, lengths, batch);
    cache.emplace(key, p);
    return p;
}

}  // namespace rel_euler
