#pragma once

// FFTW-backed spectral operations on a batch of periodic boxes.

#include <complex>
#include <functional>
#include <memory>
#include <vector>

namespace rel_euler {

// Wave vector of one Fourier mode: angular wave numbers per box axis.
using WaveVec = std::vector<double>;

class SpectralBox {
public:
    // shape: points per axis (row-major, last axis fastest); lengths: box sides.
    // batch: number of boxes stored back to back.
    SpectralBox(std::vector<int> shape, std::vector<double> lengths, int batch = 1);
    ~SpectralBox();
    SpectralBox(const SpectralBox&) = delete;
    SpectralBox& operator=(const SpectralBox&) = delete;

    int rank() const { return static_cast<int>(shape_.size()); }
    int batch() const { return batch_; }
    const std::vector<int>& shape() const { return shape_; }
    const std::vector<double>& lengths() const { return lengths_; }
    std::size_t box_size() const { return box_; }
    std::size_t total_size() const { return box_ * batch_; }

    // out = F^{-1}[ m(k) F[in] ]; in and out may alias.  The multiplier must be
    // Hermitian (m(-k) = conj m(k)) so that the result is real.
    using Multiplier = std::function<std::complex<double>(const WaveVec&)>;
    void apply(const double* in, double* out, const Multiplier& m) const;

    // d^order / dx_axis^order.  The Nyquist mode is dropped for odd orders.
    // dealias applies the 2/3-rule mask on every axis.
    void derivative(const double* in, double* out, int axis, int order = 1, bool dealias = false) const;

    // Complex coefficients of the half spectrum, normalized so that the mode
    // amplitude of cos(k.x) is 1/2 (coefficient / box_size).
    std::vector<std::complex<double>> forward(const double* in) const;
    void inverse(const std::vector<std::complex<double>>& spec, double* out) const;
    std::size_t spectrum_size() const { return half_ * batch_; }
    // Wave vector of half-spectrum index (within one box).
    WaveVec wave(std::size_t half_index) const;
    // Integer mode numbers of the same index.
    std::vector<int> modes(std::size_t half_index) const;
    // Multiplicity of a half-spectrum mode in the full spectrum (1 or 2).
    double hermitian_weight(std::size_t half_index) const;

    // Shared instance per (shape, lengths, batch).
    static std::shared_ptr<const SpectralBox> get(const std::vector<int>& shape, const std::vector<double>& lengths,
                                                  int batch = 1);

private:
    std::vector<int> shape_;
    std::vector<double> lengths_;
    int batch_;
    std::size_t box_, half_;
    std::vector<int> mode_table_;
    std::vector<int> compute_modes(std::size_t half_index) const;
    void* fwd_ = nullptr;
    void* inv_ = nullptr;
};

}  // namespace rel_euler
