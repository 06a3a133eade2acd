#pragma once

#include <complex>
#include <vector>

#include "cbf/grid.hpp"

namespace cbf {

using cplx = std::complex<double>;

// Velocity field as truncated Fourier coefficients, one complex 3-vector per
// wavevector.  Layout is component-major: component c occupies the contiguous
// block [c*n^3, (c+1)*n^3), each block in row-major (i,j,l) order with the
// FFT index convention (wavenumber = i for i <= n/2, i - n otherwise).
//
// A field representing real-valued velocity satisfies coeff(-k) = conj(coeff(k))
// and has zero coefficient at k = 0 (zero spatial mean).
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(const Grid& g) : grid_(g), data_(3 * g.points(), cplx(0.0, 0.0)) {}

    const Grid& grid() const { return grid_; }

    cplx& at(int c, int i, int j, int l) { return data_[std::size_t(c) * grid_.points() + grid_.flat(i, j, l)]; }
    const cplx& at(int c, int i, int j, int l) const {
        return data_[std::size_t(c) * grid_.points() + grid_.flat(i, j, l)];
    }
    cplx* component(int c) { return data_.data() + std::size_t(c) * grid_.points(); }
    const cplx* component(int c) const { return data_.data() + std::size_t(c) * grid_.points(); }

    std::vector<cplx>& raw() { return data_; }
    const std::vector<cplx>& raw() const { return data_; }

    void set_zero() { std::fill(data_.begin(), data_.end(), cplx(0.0, 0.0)); }

    SpectralField& operator+=(const SpectralField& o) {
        check_same_grid(o);
        for (std::size_t m = 0; m < data_.size(); ++m) data_[m] += o.data_[m];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        check_same_grid(o);
        for (std::size_t m = 0; m < data_.size(); ++m) data_[m] -= o.data_[m];
        return *this;
    }
    SpectralField& operator*=(double a) {
        for (auto& v : data_) v *= a;
        return *this;
    }
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double a, SpectralField u) { return u *= a; }

    // a + s*b, without the temporary of operator chains.
    void add_scaled(const SpectralField& b, double s) {
        check_same_grid(b);
        for (std::size_t m = 0; m < data_.size(); ++m) data_[m] += s * b.data_[m];
    }

    void check_same_grid(const SpectralField& o) const {
        if (grid_ != o.grid_) throw std::invalid_argument("SpectralField: grid mismatch");
    }

private:
    Grid grid_;
    std::vector<cplx> data_;
};

// Real-valued samples on the physical grid, same component-major layout.
class PhysicalField {
public:
    PhysicalField() = default;
    explicit PhysicalField(const Grid& g) : grid_(g), data_(3 * g.points(), 0.0) {}

    const Grid& grid() const { return grid_; }
    double& at(int c, int i, int j, int l) { return data_[std::size_t(c) * grid_.points() + grid_.flat(i, j, l)]; }
    const double& at(int c, int i, int j, int l) const {
        return data_[std::size_t(c) * grid_.points() + grid_.flat(i, j, l)];
    }
    double* component(int c) { return data_.data() + std::size_t(c) * grid_.points(); }
    const double* component(int c) const { return data_.data() + std::size_t(c) * grid_.points(); }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

private:
    Grid grid_;
    std::vector<double> data_;
};

}  // namespace cbf
