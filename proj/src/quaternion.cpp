#include "hflat/quaternion.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hflat {

HVector::HVector(std::initializer_list<Quaternion> entries) : data_(4 * entries.size()) {
    std::size_t k = 0;
    for (const auto& q : entries) set(k++, q);
}

HVector HVector::basis(std::size_t n, std::size_t k) {
    if (k >= n) throw std::out_of_range("HVector::basis: index " + std::to_string(k) + " out of range");
    HVector v(n);
    v.data_[4 * k] = 1.0;
    return v;
}

HVector HVector::from_flat(std::span<const double> flat) {
    if (flat.size() % 4 != 0) throw std::invalid_argument("HVector::from_flat: length is not a multiple of 4");
    HVector v(flat.size() / 4);
    std::copy(flat.begin(), flat.end(), v.data_.begin());
    return v;
}

static void require_same(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a / 4) +
                                    " vs " + std::to_string(b / 4) + ")");
}

HVector& HVector::operator+=(const HVector& o) {
    require_same(data_.size(), o.data_.size(), "HVector::operator+=");
    for (std::size_t r = 0; r < data_.size(); ++r) data_[r] += o.data_[r];
    return *this;
}

HVector& HVector::operator-=(const HVector& o) {
    require_same(data_.size(), o.data_.size(), "HVector::operator-=");
    for (std::size_t r = 0; r < data_.size(); ++r) data_[r] -= o.data_[r];
    return *this;
}

HVector& HVector::operator*=(double s) {
    for (auto& c : data_) c *= s;
    return *this;
}

HVector& HVector::axpy(double s, const HVector& o) {
    require_same(data_.size(), o.data_.size(), "HVector::axpy");
    for (std::size_t r = 0; r < data_.size(); ++r) data_[r] += s * o.data_[r];
    return *this;
}

double HVector::norm_sq() const {
    double acc = 0.0;
    for (double c : data_) acc += c * c;
    return acc;
}

HVector operator+(HVector a, const HVector& b) { return a += b; }
HVector operator-(HVector a, const HVector& b) { return a -= b; }
HVector operator-(HVector a) { return a *= -1.0; }
HVector operator*(double s, HVector a) { return a *= s; }
HVector operator*(HVector a, double s) { return a *= s; }

HVector left_mul(const Quaternion& q, const HVector& v) {
    HVector out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out.set(k, q * v[k]);
    return out;
}

HVector apply_structure(StructureAxis axis, const HVector& v) { return left_mul(unit_of(axis), v); }

double real_inner(const HVector& u, const HVector& v) {
    require_same(u.real_size(), v.real_size(), "real_inner");
    const auto a = u.flat();
    const auto b = v.flat();
    double acc = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) acc += a[r] * b[r];
    return acc;
}

}  // namespace hflat
