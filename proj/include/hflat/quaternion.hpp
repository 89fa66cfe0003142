#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hflat {

/// Real quaternion w + x i + y j + z k with the Hamilton convention ij = k.
struct Quaternion {
    double w = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quaternion real(double r) { return {r, 0.0, 0.0, 0.0}; }
    static constexpr Quaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
    static constexpr Quaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
    static constexpr Quaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

    constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
    constexpr double norm_sq() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm_sq()); }

    constexpr Quaternion& operator+=(const Quaternion& o) {
        w += o.w; x += o.x; y += o.y; z += o.z;
        return *this;
    }
    constexpr Quaternion& operator-=(const Quaternion& o) {
        w -= o.w; x -= o.x; y -= o.y; z -= o.z;
        return *this;
    }
    constexpr Quaternion& operator*=(double s) {
        w *= s; x *= s; y *= s; z *= s;
        return *this;
    }

    friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }

/// Hamilton product.
constexpr Quaternion operator*(const Quaternion& p, const Quaternion& q) {
    return {p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w};
}

inline Quaternion quat_mul(const Quaternion& p, const Quaternion& q) { return p * q; }

/// One of the three almost-complex structures of H^n, acting by left multiplication.
enum class StructureAxis { I, J, K };

inline constexpr StructureAxis kAxes[3] = {StructureAxis::I, StructureAxis::J, StructureAxis::K};

constexpr Quaternion unit_of(StructureAxis axis) {
    switch (axis) {
        case StructureAxis::I: return Quaternion::i();
        case StructureAxis::J: return Quaternion::j();
        case StructureAxis::K: return Quaternion::k();
    }
    return {};
}

/// Element of H^n stored as 4n contiguous reals (w, x, y, z per entry).
class HVector {
public:
    HVector() = default;
    explicit HVector(std::size_t n) : data_(4 * n, 0.0) {}
    HVector(std::initializer_list<Quaternion> entries);

    /// Quaternionic basis vector E_k (1 in entry k, 0-based).
    static HVector basis(std::size_t n, std::size_t k);
    static HVector from_flat(std::span<const double> flat);

    std::size_t size() const { return data_.size() / 4; }
    std::size_t real_size() const { return data_.size(); }

    Quaternion operator[](std::size_t k) const {
        return {data_[4 * k], data_[4 * k + 1], data_[4 * k + 2], data_[4 * k + 3]};
    }
    void set(std::size_t k, const Quaternion& q) {
        data_[4 * k] = q.w;
        data_[4 * k + 1] = q.x;
        data_[4 * k + 2] = q.y;
        data_[4 * k + 3] = q.z;
    }

    std::span<const double> flat() const { return data_; }
    std::span<double> flat() { return data_; }

    HVector& operator+=(const HVector& o);
    HVector& operator-=(const HVector& o);
    HVector& operator*=(double s);
    /// this += s * o
    HVector& axpy(double s, const HVector& o);

    double norm_sq() const;
    double norm() const { return std::sqrt(norm_sq()); }

    friend bool operator==(const HVector&, const HVector&) = default;

private:
    std::vector<double> data_;
};

HVector operator+(HVector a, const HVector& b);
HVector operator-(HVector a, const HVector& b);
HVector operator-(HVector a);
HVector operator*(double s, HVector a);
HVector operator*(HVector a, double s);

/// Componentwise left multiplication q * v.
HVector left_mul(const Quaternion& q, const HVector& v);

/// I v, J v or K v.
HVector apply_structure(StructureAxis axis, const HVector& v);

/// Euclidean inner product on R^{4n}. Throws std::invalid_argument on dimension mismatch.
double real_inner(const HVector& u, const HVector& v);

}  // namespace hflat
