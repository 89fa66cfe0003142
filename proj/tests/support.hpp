#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hflat/quaternion.hpp"

namespace testing_support {

// Deterministic generators for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    hflat::Quaternion quaternion() { return {uniform(), uniform(), uniform(), uniform()}; }
    hflat::HVector hvector(std::size_t n) {
        hflat::HVector v(n);
        for (std::size_t k = 0; k < n; ++k) v.set(k, quaternion());
        return v;
    }

private:
    std::mt19937_64 rng_;
};

// Oracle: left multiplication by a quaternion as a 4x4 real matrix acting on (w, x, y, z).
inline std::array<std::array<double, 4>, 4> left_matrix(const hflat::Quaternion& q) {
    return {{{q.w, -q.x, -q.y, -q.z}, {q.x, q.w, -q.z, q.y}, {q.y, q.z, q.w, -q.x}, {q.z, -q.y, q.x, q.w}}};
}

inline hflat::HVector matrix_left_mul(const hflat::Quaternion& q, const hflat::HVector& v) {
    const auto M = left_matrix(q);
    hflat::HVector out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double in[4] = {v[k].w, v[k].x, v[k].y, v[k].z};
        double r[4] = {};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) r[a] += M[a][b] * in[b];
        out.set(k, {r[0], r[1], r[2], r[3]});
    }
    return out;
}

inline double max_abs_diff(const hflat::HVector& a, const hflat::HVector& b) {
    double worst = 0.0;
    for (std::size_t r = 0; r < a.real_size(); ++r) worst = std::max(worst, std::abs(a.flat()[r] - b.flat()[r]));
    return worst;
}

// Frozen reference from tests/oracles/legendre_reference.py (scipy DOP853, rtol 1e-13):
// n = 3, alpha = beta = gamma = sqrt 3, a_3 = 0.2 sin s, b = 1 + 0.1 cos s, standard frame.
struct ReferenceState {
    double t;
    std::array<double, 12> z, zp, P3, accum;
};

inline const std::array<ReferenceState, 2>& scenario_reference() {
    static const std::array<ReferenceState, 2> ref{{
        {1.0,
         {0.7915743824727822, -0.16531321885231037, -0.16531321885231032, -0.1653132188523104, 0.038371896212337865,
          0.31054121760468084, 0.310541217604681, 0.31054121760468084, -0.0190980449549608, -0.00965979289987634,
          -0.00965979289987634, -0.009659792899876342},
         {-0.037979426092345336, -0.3099963633841382, -0.3099963633841381, -0.30999636338413816, -0.8220498772656368,
          -0.10058949496158216, -0.10058949496158194, -0.10058949496158219, -0.035854687815709954,
          -0.030865452197695854, -0.030865452197695854, -0.030865452197695858},
         {-0.019870135118525974, -0.02076953715361109, -0.020769537153611094, -0.020769537153611097,
          -0.029016415473503577, 0.027430892055534978, 0.027430892055534978, 0.027430892055534953, 0.997600328764989,
          -0.001332525648460312, -0.0013325256484603117, -0.001332525648460312},
         {-0.2261556945892516, -0.1777228868859874, -0.17772288688598734, -0.17772288688598742, 0.050387674279978374,
          0.33771159591335775, 0.33771159591335786, 0.33771159591335753, -0.020531588975496947,
          -0.010339281065882338, -0.010339281065882333, -0.010339281065882335}},
        {6.283185307179586,
         {-0.3197734076980209, -0.45299459065794395, -0.4529945906579443, -0.4529945906579443, 0.5214341549924737,
          0.006258104620761262, 0.006258104620761739, 0.006258104620761427, -0.04921705811152309,
          0.050659917788179736, 0.05065991778817967, 0.05065991778817967},
         {-0.5214341549924736, -0.006258104620761186, -0.006258104620761635, -0.006258104620761463,
          -0.3581753624100227, 0.4466437675535524, 0.446643767553552, 0.4466437675535531, -0.0012579033346474871,
          0.02021379516789751, 0.020213795167897543, 0.020213795167897505},
         {0.049217058111523035, -0.05065991778817966, -0.050659917788179624, -0.05065991778817968,
          -0.0012579033346475101, 0.020213795167897505, 0.02021379516789755, 0.020213795167897494,
          0.9932926745222428, -0.025953081090775536, -0.025953081090775532, -0.02595308109077554},
         {-1.3200328006643676, -0.44285878114700133, -0.4428587811470018, -0.4428587811470013, 0.5473568679079435,
          0.03257518593301468, 0.03257518593301478, 0.032575185933014436, -0.04793435012513156, 0.05067903019959486,
          0.05067903019959486, 0.050679030199594854}},
    }};
    return ref;
}

}  // namespace testing_support
