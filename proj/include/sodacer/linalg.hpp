#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace sodacer {

using Vec5 = std::array<double, 5>;
using Vec6 = std::array<double, 6>;
using Vec10 = std::array<double, 10>;
// Row-major 5x5: rows index states, columns index controls.
using Mat5 = std::array<Vec5, 5>;

inline double dot(const Vec5& a, const Vec5& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) s += a[i] * b[i];
    return s;
}

inline Vec5 matvec(const Mat5& m, const Vec5& v) {
    Vec5 out{};
    for (std::size_t r = 0; r < 5; ++r) out[r] = dot(m[r], v);
    return out;
}

// m^T * v, i.e. contraction over the row (state) index.
inline Vec5 matvec_transposed(const Mat5& m, const Vec5& v) {
    Vec5 out{};
    for (std::size_t c = 0; c < 5; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < 5; ++r) s += m[r][c] * v[r];
        out[c] = s;
    }
    return out;
}

template <std::size_t N>
double squared_distance(const std::array<double, N>& a, const std::array<double, N>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

template <std::size_t N>
bool all_finite(const std::array<double, N>& a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace sodacer
