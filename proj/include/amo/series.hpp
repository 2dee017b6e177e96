#pragma once

#include <array>
#include <stdexcept>

namespace amo {

// Truncated power series in the small parameter, double coefficients.
// All model fields are polynomial in eps, so composing them over EpsSeries
// states extracts Taylor coefficients exactly.
struct EpsSeries {
    static constexpr int kMaxLen = 16;
    int len = 1;
    std::array<double, kMaxLen> c{};

    EpsSeries() = default;
    EpsSeries(double v, int n) : len(n) { c[0] = v; }

    static EpsSeries variable(int n) {
        EpsSeries s(0.0, n);
        if (n > 1) s.c[1] = 1.0;
        return s;
    }
    double coeff(int k) const { return (k < len) ? c[static_cast<size_t>(k)] : 0.0; }
    double eval(double eps) const {
        double s = 0;
        for (int k = len - 1; k >= 0; --k) s = s * eps + c[static_cast<size_t>(k)];
        return s;
    }
};

inline EpsSeries operator+(const EpsSeries& x, const EpsSeries& y) {
    EpsSeries z(0.0, std::max(x.len, y.len));
    for (int k = 0; k < z.len; ++k) z.c[static_cast<size_t>(k)] = x.coeff(k) + y.coeff(k);
    return z;
}
inline EpsSeries operator-(const EpsSeries& x, const EpsSeries& y) {
    EpsSeries z(0.0, std::max(x.len, y.len));
    for (int k = 0; k < z.len; ++k) z.c[static_cast<size_t>(k)] = x.coeff(k) - y.coeff(k);
    return z;
}
inline EpsSeries operator*(const EpsSeries& x, const EpsSeries& y) {
    EpsSeries z(0.0, std::max(x.len, y.len));
    if (z.len > EpsSeries::kMaxLen) throw std::length_error("EpsSeries overflow");
    for (int i = 0; i < z.len; ++i) {
        double s = 0;
        for (int j = 0; j <= i; ++j) s += x.coeff(j) * y.coeff(i - j);
        z.c[static_cast<size_t>(i)] = s;
    }
    return z;
}
inline EpsSeries operator*(double a, const EpsSeries& x) {
    EpsSeries z = x;
    for (int k = 0; k < z.len; ++k) z.c[static_cast<size_t>(k)] *= a;
    return z;
}
inline EpsSeries operator*(const EpsSeries& x, double a) { return a * x; }
inline EpsSeries operator+(double a, const EpsSeries& x) { return EpsSeries(a, x.len) + x; }
inline EpsSeries operator+(const EpsSeries& x, double a) { return a + x; }
inline EpsSeries operator-(double a, const EpsSeries& x) { return EpsSeries(a, x.len) - x; }
inline EpsSeries operator-(const EpsSeries& x, double a) { return x - EpsSeries(a, x.len); }
inline EpsSeries operator-(const EpsSeries& x) { return -1.0 * x; }

// constant of the same scalar kind as `like`
inline double make_like(double v, double) { return v; }
inline EpsSeries make_like(double v, const EpsSeries& like) { return EpsSeries(v, like.len); }

}  // namespace amo
