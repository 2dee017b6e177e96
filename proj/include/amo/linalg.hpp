#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace amo {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

// Dense row-major matrix, sizes up to 4x4. Everything in this project is 2D/3D;
// the cap exists so adjugate() can stay a plain cofactor expansion.
struct Mat {
    int rows = 0, cols = 0;
    std::array<double, 16> a{};

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c) {
        if (r < 0 || c < 0 || r > 4 || c > 4) throw std::invalid_argument("Mat: size out of range");
    }
    double& operator()(int i, int j) { return a[static_cast<size_t>(i * cols + j)]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i * cols + j)]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat col2(const Vec2& v) {
        Mat m(2, 1);
        m(0, 0) = v[0];
        m(1, 0) = v[1];
        return m;
    }
    static Mat row2(const Vec2& v) {
        Mat m(1, 2);
        m(0, 0) = v[0];
        m(0, 1) = v[1];
        return m;
    }
};

inline Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("Mat mul: shape mismatch");
    Mat z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < y.cols; ++j) {
            double s = 0;
            for (int k = 0; k < x.cols; ++k) s += x(i, k) * y(k, j);
            z(i, j) = s;
        }
    return z;
}

inline Mat operator*(double c, const Mat& x) {
    Mat z = x;
    for (auto& v : z.a) v *= c;
    return z;
}

inline Mat operator+(const Mat& x, const Mat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("Mat add: shape mismatch");
    Mat z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] += y.a[i];
    return z;
}

inline Mat operator-(const Mat& x, const Mat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("Mat sub: shape mismatch");
    Mat z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
    return z;
}

inline double frobenius_norm(const Mat& x) {
    double s = 0;
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) s += x(i, j) * x(i, j);
    return std::sqrt(s);
}

double det(const Mat& m);

// Transpose of the cofactor matrix; satisfies A adj(A) = det(A) I, nonzero iff rank >= n-1.
Mat adjugate(const Mat& m);

// Minor of m with row i, column j removed.
Mat minor_matrix(const Mat& m, int i, int j);

struct Eig2 {
    bool real = true;
    double l1 = 0, l2 = 0;  // real parts if complex pair; l1 <= l2 when real
    double imag = 0;
};
Eig2 eigenvalues2(const Mat& m);

// Real roots of x^3 + a x^2 + b x + c (Cardano with trig branch), ascending.
std::vector<double> cubic_real_roots(double a, double b, double c);

// Eigenvalues of a real 3x3 with real spectrum, ascending. Throws if a complex
// pair is detected beyond tol.
std::array<double, 3> eigenvalues3_real(const Mat& m, double tol = 1e-9);

// Solve A x = b for square A (n <= 4), partial-pivot elimination.
std::array<double, 4> solve_small(Mat A, std::array<double, 4> b);

}  // namespace amo
