#include "amo/linalg.hpp"

#include <algorithm>

namespace amo {

Mat minor_matrix(const Mat& m, int i, int j) {
    Mat r(m.rows - 1, m.cols - 1);
    int ri = 0;
    for (int p = 0; p < m.rows; ++p) {
        if (p == i) continue;
        int rj = 0;
        for (int q = 0; q < m.cols; ++q) {
            if (q == j) continue;
            r(ri, rj) = m(p, q);
            ++rj;
        }
        ++ri;
    }
    return r;
}

double det(const Mat& m) {
    if (m.rows != m.cols) throw std::invalid_argument("det: not square");
    switch (m.rows) {
        case 0: return 1.0;
        case 1: return m(0, 0);
        case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        default: {
            double s = 0;
            for (int j = 0; j < m.cols; ++j) {
                double c = m(0, j) * det(minor_matrix(m, 0, j));
                s += (j % 2 == 0) ? c : -c;
            }
            return s;
        }
    }
}

Mat adjugate(const Mat& m) {
    if (m.rows != m.cols) throw std::invalid_argument("adjugate: not square");
    int n = m.rows;
    if (n == 0) throw std::invalid_argument("adjugate: empty");
    Mat r(n, n);
    if (n == 1) {
        r(0, 0) = 1.0;  // det(A) A^{-1} = 1 for 1x1
        return r;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double c = det(minor_matrix(m, i, j));
            if ((i + j) % 2 != 0) c = -c;
            r(j, i) = c;  // transpose of cofactors
        }
    return r;
}

Eig2 eigenvalues2(const Mat& m) {
    if (m.rows != 2 || m.cols != 2) throw std::invalid_argument("eigenvalues2: need 2x2");
    double tr = m(0, 0) + m(1, 1);
    double de = det(m);
    double disc = tr * tr - 4.0 * de;
    Eig2 e;
    if (disc >= 0) {
        double s = std::sqrt(disc);
        e.l1 = 0.5 * (tr - s);
        e.l2 = 0.5 * (tr + s);
    } else {
        e.real = false;
        e.l1 = e.l2 = 0.5 * tr;
        e.imag = 0.5 * std::sqrt(-disc);
    }
    return e;
}

std::vector<double> cubic_real_roots(double a, double b, double c) {
    // depressed form t^3 + p t + q with x = t - a/3
    double p = b - a * a / 3.0;
    double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    double shift = -a / 3.0;
    std::vector<double> roots;
    double disc = q * q / 4.0 + p * p * p / 27.0;
    if (disc > 1e-300) {
        double sq = std::sqrt(disc);
        double u = std::cbrt(-q / 2.0 + sq);
        double v = std::cbrt(-q / 2.0 - sq);
        roots.push_back(u + v + shift);
    } else if (disc < -1e-300) {
        double r = std::sqrt(-p * p * p / 27.0);
        double phi = std::acos(std::clamp(-q / (2.0 * r), -1.0, 1.0));
        double t = 2.0 * std::cbrt(r);
        for (int k = 0; k < 3; ++k) roots.push_back(t * std::cos((phi + 2.0 * M_PI * k) / 3.0) + shift);
    } else {
        if (std::abs(q) < 1e-300 && std::abs(p) < 1e-300) {
            roots.push_back(shift);
        } else {
            double u = std::cbrt(-q / 2.0);
            roots.push_back(2.0 * u + shift);
            roots.push_back(-u + shift);
        }
    }
    // Newton polish against the original cubic
    for (auto& x : roots) {
        for (int it = 0; it < 4; ++it) {
            double f = ((x + a) * x + b) * x + c;
            double df = (3.0 * x + 2.0 * a) * x + b;
            if (std::abs(df) < 1e-300) break;
            x -= f / df;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::array<double, 3> eigenvalues3_real(const Mat& m, double tol) {
    if (m.rows != 3 || m.cols != 3) throw std::invalid_argument("eigenvalues3_real: need 3x3");
    double tr = m(0, 0) + m(1, 1) + m(2, 2);
    double c2 = 0;  // sum of principal 2x2 minors
    c2 += m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    c2 += m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    c2 += m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    double d = det(m);
    // char poly: l^3 - tr l^2 + c2 l - d
    auto roots = cubic_real_roots(-tr, c2, -d);
    double scale = std::max(1.0, frobenius_norm(m));
    if (roots.size() == 1) {
        // complex pair; accept only if imaginary part is within tol of zero
        double l1 = roots[0];
        double rem_tr = tr - l1;
        double rem_det = (std::abs(l1) > 1e-300) ? d / l1 : c2 - l1 * rem_tr;
        double disc = rem_tr * rem_tr - 4.0 * rem_det;
        if (disc < -tol * scale * scale)
            throw std::domain_error("eigenvalues3_real: complex pair beyond tolerance");
        double s = std::sqrt(std::max(0.0, disc));
        std::array<double, 3> out{l1, 0.5 * (rem_tr - s), 0.5 * (rem_tr + s)};
        std::sort(out.begin(), out.end());
        return out;
    }
    std::array<double, 3> out{roots[0], roots.size() > 1 ? roots[1] : roots[0],
                              roots.size() > 2 ? roots[2] : roots[0]};
    if (roots.size() == 2) out = {roots[0], roots[1], roots[1]};
    std::sort(out.begin(), out.end());
    return out;
}

std::array<double, 4> solve_small(Mat A, std::array<double, 4> b) {
    if (A.rows != A.cols) throw std::invalid_argument("solve_small: not square");
    int n = A.rows;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
        if (std::abs(A(piv, k)) < 1e-300) throw std::domain_error("solve_small: singular");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            std::swap(b[static_cast<size_t>(k)], b[static_cast<size_t>(piv)]);
        }
        for (int i = k + 1; i < n; ++i) {
            double f = A(i, k) / A(k, k);
            for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
            b[static_cast<size_t>(i)] -= f * b[static_cast<size_t>(k)];
        }
    }
    std::array<double, 4> x{};
    for (int i = n - 1; i >= 0; --i) {
        double s = b[static_cast<size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[static_cast<size_t>(j)];
        x[static_cast<size_t>(i)] = s / A(i, i);
    }
    return x;
}

}  // namespace amo
