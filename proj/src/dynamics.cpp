#include "amo/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "amo/models.hpp"

namespace amo {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

constexpr int kMaxDim = 4;

struct Stepper {
    const RhsFn& rhs;
    int n;
    long evals = 0;

    void eval(double t, const double* y, double* dy) {
        rhs(t, y, dy);
        ++evals;
    }

    // one RK5 step of size h from (t, y) with k1 given; fills y1 and err
    void step(double t, const double* y, const double* k1, double h, double* y1, double* err, double* k7) {
        double k2[kMaxDim], k3[kMaxDim], k4[kMaxDim], k5[kMaxDim], k6[kMaxDim], tmp[kMaxDim];
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        eval(t + c2 * h, tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval(t + c3 * h, tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval(t + c4 * h, tmp, k4);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        eval(t + c5 * h, tmp, k5);
        for (int i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        eval(t + h, tmp, k6);
        for (int i = 0; i < n; ++i)
            y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        eval(t + h, y1, k7);
        for (int i = 0; i < n; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }

    // error-controlled state at t + theta*h, re-stepping from (t, y)
    void state_at(double t, const double* y, const double* k1, double th, double* out) {
        double err[kMaxDim], k7[kMaxDim];
        step(t, y, k1, th, out, err, k7);
    }
};

double error_norm(int n, const double* e, const double* y0, const double* y1, double atol, double rtol) {
    double s = 0;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(e[i]) || !std::isfinite(y1[i])) return 1e10;
        double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        double q = e[i] / sc;
        s += q * q;
    }
    double r = std::sqrt(s / n);
    return std::isfinite(r) ? r : 1e10;
}

}  // namespace

Trajectory integrate(const RhsFn& rhs, int dim, const std::vector<double>& y0, double t0, double duration,
                     const IntegratorOptions& opt, const std::vector<EventSpec>& events,
                     std::vector<EventHit>* hits) {
    if (dim > kMaxDim) throw std::invalid_argument("integrate: dim > 4");
    Trajectory traj;
    traj.dim = dim;
    traj.stats.rel_tol = opt.rel_tol;
    traj.stats.abs_tol = opt.abs_tol;
    Stepper st{rhs, dim};

    double y[kMaxDim], y1[kMaxDim], k1[kMaxDim], k7[kMaxDim], err[kMaxDim];
    for (int i = 0; i < dim; ++i) y[i] = y0[static_cast<size_t>(i)];
    double t = t0, tend = t0 + duration;
    st.eval(t, y, k1);

    auto record = [&](double tt, const double* yy) {
        if (!opt.store) return;
        traj.t.push_back(tt);
        for (int i = 0; i < dim; ++i) traj.y.push_back(yy[i]);
    };
    record(t, y);

    std::vector<double> gprev(events.size());
    for (size_t k = 0; k < events.size(); ++k) gprev[k] = events[k].g(t, y);

    double h = opt.h_init;
    if (h <= 0) {
        double ynorm = 0, fnorm = 0;
        for (int i = 0; i < dim; ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            fnorm = std::max(fnorm, std::abs(k1[i]));
        }
        h = (fnorm > 0) ? 0.01 * (opt.abs_tol / opt.rel_tol + ynorm) / fnorm : duration * 1e-6;
        h = std::min({std::abs(h), 1e-3 * duration, opt.h_max});
        if (h <= 0 || !std::isfinite(h)) h = duration * 1e-8;
    }

    if (opt.method == "trapezoidal") {
        // adaptive trapezoidal with Newton, error by step halving
        double told = t;
        (void)told;
        while (t < tend) {
            if (traj.stats.steps >= opt.max_steps) throw StiffnessError("trapezoidal: step budget exhausted");
            h = std::min({h, tend - t, opt.h_max});
            auto trap_step = [&](double tt, const double* ys, double hh, double* out) {
                // Newton on G(z) = z - ys - hh/2 (f(ys) + f(z))
                double fz[kMaxDim], fy[kMaxDim];
                st.eval(tt, ys, fy);
                for (int i = 0; i < dim; ++i) out[i] = ys[i] + hh * fy[i];
                for (int it = 0; it < 50; ++it) {
                    st.eval(tt + hh, out, fz);
                    double G[kMaxDim];
                    double gn = 0;
                    for (int i = 0; i < dim; ++i) {
                        G[i] = out[i] - ys[i] - 0.5 * hh * (fy[i] + fz[i]);
                        gn = std::max(gn, std::abs(G[i]));
                    }
                    // FD Jacobian of G
                    Mat J(dim, dim);
                    for (int j = 0; j < dim; ++j) {
                        double save = out[j];
                        double dh = 1e-8 * (1.0 + std::abs(save));
                        out[j] = save + dh;
                        double fp[kMaxDim];
                        st.eval(tt + hh, out, fp);
                        out[j] = save;
                        for (int i = 0; i < dim; ++i)
                            J(i, j) = (i == j ? 1.0 : 0.0) - 0.5 * hh * (fp[i] - fz[i]) / dh;
                    }
                    std::array<double, 4> b{};
                    for (int i = 0; i < dim; ++i) b[static_cast<size_t>(i)] = G[i];
                    auto dx = solve_small(J, b);
                    double dn = 0;
                    for (int i = 0; i < dim; ++i) {
                        out[i] -= dx[static_cast<size_t>(i)];
                        dn = std::max(dn, std::abs(dx[static_cast<size_t>(i)]));
                    }
                    if (dn < 1e-13 * (1.0 + std::abs(out[0]))) break;
                }
            };
            double yfull[kMaxDim], yhalf[kMaxDim], yhalf2[kMaxDim];
            trap_step(t, y, h, yfull);
            trap_step(t, y, h / 2, yhalf);
            trap_step(t + h / 2, yhalf, h / 2, yhalf2);
            double en = 0;
            for (int i = 0; i < dim; ++i) {
                double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(yfull[i]));
                en = std::max(en, std::abs(yfull[i] - yhalf2[i]) / (3.0 * sc));
            }
            if (en <= 1.0) {
                t += h;
                for (int i = 0; i < dim; ++i) y[i] = yhalf2[i];
                for (int i = 0; i < dim; ++i)
                    if (std::count(opt.clamp_coords.begin(), opt.clamp_coords.end(), i) && y[i] < 0) {
                        y[i] = 0;
                        traj.events.push_back("clamp coord " + std::to_string(i) + " at t=" + std::to_string(t));
                    }
                record(t, y);
                ++traj.stats.steps;
            } else {
                ++traj.stats.rejects;
            }
            double fac = std::clamp(0.9 * std::pow(std::max(en, 1e-10), -1.0 / 3.0), 0.2, 5.0);
            h *= fac;
            if (h < 1e-14 * (1.0 + std::abs(t)))
                throw StiffnessError("trapezoidal: step underflow at t=" + std::to_string(t));
        }
        traj.stats.evals = st.evals;
        return traj;
    }

    double errprev = 1.0;
    bool terminal_hit = false;
    while (t < tend && !terminal_hit) {
        if (traj.stats.steps + traj.stats.rejects >= opt.max_steps)
            throw StiffnessError("rk54: step budget exhausted at t=" + std::to_string(t));
        h = std::min({h, tend - t, opt.h_max});
        st.step(t, y, k1, h, y1, err, k7);
        double en = error_norm(dim, err, y, y1, opt.abs_tol, opt.rel_tol);
        if (en <= 1.0) {
            // events over [t, t+h]
            for (size_t k = 0; k < events.size(); ++k) {
                double g1 = events[k].g(t + h, y1);
                double g0 = gprev[k];
                bool crossed = (g0 < 0 && g1 >= 0 && events[k].direction >= 0) ||
                               (g0 > 0 && g1 <= 0 && events[k].direction <= 0);
                if (crossed && g0 != 0.0) {
                    double lo = 0.0, hi = 1.0;
                    double ymid[kMaxDim];
                    for (int it = 0; it < 80; ++it) {
                        double mid = 0.5 * (lo + hi);
                        st.state_at(t, y, k1, mid * h, ymid);
                        double gm = events[k].g(t + mid * h, ymid);
                        if ((g0 < 0) == (gm < 0))
                            lo = mid;
                        else
                            hi = mid;
                        if ((hi - lo) * std::abs(h) < 1e-12 * std::max(1.0, std::abs(t))) break;
                    }
                    double thit = t + 0.5 * (lo + hi) * h;
                    st.state_at(t, y, k1, 0.5 * (lo + hi) * h, ymid);
                    if (hits) {
                        EventHit eh;
                        eh.t = thit;
                        eh.y.assign(ymid, ymid + dim);
                        eh.which = k;
                        hits->push_back(eh);
                    }
                    if (events[k].terminal) terminal_hit = true;
                }
                gprev[k] = g1;
            }
            t += h;
            for (int i = 0; i < dim; ++i) y[i] = y1[i];
            bool clamped = false;
            for (int ci : opt.clamp_coords)
                if (y[ci] < 0) {
                    y[ci] = 0;
                    clamped = true;
                    traj.events.push_back("clamp coord " + std::to_string(ci) + " at t=" + std::to_string(t));
                }
            if (clamped)
                st.eval(t, y, k1);
            else
                for (int i = 0; i < dim; ++i) k1[i] = k7[i];  // FSAL
            record(t, y);
            ++traj.stats.steps;
            double fac = 0.9 * std::pow(std::max(en, 1e-16), -0.7 / 5.0) * std::pow(errprev, 0.4 / 5.0);
            h *= std::clamp(fac, 0.2, 5.0);
            errprev = std::max(en, 1e-16);
        } else {
            ++traj.stats.rejects;
            h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
        }
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw StiffnessError("rk54: step-size underflow at t=" + std::to_string(t) +
                                 " (stiffness; try method=trapezoidal)");
    }
    if (!opt.store) {  // keep the endpoint so callers can chain chunks
        traj.t.push_back(t);
        for (int i = 0; i < dim; ++i) traj.y.push_back(y[i]);
    }
    traj.stats.evals = st.evals;
    return traj;
}

std::vector<double> integrate_fixed(const RhsFn& rhs, int dim, const std::vector<double>& y0, double t0,
                                    double t1, int n_steps) {
    Stepper st{rhs, dim};
    double y[kMaxDim], y1[kMaxDim], k1[kMaxDim], k7[kMaxDim], err[kMaxDim];
    for (int i = 0; i < dim; ++i) y[i] = y0[static_cast<size_t>(i)];
    double h = (t1 - t0) / n_steps;
    double t = t0;
    for (int s = 0; s < n_steps; ++s) {
        st.eval(t, y, k1);
        st.step(t, y, k1, h, y1, err, k7);
        for (int i = 0; i < dim; ++i) y[i] = y1[i];
        t += h;
    }
    return std::vector<double>(y, y + dim);
}

LimitCycle find_limit_cycle(const RhsFn& rhs, int dim, const std::vector<double>& y0, double scout_duration,
                            double max_duration, const IntegratorOptions& opt, SectionSpec section,
                            double conv_tol, int max_returns) {
    IntegratorOptions scout_opt = opt;
    scout_opt.store = true;
    std::vector<double> start = y0;
    double t_used = 0;
    if (section.auto_midline) {
        Trajectory scout = integrate(rhs, dim, y0, 0.0, scout_duration, scout_opt);
        size_t n = scout.size();
        size_t skip = n / 5;
        double lo = 1e300, hi = -1e300;
        for (size_t i = skip; i < n; ++i) {
            double v = scout.state(i)[section.coord];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        section.value = 0.5 * (lo + hi);
        start.assign(scout.state(n - 1), scout.state(n - 1) + dim);
        t_used = scout_duration;
    }

    EventSpec ev;
    int coord = section.coord;
    double value = section.value;
    ev.g = [coord, value](double, const double* yy) { return yy[coord] - value; };
    ev.direction = section.direction;
    ev.terminal = false;

    IntegratorOptions run_opt = opt;
    run_opt.store = false;
    std::vector<EventHit> hits;
    std::vector<double> prev_state;
    double prev_t = 0;
    LimitCycle cyc;
    cyc.dim = dim;
    cyc.section = section;
    int returns = 0;
    std::vector<double> cur = start;
    double chunk = std::max(scout_duration, 1e-6);
    while (t_used < max_duration) {
        hits.clear();
        Trajectory tr = integrate(rhs, dim, cur, 0.0, chunk, run_opt, {ev}, &hits);
        cyc.stats.steps += tr.stats.steps;
        cyc.stats.evals += tr.stats.evals;
        for (auto& h : hits) {
            ++returns;
            if (!prev_state.empty()) {
                double gap = 0;
                for (int i = 0; i < dim; ++i) {
                    double d = h.y[static_cast<size_t>(i)] - prev_state[static_cast<size_t>(i)];
                    gap += d * d;
                }
                gap = std::sqrt(gap);
                cyc.convergence = gap;
                cyc.period = (t_used + h.t) - prev_t;
                if (gap < conv_tol || returns >= max_returns) {
                    cyc.returns_used = returns;
                    IntegratorOptions fin = opt;
                    fin.store = true;
                    Trajectory one = integrate(rhs, dim, h.y, 0.0, cyc.period, fin);
                    cyc.t = one.t;
                    cyc.y = one.y;
                    cyc.stats.steps += one.stats.steps;
                    cyc.stats.evals += one.stats.evals;
                    return cyc;
                }
            }
            prev_state = h.y;
            prev_t = t_used + h.t;
        }
        cur.assign(tr.state(tr.size() - 1), tr.state(tr.size() - 1) + dim);
        t_used += chunk;
        chunk *= 1.6;
    }
    throw NoCycleError("find_limit_cycle: no converged return within max duration");
}

std::vector<Vec2> cycle_polyline(const RhsFn& rhs, const LimitCycle& c, double cap, int xi, int yi) {
    std::vector<Vec2> out;
    size_t n = c.size();
    if (n == 0) return out;
    Stepper st{rhs, c.dim};
    double k1[kMaxDim], buf[kMaxDim];
    for (size_t i = 0; i + 1 < n; ++i) {
        const double* a = c.state(i);
        const double* b = c.state(i + 1);
        out.push_back({a[xi], a[yi]});
        double d = std::hypot(b[xi] - a[xi], b[yi] - a[yi]);
        if (d > cap) {
            int m = static_cast<int>(std::ceil(d / cap));
            double h = c.t[i + 1] - c.t[i];
            st.eval(c.t[i], a, k1);
            for (int j = 1; j < m; ++j) {
                st.state_at(c.t[i], a, k1, h * j / m, buf);
                out.push_back({buf[xi], buf[yi]});
            }
        }
    }
    const double* last = c.state(n - 1);
    out.push_back({last[xi], last[yi]});
    return out;
}

namespace {
double point_segment_dist2(const Vec2& p, const Vec2& a, const Vec2& b) {
    double abx = b[0] - a[0], aby = b[1] - a[1];
    double apx = p[0] - a[0], apy = p[1] - a[1];
    double den = abx * abx + aby * aby;
    double tt = den > 0 ? std::clamp((apx * abx + apy * aby) / den, 0.0, 1.0) : 0.0;
    double dx = apx - tt * abx, dy = apy - tt * aby;
    return dx * dx + dy * dy;
}

struct SegGrid {
    double x0, y0, cell;
    int nx, ny;
    std::vector<std::vector<int>> bins;
    const std::vector<Vec2>* pts;

    explicit SegGrid(const std::vector<Vec2>& poly) : pts(&poly) {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (auto& p : poly) {
            xmin = std::min(xmin, p[0]);
            xmax = std::max(xmax, p[0]);
            ymin = std::min(ymin, p[1]);
            ymax = std::max(ymax, p[1]);
        }
        double diag = std::hypot(xmax - xmin, ymax - ymin);
        cell = std::max(diag / 256.0, 1e-12);
        x0 = xmin - cell;
        y0 = ymin - cell;
        nx = static_cast<int>((xmax - x0) / cell) + 3;
        ny = static_cast<int>((ymax - y0) / cell) + 3;
        bins.resize(static_cast<size_t>(nx) * static_cast<size_t>(ny));
        for (int s = 0; s + 1 < static_cast<int>(poly.size()); ++s) {
            const Vec2& a = poly[static_cast<size_t>(s)];
            const Vec2& b = poly[static_cast<size_t>(s) + 1];
            int ix0 = static_cast<int>((std::min(a[0], b[0]) - x0) / cell);
            int ix1 = static_cast<int>((std::max(a[0], b[0]) - x0) / cell);
            int iy0 = static_cast<int>((std::min(a[1], b[1]) - y0) / cell);
            int iy1 = static_cast<int>((std::max(a[1], b[1]) - y0) / cell);
            for (int ix = ix0; ix <= ix1; ++ix)
                for (int iy = iy0; iy <= iy1; ++iy)
                    bins[static_cast<size_t>(ix) * static_cast<size_t>(ny) + static_cast<size_t>(iy)].push_back(s);
        }
    }

    double nearest(const Vec2& p) const {
        int ix = std::clamp(static_cast<int>((p[0] - x0) / cell), 0, nx - 1);
        int iy = std::clamp(static_cast<int>((p[1] - y0) / cell), 0, ny - 1);
        double best = 1e300;
        for (int ring = 0; ring < std::max(nx, ny); ++ring) {
            bool any = false;
            for (int dx = -ring; dx <= ring; ++dx)
                for (int dy = -ring; dy <= ring; ++dy) {
                    if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
                    int jx = ix + dx, jy = iy + dy;
                    if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
                    any = true;
                    for (int s : bins[static_cast<size_t>(jx) * static_cast<size_t>(ny) + static_cast<size_t>(jy)])
                        best = std::min(best, point_segment_dist2(p, (*pts)[static_cast<size_t>(s)],
                                                                  (*pts)[static_cast<size_t>(s) + 1]));
                }
            // once a candidate exists, one extra ring guarantees correctness
            if (best < 1e299 && ring > 0 && std::sqrt(best) < (ring - 1) * cell) break;
            if (!any && ring > std::max(nx, ny)) break;
        }
        return std::sqrt(best);
    }
};

double one_sided_hausdorff(const std::vector<Vec2>& A, const SegGrid& gB) {
    double worst = 0;
    for (auto& p : A) worst = std::max(worst, gB.nearest(p));
    return worst;
}
}  // namespace

double hausdorff_distance(const std::vector<Vec2>& A, const std::vector<Vec2>& B) {
    if (A.empty() || B.empty()) throw std::invalid_argument("hausdorff_distance: empty polyline");
    if (A.size() == 1 && B.size() == 1) return std::hypot(A[0][0] - B[0][0], A[0][1] - B[0][1]);
    SegGrid ga(A), gb(B);
    return std::max(one_sided_hausdorff(A, gb), one_sided_hausdorff(B, ga));
}

std::vector<Vec2> rectangle_polyline(double x_lo, double x_hi, double y_lo, double y_hi, int per_side) {
    std::vector<Vec2> out;
    auto edge = [&out, per_side](Vec2 a, Vec2 b) {
        for (int i = 0; i < per_side; ++i) {
            double u = static_cast<double>(i) / per_side;
            out.push_back({a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])});
        }
    };
    edge({x_lo, y_lo}, {x_hi, y_lo});
    edge({x_hi, y_lo}, {x_hi, y_hi});
    edge({x_hi, y_hi}, {x_lo, y_hi});
    edge({x_lo, y_hi}, {x_lo, y_lo});
    out.push_back({x_lo, y_lo});
    return out;
}

std::vector<SegmentStats> segment_speeds(const LimitCycle& c, const EpsilonParams& e, const SegmentConfig& cfg) {
    double eps = e.epsilon;
    double Z2 = 1.0 / (e.gamma * e.sigma1);
    size_t n = c.size();
    if (n < 3) throw std::invalid_argument("segment_speeds: cycle too short");
    // arclength resample in range-normalized coordinates
    double xmin = 1e300, xmax = -1e300, zmin = 1e300, zmax = -1e300;
    for (size_t i = 0; i < n; ++i) {
        xmin = std::min(xmin, c.state(i)[0]);
        xmax = std::max(xmax, c.state(i)[0]);
        zmin = std::min(zmin, c.state(i)[1]);
        zmax = std::max(zmax, c.state(i)[1]);
    }
    double sx = std::max(xmax - xmin, 1e-12), sz = std::max(zmax - zmin, 1e-12);
    std::vector<double> arc(n, 0.0);
    for (size_t i = 1; i < n; ++i) {
        double dx = (c.state(i)[0] - c.state(i - 1)[0]) / sx;
        double dz = (c.state(i)[1] - c.state(i - 1)[1]) / sz;
        arc[i] = arc[i - 1] + std::hypot(dx, dz);
    }
    int m = cfg.resample_n;
    std::vector<Vec2> P(static_cast<size_t>(m));
    size_t j = 0;
    for (int i = 0; i < m; ++i) {
        double target = arc.back() * i / (m - 1);
        while (j + 2 < n && arc[j + 1] < target) ++j;
        double denom = std::max(arc[j + 1] - arc[j], 1e-300);
        double u = std::clamp((target - arc[j]) / denom, 0.0, 1.0);
        P[static_cast<size_t>(i)] = {c.state(j)[0] + u * (c.state(j + 1)[0] - c.state(j)[0]),
                                     c.state(j)[1] + u * (c.state(j + 1)[1] - c.state(j)[1])};
    }
    double zmid = 0.5 * (zmin + zmax);
    std::vector<double> speed(static_cast<size_t>(m));
    std::vector<double> projected(static_cast<size_t>(m));  // slide speed projected to the Gamma2 height
    std::vector<int> cls(static_cast<size_t>(m));  // 0 g2,1 g1,2 g5,3 g4a,4 jump,5 jump(tail)
    double bottom_thr = std::pow(eps, cfg.bottom_exp);
    double split_thr = std::pow(eps, cfg.split_exp);
    double g1_thr = cfg.gamma1_coef * std::pow(eps, cfg.gamma1_exp);
    for (int i = 0; i < m; ++i) {
        Vec2 s = P[static_cast<size_t>(i)];
        Vec2 f = eval_surrogate_xz(s, e.with_epsilon(eps));
        double sp = std::hypot(f[0], f[1]);
        speed[static_cast<size_t>(i)] = sp;
        double X = s[0], Z = s[1];
        int k;
        if (cfg.practical_top) {
            // field-sign classification: the crawl sits in the bottom band,
            // the descent moves right (X' > 0), the jump is near-vertical,
            // the slide is the remaining leftward drift
            if (Z < bottom_thr)
                k = (X < split_thr) ? 2 : 3;
            else if (f[0] > 0.0)
                k = 1;
            else if (std::abs(f[1]) > cfg.ratio_threshold * std::abs(f[0]))
                k = 4;
            else
                k = 0;
        } else {
            if (Z < bottom_thr)
                k = (X < split_thr) ? 2 : 3;
            else if (X < g1_thr)
                k = 1;
            else if (std::abs(Z - Z2) < cfg.top_band)
                k = 0;
            else
                k = 4;
        }
        if (k == 4 && Z > cfg.tail_z_lo && Z < cfg.tail_z_hi) k = 5;
        cls[static_cast<size_t>(i)] = k;
        double zr = Z2 / std::max(Z, 1e-300);
        projected[static_cast<size_t>(i)] = std::abs(f[0]) * zr * zr * zr;
        (void)zmid;
    }
    const char* names[6] = {"gamma2", "gamma1", "gamma5", "gamma4a", "jump", "jump_tail"};
    std::vector<SegmentStats> out;
    for (int k = 0; k < 6; ++k) {
        SegmentStats st;
        st.name = names[k];
        std::vector<double> v, vp;
        for (int i = 0; i < m; ++i)
            if (cls[static_cast<size_t>(i)] == k || (k == 4 && cls[static_cast<size_t>(i)] == 5)) {
                v.push_back(speed[static_cast<size_t>(i)]);
                vp.push_back(projected[static_cast<size_t>(i)]);
            }
        st.count = static_cast<long>(v.size());
        st.empty = v.empty();
        if (!v.empty()) {
            std::sort(v.begin(), v.end());
            st.vmin = v.front();
            st.vmax = v.back();
            st.vmed = v[v.size() / 2];
            std::sort(vp.begin(), vp.end());
            st.vmed_projected = vp[vp.size() / 2];
        }
        out.push_back(st);
    }
    return out;
}

Trajectory map_xz_to_xy(const Trajectory& tr, const EpsilonParams& e) {
    Trajectory out;
    out.model_id = tr.model_id + "->xy";
    out.eps = tr.eps;
    out.dim = 2;
    out.stats = tr.stats;
    double eps = e.epsilon;
    double tau = 0;
    double prev_fac = 0;
    for (size_t i = 0; i < tr.size(); ++i) {
        double X = tr.state(i)[0], Z = tr.state(i)[1];
        if (Z < 0) throw std::domain_error("map_xz_to_xy: Z < 0");
        double fac = 2.0 * Z * (e.sigma1 * X * X * Z * Z +
                                eps * eps * (e.sigma2 * X * X + e.sigma3 * Z * Z + e.sigma4));
        if (i > 0) tau += 0.5 * (fac + prev_fac) * (tr.t[i] - tr.t[i - 1]);
        prev_fac = fac;
        out.t.push_back(tau);
        out.y.push_back(X);
        out.y.push_back(Z * Z);
    }
    return out;
}

std::pair<std::vector<Vec2>, double> map_cycle_xz_to_xy(const LimitCycle& c, const EpsilonParams& e) {
    Trajectory tr;
    tr.dim = 2;
    tr.t = c.t;
    tr.y = c.y;
    Trajectory m = map_xz_to_xy(tr, e);
    std::vector<Vec2> pts;
    for (size_t i = 0; i < m.size(); ++i) pts.push_back({m.state(i)[0], m.state(i)[1]});
    return {pts, m.t.back() - m.t.front()};
}

LimitCycle find_surrogate_cycle(const EpsilonParams& base, double eps, double rel_tol) {
    EpsilonParams e = base.with_epsilon(eps);
    RhsFn rhs = [e](double, const double* y, double* dy) {
        Vec2 f = eval_surrogate_xz({y[0], y[1]}, e);
        dy[0] = f[0];
        dy[1] = f[1];
    };
    double period_est = 6.3e4 * std::pow(0.2 / eps, 6.5);
    IntegratorOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-14;
    SectionSpec sec;
    sec.coord = 1;
    sec.direction = +1;
    sec.auto_midline = true;
    double Xf10 = std::sqrt(base.gamma * base.sigma4 / (2.0 - base.gamma * base.sigma2));
    double Z2 = 1.0 / (base.gamma * base.sigma1);
    return find_limit_cycle(rhs, 2, {Xf10, Z2}, 2.5 * period_est, 60.0 * period_est, opt, sec, 1e-8, 48);
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace amo
