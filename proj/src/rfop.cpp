#include "pmrhc/rfop.hpp"

#include <algorithm>
#include <cmath>

#include "pmrhc/polynomial.hpp"

namespace pmrhc {

namespace {

constexpr double kClip = 1e9;

// Conic xx x^2 + yy y^2 + xy xy + x x + y y + k, stored in that order.
using Conic = std::array<double, 6>;

double conic_eval(const Conic& q, double x, double y) {
    return q[0] * x * x + q[1] * y * y + q[2] * x * y + q[3] * x + q[4] * y + q[5];
}

double conic_scale(const Conic& q, double x, double y) {
    return std::abs(q[0] * x * x) + std::abs(q[1] * y * y) + std::abs(q[2] * x * y) + std::abs(q[3] * x) +
           std::abs(q[4] * y) + std::abs(q[5]);
}

double conic_norm(const Conic& q) {
    double s = 0.0;
    for (double v : q) s = std::max(s, std::abs(v));
    return s;
}

bool conic_residual_ok(const Conic& q, double x, double y) {
    const double s = conic_scale(q, x, y);
    return s == 0.0 || std::abs(conic_eval(q, x, y)) <= 1e-6 * s;
}

// Express the conic in coordinates (u, v) with x = c u - s v, y = s u + c v.
Conic rotate(const Conic& q, double c, double s) {
    const double sxx = q[0], syy = q[1], sxy = q[2] / 2.0;
    Conic r{};
    r[0] = c * c * sxx + 2 * c * s * sxy + s * s * syy;
    r[1] = s * s * sxx - 2 * c * s * sxy + c * c * syy;
    r[2] = 2.0 * ((c * c - s * s) * sxy + c * s * (syy - sxx));
    r[3] = c * q[3] + s * q[4];
    r[4] = -s * q[3] + c * q[4];
    r[5] = q[5];
    return r;
}

void newton_on_conics(const Conic& a, const Conic& b, double& x, double& y) {
    for (int it = 0; it < 8; ++it) {
        const double fa = conic_eval(a, x, y);
        const double fb = conic_eval(b, x, y);
        const double ax = 2 * a[0] * x + a[2] * y + a[3];
        const double ay = 2 * a[1] * y + a[2] * x + a[4];
        const double bx = 2 * b[0] * x + b[2] * y + b[3];
        const double by = 2 * b[1] * y + b[2] * x + b[4];
        const double det = ax * by - ay * bx;
        if (det == 0.0 || !std::isfinite(det)) return;
        const double nx = x - (fa * by - fb * ay) / det;
        const double ny = y - (ax * fb - bx * fa) / det;
        const double before = std::abs(fa) + std::abs(fb);
        const double after = std::abs(conic_eval(a, nx, ny)) + std::abs(conic_eval(b, nx, ny));
        if (!(after < before)) return;
        x = nx;
        y = ny;
    }
}

void add_point(std::vector<std::array<double, 2>>& pts, double x, double y) {
    for (const auto& p : pts)
        if (std::abs(p[0] - x) <= 1e-9 * std::max(1.0, std::abs(x)) &&
            std::abs(p[1] - y) <= 1e-9 * std::max(1.0, std::abs(y)))
            return;
    pts.push_back({x, y});
}

// Stationary points from grad N = lambda grad G with N = lambda G; used when the conics degenerate.
std::vector<std::array<double, 2>> stationary_by_multiplier(const RationalObjective& H) {
    const auto& c = H.c;
    const double k11 = 2 * c[0], k12 = c[2], k22 = 2 * c[1];
    const double det = k11 * k22 - k12 * k12;
    const double kscale = std::max({std::abs(k11 * k22), k12 * k12, 1e-300});
    if (std::abs(det) <= 1e-12 * kscale) return {};
    auto point = [&](double lambda) {
        const double rx = lambda * c[6] - c[3];
        const double ry = lambda * c[7] - c[4];
        return std::array<double, 2>{(k22 * rx - k12 * ry) / det, (k11 * ry - k12 * rx) / det};
    };
    auto phi = [&](double lambda) {
        const auto p = point(lambda);
        return H.numerator(p[0], p[1]) - lambda * H.denominator(p[0], p[1]);
    };
    const double fm = phi(-1.0), f0 = phi(0.0), fp = phi(1.0);
    const double a2 = 0.5 * (fp + fm) - f0;
    const double a1 = 0.5 * (fp - fm);
    std::vector<std::array<double, 2>> out;
    if (a2 == 0.0 && a1 == 0.0) return out;
    for (double lambda : solve_quadratic(a2, a1, f0)) out.push_back(point(lambda));
    return out;
}

struct Candidate {
    double x;
    double y;
    double value;
};

bool better(const Candidate& a, const Candidate& b) {
    const double tol = 1e-12 * std::max(1.0, std::abs(b.value));
    if (a.value < b.value - tol) return true;
    if (a.value > b.value + tol) return false;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}

}  // namespace

double RationalObjective::numerator(double x, double y) const {
    return c[0] * x * x + c[1] * y * y + c[2] * x * y + c[3] * x + c[4] * y + c[5];
}

double RationalObjective::denominator(double x, double y) const { return c[6] * x + c[7] * y + c[8]; }

double SegmentRestriction::operator()(double r) const {
    return (f[0] + r * (f[1] + r * f[2])) / (g[0] + g[1] * r);
}

double SegmentRestriction::slope(double r) const {
    const double fv = f[0] + r * (f[1] + r * f[2]);
    const double gv = g[0] + g[1] * r;
    return ((f[1] + 2 * f[2] * r) * gv - fv * g[1]) / (gv * gv);
}

double delta_h(std::span<const double> f, std::span<const double> g) {
    const Poly ft = poly_trim(Poly(f.begin(), f.end()));
    const Poly gt = poly_trim(Poly(g.begin(), g.end()));
    if (ft.size() > 3) throw RfopError("delta_h: numerator degree exceeds 2");
    if (gt.size() > 2) throw RfopError("delta_h: denominator degree exceeds 1");
    if (gt.empty()) throw RfopError("delta_h: zero denominator");
    const double f0 = ft.size() > 0 ? ft[0] : 0.0;
    const double f1 = ft.size() > 1 ? ft[1] : 0.0;
    const double f2 = ft.size() > 2 ? ft[2] : 0.0;
    const double g0 = gt[0];
    const double g1 = gt.size() > 1 ? gt[1] : 0.0;
    // Evaluated at r = 0; the value does not depend on r.
    return 2 * f2 * g0 * g0 - 2 * g1 * (g0 * f1 - f0 * g1);
}

SegmentMinimum minimize_segment(const SegmentRestriction& h) {
    if (!(h.r0 <= h.r1)) throw RfopError("minimize_segment: empty interval");
    const SegmentMinimum lo{h.r0, h(h.r0)};
    if (h.r1 == h.r0) return lo;
    const SegmentMinimum hi{h.r1, h(h.r1)};

    const double delta = delta_h(h.f, h.g);
    const double gv = h.g[0] + h.g[1] * h.r0;
    const double fv = h.f[0] + h.r0 * (h.f[1] + h.r0 * h.f[2]);
    const double dnum = (h.f[1] + 2 * h.f[2] * h.r0) * gv - fv * h.g[1];  // sign of h'(r0)

    SegmentMinimum pick = lo;
    if (delta > 0.0) {
        if (dnum < 0.0) {
            // Convex and decreasing at r0: stop at the stationary point or r1.
            double r_crit = h.r1;
            const double a2 = h.f[2] * h.g[1];
            const double a1 = 2 * h.f[2] * h.g[0];
            const double a0 = h.f[1] * h.g[0] - h.f[0] * h.g[1];
            if (a2 != 0.0 || a1 != 0.0) {
                for (double r : solve_quadratic(a2, a1, a0)) {
                    if (r > h.r0) {
                        r_crit = std::min(r, h.r1);
                        break;
                    }
                }
            }
            pick = {r_crit, h(r_crit)};
        }
    } else if (delta < 0.0) {
        if (dnum <= 0.0) {
            pick = hi;
        } else {
            // Concave and increasing at r0: r1 wins only past the break-even point.
            const double level = lo.value;
            const double b2 = h.f[2];
            const double b1 = h.f[1] - level * h.g[1];
            double r_even = kUnbounded;
            if (b2 != 0.0) r_even = -b1 / b2 - h.r0;
            if (h.r1 > r_even) pick = hi;
        }
    } else if (dnum < 0.0) {
        pick = hi;
    }
    // Floating-point guard: never return worse than an endpoint; ties go to the smaller r.
    SegmentMinimum best = pick;
    if (lo.value < best.value || (lo.value == best.value && lo.r < best.r)) best = lo;
    if (hi.value < best.value) best = hi;
    return best;
}

SegmentRestriction restrict_to_line(const RationalObjective& H, double x0, double y0, double dx, double dy,
                                    double r0, double r1) {
    const auto& c = H.c;
    SegmentRestriction h;
    h.f[0] = H.numerator(x0, y0);
    h.f[1] = 2 * c[0] * x0 * dx + 2 * c[1] * y0 * dy + c[2] * (x0 * dy + y0 * dx) + c[3] * dx + c[4] * dy;
    h.f[2] = c[0] * dx * dx + c[1] * dy * dy + c[2] * dx * dy;
    h.g[0] = H.denominator(x0, y0);
    h.g[1] = c[6] * dx + c[7] * dy;
    h.r0 = r0;
    h.r1 = r1;
    return h;
}

StationaryPoints stationary_points(const RationalObjective& H) {
    const auto& c = H.c;
    const Conic gx{c[0] * c[6],          c[2] * c[7] - c[1] * c[6], 2 * c[0] * c[7], 2 * c[0] * c[8],
                   c[2] * c[8] + c[3] * c[7] - c[4] * c[6], c[3] * c[8] - c[5] * c[6]};
    const Conic gy{c[2] * c[6] - c[0] * c[7], c[1] * c[7], 2 * c[1] * c[6], c[2] * c[8] + c[4] * c[6] - c[3] * c[7],
                   2 * c[1] * c[8],          c[4] * c[8] - c[5] * c[7]};
    StationaryPoints out;
    const double n1 = conic_norm(gx);
    const double n2 = conic_norm(gy);
    if (n1 == 0.0 || n2 == 0.0) {
        // One partial vanishes identically: every point of the other conic is stationary.
        out.degenerate = true;
        for (const auto& p : stationary_by_multiplier(H)) add_point(out.points, p[0], p[1]);
        return out;
    }

    auto finish = [&](double x, double y) {
        newton_on_conics(gx, gy, x, y);
        if (std::isfinite(x) && std::isfinite(y) && conic_residual_ok(gx, x, y) && conic_residual_ok(gy, x, y))
            add_point(out.points, x, y);
    };

    const bool linear1 = std::max({std::abs(gx[0]), std::abs(gx[1]), std::abs(gx[2])}) <= 1e-14 * n1;
    const bool linear2 = std::max({std::abs(gy[0]), std::abs(gy[1]), std::abs(gy[2])}) <= 1e-14 * n2;
    if (linear1 && linear2) {
        const double det = gx[3] * gy[4] - gx[4] * gy[3];
        if (std::abs(det) <= 1e-14 * n1 * n2) {
            out.degenerate = true;
            for (const auto& p : stationary_by_multiplier(H)) add_point(out.points, p[0], p[1]);
            return out;
        }
        finish((-gx[5] * gy[4] + gy[5] * gx[4]) / det, (-gy[5] * gx[3] + gx[5] * gy[3]) / det);
        return out;
    }

    // Rotate so that both conics keep a usable y^2 term, then eliminate y.
    static constexpr double kAngles[] = {0.0, 0.4636476090008061, 1.1071487177940904, 0.7853981633974483,
                                         2.0344439357957027};
    double best_score = -1.0;
    double cs = 1.0, sn = 0.0;
    for (double th : kAngles) {
        const Conic r1 = rotate(gx, std::cos(th), std::sin(th));
        const Conic r2 = rotate(gy, std::cos(th), std::sin(th));
        const double score = std::min(linear1 ? 1.0 : std::abs(r1[1]) / n1, linear2 ? 1.0 : std::abs(r2[1]) / n2);
        if (score > best_score) {
            best_score = score;
            cs = std::cos(th);
            sn = std::sin(th);
        }
    }
    const Conic q1 = rotate(gx, cs, sn);
    const Conic q2 = rotate(gy, cs, sn);
    // Each conic as a y^2 + b(u) y + c(u), coefficients in u ascending.
    const double a1 = linear1 ? 0.0 : q1[1];
    const double a2 = linear2 ? 0.0 : q2[1];
    const Poly b1{q1[4], q1[2]}, b2{q2[4], q2[2]};
    const Poly c1{q1[5], q1[3], q1[0]}, c2{q2[5], q2[3], q2[0]};
    const Poly A = poly_sub(Poly{a1 * c2[0], a1 * c2[1], a1 * c2[2]}, Poly{a2 * c1[0], a2 * c1[1], a2 * c1[2]});
    const Poly B = poly_sub(Poly{a1 * b2[0], a1 * b2[1]}, Poly{a2 * b1[0], a2 * b1[1]});
    const Poly C = poly_sub(poly_mul(b1, c2), poly_mul(b2, c1));
    Poly res = poly_sub(poly_mul(A, A), poly_mul(B, C));
    res.resize(5, 0.0);
    double rnorm = 0.0;
    for (double v : res) rnorm = std::max(rnorm, std::abs(v));
    if (rnorm <= 1e-13 * n1 * n1 * n2 * n2) {
        out.degenerate = true;
        for (const auto& p : stationary_by_multiplier(H)) finish(p[0], p[1]);
        return out;
    }
    for (double u : solve_quartic(res[4], res[3], res[2], res[1], res[0])) {
        std::vector<double> vs;
        const double Bu = poly_eval(B, u);
        const double Au = poly_eval(A, u);
        const double bscale = std::abs(a1) * (std::abs(poly_eval(b2, u)) + 1.0) +
                              std::abs(a2) * (std::abs(poly_eval(b1, u)) + 1.0);
        if (std::abs(Bu) > 1e-9 * bscale) {
            vs.push_back(-Au / Bu);
        } else {
            // Common y-root not determined linearly; try each root of a non-degenerate member.
            const bool use_first = !linear1 || linear2;
            const double qa = use_first ? a1 : a2;
            const Poly& qb = use_first ? b1 : b2;
            const Poly& qc = use_first ? c1 : c2;
            const double lb = poly_eval(qb, u), lc = poly_eval(qc, u);
            if (qa != 0.0 || lb != 0.0) vs = solve_quadratic(qa, lb, lc);
        }
        for (double v : vs) finish(cs * u - sn * v, sn * u + cs * v);
    }
    return out;
}

double rfop_x_limit(const PolytopeBounds& b) {
    double xmax = std::min(b.N, kClip);
    if (b.Q > 0.0 && std::isfinite(b.M)) xmax = std::min(xmax, b.M / b.Q);
    return xmax;
}

double rfop_y_limit(const PolytopeBounds& b, double x) {
    double y = kClip;
    if (std::isfinite(b.L)) y = std::min(y, b.P * x + b.L);
    if (std::isfinite(b.M)) y = std::min(y, b.M - b.Q * x);
    return std::max(0.0, y);
}

RfopSolution solve_rfop(const RationalObjective& H, const PolytopeBounds& bounds) {
    const auto& c = H.c;
    if (!(c[6] >= 0.0 && c[7] >= 0.0 && c[8] > 0.0))
        throw RfopError("solve_rfop: denominator coefficients must satisfy C7 >= 0, C8 >= 0, C9 > 0");
    if (!(bounds.P >= 0.0 && bounds.Q >= 0.0 && bounds.L >= 0.0 && bounds.N >= 0.0))
        throw RfopError("solve_rfop: polytope parameters must be nonnegative");
    if (!(bounds.M >= 0.0)) throw RfopError("solve_rfop: empty polytope");

    const double xmax = rfop_x_limit(bounds);
    const bool x_clipped = xmax >= kClip;
    auto feasible = [&](double x, double y) {
        const double tol = 1e-12 * std::max(1.0, std::abs(x) + std::abs(y));
        return x >= -tol && x <= xmax + tol && y >= -tol && y <= rfop_y_limit(bounds, x) + tol;
    };

    std::vector<Candidate> pool;
    auto add = [&](double x, double y) {
        x = std::clamp(x, 0.0, xmax);
        y = std::clamp(y, 0.0, rfop_y_limit(bounds, x));
        pool.push_back({x, y, H(x, y)});
    };

    for (const auto& p : stationary_points(H).points)
        if (feasible(p[0], p[1])) add(p[0], p[1]);

    auto add_segment = [&](double x0, double y0, double dx, double dy, double len) {
        if (!(len >= 0.0)) return;
        const SegmentMinimum m = minimize_segment(restrict_to_line(H, x0, y0, dx, dy, 0.0, len));
        add(x0 + dx * m.r, y0 + dy * m.r);
    };

    add_segment(0.0, 0.0, 1.0, 0.0, xmax);
    add_segment(0.0, 0.0, 0.0, 1.0, rfop_y_limit(bounds, 0.0));
    if (xmax > 0.0) add_segment(xmax, 0.0, 0.0, 1.0, rfop_y_limit(bounds, xmax));

    // Upper envelope: minimum of up to three lines, split at their crossings.
    struct Line {
        double slope, icept;
    };
    std::vector<Line> lines{{0.0, kClip}};
    if (std::isfinite(bounds.L)) lines.push_back({bounds.P, bounds.L});
    if (std::isfinite(bounds.M)) lines.push_back({-bounds.Q, bounds.M});
    std::vector<double> cuts{0.0, xmax};
    for (std::size_t a = 0; a < lines.size(); ++a)
        for (std::size_t b = a + 1; b < lines.size(); ++b) {
            const double ds = lines[a].slope - lines[b].slope;
            if (ds == 0.0) continue;
            const double xc = (lines[b].icept - lines[a].icept) / ds;
            if (xc > 0.0 && xc < xmax) cuts.push_back(xc);
        }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double xa = cuts[k], xb = cuts[k + 1];
        if (!(xb > xa)) continue;
        const double mid = 0.5 * (xa + xb);
        const Line* act = &lines[0];
        for (const Line& l : lines)
            if (l.slope * mid + l.icept < act->slope * mid + act->icept) act = &l;
        const double ya = act->slope * xa + act->icept;
        if (ya < 0.0) continue;
        add_segment(xa, ya, 1.0, act->slope, xb - xa);
    }

    Candidate best = pool.front();
    for (const Candidate& cand : pool)
        if (better(cand, best)) best = cand;
    RfopSolution sol{best.x, best.y, best.value, false};
    sol.clipped = (x_clipped && best.x >= kClip) || best.y >= kClip;
    return sol;
}

}  // namespace pmrhc
