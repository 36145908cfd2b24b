#include "pmrhc/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pmrhc {

namespace {

// Sum of |c_i| |t|^i, the natural scale for a residual at t.
double eval_scale(std::span<const double> c, double t) {
    double s = 0.0;
    double tp = 1.0;
    for (double ci : c) {
        s += std::abs(ci) * tp;
        tp *= std::abs(t);
    }
    return s;
}

double newton_polish(std::span<const double> c, double t, int iters) {
    const Poly d = poly_derivative(c);
    double best_res = std::abs(poly_eval(c, t));
    for (int it = 0; it < iters && best_res > 0.0; ++it) {
        const double fp = poly_eval(d, t);
        if (fp == 0.0) break;
        double step = poly_eval(c, t) / fp;
        bool improved = false;
        // Damp until the residual drops.
        for (int k = 0; k < 8 && !improved; ++k) {
            const double cand = t - step;
            const double res = std::abs(poly_eval(c, cand));
            if (res < best_res) {
                t = cand;
                best_res = res;
                improved = true;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return t;
}

void dedupe(std::vector<double>& roots) {
    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    for (double r : roots) {
        if (!out.empty() && std::abs(r - out.back()) <= 1e-9 * std::max(1.0, std::abs(r))) continue;
        out.push_back(r);
    }
    roots.swap(out);
}

// Discriminant of the monic quartic t^4 + b t^3 + c t^2 + d t + e.
double quartic_discriminant(double b, double c, double d, double e) {
    return 256 * e * e * e - 192 * b * d * e * e - 128 * c * c * e * e + 144 * c * d * d * e - 27 * d * d * d * d +
           144 * b * b * c * e * e - 6 * b * b * d * d * e - 80 * b * c * c * d * e + 18 * b * c * d * d * d +
           16 * c * c * c * c * e - 4 * c * c * c * d * d - 27 * b * b * b * b * e * e + 18 * b * b * b * c * d * e -
           4 * b * b * b * d * d * d - 4 * b * b * c * c * c * e + b * b * c * c * d * d;
}

// Real roots of the monic quartic z^4 + b z^3 + c z^2 + d z + e by Ferrari's method.
std::vector<double> ferrari(double b, double c, double d, double e) {
    const double b2 = b * b;
    const double p = c - 3.0 * b2 / 8.0;
    const double q = d - b * c / 2.0 + b2 * b / 8.0;
    const double r = e - b * d / 4.0 + b2 * c / 16.0 - 3.0 * b2 * b2 / 256.0;
    std::vector<double> ys;
    if (std::abs(q) <= 1e-14) {
        for (double w : solve_quadratic(1.0, p, r)) {
            if (w > 0.0) {
                ys.push_back(std::sqrt(w));
                ys.push_back(-std::sqrt(w));
            } else if (w == 0.0) {
                ys.push_back(0.0);
            }
        }
    } else {
        const std::vector<double> ms = solve_cubic(1.0, p, p * p / 4.0 - r, -q * q / 8.0);
        const double m = ms.empty() ? 0.0 : ms.back();
        if (m <= 0.0) return {};
        const double s = std::sqrt(2.0 * m);
        for (double y : solve_quadratic(1.0, s, p / 2.0 + m - q / (2.0 * s))) ys.push_back(y);
        for (double y : solve_quadratic(1.0, -s, p / 2.0 + m + q / (2.0 * s))) ys.push_back(y);
    }
    for (double& y : ys) y -= b / 4.0;
    return ys;
}

}  // namespace

double poly_eval(std::span<const double> c, double t) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * t + c[i];
    return v;
}

Poly poly_derivative(std::span<const double> c) {
    Poly d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<double>(i));
    return d;
}

Poly poly_mul(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Poly poly_sub(std::span<const double> a, std::span<const double> b) {
    Poly out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
    return out;
}

Poly poly_trim(Poly c) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    return c;
}

std::vector<double> solve_quadratic(double a2, double a1, double a0) {
    if (a2 == 0.0) {
        if (a1 == 0.0) {
            if (a0 == 0.0) throw std::invalid_argument("solve_quadratic: zero polynomial");
            return {};
        }
        return {-a0 / a1};
    }
    double disc = a1 * a1 - 4.0 * a2 * a0;
    const double scale = a1 * a1 + std::abs(4.0 * a2 * a0);
    if (disc < 0.0) {
        if (disc < -1e-14 * scale) return {};
        disc = 0.0;
    }
    if (disc == 0.0) return {-a1 / (2.0 * a2)};
    const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
    std::vector<double> roots{q / a2};
    roots.push_back(q != 0.0 ? a0 / q : -roots[0]);
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<double> solve_cubic(double a3, double a2, double a1, double a0) {
    if (a3 == 0.0) return solve_quadratic(a2, a1, a0);
    const double b = a2 / a3;
    const double c = a1 / a3;
    const double d = a0 / a3;
    // Depressed form t = y - b/3: y^3 + p y + q = 0.
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    std::vector<double> ys;
    const double half_q = q / 2.0;
    const double third_p = p / 3.0;
    const double disc = half_q * half_q + third_p * third_p * third_p;
    if (p == 0.0 && q == 0.0) {
        ys.push_back(0.0);
    } else if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        ys.push_back(std::cbrt(-half_q + sq) + std::cbrt(-half_q - sq));
    } else {
        const double rho = std::sqrt(-third_p);
        const double arg = std::clamp(-half_q / (rho * rho * rho), -1.0, 1.0);
        const double phi = std::acos(arg);
        for (int k = 0; k < 3; ++k) ys.push_back(2.0 * rho * std::cos((phi + 2.0 * M_PI * k) / 3.0));
    }
    const Poly coeffs{d, c, b, 1.0};
    std::vector<double> roots;
    for (double y : ys) roots.push_back(newton_polish(coeffs, y - b / 3.0, 6));
    dedupe(roots);
    return roots;
}

std::vector<double> isolate_real_roots(std::span<const double> coeffs) {
    const Poly c = poly_trim(Poly(coeffs.begin(), coeffs.end()));
    if (c.empty()) throw std::invalid_argument("isolate_real_roots: zero polynomial");
    const std::size_t n = c.size() - 1;
    if (n == 0) return {};
    if (n == 1) return {-c[0] / c[1]};
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) bound = std::max(bound, std::abs(c[i] / c[n]));
    bound += 1.0;
    std::vector<double> marks{-bound};
    for (double r : isolate_real_roots(poly_derivative(c)))
        if (r > -bound && r < bound) marks.push_back(r);
    marks.push_back(bound);
    std::vector<double> roots;
    for (std::size_t k = 0; k < marks.size(); ++k) {
        const double t = marks[k];
        if (std::abs(poly_eval(c, t)) <= 1e-10 * eval_scale(c, t)) roots.push_back(t);
        if (k + 1 == marks.size()) break;
        double lo = t;
        double hi = marks[k + 1];
        double flo = poly_eval(c, lo);
        const double fhi = poly_eval(c, hi);
        if (flo == 0.0 || fhi == 0.0 || (flo < 0.0) == (fhi < 0.0)) continue;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double fm = poly_eval(c, mid);
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push_back(0.5 * (lo + hi));
    }
    dedupe(roots);
    return roots;
}

std::vector<double> solve_quartic(double a4, double a3, double a2, double a1, double a0) {
    if (a4 == 0.0) {
        if (a3 == 0.0 && a2 == 0.0 && a1 == 0.0 && a0 == 0.0)
            throw std::invalid_argument("solve_quartic: zero polynomial");
        if (a3 == 0.0 && a2 == 0.0 && a1 == 0.0) return {};
        return solve_cubic(a3, a2, a1, a0);
    }
    const double b = a3 / a4;
    const double c = a2 / a4;
    const double d = a1 / a4;
    const double e = a0 / a4;
    // Rescale t = s z so that the monic coefficients are O(1).
    const double s = std::max({std::abs(b), std::sqrt(std::abs(c)), std::cbrt(std::abs(d)),
                               std::sqrt(std::sqrt(std::abs(e)))});
    if (s == 0.0) return {0.0};
    const double bs = b / s;
    const double cs = c / (s * s);
    const double ds = d / (s * s * s);
    const double es = e / (s * s * s * s);
    const Poly scaled{es, ds, cs, bs, 1.0};
    const Poly original{a0, a1, a2, a3, a4};

    std::vector<double> zs;
    bool fallback = std::abs(quartic_discriminant(bs, cs, ds, es)) < 1e-10;
    if (!fallback) {
        for (double z : ferrari(bs, cs, ds, es)) zs.push_back(newton_polish(scaled, z, 8));
        for (double z : zs)
            if (std::abs(poly_eval(scaled, z)) > 1e-10 * eval_scale(scaled, z)) fallback = true;
    }
    if (fallback) {
        zs.clear();
        for (double z : isolate_real_roots(scaled)) zs.push_back(newton_polish(scaled, z, 8));
    }
    std::vector<double> roots;
    for (double z : zs) roots.push_back(newton_polish(original, s * z, 4));
    dedupe(roots);
    return roots;
}

}  // namespace pmrhc
