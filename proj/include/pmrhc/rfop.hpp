#pragma once

#include <array>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace pmrhc {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// H(x, y) = (C1 x^2 + C2 y^2 + C3 xy + C4 x + C5 y + C6) / (C7 x + C8 y + C9); c[0] holds C1.
struct RationalObjective {
    std::array<double, 9> c{};

    double numerator(double x, double y) const;
    double denominator(double x, double y) const;
    double operator()(double x, double y) const { return numerator(x, y) / denominator(x, y); }
};

// Feasible set {0 <= x <= N, 0 <= y <= min(P x + L, -Q x + M)}; L, M, N may be kUnbounded.
struct PolytopeBounds {
    double P = 0.0;
    double L = kUnbounded;
    double Q = 0.0;
    double M = kUnbounded;
    double N = kUnbounded;
};

class RfopError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// h(r) = f(r) / g(r) on [r0, r1] with deg f <= 2, deg g <= 1; coefficients ascending.
struct SegmentRestriction {
    std::array<double, 3> f{};
    std::array<double, 2> g{};
    double r0 = 0.0;
    double r1 = 0.0;

    double operator()(double r) const;
    double slope(double r) const;
};

struct SegmentMinimum {
    double r = 0.0;
    double value = 0.0;
};

// g (g f'' - f g'') - 2 g' (g f' - f g'), constant for the supported degrees.
double delta_h(std::span<const double> f, std::span<const double> g);

SegmentMinimum minimize_segment(const SegmentRestriction& h);

// h(r) = H(x0 + dx r, y0 + dy r) on [r0, r1].
SegmentRestriction restrict_to_line(const RationalObjective& H, double x0, double y0, double dx, double dy,
                                    double r0, double r1);

struct StationaryPoints {
    std::vector<std::array<double, 2>> points;
    bool degenerate = false;  // the two conics share a component
};

// Real common points of the conics numerator(dH/dx) = 0 and numerator(dH/dy) = 0.
StationaryPoints stationary_points(const RationalObjective& H);

struct RfopSolution {
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
    bool clipped = false;  // the optimum sits on the artificial 1e9 box
};

RfopSolution solve_rfop(const RationalObjective& H, const PolytopeBounds& bounds);

// Largest feasible x and the upper y boundary at x, with the 1e9 clip applied.
double rfop_x_limit(const PolytopeBounds& b);
double rfop_y_limit(const PolytopeBounds& b, double x);

}  // namespace pmrhc
