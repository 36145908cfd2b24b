#pragma once

#include <span>
#include <vector>

namespace pmrhc {

// Coefficients are stored in ascending order: c[0] + c[1] t + c[2] t^2 + ...
using Poly = std::vector<double>;

double poly_eval(std::span<const double> c, double t);
Poly poly_derivative(std::span<const double> c);
Poly poly_mul(std::span<const double> a, std::span<const double> b);
Poly poly_sub(std::span<const double> a, std::span<const double> b);
// Drop leading coefficients that are exactly zero.
Poly poly_trim(Poly c);

// Sorted real roots; multiple roots are reported once.
std::vector<double> solve_quadratic(double a2, double a1, double a0);
std::vector<double> solve_cubic(double a3, double a2, double a1, double a0);
std::vector<double> solve_quartic(double a4, double a3, double a2, double a1, double a0);

// Sign-change subdivision between critical points, any degree.
std::vector<double> isolate_real_roots(std::span<const double> c);

}  // namespace pmrhc
