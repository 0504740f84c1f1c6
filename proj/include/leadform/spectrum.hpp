#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace leadform {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

/// Monic polynomial coefficients, highest power first: {1, c1, ..., cn}.
using Polynomial = std::vector<double>;

/// det(sI - A) by the Faddeev-LeVerrier recursion.
Polynomial characteristic_polynomial(const Matrix& a);

Complex evaluate(std::span<const double> poly, Complex z);

/// All roots of a monic real polynomial (Aberth-Ehrlich iteration).
///
/// Root clusters that are indistinguishable at working precision are
/// collapsed onto a single multiple root, so repeated poles come back to
/// near machine accuracy instead of the usual eps^(1/m) spread. Output is
/// sorted by real part, then imaginary part.
std::vector<Complex> polynomial_roots(const Polynomial& poly);

/// Eigenvalues of A as roots of its characteristic polynomial.
std::vector<Complex> spectrum(const Matrix& a);

/// Largest distance in a nearest-neighbour pairing of two multisets of equal
/// size; +inf when the sizes differ.
double multiset_distance(std::span<const Complex> computed, std::span<const Complex> requested);

}  // namespace leadform
