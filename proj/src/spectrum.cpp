#include "leadform/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>

#include "leadform/errors.hpp"

namespace leadform {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Σ|c_k| |z|^k, the scale of rounding error when evaluating at z.
double magnitude_bound(std::span<const double> poly, double r) {
    double acc = 0.0;
    for (double c : poly) acc = acc * r + std::abs(c);
    return acc;
}

Polynomial derivative(std::span<const double> poly) {
    const std::size_t deg = poly.size() - 1;
    Polynomial d;
    d.reserve(deg);
    for (std::size_t k = 0; k < deg; ++k) d.push_back(poly[k] * static_cast<double>(deg - k));
    return d;
}

// p(z) and p'(z) in one Horner pass.
std::pair<Complex, Complex> evaluate_with_derivative(std::span<const double> poly, Complex z) {
    Complex p = poly[0];
    Complex dp = 0.0;
    for (std::size_t k = 1; k < poly.size(); ++k) {
        dp = dp * z + p;
        p = p * z + poly[k];
    }
    return {p, dp};
}

std::vector<Complex> aberth(std::span<const double> poly) {
    const std::size_t deg = poly.size() - 1;
    // Fujiwara bound on root modulus.
    double radius = 0.0;
    for (std::size_t k = 1; k <= deg; ++k) {
        double term = std::pow(std::abs(poly[k]), 1.0 / static_cast<double>(k));
        if (k == deg) term = std::pow(std::abs(poly[k]) / 2.0, 1.0 / static_cast<double>(k));
        radius = std::max(radius, 2.0 * term);
    }
    if (radius == 0.0) return std::vector<Complex>(deg, Complex{0.0, 0.0});

    std::vector<Complex> z(deg);
    for (std::size_t k = 0; k < deg; ++k) {
        double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(deg) + 0.4;
        z[k] = std::polar(0.5 * radius, theta);
    }

    std::vector<bool> done(deg, false);
    for (int iter = 0; iter < 2000; ++iter) {
        bool all_done = true;
        for (std::size_t k = 0; k < deg; ++k) {
            if (done[k]) continue;
            auto [p, dp] = evaluate_with_derivative(poly, z[k]);
            if (std::abs(p) <= 4.0 * static_cast<double>(deg) * kEps * magnitude_bound(poly, std::abs(z[k]))) {
                done[k] = true;
                continue;
            }
            all_done = false;
            Complex repulsion = 0.0;
            for (std::size_t j = 0; j < deg; ++j) {
                if (j != k) repulsion += 1.0 / (z[k] - z[j]);
            }
            Complex ratio = p / dp;
            Complex step = ratio / (1.0 - ratio * repulsion);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
                step = Complex{1e-8 * (1.0 + std::abs(z[k])), 1e-8};
            }
            z[k] -= step;
            if (std::abs(step) <= 2.0 * kEps * std::abs(z[k])) done[k] = true;
        }
        if (all_done) break;
    }
    return z;
}

// Newton on the (m-1)-th derivative, whose root near a cluster of m roots is
// well conditioned.
Complex refine_multiple(std::span<const double> poly, std::size_t multiplicity, Complex start) {
    Polynomial q(poly.begin(), poly.end());
    for (std::size_t k = 1; k < multiplicity; ++k) q = derivative(q);
    Complex z = start;
    for (int iter = 0; iter < 60; ++iter) {
        auto [p, dp] = evaluate_with_derivative(q, z);
        if (dp == Complex{0.0, 0.0}) break;
        Complex step = p / dp;
        z -= step;
        if (std::abs(step) <= kEps * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

std::vector<std::vector<std::size_t>> link_clusters(const std::vector<Complex>& roots,
                                                   const std::vector<std::size_t>& members, double rel) {
    std::vector<std::size_t> label(members.size());
    for (std::size_t k = 0; k < label.size(); ++k) label[k] = k;
    auto find = [&](std::size_t k) {
        while (label[k] != k) k = label[k] = label[label[k]];
        return k;
    };
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            const Complex a = roots[members[i]];
            const Complex b = roots[members[j]];
            double scale = std::max(1.0, std::max(std::abs(a), std::abs(b)));
            if (std::abs(a - b) <= rel * scale) label[find(i)] = find(j);
        }
    }
    std::vector<std::vector<std::size_t>> groups(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) groups[find(k)].push_back(members[k]);
    std::erase_if(groups, [](const auto& g) { return g.empty(); });
    return groups;
}

// A cluster of m roots sits within about eps^(1/m) of a multiple root, so the
// first pass links loosely. Groups that fail the residual test are split at a
// tighter radius and retried.
void collapse_group(std::span<const double> poly, std::vector<Complex>& roots,
                    const std::vector<std::size_t>& members, double rel) {
    if (members.size() < 2) return;
    Complex centroid = 0.0;
    for (auto k : members) centroid += roots[k];
    centroid /= static_cast<double>(members.size());
    Complex z = refine_multiple(poly, members.size(), centroid);
    // A genuine m-fold root zeroes p and its first m-1 derivatives.
    bool multiple = true;
    Polynomial q(poly.begin(), poly.end());
    for (std::size_t k = 0; k < members.size() && multiple; ++k) {
        const double tol = 1e3 * static_cast<double>(roots.size()) * kEps * magnitude_bound(q, std::abs(z));
        multiple = std::abs(evaluate(q, z)) <= tol;
        q = derivative(q);
    }
    if (multiple) {
        if (std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z))) z = Complex{z.real(), 0.0};
        for (auto k : members) roots[k] = z;
        return;
    }
    if (rel <= 1e-5) return;
    for (const auto& sub : link_clusters(roots, members, rel / 10.0)) collapse_group(poly, roots, sub, rel / 10.0);
}

void collapse_clusters(std::span<const double> poly, std::vector<Complex>& roots) {
    std::vector<std::size_t> all(roots.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    constexpr double kLoose = 3e-2;
    for (const auto& group : link_clusters(roots, all, kLoose)) collapse_group(poly, roots, group, kLoose);
}

void sort_roots(std::vector<Complex>& roots) {
    std::sort(roots.begin(), roots.end(), [](Complex x, Complex y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
}

using ComplexMatrix = Eigen::MatrixXcd;

// Largest coefficient gap between prod (s - z_k) and `poly`, each measured
// against the matching coefficient of prod (s + |z_k|).
double coefficient_mismatch(std::span<const double> poly, const std::vector<Complex>& roots) {
    std::vector<Complex> c{1.0};
    std::vector<double> scale{1.0};
    for (const auto& z : roots) {
        c.push_back(0.0);
        scale.push_back(0.0);
        for (std::size_t k = c.size() - 1; k > 0; --k) {
            c[k] -= z * c[k - 1];
            scale[k] += std::abs(z) * scale[k - 1];
        }
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < c.size() && k < poly.size(); ++k) {
        worst = std::max(worst, std::abs(c[k] - poly[k]) / std::max(scale[k], std::numeric_limits<double>::min()));
    }
    return worst;
}

// Polynomial coefficients only pin roots down to eps * sum|c||z|^k / |p'|,
// which is loose for close poles. Polishing against det(sI - A) directly
// (Aberth with f'/f = tr (sI - A)^-1) recovers them to matrix accuracy.
// A value collapsed onto a multiple root is re-seeded and polished too; if
// its members fail to converge the root really is multiple and the
// collapsed value stands, as it does when the collapsed roots still
// reproduce the coefficients to rounding (the polished points are then
// spurious zeros of a rounded determinant).
void refine_eigenvalues(const Matrix& a, std::span<const double> poly, std::vector<Complex>& roots) {
    const auto n = a.rows();
    if (n == 0) return;
    const ComplexMatrix ac = a.cast<Complex>();
    const ComplexMatrix identity = ComplexMatrix::Identity(n, n);

    struct Group {
        std::size_t first, last;
        Complex value;
    };
    std::vector<Group> groups;
    for (std::size_t i = 0; i < roots.size();) {
        std::size_t j = i;
        while (j < roots.size() && roots[j] == roots[i]) ++j;
        if (j - i >= 2) {
            const Complex z = roots[i];
            groups.push_back({i, j, z});
            const double r = 1e-3 * std::max(1.0, std::abs(z));
            for (std::size_t k = i; k < j; ++k) {
                const double angle = 2.0 * std::numbers::pi * static_cast<double>(k - i) / static_cast<double>(j - i) + 0.3;
                roots[k] = z + std::polar(r, angle);
            }
        }
        i = j;
    }

    std::vector<bool> done(roots.size(), false);
    for (int iter = 0; iter < 100; ++iter) {
        bool all_done = true;
        for (std::size_t k = 0; k < roots.size(); ++k) {
            if (done[k]) continue;
            Eigen::PartialPivLU<ComplexMatrix> lu(roots[k] * identity - ac);
            const Complex trace = lu.solve(identity).trace();
            if (!std::isfinite(trace.real()) || !std::isfinite(trace.imag())) {
                done[k] = true;  // landed exactly on an eigenvalue
                continue;
            }
            Complex repulsion = 0.0;
            for (std::size_t j = 0; j < roots.size(); ++j) {
                if (j != k && roots[j] != roots[k]) repulsion += 1.0 / (roots[k] - roots[j]);
            }
            const Complex step = 1.0 / (trace - repulsion);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
                done[k] = true;
                continue;
            }
            roots[k] -= step;
            if (std::abs(step) <= 4.0 * kEps * std::max(1.0, std::abs(roots[k]))) {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if (all_done) break;
    }
    for (const auto& g : groups) {
        auto collapsed = roots;
        std::fill(collapsed.begin() + static_cast<std::ptrdiff_t>(g.first),
                  collapsed.begin() + static_cast<std::ptrdiff_t>(g.last), g.value);
        bool converged = true;
        for (std::size_t k = g.first; k < g.last; ++k) converged = converged && done[k];
        if (!converged || coefficient_mismatch(poly, collapsed) <= 1e3 * static_cast<double>(roots.size()) * kEps) {
            roots = std::move(collapsed);
        }
    }
    for (auto& z : roots) {
        if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z))) z = Complex{z.real(), 0.0};
    }
    sort_roots(roots);
}

}  // namespace

Polynomial characteristic_polynomial(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error(ErrorCode::NonSquare, "characteristic polynomial of a non-square matrix");
    const auto n = a.rows();
    Polynomial coeffs(static_cast<std::size_t>(n + 1), 0.0);
    coeffs[0] = 1.0;
    Matrix m = Matrix::Zero(n, n);
    const Matrix identity = Matrix::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = a * m + coeffs[static_cast<std::size_t>(k - 1)] * identity;
        coeffs[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
    }
    return coeffs;
}

Complex evaluate(std::span<const double> poly, Complex z) {
    Complex acc = 0.0;
    for (double c : poly) acc = acc * z + c;
    return acc;
}

std::vector<Complex> polynomial_roots(const Polynomial& poly) {
    if (poly.empty() || poly[0] == 0.0) throw Error(ErrorCode::DimensionMismatch, "polynomial must be monic");
    Polynomial p = poly;
    for (double& c : p) c /= poly[0];

    // Exact trailing zeros are exact zero roots.
    std::size_t zeros = 0;
    while (p.size() > 1 && p.back() == 0.0) {
        p.pop_back();
        ++zeros;
    }
    std::vector<Complex> roots;
    if (p.size() > 1) {
        roots = aberth(p);
        collapse_clusters(p, roots);
        for (auto& z : roots) {
            if (std::abs(z.imag()) <= 64.0 * kEps * std::max(1.0, std::abs(z))) z = Complex{z.real(), 0.0};
        }
    }
    roots.insert(roots.end(), zeros, Complex{0.0, 0.0});
    sort_roots(roots);
    return roots;
}

std::vector<Complex> spectrum(const Matrix& a) {
    const auto poly = characteristic_polynomial(a);
    auto roots = polynomial_roots(poly);
    refine_eigenvalues(a, poly, roots);
    return roots;
}

double multiset_distance(std::span<const Complex> computed, std::span<const Complex> requested) {
    if (computed.size() != requested.size()) return std::numeric_limits<double>::infinity();
    std::vector<bool> used(computed.size(), false);
    double worst = 0.0;
    for (const auto& want : requested) {
        std::size_t best = computed.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < computed.size(); ++k) {
            if (used[k]) continue;
            double d = std::abs(computed[k] - want);
            if (d < best_dist) {
                best_dist = d;
                best = k;
            }
        }
        used[best] = true;
        worst = std::max(worst, best_dist);
    }
    return worst;
}

}  // namespace leadform
