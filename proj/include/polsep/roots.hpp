// Polynomial root finding for the Case I quartic and Case II cubic:
// companion-matrix eigenvalues with one Newton polish step, plus the
// real-root filter used to select physically admitted families.
#pragma once

#include "polsep/coefficients.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <vector>

namespace polsep {

/// Roots of c[0] + c[1] x + ... + c[n] x^n, found as eigenvalues of the
/// companion matrix of the monic normalization, each polished by one Newton
/// step.  Leading zero coefficients are stripped; a constant (or empty)
/// polynomial has no roots.
inline std::vector<std::complex<double>> polynomial_roots(std::vector<double> coeffs) {
    while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (n < 1) return {};

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -coeffs[i] / coeffs[n];

    Eigen::EigenSolver<Eigen::MatrixXd> es(companion);
    std::vector<std::complex<double>> roots;
    roots.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::complex<double> x(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
        // one Newton step: x -= p(x)/p'(x)
        std::complex<double> p = 0.0, dp = 0.0;
        for (int k = n; k >= 0; --k) {
            dp = dp * x + p;
            p = p * x + coeffs[k];
        }
        if (std::abs(dp) > 0.0) {
            const auto step = p / dp;
            if (std::isfinite(step.real()) && std::isfinite(step.imag())) x -= step;
        }
        roots.push_back(x);
    }
    return roots;
}

/// Relative residual |p(x)| / (1 + |x|^deg), the acceptance metric for roots.
inline double root_residual(const std::vector<double>& coeffs, std::complex<double> x) {
    std::complex<double> p = 0.0;
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) p = p * x + coeffs[k];
    return std::abs(p) / (1.0 + std::pow(std::abs(x), static_cast<int>(coeffs.size()) - 1));
}

/// Filter: a root is real when |Im x| < tol (1 + |x|).  Returns real parts.
inline std::vector<double> real_roots(const std::vector<double>& coeffs, double tol = 1e-10) {
    std::vector<double> out;
    for (const auto& x : polynomial_roots(coeffs))
        if (std::abs(x.imag()) < tol * (1.0 + std::abs(x))) out.push_back(x.real());
    return out;
}

}  // namespace polsep
