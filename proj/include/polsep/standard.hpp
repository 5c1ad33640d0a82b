// Standard-potential families: reference TTW/PW potentials, the S_I/S_II
// angular solutions, the Case I quartic and Case II cubic coefficient
// systems with their discriminants, and the classical-limit reductions.
#pragma once

#include "polsep/determining.hpp"
#include "polsep/roots.hpp"

#include <vector>

namespace polsep {

// ---------------------------------------------------------------------------
// Reference potentials

/// TTW potential, k = m/n: R = b r^2, S = (4k^2(a-b)cos 2k0 - 4k^2(a+b)) /
/// (cos 4k0 - 1).  The exact kernel needs integer harmonics 2k and 4k, i.e.
/// n in {1, 2}.
template <typename C>
BasicPotentialSpec<C> make_ttw(long m, long n, const C& b, const C& alpha, const C& beta) {
    using E = BasicExpr<C>;
    using T = CoeffTraits<C>;
    if (m <= 0 || n <= 0 || std::gcd(m, n) != 1)
        throw std::invalid_argument("TTW: k = m/n needs positive coprime m, n");
    if (n != 1 && n != 2)
        throw MathDomainError("TTW: harmonics 2k, 4k must be integers (n must be 1 or 2)");
    const int h2k = static_cast<int>(2 * m / n), h4k = 2 * h2k;
    const C k2x4 = T::ratio(4 * m * m, n * n);  // 4 k^2
    E num = E::cos_t(h2k).scaled(k2x4 * (alpha - beta)) - E::constant(k2x4 * (alpha + beta));
    E den = E::cos_t(h4k) - E::constant(T::one());
    BasicPotentialSpec<C> s;
    s.radial = T::is_zero(b) ? RadialKind::Zero : RadialKind::Oscillator;
    s.radial_coeff = b;
    s.S = BasicRatExpr<C>(num, den);
    return s;
}

/// PW potential with angular half-angle (k/2) theta for integer k:
/// R = a/r, S = (4(mu-nu)cos k0 - 4(mu+nu)) / (cos 2k0 - 1).
/// The paper's "PW with k = 3/2" is k = 3 in this convention.
template <typename C>
BasicPotentialSpec<C> make_pw(long k, const C& a, const C& mu, const C& nu) {
    using E = BasicExpr<C>;
    using T = CoeffTraits<C>;
    if (k <= 0) throw std::invalid_argument("PW: k must be positive");
    const C four = T::from_long(4);
    E num = E::cos_t(static_cast<int>(k)).scaled(four * (mu - nu)) -
            E::constant(four * (mu + nu));
    E den = E::cos_t(static_cast<int>(2 * k)) - E::constant(T::one());
    BasicPotentialSpec<C> s;
    s.radial = T::is_zero(a) ? RadialKind::Zero : RadialKind::Coulomb;
    s.radial_coeff = a;
    s.S = BasicRatExpr<C>(num, den);
    return s;
}

// ---------------------------------------------------------------------------
// S_I / S_II assembly

template <typename C>
struct BasicSVector {
    C s1{}, s2{}, s3{}, s4{}, s5{};
};
using SVector = BasicSVector<Rational>;

namespace detail {

/// M_I = B1 sin 20 - B2 cos 20 + 2(D1 sin 40 - D2 cos 40); M_II = A3 cos 0 +
/// A4 sin 0 + C1 sin 30 + C2 cos 30.  These are the denominators of T and
/// (squared) of S.
template <typename C>
BasicExpr<C> M_of(const BasicYConstants<C>& c, StandardCase which) {
    using E = BasicExpr<C>;
    using T = CoeffTraits<C>;
    const Doublets<C> d(c);
    E m = (which == StandardCase::I) ? E(d.Bm2 + d.Dm4 * 2) : E(d.Ap1 + d.Cp3);
    if (m.is_zero()) throw ZeroDenominatorError();
    (void)T::zero();
    return m;
}

}  // namespace detail

/// T(theta): the antiderivative quotient num / M.
template <typename C>
BasicRatExpr<C> assemble_T(StandardCase which, const BasicYConstants<C>& c,
                           const BasicSVector<C>& sv) {
    using E = BasicExpr<C>;
    // Case I harmonics: 2 and 4; Case II harmonics: 1 and 3.
    const int lo = (which == StandardCase::I) ? 2 : 1;
    const int hi = (which == StandardCase::I) ? 4 : 3;
    E num = E::constant(sv.s1) + E::sin_t(lo).scaled(sv.s2) + E::cos_t(lo).scaled(sv.s3) +
            E::sin_t(hi).scaled(sv.s4) + E::cos_t(hi).scaled(sv.s5);
    return BasicRatExpr<C>(num, detail::M_of(c, which));
}

/// S(theta): the closed quotient num / M^2.  This is the form the s-vector
/// branch formulas are paired with; the quotient is *not* the derivative of
/// assemble_T in every slot (the two displays disagree in slots s2..s5 of
/// Case I and slot s1 of Case II; the solution families and the commutator
/// engine both confirm this quotient).
template <typename C>
BasicRatExpr<C> assemble_S(StandardCase which, const BasicYConstants<C>& c,
                           const BasicSVector<C>& sv) {
    using E = BasicExpr<C>;
    using T = CoeffTraits<C>;
    auto cs = [](int n) { return E::cos_t(n); };
    auto sn = [](int n) { return E::sin_t(n); };
    E num;
    if (which == StandardCase::I) {
        const E b1 = cs(2).scaled(c.B1) + sn(2).scaled(c.B2) +
                     (cs(4).scaled(c.D1) + sn(4).scaled(c.D2)) * 4;
        const E b2 = E::constant(c.B1) + cs(6).scaled(c.D1) + sn(6).scaled(c.D2) +
                     (cs(2).scaled(c.D1) + sn(2).scaled(c.D2)) * 3;
        const E b3 = E::constant(c.B2) - cs(6).scaled(c.D2) + sn(6).scaled(c.D1) +
                     (cs(2).scaled(c.D2) - sn(2).scaled(c.D1)) * 3;
        const E b4 = E::constant(c.D1).scaled(T::from_long(8)) - cs(6).scaled(c.B1) -
                     sn(6).scaled(c.B2) + (cs(2).scaled(c.B1) - sn(2).scaled(c.B2)) * 3;
        const E b5 = E::constant(c.D2).scaled(T::from_long(8)) + cs(6).scaled(c.B2) -
                     sn(6).scaled(c.B1) + (cs(2).scaled(c.B2) + sn(2).scaled(c.B1)) * 3;
        num = -(b1.scaled(sv.s1 + sv.s1) + b2.scaled(sv.s2 + sv.s2) + b3.scaled(sv.s3 + sv.s3) +
                b4.scaled(sv.s4) + b5.scaled(sv.s5));
    } else {
        const E b1 = sn(1).scaled(c.A3) - cs(1).scaled(c.A4) +
                     (sn(3).scaled(c.C2) - cs(3).scaled(c.C1)) * 3;
        const E b2 = E::constant(c.A3) - cs(4).scaled(c.C2) - sn(4).scaled(c.C1) +
                     (cs(2).scaled(c.C2) + sn(2).scaled(c.C1)) * 2;
        const E b3 = E::constant(c.A4) + cs(4).scaled(c.C1) - sn(4).scaled(c.C2) +
                     (cs(2).scaled(c.C1) - sn(2).scaled(c.C2)) * 2;
        const E b4 = E::constant(c.C2).scaled(T::from_long(3)) + cs(4).scaled(c.A3) +
                     sn(4).scaled(c.A4) + (cs(2).scaled(c.A3) - sn(2).scaled(c.A4)) * 2;
        const E b5 = E::constant(c.C1).scaled(T::from_long(3)) - cs(4).scaled(c.A4) +
                     sn(4).scaled(c.A3) + (cs(2).scaled(c.A4) + sn(2).scaled(c.A3)) * 2;
        num = b1.scaled(sv.s1 + sv.s1) + b2.scaled(sv.s2) - b3.scaled(sv.s3) + b4.scaled(sv.s4) -
              b5.scaled(sv.s5);
    }
    const E M = detail::M_of(c, which);
    return BasicRatExpr<C>(num, M * M);
}

// ---------------------------------------------------------------------------
// Discriminants (printed closed forms)

/// Case I quartic discriminant (B1 rotated to 0).
template <typename C>
C discriminant_case_I(const C& hbar, const C& B2, const C& D1, const C& D2) {
    using T = CoeffTraits<C>;
    auto P = [](const C& x, int n) {
        C r = T::one();
        for (int i = 0; i < n; ++i) r = r * x;
        return r;
    };
    const C DD = D1 * D1 + D2 * D2;
    const C bracket = P(B2, 4) * (D2 * D2 * T::from_long(60) - D1 * D1 * T::from_long(48)) +
                      P(B2, 2) * P(DD, 2) * T::from_long(768) + P(B2, 6) -
                      P(DD, 3) * T::from_long(4096);
    return T::neg(T::from_long(256)) * P(hbar, 24) * P(D1, 24) * D2 * D2 *
           P(B2 * B2 - D1 * D1 * T::from_long(8), 2) * bracket;
}

/// Case II cubic discriminant (A3 rotated to 0).
template <typename C>
C discriminant_case_II(const C& hbar, const C& A4, const C& C1, const C& C2) {
    using T = CoeffTraits<C>;
    auto P = [](const C& x, int n) {
        C r = T::one();
        for (int i = 0; i < n; ++i) r = r * x;
        return r;
    };
    const C CC = C1 * C1 + C2 * C2;
    const C bracket = P(A4, 4) + P(A4, 3) * C1 * T::from_long(8) +
                      A4 * A4 * CC * T::from_long(18) - CC * CC * T::from_long(27);
    return T::neg(T::from_long(4)) * P(hbar, 12) * C2 * C2 * bracket;
}

// ---------------------------------------------------------------------------
// Polynomial systems (ascending coefficient vectors)

template <typename C>
std::array<C, 5> quartic_case_I(const C& hbar, const C& B2, const C& D1, const C& D2) {
    using T = CoeffTraits<C>;
    const C h2 = hbar * hbar, h4 = h2 * h2, h6 = h4 * h2, h8 = h4 * h4;
    const C D1sq = D1 * D1, D2sq = D2 * D2, B2sq = B2 * B2;
    const C D1p4 = D1sq * D1sq;
    std::array<C, 5> a;
    a[4] = D1p4;
    a[3] = B2 * D2 * D1sq * D1 * T::from_long(4) * h2;
    a[2] = (B2sq * (D1p4 + D2sq * D1sq * T::from_long(6)) -
            D1p4 * (D1sq + D2sq) * T::from_long(16)) *
           h4;
    a[1] = T::neg(T::from_long(2)) * B2 * D1 * (D1sq * T::from_long(8) - B2sq) * D2 *
           (D1sq + D2sq * T::from_long(2)) * h6;
    const C fac = B2sq - D1sq * T::from_long(8);
    a[0] = fac * fac * D2sq * (D1sq + D2sq) * h8;
    return a;
}

template <typename C>
std::array<C, 4> cubic_case_II(const C& hbar, const C& A4, const C& C1, const C& C2) {
    using T = CoeffTraits<C>;
    const C h2 = hbar * hbar, h4 = h2 * h2, h6 = h4 * h2;
    std::array<C, 4> a;
    a[3] = T::one();
    a[2] = A4 * h2;
    a[1] = T::neg(h4) * (C1 * C1 * T::from_long(3) + A4 * C1 * T::from_long(2) +
                         C2 * C2 * T::from_long(3));
    a[0] = (C1 * C1 * C1 * T::from_long(2) + A4 * C1 * C1 + C2 * C2 * C1 * T::from_long(2) +
            A4 * C2 * C2) *
           h6;
    return a;
}

// ---------------------------------------------------------------------------
// The printed s-vectors

/// Generic Case I branch (requires hbar, D1, D2 nonzero and B2^2 != 8 D1^2).
template <typename C>
BasicSVector<C> svec_case_I(const C& q, const C& hbar, const C& B2, const C& D1, const C& D2) {
    using T = CoeffTraits<C>;
    auto L = [](long n) { return CoeffTraits<C>::from_long(n); };
    const C h2 = hbar * hbar, h4 = h2 * h2, h6 = h4 * h2;
    const C D1sq = D1 * D1, D2sq = D2 * D2, B2sq = B2 * B2;
    const C fac = B2sq - D1sq * L(8);
    if (T::is_zero(hbar) || T::is_zero(D1) || T::is_zero(D2) || T::is_zero(fac))
        throw MathDomainError("Case I generic branch requires hbar, D1, D2 != 0 and B2^2 != 8 D1^2");
    BasicSVector<C> s;
    {
        const C num = B2 * D2 * (D1sq * L(8) - B2sq) *
                          (B2sq * (D1sq + D2sq) + D1sq * L(8) * (D1sq * L(4) + D2sq * L(3))) * h6 +
                      (B2sq * L(8) * (D1sq * D1sq * D1 - D1sq * D1 * D2sq * L(6)) -
                       B2sq * B2sq * (D1sq * D1 + D2sq * D1 * L(3)) +
                       (D1sq * L(2) + D2sq) * D1sq * D1sq * D1 * L(64)) *
                          h4 * q -
                      B2 * D1sq * D2 * (B2sq * L(3) + D1sq * L(40)) * h2 * q * q -
                      D1sq * D1 * (B2sq + D1sq * L(8)) * q * q * q;
        s.s1 = q * num / (D1sq * L(4) * h6 * fac * fac * D2sq);
    }
    s.s2 = q * h2;
    {
        const C num = D2 * fac * (B2sq * L(3) * (D1sq + D2sq) + D1sq * L(8) * (D1sq * L(2) + D2sq)) *
                          h6 +
                      (B2sq * B2 * L(2) * (D1sq * D1 + D2sq * D1 * L(4)) -
                       B2 * D1sq * D1sq * D1 * L(32)) *
                          h4 * q +
                      D1sq * D2 * (B2sq * L(7) + D1sq * L(8)) * h2 * q * q +
                      B2 * D1sq * D1 * L(2) * q * q * q;
        s.s3 = q * num / (D1 * D2sq * h6 * fac * fac);
    }
    {
        const C num = B2 * D2 * L(4) * (D1sq + D2sq * L(2)) * fac * h6 +
                      D1 * L(2) * (B2sq * (D1sq + D2sq * L(6)) - D1sq * L(16) * (D1sq + D2sq)) *
                          h4 * q +
                      B2 * D1sq * D2 * L(8) * h2 * q * q + D1sq * D1 * L(2) * q * q * q;
        s.s4 = q * num / (D2sq * h6 * fac * fac);
    }
    s.s5 = T::zero();
    return s;
}

/// Generic Case II branch (requires hbar, A4, C2, 2C1+A4 nonzero); s2 free.
template <typename C>
BasicSVector<C> svec_case_II(const C& q, const C& s2, const C& hbar, const C& A4, const C& C1,
                             const C& C2) {
    using T = CoeffTraits<C>;
    auto L = [](long n) { return CoeffTraits<C>::from_long(n); };
    const C h2 = hbar * hbar, h4 = h2 * h2;
    const C twoC1A4 = C1 * L(2) + A4;
    if (T::is_zero(hbar) || T::is_zero(A4) || T::is_zero(C2) || T::is_zero(twoC1A4))
        throw MathDomainError("Case II generic branch requires hbar, A4, C2, 2C1+A4 != 0");
    BasicSVector<C> s;
    s.s1 = T::zero();
    s.s2 = s2;
    s.s3 = q;
    s.s4 = (h4 * ((C1 * C1 * L(2) + C1 * A4 + C2 * C2 * L(3)) * q + C1 * C2 * s2) -
            (C1 + A4) * h2 * q * q - q * q * q) /
           (A4 * C2 * h4);
    s.s5 = (h4 * ((C1 * C1 * L(4) + C1 * A4 + C2 * C2 * L(6) - A4 * A4) * q + twoC1A4 * C2 * s2) -
            (C1 * L(2) + A4 * L(3)) * h2 * q * q - q * q * q * L(2)) /
           (A4 * twoC1A4 * h4);
    return s;
}

// Degenerate branches (all make the discriminant vanish).

/// Case I, hbar = 0: s1, s4, s5 free, s2 = s3 = 0.
template <typename C>
BasicSVector<C> svec_case_I_hbar0(const C& s1, const C& s4, const C& s5) {
    BasicSVector<C> s;
    s.s1 = s1;
    s.s4 = s4;
    s.s5 = s5;
    return s;
}

/// Case I, D2 = 0: s1, s4 free, s3 = (B2^2 s4 - 8 D1^2 (s1+s4)) / (2 B2 D1).
template <typename C>
BasicSVector<C> svec_case_I_D2zero(const C& s1, const C& s4, const C& B2, const C& D1) {
    using T = CoeffTraits<C>;
    if (T::is_zero(B2) || T::is_zero(D1))
        throw MathDomainError("Case I D2=0 branch requires B2, D1 != 0");
    BasicSVector<C> s;
    s.s1 = s1;
    s.s3 = (B2 * B2 * s4 - D1 * D1 * T::from_long(8) * (s1 + s4)) /
           (B2 * D1 * T::from_long(2));
    s.s4 = s4;
    return s;
}

/// Case II, hbar = 0 (A4 = C2 = 0): s1, s4, s5 free, s2 = s3 = 0.
template <typename C>
BasicSVector<C> svec_case_II_hbar0(const C& s1, const C& s4, const C& s5) {
    return svec_case_I_hbar0(s1, s4, s5);
}

// ---------------------------------------------------------------------------
// Solution families

enum class RootClassification { AllRealDistinct, TwoRealTwoComplex, Degenerate, AllComplex };

inline const char* to_string(RootClassification c) {
    switch (c) {
        case RootClassification::AllRealDistinct: return "all-real-distinct";
        case RootClassification::TwoRealTwoComplex: return "mixed-real-complex";
        case RootClassification::Degenerate: return "degenerate";
        case RootClassification::AllComplex: return "all-complex";
    }
    return "?";
}

template <typename C>
struct BasicSolutionFamily {
    StandardCase which = StandardCase::I;
    int root_index = 0;
    C q{};
    C hbar{};
    BasicSVector<C> svec;
    BasicRatExpr<C> S;
    BasicYConstants<C> constants;
    C discriminant{};
    RootClassification classification = RootClassification::Degenerate;
    double root_residual = 0.0;
};
using SolutionFamily = BasicSolutionFamily<Rational>;
using FSolutionFamily = BasicSolutionFamily<BigFloat>;

namespace detail {

/// A few Newton iterations in the coefficient domain, lifting a double root
/// to the full working precision.
template <typename C, std::size_t N>
C newton_refine(const std::array<C, N>& coeffs, C x, int iterations = 6) {
    using T = CoeffTraits<C>;
    for (int it = 0; it < iterations; ++it) {
        C p = T::zero(), dp = T::zero();
        for (int k = static_cast<int>(N) - 1; k >= 0; --k) {
            dp = dp * x + p;
            p = p * x + coeffs[static_cast<std::size_t>(k)];
        }
        if (T::is_zero(dp)) break;
        x = x - p / dp;
    }
    return x;
}

template <typename C, std::size_t N>
double rel_residual(const std::array<C, N>& coeffs, const C& x) {
    using T = CoeffTraits<C>;
    C p = T::zero();
    for (int k = static_cast<int>(N) - 1; k >= 0; --k)
        p = p * x + coeffs[static_cast<std::size_t>(k)];
    const double xa = std::abs(T::to_double(x));
    return std::abs(T::to_double(p)) / (1.0 + std::pow(xa, static_cast<int>(N) - 1));
}

inline RootClassification classify(double disc, int n_real, int degree) {
    if (disc == 0.0) return RootClassification::Degenerate;
    if (n_real == degree) return RootClassification::AllRealDistinct;
    if (n_real == 0) return RootClassification::AllComplex;
    return RootClassification::TwoRealTwoComplex;  // mixed real/complex-pair
}

}  // namespace detail

/// Generic Case I solver: real quartic roots -> families.  Degenerate
/// parameter sets must go through the dedicated branch constructors.
template <typename C>
std::vector<BasicSolutionFamily<C>> solve_case_I(const C& hbar, const C& B2, const C& D1,
                                                 const C& D2, double real_tol = 1e-10) {
    using T = CoeffTraits<C>;
    const auto coeffs = quartic_case_I(hbar, B2, D1, D2);
    const C disc = discriminant_case_I(hbar, B2, D1, D2);
    if (T::is_zero(hbar) || T::is_zero(D1) || T::is_zero(D2) ||
        T::is_zero(B2 * B2 - D1 * D1 * T::from_long(8)))
        throw MathDomainError("Case I: degenerate parameters; use the branch constructors");
    std::vector<double> dc(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) dc[i] = T::to_double(coeffs[i]);
    const auto roots = real_roots(dc, real_tol);

    BasicYConstants<C> yc;
    yc.B2 = B2;
    yc.D1 = D1;
    yc.D2 = D2;
    std::vector<BasicSolutionFamily<C>> out;
    int idx = 0;
    for (double r : roots) {
        BasicSolutionFamily<C> f;
        f.which = StandardCase::I;
        f.root_index = idx++;
        f.q = detail::newton_refine(coeffs, C(r));
        f.hbar = hbar;
        f.svec = svec_case_I(f.q, hbar, B2, D1, D2);
        f.S = assemble_S(StandardCase::I, yc, f.svec);
        f.constants = yc;
        f.discriminant = disc;
        f.classification =
            detail::classify(T::to_double(disc), static_cast<int>(roots.size()), 4);
        f.root_residual = detail::rel_residual(coeffs, f.q);
        out.push_back(std::move(f));
    }
    return out;
}

/// Generic Case II solver: real cubic roots -> families; s2 defaults to zero.
template <typename C>
std::vector<BasicSolutionFamily<C>> solve_case_II(const C& hbar, const C& A4, const C& C1,
                                                  const C& C2, const C& s2 = C{},
                                                  double real_tol = 1e-10) {
    using T = CoeffTraits<C>;
    const auto coeffs = cubic_case_II(hbar, A4, C1, C2);
    const C disc = discriminant_case_II(hbar, A4, C1, C2);
    if (T::is_zero(hbar) || T::is_zero(A4) || T::is_zero(C2) ||
        T::is_zero(C1 * T::from_long(2) + A4))
        throw MathDomainError("Case II: degenerate parameters; use the branch constructors");
    std::vector<double> dc(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) dc[i] = T::to_double(coeffs[i]);
    const auto roots = real_roots(dc, real_tol);

    BasicYConstants<C> yc;
    yc.A4 = A4;
    yc.C1 = C1;
    yc.C2 = C2;
    std::vector<BasicSolutionFamily<C>> out;
    int idx = 0;
    for (double r : roots) {
        BasicSolutionFamily<C> f;
        f.which = StandardCase::II;
        f.root_index = idx++;
        f.q = detail::newton_refine(coeffs, C(r));
        f.hbar = hbar;
        f.svec = svec_case_II(f.q, s2, hbar, A4, C1, C2);
        f.S = assemble_S(StandardCase::II, yc, f.svec);
        f.constants = yc;
        f.discriminant = disc;
        f.classification =
            detail::classify(T::to_double(disc), static_cast<int>(roots.size()), 3);
        f.root_residual = detail::rel_residual(coeffs, f.q);
        out.push_back(std::move(f));
    }
    return out;
}

/// Degenerate branch families.  In these branches the antiderivative form
/// T' solves the full system and reproduces the published branch displays;
/// the D2 = 0 branch closed quotient coincides with assemble_S.

/// Case I, hbar = 0 (requires B1 = B2 = 0; the branch fails C_theta
/// otherwise).
template <typename C>
BasicSolutionFamily<C> family_case_I_hbar0(const C& D1, const C& D2, const C& s1, const C& s4,
                                           const C& s5) {
    using T = CoeffTraits<C>;
    if (T::is_zero(D1) && T::is_zero(D2))
        throw MathDomainError("Case I hbar=0 branch requires (D1, D2) != (0, 0)");
    BasicSolutionFamily<C> f;
    f.which = StandardCase::I;
    f.svec = svec_case_I_hbar0(s1, s4, s5);
    f.constants.D1 = D1;
    f.constants.D2 = D2;
    f.S = assemble_T(StandardCase::I, f.constants, f.svec).differentiate(Var::Theta);
    f.classification = RootClassification::Degenerate;
    return f;
}

/// Case I, D2 = 0, hbar != 0 (B1 rotated away; B2, D1 != 0).
template <typename C>
BasicSolutionFamily<C> family_case_I_D2zero(const C& hbar, const C& B2, const C& D1, const C& s1,
                                            const C& s4) {
    BasicSolutionFamily<C> f;
    f.which = StandardCase::I;
    f.hbar = hbar;
    f.svec = svec_case_I_D2zero(s1, s4, B2, D1);
    f.constants.B2 = B2;
    f.constants.D1 = D1;
    f.S = assemble_S(StandardCase::I, f.constants, f.svec);
    f.classification = RootClassification::Degenerate;
    return f;
}

/// Case II, hbar = 0 (requires A3 = A4 = C2 = 0, C1 != 0).
template <typename C>
BasicSolutionFamily<C> family_case_II_hbar0(const C& C1, const C& s1, const C& s4, const C& s5) {
    using T = CoeffTraits<C>;
    if (T::is_zero(C1)) throw MathDomainError("Case II hbar=0 branch requires C1 != 0");
    BasicSolutionFamily<C> f;
    f.which = StandardCase::II;
    f.svec = svec_case_II_hbar0(s1, s4, s5);
    f.constants.C1 = C1;
    f.S = assemble_T(StandardCase::II, f.constants, f.svec).differentiate(Var::Theta);
    f.classification = RootClassification::Degenerate;
    return f;
}

// ---------------------------------------------------------------------------
// Exact theta-rotation (angles pi p / q with rational trig values only)

/// theta -> theta + pi p / q applied to every harmonic.  Throws when some
/// present harmonic has an irrational cos/sin at that angle (Niven).
inline Expr rotate_theta_pi(const Expr& e, long p, long q) {
    Expr out;
    for (const auto& [k, c] : e.terms()) {
        if (k.harm == 0) {
            out.add_term(k, c);
            continue;
        }
        Rational cn, sn;
        if (!rational_cos_pi(k.harm * p, q, cn) || !rational_sin_pi(k.harm * p, q, sn))
            throw MathDomainError("rotation angle has irrational trig values for harmonic " +
                                  std::to_string(k.harm));
        if (k.phase == Phase::Cos) {
            // cos n(t + phi) = cos nt cos nphi - sin nt sin nphi
            out.add_term(TermKey{k.hbar, k.rpow, k.harm, Phase::Cos}, c * cn);
            out.add_term(TermKey{k.hbar, k.rpow, k.harm, Phase::Sin}, -c * sn);
        } else {
            // sin n(t + phi) = sin nt cos nphi + cos nt sin nphi
            out.add_term(TermKey{k.hbar, k.rpow, k.harm, Phase::Sin}, c * cn);
            out.add_term(TermKey{k.hbar, k.rpow, k.harm, Phase::Cos}, c * sn);
        }
    }
    return out;
}

inline RatExpr rotate_theta_pi(const RatExpr& e, long p, long q) {
    if (e.den_trivial()) return RatExpr(rotate_theta_pi(e.num(), p, q));
    return RatExpr(rotate_theta_pi(e.num(), p, q), rotate_theta_pi(e.den_expanded(), p, q));
}

// ---------------------------------------------------------------------------
// Classical-limit identification

template <typename C>
struct BasicClassicalLimit {
    bool null_limit = false;  // S proportional to hbar^2, no classical analog
    long k_m = 0, k_n = 1;    // identified TTW angular index k = m/n
    C alpha{}, beta{};
    long rot_p = 0, rot_q = 1;  // S_family(t) = S_TTW(t + pi rot_p / rot_q)
};
using ClassicalLimit = BasicClassicalLimit<Rational>;

/// Identify the hbar = 0 Case I family (D2 = 0 alignment) with TTW k = 2:
/// alpha = (t1 - t5)/32, beta = -(t1 + t5)/32 with t_i = 4 s_i / D1.
template <typename C>
BasicClassicalLimit<C> classical_limit_case_I_hbar0(const BasicSVector<C>& sv, const C& D1) {
    using T = CoeffTraits<C>;
    if (T::is_zero(D1)) throw MathDomainError("Case I classical limit needs D1 != 0");
    const C t1 = sv.s1 * T::from_long(4) / D1;
    const C t5 = sv.s5 * T::from_long(4) / D1;
    BasicClassicalLimit<C> out;
    out.k_m = 2;
    out.k_n = 1;
    out.alpha = (t1 - t5) / T::from_long(32);
    out.beta = T::neg(t1 + t5) / T::from_long(32);
    return out;
}

/// Identify the D2 = 0 Case I branch with TTW k = 1 rotated by pi/4:
/// alpha - beta = (s1 + s4)/B2, alpha + beta = -s4 / (2 D1).
template <typename C>
BasicClassicalLimit<C> classical_limit_case_I_D2zero(const BasicSVector<C>& sv, const C& B2,
                                                     const C& D1) {
    using T = CoeffTraits<C>;
    if (T::is_zero(B2) || T::is_zero(D1))
        throw MathDomainError("Case I D2=0 identification needs B2, D1 != 0");
    const C diff = (sv.s1 + sv.s4) / B2;                       // alpha - beta
    const C sum = T::neg(sv.s4) / (D1 * T::from_long(2));      // alpha + beta
    BasicClassicalLimit<C> out;
    out.k_m = 1;
    out.k_n = 1;
    out.alpha = (sum + diff) / T::from_long(2);
    out.beta = (sum - diff) / T::from_long(2);
    out.rot_p = -1;
    out.rot_q = 4;
    return out;
}

/// Identify the hbar = 0 Case II family (A4 = C2 = 0) with the TTW k = 3/2
/// angular part: alpha - beta = 2 s1 / (3 C1), alpha + beta = -2 s5 / (3 C1).
template <typename C>
BasicClassicalLimit<C> classical_limit_case_II_hbar0(const BasicSVector<C>& sv, const C& C1) {
    using T = CoeffTraits<C>;
    if (T::is_zero(C1)) throw MathDomainError("Case II classical limit needs C1 != 0");
    const C diff = sv.s1 * T::from_long(2) / (C1 * T::from_long(3));
    const C sum = T::neg(sv.s5 * T::from_long(2)) / (C1 * T::from_long(3));
    BasicClassicalLimit<C> out;
    out.k_m = 3;
    out.k_n = 2;
    out.alpha = (sum + diff) / T::from_long(2);
    out.beta = (sum - diff) / T::from_long(2);
    return out;
}

/// Null-limit test for a quantum family: the hbar^0 slice of S vanishes.
template <typename C>
bool has_null_classical_limit(const BasicRatExpr<C>& S) {
    return S.num().hbar_slice(0).is_zero();
}

}  // namespace polsep
