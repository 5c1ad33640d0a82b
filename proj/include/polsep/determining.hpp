// The determining-equation system for a fourth-order integral of a
// Hamiltonian separating in polar coordinates: the thirteen F-functions, the
// six determining equations, the linear compatibility condition, the
// reconstruction of G1..G3 (with the confining-potential corrections), the
// closed forms for G4, the gamma equations and the Case I / Case II
// C_theta residuals.
//
// Every trig bracket that appears in a printed formula is built exactly once
// in the Doublets table below and reused everywhere, so there is a single
// transcription of each coefficient group.
#pragma once

#include "polsep/observables.hpp"

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace polsep {

enum class StandardCase { I, II };

template <typename C>
struct BasicFVector {
    // F[1] .. F[13]; F[0] unused.
    std::array<BasicRatExpr<C>, 14> F{};
    const BasicRatExpr<C>& operator[](int i) const { return F.at(i); }
};
using FVector = BasicFVector<Rational>;

template <typename C>
struct BasicGammaFunctions {
    BasicExpr<C> gamma1;  // c0 + c1 cos 2theta + c2 sin 2theta
    C gamma2{};           // constant
    BasicExpr<C> gamma3;  // d1 cos theta + d2 sin theta
    std::array<C, 5> free{};  // c0, c1, c2, d1, d2
};
using GammaFunctions = BasicGammaFunctions<Rational>;

namespace detail {

/// The recurring trig brackets of the Y-constants.  Naming: p = "plus"
/// combination u cos + v sin of a doublet (u, v); m = the conjugate
/// sin-combination; x = the "crossed" cos-combination that appears in
/// derivative positions.
template <typename C>
struct Doublets {
    using E = BasicExpr<C>;
    E Bp2;   // B1 cos 2t + B2 sin 2t
    E Bm2;   // B1 sin 2t - B2 cos 2t
    E Dp4;   // D1 cos 4t + D2 sin 4t
    E Dm4;   // D1 sin 4t - D2 cos 4t
    E Ap1;   // A3 cos t + A4 sin t
    E Ax1;   // A4 cos t - A3 sin t
    E Cp3;   // C1 sin 3t + C2 cos 3t
    E Cx3;   // C1 cos 3t - C2 sin 3t
    E A12p;  // A1 cos t + A2 sin t
    E A12x;  // A2 cos t - A1 sin t
    E B34p;  // B3 cos 2t + B4 sin 2t
    E B34m;  // B3 sin 2t - B4 cos 2t

    explicit Doublets(const BasicYConstants<C>& c) {
        auto mk = [](const C& u, const C& v, int n) {
            return E::cos_t(n).scaled(u) + E::sin_t(n).scaled(v);
        };
        using T = CoeffTraits<C>;
        Bp2 = mk(c.B1, c.B2, 2);
        Bm2 = mk(T::neg(c.B2), c.B1, 2);
        Dp4 = mk(c.D1, c.D2, 4);
        Dm4 = mk(T::neg(c.D2), c.D1, 4);
        Ap1 = mk(c.A3, c.A4, 1);
        Ax1 = mk(c.A4, T::neg(c.A3), 1);
        Cp3 = mk(c.C2, c.C1, 3);
        Cx3 = mk(c.C1, T::neg(c.C2), 3);
        A12p = mk(c.A1, c.A2, 1);
        A12x = mk(c.A2, T::neg(c.A1), 1);
        B34p = mk(c.B3, c.B4, 2);
        B34m = mk(T::neg(c.B4), c.B3, 2);
    }
};

/// S and its theta-derivatives up to order `n`.
template <typename C>
std::vector<BasicRatExpr<C>> s_derivatives(const BasicRatExpr<C>& S, int n) {
    std::vector<BasicRatExpr<C>> d;
    d.reserve(n + 1);
    d.push_back(S);
    for (int i = 0; i < n; ++i) d.push_back(d.back().differentiate(Var::Theta));
    return d;
}

template <typename C>
std::vector<BasicRatExpr<C>> r_derivatives(const BasicRatExpr<C>& R, int n) {
    std::vector<BasicRatExpr<C>> d;
    d.reserve(n + 1);
    d.push_back(R);
    for (int i = 0; i < n; ++i) d.push_back(d.back().differentiate(Var::R));
    return d;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// F-functions

template <typename C>
BasicFVector<C> compute_F(const BasicYConstants<C>& c) {
    using E = BasicExpr<C>;
    using T = CoeffTraits<C>;
    const detail::Doublets<C> d(c);
    auto rp = [](int k) { return E::r_pow(k); };
    auto frac = [](long p, long q) { return T::ratio(p, q); };

    BasicFVector<C> out;
    out.F[1] = (d.Bp2 + d.Dp4) * 2;
    out.F[2] = (-d.Bm2 - d.Dm4 * 2) * rp(-1) + d.Ap1 + d.Cp3;
    out.F[3] = (-d.Bm2 + d.Dm4 * 2) * rp(-3) + (d.Ap1 - d.Cp3 * 3) * rp(-2) -
               d.B34m * 2 * rp(-1) + d.A12p;
    out.F[4] = (d.Dp4 - d.Bp2) * 2 * rp(-4) + (d.Ax1 - d.Cx3) * 4 * rp(-3) -
               d.B34p * 4 * rp(-2) + d.A12x * 4 * rp(-1);
    out.F[5] = -d.Dp4 * 6 * rp(-2) + (d.Ax1 + d.Cx3 * 3) * 2 * rp(-1) + d.B34p * 2;
    out.F[6] = (d.Ax1 + d.Cx3 * 3).scaled(frac(3, 2)) - d.Dp4 * 9 * rp(-1);
    out.F[7] = d.Dm4 * 12 * rp(-2) + (d.Ap1 - d.Cp3 * 15).scaled(frac(1, 2)) * rp(-1) -
               d.B34m * 2;
    out.F[8] = -(d.Bp2 - d.Dp4 * 5) * 3 * rp(-3) +
               (d.Ax1 - d.Cx3 * 9).scaled(frac(3, 2)) * rp(-2) - d.B34p * 5 * rp(-1) +
               d.A12x.scaled(frac(3, 2));
    out.F[9] = (d.Bm2 - d.Dm4 * 2) * 9 * rp(-4) +
               (d.Cp3 * 3 - d.Ap1).scaled(frac(15, 2)) * rp(-3) + d.B34m * 12 * rp(-2) -
               d.A12p.scaled(frac(9, 2)) * rp(-1);
    out.F[10] = (-d.Bm2 - d.Dm4 * 2) * 3 * rp(-1) + (d.Ap1 + d.Cp3) * 3;
    out.F[11] = -(d.Bp2 - d.Dp4 * 5) * 3 * rp(-2) - d.B34p * 4 + (d.Ax1 - d.Cx3 * 9) * rp(-1);
    out.F[12] = (d.Bm2 - d.Dm4 * 14) * 2 * rp(-3) +
                (d.Cp3 * 11 - d.Ap1).scaled(frac(3, 2)) * rp(-2) + d.B34m * 6 * rp(-1) -
                d.A12p.scaled(frac(3, 2));
    out.F[13] = (d.Bp2 * 2 - d.Dp4 * 11) * 4 * rp(-4) - (d.Ax1 - d.Cx3 * 17) * 2 * rp(-3) +
                d.B34p * 12 * rp(-2) - d.A12x * 3 * rp(-1);
    return out;
}

// ---------------------------------------------------------------------------
// G reconstruction

template <typename C>
BasicGammaFunctions<C> solve_gamma(
    const BasicYConstants<C>& c,
    const std::array<C, 5>& free = {},  // c0, c1, c2, d1, d2
    const C& gamma2 = C{}) {
    using T = CoeffTraits<C>;
    using E = BasicExpr<C>;
    if (!T::is_zero(c.A1) || !T::is_zero(c.A2) || !T::is_zero(c.B3) || !T::is_zero(c.B4))
        throw std::invalid_argument(
            "gamma solver supports only the homogeneous case: (A1,A2) and (B3,B4) must vanish");
    BasicGammaFunctions<C> g;
    g.free = free;
    g.gamma2 = gamma2;
    g.gamma1 = E::constant(free[0]) + E::cos_t(2).scaled(free[1]) + E::sin_t(2).scaled(free[2]);
    g.gamma3 = E::cos_t(1).scaled(free[3]) + E::sin_t(1).scaled(free[4]);
    return g;
}

inline std::array<RadialKind, 3> allowed_radial_forms() {
    return {RadialKind::Zero, RadialKind::Coulomb, RadialKind::Oscillator};
}

/// G1, G2, G3 from S and the integration functions gamma, including the
/// corrections required when the radial part is a/r or b r^2.  G4 is left
/// zero; use build_G4 for the standard cases.
template <typename C>
GFunctions<C> build_G123(const BasicYConstants<C>& c, const BasicPotentialSpec<C>& spec,
                         const BasicGammaFunctions<C>& gamma) {
    using E = BasicExpr<C>;
    using RE = BasicRatExpr<C>;
    using T = CoeffTraits<C>;
    const detail::Doublets<C> d(c);
    auto rp = [](int k) { return E::r_pow(k); };
    auto frac = [](long p, long q) { return T::ratio(p, q); };
    const auto S = detail::s_derivatives(spec.S, 3);

    GFunctions<C> g;

    g.G1 = RE((d.Bm2 + d.Dm4 * 2).scaled(frac(1, 2)) * rp(-2) - (d.Ap1 + d.Cp3) * rp(-1)) * S[1] +
           RE((d.Bp2 + d.Dp4) * 2 * rp(-2)) * S[0] + RE(gamma.gamma1);

    g.G3 = RE(-d.B34p * 2 * rp(-1)) * S[1] +
           RE(rp(-2)) * (RE((d.Ap1 + d.Cp3) * 3) * S[0] +
                         RE((-d.Ax1 - d.Cx3 * 3).scaled(frac(3, 2))) * S[1] +
                         RE((d.Ap1 + d.Cp3).scaled(frac(-1, 2))) * S[2]) +
           RE(rp(-3)) * (RE((d.Bm2 + d.Dm4 * 2).scaled(frac(-10, 3))) * S[0] +
                         RE(d.Bp2 + d.Dp4 * 4) * S[1] +
                         RE((d.Bm2 + d.Dm4 * 2).scaled(frac(1, 6))) * S[2]) +
           RE(gamma.gamma1.differentiate(Var::Theta) * rp(-1)) + RE(gamma.gamma3);

    g.G2 = RE(-d.A12p * 3 * rp(-1)) * S[1] +
           RE(rp(-2)) * (RE(d.B34p * 2) * S[0] + RE(d.B34m * 5) * S[1] + RE(-d.B34p) * S[2]) +
           RE(rp(-3)) * (RE((-d.Ax1 - d.Cx3 * 3).scaled(frac(-7, 3))) * S[0] +
                         RE((d.Ap1 - d.Cp3 * 47).scaled(frac(-1, 6))) * S[1] +
                         RE((-d.Ax1 - d.Cx3 * 3).scaled(frac(2, 3))) * S[2] +
                         RE((d.Ap1 + d.Cp3).scaled(frac(-1, 6))) * S[3]) +
           RE(rp(-4)) * (RE((d.Bp2 + d.Dp4 * 13).scaled(frac(-2, 3))) * S[0] +
                         RE((d.Bm2 + d.Dm4 * 20).scaled(frac(-1, 3))) * S[1] +
                         RE((d.Bp2 + d.Dp4 * 4).scaled(frac(1, 3))) * S[2] +
                         RE((d.Bm2 + d.Dm4 * 2).scaled(frac(1, 24))) * S[3]) +
           RE(gamma.gamma3.differentiate(Var::Theta) * rp(-1)) + RE(gamma.gamma1 * rp(-2)) +
           RE(gamma.gamma1.differentiate(Var::Theta).differentiate(Var::Theta).scaled(frac(1, 2)) *
              rp(-2)) +
           RE(E::constant(gamma.gamma2));

    if (spec.radial == RadialKind::Coulomb) {
        const C& a = spec.radial_coeff;
        g.G2 += RE(((d.Ax1 + d.Cx3 * 3) * rp(-2)).scaled(a).scaled(frac(5, 2)));
        g.G3 += RE(((d.Ap1 + d.Cp3) * 3 * rp(-1)).scaled(a));
        // particular gamma_1 part forced by the a/r term; it enters G1, G3 and
        // G2 through the same chain as the homogeneous gamma_1
        const E g1p = (d.Ax1 + d.Cx3 * 3).scaled(a);
        g.G1 += RE(g1p);
        g.G3 += RE(g1p.differentiate(Var::Theta) * rp(-1));
        g.G2 += RE((g1p + g1p.differentiate(Var::Theta).differentiate(Var::Theta).scaled(
                              frac(1, 2))) *
                   rp(-2));
    } else if (spec.radial == RadialKind::Oscillator) {
        const C& b = spec.radial_coeff;
        g.G1 += RE(((d.Bp2 + d.Dp4) * 2 * rp(2)).scaled(b));
        g.G3 += RE(((-d.Bm2 - d.Dm4 * 2) * 2 * rp(1)).scaled(b));
        // particular gamma_2 part forced by the b r^2 term
        g.G2 += RE(d.Dp4.scaled(b).scaled(T::from_long(-2)));
    }
    return g;
}

/// Closed form for G4 in the two standard cases (gamma = 0).  Case I uses the
/// (B1,B2,D1,D2) group and divides by 48 r^4; Case II uses (A3,A4,C1,C2) and
/// divides by 48 r^3.  The Coulomb radial part adds its printed a-term.
template <typename C>
BasicRatExpr<C> build_G4(const BasicYConstants<C>& c, const BasicPotentialSpec<C>& spec,
                         StandardCase which) {
    using E = BasicExpr<C>;
    using RE = BasicRatExpr<C>;
    using T = CoeffTraits<C>;
    auto nz = [](const C& v) { return !CoeffTraits<C>::is_zero(v); };
    if (which == StandardCase::I) {
        if (nz(c.A1) || nz(c.A2) || nz(c.A3) || nz(c.A4) || nz(c.B3) || nz(c.B4) || nz(c.C1) ||
            nz(c.C2))
            throw std::invalid_argument("Case I G4 requires only (B1,B2,D1,D2) nonzero");
    } else {
        if (nz(c.A1) || nz(c.A2) || nz(c.B1) || nz(c.B2) || nz(c.B3) || nz(c.B4) || nz(c.D1) ||
            nz(c.D2))
            throw std::invalid_argument("Case II G4 requires only (A3,A4,C1,C2) nonzero");
    }
    const detail::Doublets<C> d(c);
    const auto S = detail::s_derivatives(spec.S, 5);
    const RE h2{E::hbar_pow(2)};
    auto rp = [](int k) { return E::r_pow(k); };
    auto frac = [](long p, long q) { return T::ratio(p, q); };

    RE g4;
    if (which == StandardCase::I) {
        RE cls = RE((d.Bm2 + d.Dm4 * 2) * 32) * S[0] * S[1] +
                 RE((d.Bp2 + d.Dp4) * 48) * S[0] * S[0] +
                 S[1] * (RE(-d.Bm2 - d.Dm4 * 2) * S[2] + RE((d.Bp2 + d.Dp4 * 4) * (-6)) * S[1]);
        RE qnt = RE(d.Dp4 * 3072) * S[0] + RE((d.Bm2 + d.Dm4 * 62) * 64) * S[1] +
                 RE((d.Bp2 + d.Dp4 * 20) * (-96)) * S[2] +
                 RE(d.Bm2 * (-52) - d.Dm4 * 440) * S[3] + RE((d.Bp2 + d.Dp4 * 4) * 12) * S[4] +
                 RE(d.Bm2 + d.Dm4 * 2) * S[5];
        g4 = (cls * 4 + h2 * qnt).scaled(frac(1, 48)) * RE(rp(-4));
        if (spec.radial == RadialKind::Oscillator) {
            const C& b = spec.radial_coeff;
            const RE P{d.Bp2 + d.Dp4};
            const RE M{d.Bm2 + d.Dm4 * 2};
            g4 += RE(rp(4)) * P.scaled(b * b * T::from_long(4));
            g4 += ((M * S[1]).scaled(frac(2, 3)) + (P * S[0]).scaled(frac(8, 3))).scaled(b);
        }
    } else {
        RE cls = S[1] * (RE((d.Ax1 + d.Cx3 * 3) * 3) * S[1] +
                         (S[2] - S[0] * 14) * RE(d.Ap1 + d.Cp3)) * 16;
        RE qnt = RE((d.Ax1 * 2 - d.Cx3 * 15) * 16) * S[0] +
                 RE((d.Ap1 * 7 - d.Cp3 * 127) * 4) * S[1] +
                 RE((-d.Ax1 + d.Cx3 * 93) * 4) * S[2] + RE(d.Ap1 * 9 + d.Cp3 * 121) * S[3] +
                 RE((-d.Ax1 - d.Cx3 * 3) * 6) * S[4] + RE(-d.Ap1 - d.Cp3) * S[5];
        g4 = (cls + h2 * qnt).scaled(frac(1, 48)) * RE(rp(-3));
        if (spec.radial == RadialKind::Coulomb) {
            const C& a = spec.radial_coeff;
            RE add = h2 * RE((d.Ax1 * 7 - d.Cx3 * 99).scaled(frac(1, 4))) +
                     S[1] * RE((d.Ap1 + d.Cp3) * 5);
            g4 += add.scaled(a) * RE(rp(-2));
        }
    }
    return g4;
}

// ---------------------------------------------------------------------------
// G4 completion by quadrature

namespace detail {

/// Term-wise r-antiderivative of a quotient whose denominator factors depend
/// on theta only.  `hbar_shift` divides out hbar^shift on the way (used to
/// strip the -hbar^2 prefactor of the quantum d_r coefficient).
template <typename C>
BasicRatExpr<C> antiderivative_r(const BasicRatExpr<C>& q, int hbar_shift = 0) {
    using E = BasicExpr<C>;
    for (const auto& f : q.den_factors())
        for (const auto& [k, v] : f.base.terms())
            if (k.rpow != 0)
                throw MathDomainError("antiderivative_r: denominator depends on r");
    E out = E::zero();
    for (const auto& [k, v] : q.num().terms()) {
        if (k.rpow == -1) throw MathDomainError("antiderivative_r: r^-1 term integrates to a log");
        if (k.hbar < hbar_shift)
            throw MathDomainError("antiderivative_r: hbar power below requested shift");
        out += E::monomial(v / CoeffTraits<C>::from_long(k.rpow + 1), k.hbar - hbar_shift,
                           k.rpow + 1, k.harm, k.phase);
    }
    BasicRatExpr<C> res{out};
    for (const auto& f : q.den_factors())
        for (int i = 0; i < f.pow; ++i) res = res / BasicRatExpr<C>(f.base);
    return res;
}

}  // namespace detail

/// The d_r coefficient of the bracket determines G4 only through its
/// r-derivative; the printed closed forms omit some radial-correction pieces.
/// This integrates the residual d_r coefficient exactly and folds it into G4,
/// after which the d_r coefficient vanishes identically.  Throws
/// MathDomainError if the residual is not integrable in closed form (an
/// r^-1 term), which signals a genuine obstruction at the d_r level.
template <typename C>
void complete_G4(const BasicYConstants<C>& c, const BasicPotentialSpec<C>& spec,
                 GFunctions<C>& G, Mode mode) {
    // In the float domain a residual that is functionally zero is still
    // stored as a large cloud of cancelling terms; integrating it would only
    // inflate the noise scale of G4.  Genuine missing G4 pieces are O(1)
    // relative, so a sampled relative check separates the two cleanly.
    auto functionally_zero = [](const BasicRatExpr<C>& q) {
        if constexpr (CoeffTraits<C>::exact) {
            return q.is_zero();
        } else {
            if (q.is_zero()) return true;
            return sample_residual("", q, 1.0, 12, 0x5eed, false).max_abs_sample < 1e-8;
        }
    };
    if (mode == Mode::Quantum) {
        auto H = build_hamiltonian_quantum(spec);
        auto com = commutator(H, build_Y_quantum(c, G));
        auto res = com.coeff(1, 0);
        if (!functionally_zero(res)) G.G4 += detail::antiderivative_r(res, 2);
    } else {
        auto H = build_hamiltonian_classical(spec);
        auto pb = poisson_bracket(H, build_Y_classical(c, G));
        auto it = pb.terms().find({1, 0});
        if (it != pb.terms().end() && !functionally_zero(it->second))
            G.G4 += detail::antiderivative_r(it->second);
    }
}

// ---------------------------------------------------------------------------
// Determining-equation residuals

template <typename C>
struct BasicDeterminingResiduals {
    // residual (left minus right) of the coefficient equation for each
    // derivative order of the commutator [H, Y]
    BasicRatExpr<C> rrr;  // d_r^3
    BasicRatExpr<C> rrt;  // d_r^2 d_theta
    BasicRatExpr<C> rtt;  // d_r d_theta^2
    BasicRatExpr<C> ttt;  // d_theta^3
    BasicRatExpr<C> r;    // d_r     (carries hbar^2 corrections)
    BasicRatExpr<C> t;    // d_theta (carries hbar^2 corrections)

    std::array<std::pair<const char*, const BasicRatExpr<C>*>, 6> named() const {
        return {{{"d_r^3", &rrr},
                 {"d_r^2 d_theta", &rrt},
                 {"d_r d_theta^2", &rtt},
                 {"d_theta^3", &ttt},
                 {"d_r", &r},
                 {"d_theta", &t}}};
    }
};
using DeterminingResiduals = BasicDeterminingResiduals<Rational>;

template <typename C>
BasicDeterminingResiduals<C> residual_determining(const BasicYConstants<C>& c,
                                                  const BasicPotentialSpec<C>& spec,
                                                  const GFunctions<C>& G) {
    using E = BasicExpr<C>;
    using RE = BasicRatExpr<C>;
    using T = CoeffTraits<C>;
    const auto F = compute_F(c);
    const auto S = detail::s_derivatives(spec.S, 3);
    const auto R = detail::r_derivatives(spec.radial_part(), 3);
    const RE h2{E::hbar_pow(2)};
    auto rp = [](int k) { return RE(E::r_pow(k)); };
    auto frac = [](long p, long q) { return T::ratio(p, q); };

    // partial derivatives G_i^(a,b)
    auto part = [](const RE& f, int a, int b) {
        RE out = f;
        for (int i = 0; i < a; ++i) out = out.differentiate(Var::R);
        for (int i = 0; i < b; ++i) out = out.differentiate(Var::Theta);
        return out;
    };

    BasicDeterminingResiduals<C> res;

    res.rrr = part(G.G1, 1, 0) - (F[1] * R[1] - F[1] * 2 * rp(-3) * S[0] + F[2] * rp(-2) * S[1]);

    res.rrt = rp(-2) * part(G.G1, 0, 1) + part(G.G3, 1, 0) -
              (F[2] * 3 * R[1] - F[2] * 6 * rp(-3) * S[0] + F[5] * rp(-2) * S[1]);

    res.rtt = G.G1 * 2 * rp(-3) + part(G.G2, 1, 0) + rp(-2) * part(G.G3, 0, 1) -
              (F[5] * R[1] - F[5] * 2 * rp(-3) * S[0] + F[3] * 3 * rp(-2) * S[1]);

    res.ttt = rp(-2) * (part(G.G2, 0, 1) + rp(-1) * G.G3) -
              (F[3] * R[1] - F[3] * 2 * rp(-3) * S[0] + F[4] * rp(-2) * S[1]);

    {
        RE lhs0 = G.G3 * S[1] * rp(-2) + G.G1 * 2 * (R[1] - rp(-3) * S[0] * 2) -
                  part(G.G4, 1, 0).scaled(frac(1, 2));
        RE lhs2 = part(G.G1, 0, 2).scaled(frac(1, 2)) * rp(-3) -
                  part(G.G3, 0, 1).scaled(frac(3, 4)) * rp(-2) +
                  part(G.G3, 0, 3).scaled(frac(1, 4)) * rp(-2) - part(G.G1, 1, 0) * rp(-2) -
                  part(G.G2, 1, 0).scaled(frac(3, 2)) +
                  part(G.G3, 1, 1).scaled(frac(5, 4)) * rp(-1) +
                  part(G.G1, 1, 2).scaled(frac(1, 2)) * rp(-2) +
                  part(G.G2, 1, 2).scaled(frac(1, 2)) + part(G.G1, 2, 0) * 2 * rp(-1) -
                  part(G.G2, 2, 0).scaled(frac(1, 2)) * rp(1) +
                  part(G.G3, 2, 1).scaled(frac(3, 4)) + part(G.G1, 3, 0);
        RE rhs = (F[6] * 6 * rp(-4) - F[1] * 24 * rp(-5) - F[11] * 2 * rp(-3)) * S[0] +
                 (F[10] * 6 * rp(-4) - F[7] * 4 * rp(-3) + F[12] * rp(-2)) * S[1] +
                 (F[8] * rp(-2) - F[5] * 2 * rp(-3)) * S[2] + F[3] * rp(-2) * S[3] +
                 F[11] * R[1] + F[6] * R[2] + F[1] * R[3];
        res.r = lhs0 + h2 * lhs2 - h2 * rhs;
    }

    {
        RE lhs0 = G.G3 * (R[1] - rp(-3) * S[0] * 2) + G.G2 * 2 * S[1] * rp(-2) -
                  part(G.G4, 0, 1).scaled(frac(1, 2)) * rp(-2);
        RE lhs2 = G.G3.scaled(frac(1, 4)) * rp(-3) - part(G.G2, 0, 1) * rp(-2) +
                  part(G.G3, 0, 2).scaled(frac(5, 4)) * rp(-3) + part(G.G2, 0, 3) * rp(-2) -
                  part(G.G3, 1, 0).scaled(frac(1, 4)) * rp(-2) + part(G.G1, 1, 1) * rp(-3) +
                  part(G.G3, 1, 2).scaled(frac(3, 4)) * rp(-2) +
                  part(G.G3, 2, 0).scaled(frac(1, 2)) * rp(-1) +
                  part(G.G1, 2, 1).scaled(frac(1, 2)) * rp(-2) +
                  part(G.G2, 2, 1).scaled(frac(1, 2)) + part(G.G3, 3, 0).scaled(frac(1, 4));
        // The S'' coefficient is transcribed as printed: (F9/r^2 - 6 F3/r^3).
        RE rhs = (F[7] * 6 * rp(-4) - F[2] * 24 * rp(-5) - F[12] * 2 * rp(-3)) * S[0] +
                 (F[5] * 6 * rp(-4) - F[8] * 4 * rp(-3) + F[13] * rp(-2)) * S[1] +
                 (F[9] * rp(-2) - F[3] * 6 * rp(-3)) * S[2] + F[4] * rp(-2) * S[3] +
                 F[12] * R[1] + F[7] * R[2] + F[2] * R[3];
        res.t = lhs0 + h2 * lhs2 - h2 * rhs;
    }

    return res;
}

// ---------------------------------------------------------------------------
// Linear compatibility condition (the hbar-free PDE in R and S)

template <typename C>
BasicRatExpr<C> residual_compatibility(const BasicYConstants<C>& c,
                                       const BasicPotentialSpec<C>& spec) {
    using E = BasicExpr<C>;
    using RE = BasicRatExpr<C>;
    const detail::Doublets<C> d(c);
    const auto S = detail::s_derivatives(spec.S, 4);
    const auto R = detail::r_derivatives(spec.radial_part(), 4);
    auto rp = [](int k) { return E::r_pow(k); };

    RE acc;
    // angular block, 1/r^2
    acc += RE(rp(-2)) * (RE((d.Ap1 - d.Cp3 * 9) * 16) * S[0] +
                         RE((d.Ax1 - d.Cx3 * 9) * (-20)) * S[1] + RE(d.Cp3 * 80) * S[2] +
                         RE((-d.Ax1 - d.Cx3 * 3) * 5) * S[3] + RE(-d.Ap1 - d.Cp3) * S[4]);
    // angular block, 1/r^3
    acc += RE(rp(-3)) * (RE((-d.Bm2 + d.Dm4 * 8) * 96) * S[0] +
                         RE((d.Bp2 - d.Dp4 * 20) * 40) * S[1] +
                         RE((-d.Bm2 - d.Dm4 * 14) * 20) * S[2] +
                         RE((d.Bp2 + d.Dp4 * 4) * 10) * S[3] + RE(d.Bm2 + d.Dm4 * 2) * S[4]);
    // radial blocks
    acc += RE(d.A12p * 24 * rp(3) + d.B34m * 12 * rp(2) - (d.Ap1 * 2 + d.Cp3 * 18) * rp(1) -
              d.Bm2 * 3 - d.Dm4 * 30) *
           R[1];
    acc += RE(d.A12p * 36 * rp(4) - d.B34m * 12 * rp(3) + (d.Ap1 * 2 + d.Cp3 * 18) * rp(2) +
              (d.Bm2 * 3 + d.Dm4 * 30) * rp(1)) *
           R[2];
    acc += RE(d.A12p * 12 * rp(5) - d.B34m * 14 * rp(4) + (d.Ap1 * 5 - d.Cp3 * 3) * rp(3) -
              d.Dm4 * 12 * rp(2)) *
           R[3];
    acc += RE(d.A12p * rp(6) - d.B34m * 2 * rp(5) + (d.Ap1 - d.Cp3 * 3) * rp(4) -
              (d.Bm2 - d.Dm4 * 2) * rp(3)) *
           R[4];
    return acc;
}

/// The pure-angular fourth-order linear ODE for S: the r^-3 (Case I) or r^-2
/// (Case II) coefficient of the compatibility condition at R = 0.
template <typename C>
BasicRatExpr<C> residual_LDES(const BasicPotentialSpec<C>& spec, const BasicYConstants<C>& c,
                              StandardCase which) {
    using RE = BasicRatExpr<C>;
    const detail::Doublets<C> d(c);
    const auto S = detail::s_derivatives(spec.S, 4);
    if (which == StandardCase::I) {
        return RE((-d.Bm2 + d.Dm4 * 8) * 96) * S[0] + RE((d.Bp2 - d.Dp4 * 20) * 40) * S[1] +
               RE((-d.Bm2 - d.Dm4 * 14) * 20) * S[2] + RE((d.Bp2 + d.Dp4 * 4) * 10) * S[3] +
               RE(d.Bm2 + d.Dm4 * 2) * S[4];
    }
    return RE((d.Ap1 - d.Cp3 * 9) * 16) * S[0] + RE((-d.Ax1 + d.Cx3 * 9) * 20) * S[1] +
           RE(d.Cp3 * 80) * S[2] + RE((-d.Ax1 - d.Cx3 * 3) * 5) * S[3] +
           RE(-d.Ap1 - d.Cp3) * S[4];
}

/// The remaining nonlinear determining equation C_theta = 0 for the standard
/// cases, quadratic in S; Quantum mode appends the hbar^2 correction block.
template <typename C>
BasicRatExpr<C> residual_Ctheta(const BasicPotentialSpec<C>& spec, const BasicYConstants<C>& c,
                                StandardCase which, Mode mode) {
    using E = BasicExpr<C>;
    using RE = BasicRatExpr<C>;
    const detail::Doublets<C> d(c);
    const auto S = detail::s_derivatives(spec.S, 6);
    const RE h2{E::hbar_pow(2)};

    RE cls, qnt;
    if (which == StandardCase::I) {
        cls = RE((d.Bm2 + d.Dm4 * 2) * 256) * S[0] * S[0] +
              RE((d.Bp2 + d.Dp4 * 4) * (-240)) * S[0] * S[1] +
              RE((-d.Bm2 - d.Dm4 * 8) * 60) * S[1] * S[1] +
              RE((-d.Bm2 - d.Dm4 * 2) * 40) * S[0] * S[2] +
              RE((d.Bp2 + d.Dp4 * 4) * 30) * S[1] * S[2] +
              RE(d.Bm2 + d.Dm4 * 2) * S[2] * S[2] + RE((d.Bm2 + d.Dm4 * 2) * 3) * S[3] * S[1];
        qnt = RE((-d.Bm2 - d.Dm4 * 88) * 384) * S[0] +
              RE((d.Bp2 * 31 - d.Dp4 * 1676) * (-32)) * S[1] +
              RE((-d.Bm2 * 53 + d.Dm4 * 2114) * 16) * S[2] +
              RE((d.Bp2 + d.Dp4 * 136) * (-80)) * S[3] +
              RE((d.Bm2 * 11 + d.Dm4 * 118) * (-16)) * S[4] +
              RE((d.Bp2 + d.Dp4 * 4) * 42) * S[5] + RE((d.Bm2 + d.Dm4 * 2) * 3) * S[6];
    } else {
        const E Mp = d.Ap1 + d.Cp3;
        cls = RE(Mp * (-36)) * S[0] * S[0] + RE((d.Ap1 + d.Cp3 * 9) * 15) * S[1] * S[1] +
              RE(Mp * 20) * S[0] * S[2] - RE(Mp) * S[2] * S[2] +
              S[1] * (RE((d.Ax1 + d.Cx3 * 3) * 20) * S[0] * 3 +
                      RE((-d.Ax1 - d.Cx3 * 3) * 5) * S[2] * 3 + RE(Mp * (-3)) * S[3]);
        qnt = RE((d.Ap1 + d.Cp3 * 39) * 96) * S[0] + RE((-d.Ax1 - d.Cx3 * 303) * 24) * S[1] +
              RE((d.Ap1 * 21 - d.Cp3 * 719) * 8) * S[2] +
              RE((-d.Ax1 * 3 + d.Cx3 * 79) * 30) * S[3] +
              RE((d.Ap1 * 3 + d.Cp3 * 67) * 8) * S[4] + RE((-d.Ax1 - d.Cx3 * 3) * 21) * S[5] +
              RE(Mp * (-3)) * S[6];
    }
    RE out = cls * 4;
    if (mode == Mode::Quantum) out += h2 * qnt;
    return out;
}

// ---------------------------------------------------------------------------
// Residual report (sampled verdicts for float-root families)

struct ResidualReportEntry {
    std::string equation;
    std::optional<bool> exact_zero;  // null when only sampled
    double max_abs_sample = 0.0;     // relative to term-magnitude scale
    int sample_points = 0;
};

/// Max relative magnitude of a residual over random sample points away from
/// singular rays; relative scale is the term-magnitude sum.
template <typename C>
ResidualReportEntry sample_residual(const std::string& name, const BasicRatExpr<C>& res,
                                    double hbar, int npoints, std::uint64_t seed,
                                    bool record_exact = true) {
    ResidualReportEntry e;
    e.equation = name;
    if (record_exact) e.exact_zero = res.is_zero();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ur(0.5, 2.5);
    std::uniform_real_distribution<double> ut(0.05, 1.5);
    int done = 0;
    while (done < npoints) {
        const double r = ur(rng), th = ut(rng);
        try {
            const double v = res.evaluate(r, th, hbar);
            const double scale = std::max(1.0, res.evaluate_magnitude(r, th, hbar));
            e.max_abs_sample = std::max(e.max_abs_sample, std::abs(v) / scale);
            ++done;
        } catch (const SingularPointError&) {
            continue;  // resample away from a pole
        }
    }
    e.sample_points = npoints;
    return e;
}

}  // namespace polsep
