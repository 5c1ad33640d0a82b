// Observables: the Hamiltonian H, the second-order integral X and the
// fourth-order integral Y, in two realizations.  Classically they are
// polynomials in (p_r, p_theta) with trig-Laurent coefficients; in quantum
// mechanics they are differential operators in (d_r, d_theta).
//
// The quantum operators are kept real: every momentum factor -i*hbar*(...)
// is split into its real derivative part, and the i/hbar bookkeeping is an
// overall prefactor per momentum degree.  Y is purely of degree four in the
// momenta, so its prefactor (-i*hbar)^4 = hbar^4 is real and all stored
// coefficients stay in the real trig-Laurent ring.
#pragma once

#include "polsep/ratexpr.hpp"

#include <array>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace polsep {

struct DegenerateIntegralError : std::runtime_error {
    DegenerateIntegralError() : std::runtime_error("integral is identically zero") {}
};

enum class Mode { Classical, Quantum };
enum class RadialKind { Zero, Coulomb, Oscillator };

template <typename C>
struct BasicYConstants {
    C A1{}, A2{}, A3{}, A4{};
    C B1{}, B2{}, B3{}, B4{};
    C C1{}, C2{};
    C D1{}, D2{};

    bool all_zero() const {
        using T = CoeffTraits<C>;
        for (const C* v : {&A1, &A2, &A3, &A4, &B1, &B2, &B3, &B4, &C1, &C2, &D1, &D2})
            if (!T::is_zero(*v)) return false;
        return true;
    }
    /// Only (A1,A2) and (B3,B4) nonzero: the compatibility condition is
    /// trivially satisfied and the potential is exotic, not standard.
    bool exotic_only() const {
        using T = CoeffTraits<C>;
        if (all_zero()) return false;
        for (const C* v : {&A3, &A4, &B1, &B2, &C1, &C2, &D1, &D2})
            if (!T::is_zero(*v)) return false;
        return true;
    }
};

using YConstants = BasicYConstants<Rational>;

/// V(r, theta) = R(r) + S(theta) / r^2 with R one of 0, a/r, b r^2.
template <typename C>
struct BasicPotentialSpec {
    RadialKind radial = RadialKind::Zero;
    C radial_coeff{};           // a (Coulomb) or b (Oscillator)
    BasicRatExpr<C> S;          // function of theta only

    BasicRatExpr<C> radial_part() const {
        using E = BasicExpr<C>;
        switch (radial) {
            case RadialKind::Zero: return BasicRatExpr<C>();
            case RadialKind::Coulomb:
                return BasicRatExpr<C>(E::r_pow(-1).scaled(radial_coeff));
            case RadialKind::Oscillator:
                return BasicRatExpr<C>(E::r_pow(2).scaled(radial_coeff));
        }
        throw std::logic_error("bad radial kind");
    }
    BasicRatExpr<C> potential() const {
        return radial_part() + S * BasicRatExpr<C>(BasicExpr<C>::r_pow(-2));
    }
};

using PotentialSpec = BasicPotentialSpec<Rational>;

/// Polynomial in (p_r, p_theta); key (i, j) holds the coefficient of
/// p_r^i p_theta^j.
template <typename C>
class BasicPhaseObservable {
  public:
    using RE = BasicRatExpr<C>;
    using Key = std::pair<int, int>;
    using TermMap = std::map<Key, RE>;

    BasicPhaseObservable() = default;

    static BasicPhaseObservable monomial(int i, int j, RE coeff) {
        BasicPhaseObservable p;
        p.add(i, j, std::move(coeff));
        return p;
    }
    static BasicPhaseObservable mult(RE f) { return monomial(0, 0, std::move(f)); }
    static BasicPhaseObservable p_r() { return monomial(1, 0, RE::from_long(1)); }
    static BasicPhaseObservable p_theta() { return monomial(0, 1, RE::from_long(1)); }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const {
        int d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
        return d;
    }

    void add(int i, int j, const RE& coeff) {
        if (coeff.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(Key{i, j}, coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    bool operator==(const BasicPhaseObservable& o) const {
        if (terms_.size() != o.terms_.size()) return false;
        auto ia = terms_.begin();
        for (auto ib = o.terms_.begin(); ib != o.terms_.end(); ++ia, ++ib)
            if (ia->first != ib->first || ia->second != ib->second) return false;
        return true;
    }
    bool operator!=(const BasicPhaseObservable& o) const { return !(*this == o); }

    BasicPhaseObservable operator-() const {
        BasicPhaseObservable out;
        for (const auto& [k, c] : terms_) out.terms_.emplace(k, -c);
        return out;
    }
    BasicPhaseObservable operator+(const BasicPhaseObservable& o) const {
        BasicPhaseObservable out = *this;
        for (const auto& [k, c] : o.terms_) out.add(k.first, k.second, c);
        return out;
    }
    BasicPhaseObservable operator-(const BasicPhaseObservable& o) const { return *this + (-o); }
    BasicPhaseObservable& operator+=(const BasicPhaseObservable& o) { return *this = *this + o; }
    BasicPhaseObservable& operator-=(const BasicPhaseObservable& o) { return *this = *this - o; }

    BasicPhaseObservable operator*(const BasicPhaseObservable& o) const {
        BasicPhaseObservable out;
        for (const auto& [ka, ca] : terms_)
            for (const auto& [kb, cb] : o.terms_)
                out.add(ka.first + kb.first, ka.second + kb.second, ca * cb);
        return out;
    }
    BasicPhaseObservable& operator*=(const BasicPhaseObservable& o) { return *this = *this * o; }

    BasicPhaseObservable scaled(const C& c) const {
        BasicPhaseObservable out;
        for (const auto& [k, v] : terms_) out.add(k.first, k.second, v.scaled(c));
        return out;
    }
    BasicPhaseObservable scaled(const RE& f) const {
        BasicPhaseObservable out;
        for (const auto& [k, v] : terms_) out.add(k.first, k.second, v * f);
        return out;
    }

    /// Derivative of every coefficient with respect to r or theta.
    BasicPhaseObservable d_coeff(Var v) const {
        BasicPhaseObservable out;
        for (const auto& [k, c] : terms_) out.add(k.first, k.second, c.differentiate(v));
        return out;
    }
    /// Derivative with respect to p_r (which == 0) or p_theta (which == 1).
    BasicPhaseObservable d_momentum(int which) const {
        BasicPhaseObservable out;
        for (const auto& [k, c] : terms_) {
            if (which == 0 && k.first > 0)
                out.add(k.first - 1, k.second, c * long(k.first));
            if (which == 1 && k.second > 0)
                out.add(k.first, k.second - 1, c * long(k.second));
        }
        return out;
    }

    double evaluate(double r, double theta, double pr, double ptheta, double hbar = 0.0) const {
        double acc = 0.0;
        for (const auto& [k, c] : terms_)
            acc += c.evaluate(r, theta, hbar) * std::pow(pr, k.first) * std::pow(ptheta, k.second);
        return acc;
    }

  private:
    TermMap terms_;
};

template <typename C>
BasicPhaseObservable<C> poisson_bracket(const BasicPhaseObservable<C>& p,
                                        const BasicPhaseObservable<C>& q) {
    return p.d_coeff(Var::R) * q.d_momentum(0) - p.d_momentum(0) * q.d_coeff(Var::R) +
           p.d_coeff(Var::Theta) * q.d_momentum(1) - p.d_momentum(1) * q.d_coeff(Var::Theta);
}

/// Differential operator sum f_{ij}(r,theta) d_r^i d_theta^j; multiplication
/// is operator composition via the full Leibniz expansion.
template <typename C>
class BasicDiffOperator {
  public:
    using RE = BasicRatExpr<C>;
    using Key = std::pair<int, int>;
    using TermMap = std::map<Key, RE>;

    BasicDiffOperator() = default;

    static BasicDiffOperator monomial(int i, int j, RE coeff) {
        BasicDiffOperator p;
        p.add(i, j, std::move(coeff));
        return p;
    }
    static BasicDiffOperator mult(RE f) { return monomial(0, 0, std::move(f)); }
    static BasicDiffOperator d_r() { return monomial(1, 0, RE::from_long(1)); }
    static BasicDiffOperator d_theta() { return monomial(0, 1, RE::from_long(1)); }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int order() const {
        int d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
        return d;
    }
    RE coeff(int i, int j) const {
        auto it = terms_.find(Key{i, j});
        return it == terms_.end() ? RE() : it->second;
    }

    void add(int i, int j, const RE& coeff) {
        if (coeff.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(Key{i, j}, coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    bool operator==(const BasicDiffOperator& o) const {
        if (terms_.size() != o.terms_.size()) return false;
        auto ia = terms_.begin();
        for (auto ib = o.terms_.begin(); ib != o.terms_.end(); ++ia, ++ib)
            if (ia->first != ib->first || ia->second != ib->second) return false;
        return true;
    }
    bool operator!=(const BasicDiffOperator& o) const { return !(*this == o); }

    BasicDiffOperator operator-() const {
        BasicDiffOperator out;
        for (const auto& [k, c] : terms_) out.terms_.emplace(k, -c);
        return out;
    }
    BasicDiffOperator operator+(const BasicDiffOperator& o) const {
        BasicDiffOperator out = *this;
        for (const auto& [k, c] : o.terms_) out.add(k.first, k.second, c);
        return out;
    }
    BasicDiffOperator operator-(const BasicDiffOperator& o) const { return *this + (-o); }
    BasicDiffOperator& operator+=(const BasicDiffOperator& o) { return *this = *this + o; }
    BasicDiffOperator& operator-=(const BasicDiffOperator& o) { return *this = *this - o; }

    /// Composition: (f d^a) (g d^b) = f sum_{c<=a} binom(a,c) (d^c g) d^{a+b-c}
    /// over two-component multi-indices.
    BasicDiffOperator operator*(const BasicDiffOperator& o) const {
        BasicDiffOperator out;
        for (const auto& [ka, fa] : terms_) {
            for (const auto& [kb, gb] : o.terms_) {
                // iterated theta-derivatives of g, reused across alpha
                RE g_th = gb;
                for (int beta = 0; beta <= ka.second; ++beta) {
                    RE g_rth = g_th;
                    for (int alpha = 0; alpha <= ka.first; ++alpha) {
                        const long mult = binom(ka.first, alpha) * binom(ka.second, beta);
                        out.add(ka.first - alpha + kb.first, ka.second - beta + kb.second,
                                fa * g_rth * mult);
                        if (alpha < ka.first) g_rth = g_rth.differentiate(Var::R);
                    }
                    if (beta < ka.second) g_th = g_th.differentiate(Var::Theta);
                }
            }
        }
        return out;
    }
    BasicDiffOperator& operator*=(const BasicDiffOperator& o) { return *this = *this * o; }

    BasicDiffOperator scaled(const C& c) const {
        BasicDiffOperator out;
        for (const auto& [k, v] : terms_) out.add(k.first, k.second, v.scaled(c));
        return out;
    }
    BasicDiffOperator scaled(const RE& f) const {
        BasicDiffOperator out;
        for (const auto& [k, v] : terms_) out.add(k.first, k.second, v * f);
        return out;
    }
    /// Multiply every coefficient by hbar^n.
    BasicDiffOperator hbar_factor(int n) const {
        return scaled(RE(BasicExpr<C>::hbar_pow(n)));
    }

    /// Terms of the given total order, reinterpreted as a classical momentum
    /// polynomial (principal symbol).
    BasicPhaseObservable<C> symbol_slice(int total_order) const {
        BasicPhaseObservable<C> out;
        for (const auto& [k, c] : terms_)
            if (k.first + k.second == total_order) out.add(k.first, k.second, c);
        return out;
    }

  private:
    static long binom(int n, int k) {
        long r = 1;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    }

    TermMap terms_;
};

template <typename C>
BasicDiffOperator<C> commutator(const BasicDiffOperator<C>& a, const BasicDiffOperator<C>& b) {
    return a * b - b * a;
}

template <typename C>
BasicPhaseObservable<C> operator*(const BasicPhaseObservable<C>& p, long n) {
    return p.scaled(CoeffTraits<C>::from_long(n));
}
template <typename C>
BasicDiffOperator<C> operator*(const BasicDiffOperator<C>& p, long n) {
    return p.scaled(CoeffTraits<C>::from_long(n));
}

using PhaseObservable = BasicPhaseObservable<Rational>;
using DiffOperator = BasicDiffOperator<Rational>;
using FPhaseObservable = BasicPhaseObservable<BigFloat>;
using FDiffOperator = BasicDiffOperator<BigFloat>;

// ---------------------------------------------------------------------------
// H and X

template <typename C>
BasicPhaseObservable<C> build_hamiltonian_classical(const BasicPotentialSpec<C>& spec) {
    using P = BasicPhaseObservable<C>;
    using E = BasicExpr<C>;
    P h = P::monomial(2, 0, BasicRatExpr<C>(E::ratio(1, 2)));
    h.add(0, 2, BasicRatExpr<C>(E::monomial(CoeffTraits<C>::ratio(1, 2), 0, -2, 0, Phase::Cos)));
    h.add(0, 0, spec.potential());
    return h;
}

template <typename C>
BasicDiffOperator<C> build_hamiltonian_quantum(const BasicPotentialSpec<C>& spec) {
    using D = BasicDiffOperator<C>;
    using E = BasicExpr<C>;
    const C mhalf = CoeffTraits<C>::ratio(-1, 2);
    D h = D::monomial(2, 0, BasicRatExpr<C>(E::hbar_pow(2).scaled(mhalf)));
    h.add(1, 0, BasicRatExpr<C>(E::monomial(mhalf, 2, -1, 0, Phase::Cos)));
    h.add(0, 2, BasicRatExpr<C>(E::monomial(mhalf, 2, -2, 0, Phase::Cos)));
    h.add(0, 0, spec.potential());
    return h;
}

template <typename C>
BasicPhaseObservable<C> build_X_classical(const BasicPotentialSpec<C>& spec) {
    using P = BasicPhaseObservable<C>;
    P x = P::monomial(0, 2, BasicRatExpr<C>::from_long(1));
    x.add(0, 0, spec.S * 2);
    return x;
}

template <typename C>
BasicDiffOperator<C> build_X_quantum(const BasicPotentialSpec<C>& spec) {
    using D = BasicDiffOperator<C>;
    using E = BasicExpr<C>;
    D x = D::monomial(0, 2, BasicRatExpr<C>(E::hbar_pow(2).scaled(CoeffTraits<C>::from_long(-1))));
    x.add(0, 0, spec.S * 2);
    return x;
}

// ---------------------------------------------------------------------------
// Y: shared polynomial structure over either operator algebra.
//
// The momenta handed in are the real reduced ones: classically (p_r, p_theta)
// themselves, quantum-mechanically the derivative parts of p_x/(-i hbar) etc.
// The anticommutator a*b + b*a degenerates to 2ab in the commutative algebra.

template <typename C>
struct GFunctions {
    BasicRatExpr<C> G1, G2, G3, G4;
    bool all_zero() const {
        return G1.is_zero() && G2.is_zero() && G3.is_zero() && G4.is_zero();
    }
};

namespace detail {

template <typename Op, typename C>
Op assemble_Y_leading(const BasicYConstants<C>& c, const Op& px, const Op& py, const Op& lz) {
    auto acomm = [](const Op& a, const Op& b) { return a * b + b * a; };
    const Op px2 = px * px, py2 = py * py;
    const Op p2 = px2 + py2;
    const Op lz2 = lz * lz, lz3 = lz2 * lz;

    Op y = acomm(lz3, px).scaled(c.A1) + acomm(lz3, py).scaled(c.A2);
    y += acomm(lz, px * p2).scaled(c.A3) + acomm(lz, py * p2).scaled(c.A4);
    y += (px2 * px2 - py2 * py2).scaled(c.B1);
    y += (px * py * p2).scaled(c.B2 + c.B2);
    y += acomm(lz2, px2 - py2).scaled(c.B3);
    y += acomm(lz2, px * py).scaled(c.B4 + c.B4);
    y += acomm(lz, px2 * py * 3 - py2 * py).scaled(c.C1);
    y += acomm(lz, px2 * px - py2 * px * 3).scaled(c.C2);
    y += (px2 * px2 + py2 * py2 - px2 * py2 * 6).scaled(c.D1);
    {
        const C four = CoeffTraits<C>::from_long(4);
        y += (px * py * (px2 - py2)).scaled(four * c.D2);
    }
    return y;
}

template <typename Op, typename C>
Op assemble_G_block(const GFunctions<C>& g, const Op& dr2, const Op& drdt, const Op& dt2) {
    auto acomm = [](const Op& a, const Op& b) { return a * b + b * a; };
    Op block = acomm(Op::mult(g.G1), dr2) + acomm(Op::mult(g.G3), drdt) + acomm(Op::mult(g.G2), dt2);
    return block;
}

}  // namespace detail

template <typename C>
BasicPhaseObservable<C> build_Y_classical(const BasicYConstants<C>& c, const GFunctions<C>& g) {
    if (c.all_zero() && g.all_zero()) throw DegenerateIntegralError();
    using P = BasicPhaseObservable<C>;
    using E = BasicExpr<C>;
    const auto one = CoeffTraits<C>::one();
    // p_x = cos(theta) p_r - sin(theta)/r p_theta, and cyclic for p_y
    P px = P::monomial(1, 0, BasicRatExpr<C>(E::cos_t(1)));
    px.add(0, 1, BasicRatExpr<C>(E::monomial(-one, 0, -1, 1, Phase::Sin)));
    P py = P::monomial(1, 0, BasicRatExpr<C>(E::sin_t(1)));
    py.add(0, 1, BasicRatExpr<C>(E::monomial(one, 0, -1, 1, Phase::Cos)));
    P lz = P::p_theta();

    P y = detail::assemble_Y_leading(c, px, py, lz);
    y += detail::assemble_G_block(g, P::p_r() * P::p_r(), P::p_r() * P::p_theta(),
                                  P::p_theta() * P::p_theta());
    y.add(0, 0, g.G4);
    return y;
}

template <typename C>
BasicDiffOperator<C> build_Y_quantum(const BasicYConstants<C>& c, const GFunctions<C>& g) {
    if (c.all_zero() && g.all_zero()) throw DegenerateIntegralError();
    using D = BasicDiffOperator<C>;
    using E = BasicExpr<C>;
    const auto one = CoeffTraits<C>::one();
    // real parts of p_x/(-i hbar), p_y/(-i hbar), L_z/(-i hbar)
    D dx = D::monomial(1, 0, BasicRatExpr<C>(E::cos_t(1)));
    dx.add(0, 1, BasicRatExpr<C>(E::monomial(-one, 0, -1, 1, Phase::Sin)));
    D dy = D::monomial(1, 0, BasicRatExpr<C>(E::sin_t(1)));
    dy.add(0, 1, BasicRatExpr<C>(E::monomial(one, 0, -1, 1, Phase::Cos)));
    D lz = D::d_theta();

    // all leading terms are of momentum degree 4: (-i hbar)^4 = hbar^4
    D y = detail::assemble_Y_leading(c, dx, dy, lz).hbar_factor(4);
    // The correction block is Hermitian only in its Cartesian anticommutator
    // form {g1, p_x^2} + {g2, p_x p_y} + {g3, p_y^2}; the polar anticommutator
    // form matches it to leading order only.  Recover (g1, g2, g3) pointwise
    // from the polar coefficients and assemble the Cartesian form exactly.
    using RE = BasicRatExpr<C>;
    const auto half = CoeffTraits<C>::ratio(1, 2);
    const RE c2{E::cos_t(2)}, s2{E::sin_t(2)};
    const RE r2G2 = g.G2 * RE(E::r_pow(2));
    const RE rG3 = g.G3 * RE(E::r_pow(1));
    const RE sum = g.G1 + r2G2;                       // g1 + g3
    const RE dif = (g.G1 - r2G2) * c2 - rG3 * s2;     // g1 - g3
    const RE g1 = (sum + dif).scaled(half);
    const RE g3 = (sum - dif).scaled(half);
    const RE g2 = (g.G1 - r2G2) * s2 + rG3 * c2;
    auto acomm = [](const D& a, const D& b) { return a * b + b * a; };
    D gblock = acomm(D::mult(g1), dx * dx) + acomm(D::mult(g2), dx * dy) +
               acomm(D::mult(g3), dy * dy);
    y -= gblock.hbar_factor(2);
    y.add(0, 0, g.G4);
    return y;
}

// ---------------------------------------------------------------------------

/// Rotate each doublet by its multiple of phi, given cos(phi) and sin(phi)
/// in the coefficient domain.  (u, v) -> (u cos n phi + v sin n phi,
/// -u sin n phi + v cos n phi) with n = 1, 2, 3, 4 for the A, B, C, D rows.
template <typename C>
BasicYConstants<C> rotate_constants(const BasicYConstants<C>& c, const C& cos_phi,
                                    const C& sin_phi) {
    std::array<C, 5> cn, sn;  // cos(n phi), sin(n phi), n = 0..4
    cn[0] = CoeffTraits<C>::one();
    sn[0] = CoeffTraits<C>::zero();
    for (int n = 1; n <= 4; ++n) {
        cn[n] = cn[n - 1] * cos_phi - sn[n - 1] * sin_phi;
        sn[n] = sn[n - 1] * cos_phi + cn[n - 1] * sin_phi;
    }
    auto rot = [&](C& u, C& v, int n) {
        C nu = u * cn[n] + v * sn[n];
        C nv = v * cn[n] - u * sn[n];
        u = std::move(nu);
        v = std::move(nv);
    };
    BasicYConstants<C> out = c;
    rot(out.A1, out.A2, 1);
    rot(out.A3, out.A4, 1);
    rot(out.B1, out.B2, 2);
    rot(out.B3, out.B4, 2);
    rot(out.C1, out.C2, 3);
    rot(out.D1, out.D2, 4);
    return out;
}

/// cos(pi p / q) when it is rational (Niven: only 0, +-1/2, +-1 occur).
inline bool rational_cos_pi(long p, long q, Rational& out) {
    if (q < 0) { q = -q; p = -p; }
    if (q == 0) return false;
    // reduce p/q mod 2 and to lowest terms
    long g = std::gcd(std::abs(p), q);
    p /= g; q /= g;
    p %= 2 * q;
    if (p < 0) p += 2 * q;
    // cos(pi p / q), p in [0, 2q)
    if (q == 1) { out = (p % 2 == 0) ? Rational(1) : Rational(-1); return true; }
    if (q == 2) { out = 0; return true; }                // p odd multiples of pi/2
    if (q == 3) { out = (p == 1 || p == 5) ? Rational(1, 2) : Rational(-1, 2); return true; }
    return false;
}
inline bool rational_sin_pi(long p, long q, Rational& out) {
    // sin x = cos(x - pi/2)
    return rational_cos_pi(2 * p - q, 2 * q, out);
}

/// Exact rotation by phi = pi p / q.  Each doublet needs cos and sin of its
/// multiple n phi; a doublet whose angle has an irrational cosine must be
/// zero, otherwise the rotation is rejected.
inline YConstants rotate_constants_pi(const YConstants& c, long p, long q) {
    std::array<Rational, 5> cn, sn;
    std::array<bool, 5> ok{};
    cn[0] = 1; sn[0] = 0; ok[0] = true;
    for (int n = 1; n <= 4; ++n)
        ok[n] = rational_cos_pi(n * p, q, cn[n]) && rational_sin_pi(n * p, q, sn[n]);
    auto rot = [&](Rational& u, Rational& v, int n) {
        if (!ok[n]) {
            if (u == 0 && v == 0) return;
            throw std::invalid_argument("rotation angle has irrational trig values for a nonzero doublet");
        }
        Rational nu = u * cn[n] + v * sn[n];
        Rational nv = v * cn[n] - u * sn[n];
        u = std::move(nu);
        v = std::move(nv);
    };
    YConstants out = c;
    rot(out.A1, out.A2, 1);
    rot(out.A3, out.A4, 1);
    rot(out.B1, out.B2, 2);
    rot(out.B3, out.B4, 2);
    rot(out.C1, out.C2, 3);
    rot(out.D1, out.D2, 4);
    return out;
}

/// Lowest order N = 2(m + n - 1) of the extra integral for k = m/n.
inline int integral_order(int m, int n) {
    if (m <= 0 || n <= 0) throw std::invalid_argument("m, n must be positive");
    if (std::gcd(m, n) != 1) throw std::invalid_argument("m and n must be coprime");
    return 2 * (m + n - 1);
}

}  // namespace polsep
