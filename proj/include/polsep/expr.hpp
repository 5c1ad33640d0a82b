// Canonical expressions over the ring  Q[hbar] x Laurent(r) x Fourier(theta):
// finite sums of terms  c * hbar^a * r^k * {cos(n theta) | sin(n theta)}.
// Products of trig factors are linearized on the fly, so structural equality
// of the stored term maps is semantic equality.
#pragma once

#include "polsep/coefficients.hpp"

#include <cmath>
#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace polsep {

enum class Phase : int { Cos = 0, Sin = 1 };
enum class Var : int { R = 0, Theta = 1 };

struct TermKey {
    int hbar = 0;   // power of hbar, >= 0
    int rpow = 0;   // Laurent exponent of r
    int harm = 0;   // harmonic n >= 0
    Phase phase = Phase::Cos;

    auto operator<=>(const TermKey&) const = default;
};

template <typename C>
class BasicExpr {
  public:
    using Coeff = C;
    using Traits = CoeffTraits<C>;
    using TermMap = std::map<TermKey, C>;

    BasicExpr() = default;

    static BasicExpr zero() { return BasicExpr(); }
    static BasicExpr constant(C c) {
        BasicExpr e;
        e.add_term(TermKey{}, std::move(c));
        return e;
    }
    static BasicExpr from_long(long n) { return constant(Traits::from_long(n)); }
    static BasicExpr ratio(long p, long q) { return constant(Traits::ratio(p, q)); }
    static BasicExpr monomial(C c, int hbar, int rpow, int harm, Phase phase) {
        if (hbar < 0) throw std::invalid_argument("negative hbar power");
        BasicExpr e;
        e.add_trig(hbar, rpow, harm, phase, std::move(c));
        return e;
    }
    static BasicExpr r_pow(int k) { return monomial(Traits::one(), 0, k, 0, Phase::Cos); }
    static BasicExpr hbar_pow(int a) { return monomial(Traits::one(), a, 0, 0, Phase::Cos); }
    static BasicExpr cos_t(int n) { return monomial(Traits::one(), 0, 0, n, Phase::Cos); }
    static BasicExpr sin_t(int n) { return monomial(Traits::one(), 0, 0, n, Phase::Sin); }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    bool operator==(const BasicExpr& o) const { return terms_ == o.terms_; }
    bool operator!=(const BasicExpr& o) const { return !(*this == o); }

    /// True iff the expression is a single term with harmonic 0 (a pure
    /// c * hbar^a * r^k monomial, invertible in the Laurent ring).
    bool is_trigfree_monomial() const {
        return terms_.size() == 1 && terms_.begin()->first.harm == 0;
    }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == TermKey{});
    }
    bool has_hbar() const {
        for (const auto& [k, c] : terms_)
            if (k.hbar > 0) return true;
        return false;
    }
    int max_hbar() const {
        int m = 0;
        for (const auto& [k, c] : terms_) m = std::max(m, k.hbar);
        return m;
    }

    /// Terms whose hbar power equals `a`, with that power stripped off.
    BasicExpr hbar_slice(int a) const {
        BasicExpr out;
        for (const auto& [k, c] : terms_)
            if (k.hbar == a) out.add_term(TermKey{0, k.rpow, k.harm, k.phase}, c);
        return out;
    }
    /// Substitute a numeric value for hbar (exactly, power by power).
    BasicExpr substitute_hbar(const C& value) const {
        BasicExpr out;
        for (const auto& [k, c] : terms_) {
            C f = c;
            for (int i = 0; i < k.hbar; ++i) f = f * value;
            out.add_term(TermKey{0, k.rpow, k.harm, k.phase}, f);
        }
        return out;
    }

    BasicExpr operator-() const {
        BasicExpr out;
        for (const auto& [k, c] : terms_) out.terms_.emplace(k, Traits::neg(c));
        return out;
    }
    BasicExpr operator+(const BasicExpr& o) const {
        BasicExpr out = *this;
        for (const auto& [k, c] : o.terms_) out.add_term(k, c);
        return out;
    }
    BasicExpr operator-(const BasicExpr& o) const {
        BasicExpr out = *this;
        for (const auto& [k, c] : o.terms_) out.add_term(k, Traits::neg(c));
        return out;
    }
    BasicExpr& operator+=(const BasicExpr& o) {
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }
    BasicExpr& operator-=(const BasicExpr& o) {
        for (const auto& [k, c] : o.terms_) add_term(k, Traits::neg(c));
        return *this;
    }

    BasicExpr operator*(const BasicExpr& o) const {
        BasicExpr out;
        const C half = Traits::ratio(1, 2);
        for (const auto& [ka, ca] : terms_) {
            for (const auto& [kb, cb] : o.terms_) {
                const C c = ca * cb;
                const int hb = ka.hbar + kb.hbar;
                const int rp = ka.rpow + kb.rpow;
                const int n = ka.harm, m = kb.harm;
                if (ka.phase == Phase::Cos && kb.phase == Phase::Cos) {
                    // cos n cos m = 1/2 cos(n-m) + 1/2 cos(n+m)
                    out.add_trig(hb, rp, n - m, Phase::Cos, c * half);
                    out.add_trig(hb, rp, n + m, Phase::Cos, c * half);
                } else if (ka.phase == Phase::Sin && kb.phase == Phase::Sin) {
                    // sin n sin m = 1/2 cos(n-m) - 1/2 cos(n+m)
                    out.add_trig(hb, rp, n - m, Phase::Cos, c * half);
                    out.add_trig(hb, rp, n + m, Phase::Cos, Traits::neg(c * half));
                } else if (ka.phase == Phase::Sin) {
                    // sin n cos m = 1/2 sin(n+m) + 1/2 sin(n-m)
                    out.add_trig(hb, rp, n + m, Phase::Sin, c * half);
                    out.add_trig(hb, rp, n - m, Phase::Sin, c * half);
                } else {
                    // cos n sin m = 1/2 sin(n+m) - 1/2 sin(n-m)
                    out.add_trig(hb, rp, n + m, Phase::Sin, c * half);
                    out.add_trig(hb, rp, n - m, Phase::Sin, Traits::neg(c * half));
                }
            }
        }
        return out;
    }
    BasicExpr& operator*=(const BasicExpr& o) { return *this = *this * o; }

    BasicExpr scaled(const C& c) const {
        BasicExpr out;
        if (Traits::is_zero(c)) return out;
        for (const auto& [k, v] : terms_) {
            C p = v * c;
            if (!Traits::is_zero(p)) out.terms_.emplace(k, std::move(p));
        }
        return out;
    }
    BasicExpr pow(int n) const {
        if (n < 0) throw std::invalid_argument("negative power of Expr");
        BasicExpr out = from_long(1);
        for (int i = 0; i < n; ++i) out *= *this;
        return out;
    }

    BasicExpr differentiate(Var v) const {
        BasicExpr out;
        for (const auto& [k, c] : terms_) {
            if (v == Var::R) {
                if (k.rpow != 0)
                    out.add_term(TermKey{k.hbar, k.rpow - 1, k.harm, k.phase},
                                 c * Traits::from_long(k.rpow));
            } else {
                if (k.harm == 0) continue;
                const C nc = c * Traits::from_long(k.harm);
                if (k.phase == Phase::Cos)
                    out.add_term(TermKey{k.hbar, k.rpow, k.harm, Phase::Sin}, Traits::neg(nc));
                else
                    out.add_term(TermKey{k.hbar, k.rpow, k.harm, Phase::Cos}, nc);
            }
        }
        return out;
    }

    double evaluate(double r, double theta, double hbar) const {
        double acc = 0.0;
        for (const auto& [k, c] : terms_) {
            double t = Traits::to_double(c);
            if (k.hbar != 0) t *= std::pow(hbar, k.hbar);
            if (k.rpow != 0) t *= std::pow(r, k.rpow);
            if (k.harm != 0)
                t *= (k.phase == Phase::Cos) ? std::cos(k.harm * theta) : std::sin(k.harm * theta);
            acc += t;
        }
        return acc;
    }
    /// Sum of |term| at the point; scale reference for cancellation checks.
    double evaluate_magnitude(double r, double theta, double hbar) const {
        double acc = 0.0;
        for (const auto& [k, c] : terms_) {
            double t = std::abs(Traits::to_double(c));
            if (k.hbar != 0) t *= std::pow(std::abs(hbar), k.hbar);
            if (k.rpow != 0) t *= std::pow(std::abs(r), k.rpow);
            acc += t;
        }
        return acc;
    }

    /// Coefficient of the largest key in the canonical ordering; zero for the
    /// zero expression.  Used for sign/scale normalization of denominators.
    C leading_coeff() const {
        if (terms_.empty()) return Traits::zero();
        return terms_.rbegin()->second;
    }
    TermKey leading_key() const {
        if (terms_.empty()) throw std::logic_error("leading_key of zero expression");
        return terms_.rbegin()->first;
    }

    /// Multiply by the inverse of a trig-free monomial.
    BasicExpr divided_by_monomial(const TermKey& k, const C& c) const {
        if (k.harm != 0) throw std::invalid_argument("cannot invert a trig monomial");
        BasicExpr out;
        for (const auto& [tk, tc] : terms_) {
            const int hb = tk.hbar - k.hbar;
            if (hb < 0) throw std::invalid_argument("division would produce negative hbar power");
            out.add_term(TermKey{hb, tk.rpow - k.rpow, tk.harm, tk.phase}, tc / c);
        }
        return out;
    }

    void add_term(const TermKey& k, const C& c) {
        if (Traits::is_zero(c)) return;
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (Traits::is_zero(it->second)) terms_.erase(it);
        }
    }

  private:
    // Insert with harmonic normalization: cos(-n) = cos n, sin(-n) = -sin n,
    // sin 0 = 0.
    void add_trig(int hbar, int rpow, int harm, Phase phase, C c) {
        if (harm < 0) {
            harm = -harm;
            if (phase == Phase::Sin) c = Traits::neg(c);
        }
        if (harm == 0 && phase == Phase::Sin) return;
        add_term(TermKey{hbar, rpow, harm, phase}, c);
    }

    TermMap terms_;
};

using Expr = BasicExpr<Rational>;
using FExpr = BasicExpr<BigFloat>;

template <typename C>
BasicExpr<C> operator*(const BasicExpr<C>& e, long n) {
    return e.scaled(CoeffTraits<C>::from_long(n));
}
template <typename C>
BasicExpr<C> operator*(long n, const BasicExpr<C>& e) {
    return e.scaled(CoeffTraits<C>::from_long(n));
}

}  // namespace polsep
