// Fraction field over BasicExpr.  Denominators are kept as a product of
// monic base factors with integer powers; this keeps the quotient-rule
// derivative from squaring denominators and lets sums over a common base
// (the M_I^2-style denominators that dominate this problem) stay small
// without any polynomial GCD machinery.  Equality is by cross-multiplication.
#pragma once

#include "polsep/expr.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace polsep {

struct ZeroDenominatorError : std::runtime_error {
    ZeroDenominatorError() : std::runtime_error("zero denominator") {}
};
struct SingularPointError : std::runtime_error {
    explicit SingularPointError(const std::string& what) : std::runtime_error(what) {}
};

template <typename C>
bool expr_less(const BasicExpr<C>& a, const BasicExpr<C>& b) {
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    auto ia = ta.begin(), ib = tb.begin();
    for (; ia != ta.end() && ib != tb.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return ia->first < ib->first;
        if (ia->second != ib->second) return ia->second < ib->second;
    }
    return ia == ta.end() && ib != tb.end();
}

template <typename C>
class BasicRatExpr {
  public:
    using Coeff = C;
    using Traits = CoeffTraits<C>;
    using ExprT = BasicExpr<C>;

    struct Factor {
        ExprT base;  // monic, hbar-free, not a pure monomial
        int pow = 1;
    };

    BasicRatExpr() = default;
    BasicRatExpr(ExprT num) : num_(std::move(num)) {}  // NOLINT: implicit by design
    BasicRatExpr(ExprT num, const ExprT& den) : num_(std::move(num)) { divide_by(den); }

    static BasicRatExpr zero() { return BasicRatExpr(); }
    static BasicRatExpr from_long(long n) { return BasicRatExpr(ExprT::from_long(n)); }

    const ExprT& num() const { return num_; }
    const std::vector<Factor>& den_factors() const { return den_; }
    bool den_trivial() const { return den_.empty(); }

    ExprT den_expanded() const {
        ExprT d = ExprT::from_long(1);
        for (const auto& f : den_)
            for (int i = 0; i < f.pow; ++i) d *= f.base;
        return d;
    }

    bool is_zero() const { return num_.is_zero(); }

    bool operator==(const BasicRatExpr& o) const {
        if (same_den(o)) return num_ == o.num_;
        return num_ * o.den_expanded() == o.num_ * den_expanded();
    }
    bool operator!=(const BasicRatExpr& o) const { return !(*this == o); }

    BasicRatExpr operator-() const {
        BasicRatExpr out = *this;
        out.num_ = -out.num_;
        return out;
    }

    BasicRatExpr operator+(const BasicRatExpr& o) const {
        if (num_.is_zero()) return o;
        if (o.num_.is_zero()) return *this;
        BasicRatExpr out;
        out.den_ = merged_den(o, /*max_pow=*/true);
        out.num_ = num_ * cofactor(den_, out.den_) + o.num_ * cofactor(o.den_, out.den_);
        out.prune();
        return out;
    }
    BasicRatExpr operator-(const BasicRatExpr& o) const { return *this + (-o); }
    BasicRatExpr& operator+=(const BasicRatExpr& o) { return *this = *this + o; }
    BasicRatExpr& operator-=(const BasicRatExpr& o) { return *this = *this + (-o); }

    BasicRatExpr operator*(const BasicRatExpr& o) const {
        BasicRatExpr out;
        out.num_ = num_ * o.num_;
        if (out.num_.is_zero()) return out;
        out.den_ = den_;
        for (const auto& f : o.den_) out.push_factor(f.base, f.pow);
        return out;
    }
    BasicRatExpr& operator*=(const BasicRatExpr& o) { return *this = *this * o; }

    BasicRatExpr operator/(const BasicRatExpr& o) const {
        if (o.num_.is_zero()) throw ZeroDenominatorError();
        BasicRatExpr out = *this;
        // numerator gains o's denominator, denominator gains o's numerator
        for (const auto& f : o.den_)
            for (int i = 0; i < f.pow; ++i) out.num_ *= f.base;
        out.divide_by(o.num_);
        return out;
    }
    BasicRatExpr& operator/=(const BasicRatExpr& o) { return *this = *this / o; }

    BasicRatExpr scaled(const C& c) const {
        BasicRatExpr out = *this;
        out.num_ = out.num_.scaled(c);
        out.prune();
        return out;
    }

    BasicRatExpr pow(int n) const {
        if (n < 0) return from_long(1) / this->pow(-n);
        BasicRatExpr out = from_long(1);
        for (int i = 0; i < n; ++i) out *= *this;
        return out;
    }

    BasicRatExpr differentiate(Var v) const {
        BasicRatExpr out;
        if (den_.empty()) {
            out.num_ = num_.differentiate(v);
            return out;
        }
        // d(n / prod B_i^p_i) = [n' prod B_i - n sum_i p_i B_i' prod_{j!=i} B_j]
        //                       / prod B_i^{p_i+1}
        ExprT prod_all = ExprT::from_long(1);
        for (const auto& f : den_) prod_all *= f.base;
        ExprT acc = num_.differentiate(v) * prod_all;
        for (std::size_t i = 0; i < den_.size(); ++i) {
            ExprT part = den_[i].base.differentiate(v) * long(den_[i].pow);
            for (std::size_t j = 0; j < den_.size(); ++j)
                if (j != i) part *= den_[j].base;
            acc -= num_ * part;
        }
        out.num_ = std::move(acc);
        if (!out.num_.is_zero()) {
            out.den_ = den_;
            for (auto& f : out.den_) ++f.pow;
        }
        return out;
    }

    BasicRatExpr hbar_slice(int a) const {
        BasicRatExpr out = *this;
        out.num_ = num_.hbar_slice(a);
        out.prune();
        return out;
    }
    BasicRatExpr substitute_hbar(const C& value) const {
        BasicRatExpr out = *this;
        out.num_ = num_.substitute_hbar(value);
        out.prune();
        return out;
    }
    int max_hbar() const { return num_.max_hbar(); }

    double evaluate(double r, double theta, double hbar, double eps = 1e-12) const {
        double d = 1.0;
        for (const auto& f : den_) {
            const double b = f.base.evaluate(r, theta, hbar);
            if (std::abs(b) < eps)
                throw SingularPointError("denominator factor vanishes at (r=" + std::to_string(r) +
                                         ", theta=" + std::to_string(theta) + ")");
            d *= std::pow(b, f.pow);
        }
        return num_.evaluate(r, theta, hbar) / d;
    }

    /// |num| magnitude divided by |den|; reference scale for cancellation checks.
    double evaluate_magnitude(double r, double theta, double hbar, double eps = 1e-12) const {
        double d = 1.0;
        for (const auto& f : den_) {
            const double b = f.base.evaluate(r, theta, hbar);
            if (std::abs(b) < eps) throw SingularPointError("denominator factor vanishes");
            d *= std::pow(std::abs(b), f.pow);
        }
        return num_.evaluate_magnitude(r, theta, hbar) / d;
    }

  private:
    bool same_den(const BasicRatExpr& o) const {
        if (den_.size() != o.den_.size()) return false;
        for (std::size_t i = 0; i < den_.size(); ++i)
            if (den_[i].pow != o.den_[i].pow || !(den_[i].base == o.den_[i].base)) return false;
        return true;
    }

    void prune() {
        if (num_.is_zero()) den_.clear();
    }

    // Divide by an arbitrary expression: normalize it into monomial part
    // (folded into the numerator) and a monic base factor.
    void divide_by(const ExprT& den) {
        if (den.is_zero()) throw ZeroDenominatorError();
        if (den.has_hbar())
            throw std::invalid_argument("denominators must be hbar-free");
        if (den.is_trigfree_monomial()) {
            const auto& [k, c] = *den.terms().begin();
            num_ = num_.divided_by_monomial(k, c);
            return;
        }
        const C lead = den.leading_coeff();
        const C inv_lead = Traits::one() / lead;
        num_ = num_.scaled(inv_lead);
        if (num_.is_zero()) return;
        push_factor(den.scaled(inv_lead), 1);
    }

    void push_factor(const ExprT& base, int pow) {
        auto it = std::lower_bound(den_.begin(), den_.end(), base,
                                   [](const Factor& f, const ExprT& b) { return expr_less(f.base, b); });
        if (it != den_.end() && it->base == base)
            it->pow += pow;
        else
            den_.insert(it, Factor{base, pow});
    }

    static ExprT cofactor(const std::vector<Factor>& own, const std::vector<Factor>& common) {
        ExprT cof = ExprT::from_long(1);
        for (const auto& cf : common) {
            int have = 0;
            for (const auto& f : own)
                if (f.base == cf.base) { have = f.pow; break; }
            for (int i = have; i < cf.pow; ++i) cof *= cf.base;
        }
        return cof;
    }

    std::vector<Factor> merged_den(const BasicRatExpr& o, bool max_pow) const {
        (void)max_pow;
        std::vector<Factor> out = den_;
        BasicRatExpr tmp;
        for (const auto& f : o.den_) {
            bool found = false;
            for (auto& g : out)
                if (g.base == f.base) {
                    g.pow = std::max(g.pow, f.pow);
                    found = true;
                    break;
                }
            if (!found) {
                out.push_back(f);
            }
        }
        std::sort(out.begin(), out.end(),
                  [](const Factor& a, const Factor& b) { return expr_less(a.base, b.base); });
        return out;
    }

    ExprT num_;
    std::vector<Factor> den_;
};

using RatExpr = BasicRatExpr<Rational>;
using FRatExpr = BasicRatExpr<BigFloat>;

template <typename C>
BasicRatExpr<C> operator*(const BasicRatExpr<C>& e, long n) {
    return e.scaled(CoeffTraits<C>::from_long(n));
}
template <typename C>
BasicRatExpr<C> operator*(long n, const BasicRatExpr<C>& e) {
    return e.scaled(CoeffTraits<C>::from_long(n));
}

}  // namespace polsep
