// Recursive-descent parser for the small expression DSL:
//   rationals p/q, symbols r / hbar, cos(n*theta), sin(n*theta),
//   operators + - * / ^ with integer exponents, parentheses.
// Division produces a quotient; dividing by a pure monomial folds back into
// the numerator, so "1/2" and "x/r^2" stay plain expressions.
#pragma once

#include "polsep/ratexpr.hpp"

#include <cctype>
#include <string>
#include <string_view>

namespace polsep {

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " (at byte " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

template <typename C = Rational>
class Parser {
  public:
    using RE = BasicRatExpr<C>;

    static RE parse(std::string_view text) {
        Parser p(text);
        RE e = p.parse_sum();
        p.skip_ws();
        if (p.pos_ != text.size()) p.fail("unexpected trailing input");
        return e;
    }

  private:
    explicit Parser(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    RE parse_sum() {
        RE acc = accept('-') ? -parse_product() : (accept('+'), parse_product());
        for (;;) {
            if (accept('+'))
                acc += parse_product();
            else if (accept('-'))
                acc -= parse_product();
            else
                return acc;
        }
    }

    RE parse_product() {
        RE acc = parse_power();
        for (;;) {
            if (accept('*'))
                acc *= parse_power();
            else if (accept('/'))
                acc /= parse_power();
            else
                return acc;
        }
    }

    RE parse_power() {
        RE base = parse_primary();
        if (accept('^')) return base.pow(parse_int());
        return base;
    }

    RE parse_primary() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            RE inner = parse_sum();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return RE::from_long(parse_uint());
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            const std::string id = parse_ident();
            if (id == "r") return RE(BasicExpr<C>::r_pow(1));
            if (id == "hbar") return RE(BasicExpr<C>::hbar_pow(1));
            if (id == "sin" || id == "cos") return parse_trig(id == "sin");
            if (id == "theta") {
                pos_ = start;
                fail("'theta' may appear only inside sin(...)/cos(...)");
            }
            pos_ = start;
            fail("unknown symbol '" + id + "'");
        }
        fail("expected expression");
    }

    // sin '(' [int '*'] theta ')'
    RE parse_trig(bool is_sin) {
        expect('(');
        long n = 1;
        if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '-') {
            n = parse_int();
            expect('*');
        }
        const std::size_t id_start = pos_;
        skip_ws();
        if (parse_ident() != "theta") {
            pos_ = id_start;
            fail("trig argument must be 'n*theta' or 'theta'");
        }
        expect(')');
        const int ni = static_cast<int>(n);
        return RE(is_sin ? BasicExpr<C>::sin_t(ni) : BasicExpr<C>::cos_t(ni));
    }

    long parse_uint() {
        skip_ws();
        const std::size_t start = pos_;
        long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_] - '0');
            ++pos_;
        }
        if (pos_ == start) fail("expected integer");
        return v;
    }
    long parse_int() {
        skip_ws();
        const bool neg = accept('-');
        const long v = parse_uint();
        return neg ? -v : v;
    }

    std::string parse_ident() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

template <typename C = Rational>
BasicRatExpr<C> parse_expr(std::string_view text) {
    return Parser<C>::parse(text);
}

}  // namespace polsep
