// JSON forms: an Expr is a list of term records
//   {"coeff": "p/q", "hbar": a, "r": k, "n": n, "phase": "cos"|"sin"},
// a RatExpr is {"num": [...], "den": [...]} with the denominator expanded.
// Round-trips are value-exact in the rational domain; serialization always
// emits the canonical form, so serialize(load(serialize(x))) == serialize(x).
#pragma once

#include "polsep/dynamics.hpp"
#include "polsep/standard.hpp"

#include <nlohmann/json.hpp>

namespace polsep {

using Json = nlohmann::json;

template <typename C>
struct CoeffIO;

template <>
struct CoeffIO<Rational> {
    static std::string to_string(const Rational& c) { return c.str(); }
    static Rational from_string(const std::string& s) { return Rational(s); }
};

template <>
struct CoeffIO<BigFloat> {
    static std::string to_string(const BigFloat& c) { return c.str(); }
    static BigFloat from_string(const std::string& s) {
        BigFloat r;
        r.raw() = BigFloat::Backend(s);
        return r;
    }
};

template <typename C>
Json to_json(const BasicExpr<C>& e) {
    Json out = Json::array();
    for (const auto& [k, c] : e.terms()) {
        out.push_back(Json{{"coeff", CoeffIO<C>::to_string(c)},
                           {"hbar", k.hbar},
                           {"r", k.rpow},
                           {"n", k.harm},
                           {"phase", k.phase == Phase::Cos ? "cos" : "sin"}});
    }
    return out;
}

template <typename C>
BasicExpr<C> expr_from_json(const Json& j) {
    BasicExpr<C> e;
    for (const auto& t : j) {
        const TermKey key{t.at("hbar").get<int>(), t.at("r").get<int>(), t.at("n").get<int>(),
                          t.at("phase").get<std::string>() == "sin" ? Phase::Sin : Phase::Cos};
        e.add_term(key, CoeffIO<C>::from_string(t.at("coeff").get<std::string>()));
    }
    return e;
}

template <typename C>
Json to_json(const BasicRatExpr<C>& e) {
    return Json{{"num", to_json(e.num())}, {"den", to_json(e.den_expanded())}};
}

template <typename C>
BasicRatExpr<C> ratexpr_from_json(const Json& j) {
    return BasicRatExpr<C>(expr_from_json<C>(j.at("num")), expr_from_json<C>(j.at("den")));
}

// ---------------------------------------------------------------------------
// YConstants: flat object {A1:..., ..., D2:...}

namespace detail {

template <typename C>
std::array<std::pair<const char*, C BasicYConstants<C>::*>, 12> yconstant_fields() {
    using Y = BasicYConstants<C>;
    return {{{"A1", &Y::A1},
             {"A2", &Y::A2},
             {"A3", &Y::A3},
             {"A4", &Y::A4},
             {"B1", &Y::B1},
             {"B2", &Y::B2},
             {"B3", &Y::B3},
             {"B4", &Y::B4},
             {"C1", &Y::C1},
             {"C2", &Y::C2},
             {"D1", &Y::D1},
             {"D2", &Y::D2}}};
}

}  // namespace detail

template <typename C>
Json to_json(const BasicYConstants<C>& c) {
    Json out = Json::object();
    for (const auto& [name, field] : detail::yconstant_fields<C>())
        out[name] = CoeffIO<C>::to_string(c.*field);
    return out;
}

template <typename C>
BasicYConstants<C> yconstants_from_json(const Json& j) {
    BasicYConstants<C> c;
    for (const auto& [name, field] : detail::yconstant_fields<C>())
        if (j.contains(name))
            c.*field = CoeffIO<C>::from_string(j.at(name).template get<std::string>());
    return c;
}

// ---------------------------------------------------------------------------
// PotentialSpec: {"radial": "zero"|"coulomb"|"oscillator", "coeff": ..., "S": ratexpr}

template <typename C>
Json to_json(const BasicPotentialSpec<C>& spec) {
    const char* kind = spec.radial == RadialKind::Zero       ? "zero"
                       : spec.radial == RadialKind::Coulomb ? "coulomb"
                                                            : "oscillator";
    return Json{{"radial", kind},
                {"coeff", CoeffIO<C>::to_string(spec.radial_coeff)},
                {"S", to_json(spec.S)}};
}

template <typename C>
BasicPotentialSpec<C> potentialspec_from_json(const Json& j) {
    BasicPotentialSpec<C> spec;
    const auto kind = j.at("radial").get<std::string>();
    if (kind == "zero")
        spec.radial = RadialKind::Zero;
    else if (kind == "coulomb")
        spec.radial = RadialKind::Coulomb;
    else if (kind == "oscillator")
        spec.radial = RadialKind::Oscillator;
    else
        throw std::invalid_argument("unknown radial kind: " + kind);
    if (j.contains("coeff"))
        spec.radial_coeff = CoeffIO<C>::from_string(j.at("coeff").get<std::string>());
    spec.S = ratexpr_from_json<C>(j.at("S"));
    return spec;
}

// ---------------------------------------------------------------------------
// Observables and operators: list of {i, j, coeff: ratexpr}

template <typename C>
Json to_json(const BasicPhaseObservable<C>& p) {
    Json out = Json::array();
    for (const auto& [k, c] : p.terms())
        out.push_back(Json{{"i", k.first}, {"j", k.second}, {"coeff", to_json(c)}});
    return out;
}

template <typename C>
Json to_json(const BasicDiffOperator<C>& p) {
    Json out = Json::array();
    for (const auto& [k, c] : p.terms())
        out.push_back(Json{{"i", k.first}, {"j", k.second}, {"coeff", to_json(c)}});
    return out;
}

// ---------------------------------------------------------------------------
// Residual report entries: {equation, exact_zero, max_abs_sample, sample_points}

inline Json to_json(const ResidualReportEntry& e) {
    Json out{{"equation", e.equation},
             {"max_abs_sample", e.max_abs_sample},
             {"sample_points", e.sample_points}};
    out["exact_zero"] = e.exact_zero ? Json(*e.exact_zero) : Json(nullptr);
    return out;
}

// ---------------------------------------------------------------------------
// Solution families

template <typename C>
Json to_json(const BasicSVector<C>& s) {
    return Json::array({CoeffIO<C>::to_string(s.s1), CoeffIO<C>::to_string(s.s2),
                        CoeffIO<C>::to_string(s.s3), CoeffIO<C>::to_string(s.s4),
                        CoeffIO<C>::to_string(s.s5)});
}

template <typename C>
Json to_json(const BasicSolutionFamily<C>& f) {
    return Json{{"case", f.which == StandardCase::I ? "I" : "II"},
                {"root_index", f.root_index},
                {"q", CoeffIO<C>::to_string(f.q)},
                {"hbar", CoeffIO<C>::to_string(f.hbar)},
                {"svec", to_json(f.svec)},
                {"S", to_json(f.S)},
                {"constants", to_json(f.constants)},
                {"discriminant", CoeffIO<C>::to_string(f.discriminant)},
                {"classification", to_string(f.classification)},
                {"root_residual", f.root_residual}};
}

// ---------------------------------------------------------------------------
// Conservation reports

inline Json to_json(const ConservationReport& rep) {
    Json entries = Json::array();
    for (const auto& e : rep.entries)
        entries.push_back(
            Json{{"name", e.name}, {"initial", e.initial}, {"max_drift", e.max_drift}});
    return Json{{"entries", entries}, {"worst", rep.worst()}};
}

}  // namespace polsep
