// json_io.hpp: JSON forms of dispersions and test functions
//
// Complex numbers are [re, im] or a bare real. A test function is a list of
// atoms, each one of
//   {"kind": "gaussian", "center", "width", "modulation", "coefficient"}   unit-norm Gaussian
//   {"kind": "hermite", "order", "center", "width", "modulation", "coefficient"}
//   {"kind": "atom", "center", "width", "modulation", "hermite": [c0, c1, ...], "coefficient"}
// with center 0, width 1, modulation 0 and coefficient 1 as defaults.

#pragma once

#include <initializer_list>
#include <string>

#include <nlohmann/json.hpp>

#include "multinoise/dispersion.hpp"
#include "multinoise/errors.hpp"
#include "multinoise/schwartz.hpp"

namespace multinoise {

using json = nlohmann::ordered_json;

namespace detail {

inline void expect_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

inline double number(const json& j, const std::string& where)
{
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + ": not finite");
    return v;
}

inline double number_or(const json& j, const char* key, double fallback, const std::string& where)
{
    return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

inline int integer(const json& j, const std::string& where)
{
    if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return j.get<int>();
}

} // namespace detail

inline cplx complex_from_json(const json& j, const std::string& where)
{
    if (j.is_number()) return {detail::number(j, where), 0.0};
    if (j.is_array() && j.size() == 2) return {detail::number(j[0], where + "[0]"), detail::number(j[1], where + "[1]")};
    throw ConfigError(where + ": expected a number or [re, im]");
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline TestFunction atom_from_json(const json& j, const std::string& where)
{
    detail::expect_keys(j, where, {"kind", "order", "center", "width", "modulation", "hermite", "coefficient"});
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError(where + ": missing 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    const double center = detail::number_or(j, "center", 0.0, where);
    const double width = detail::number_or(j, "width", 1.0, where);
    const double modulation = detail::number_or(j, "modulation", 0.0, where);
    const cplx coefficient = j.contains("coefficient") ? complex_from_json(j.at("coefficient"), where + ".coefficient")
                                                       : cplx{1.0, 0.0};
    if (!(width > 0.0)) throw ConfigError(where + ": width must be positive");
    if (kind != "hermite" && j.contains("order")) throw ConfigError(where + ": 'order' only applies to hermite atoms");
    if (kind != "atom" && j.contains("hermite")) throw ConfigError(where + ": 'hermite' only applies to raw atoms");

    if (kind == "gaussian") return gaussian(center, width, modulation) * coefficient;
    if (kind == "hermite") {
        int k = j.contains("order") ? detail::integer(j.at("order"), where + ".order") : 0;
        if (k < 0 || k > 40) throw ConfigError(where + ": hermite order out of range");
        return hermite_function(static_cast<std::size_t>(k), center, width, modulation) * coefficient;
    }
    if (kind == "atom") {
        if (!j.contains("hermite") || !j.at("hermite").is_array() || j.at("hermite").empty())
            throw ConfigError(where + ": raw atom needs a nonempty 'hermite' coefficient list");
        Atom a{center, width, modulation, {}};
        for (std::size_t i = 0; i < j.at("hermite").size(); ++i)
            a.poly.push_back(complex_from_json(j.at("hermite")[i], where + ".hermite[" + std::to_string(i) + "]"));
        return TestFunction(std::move(a), coefficient);
    }
    throw ConfigError(where + ": unknown atom kind '" + kind + "'");
}

inline TestFunction test_function_from_json(const json& j, const std::string& where)
{
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty list of atoms");
    TestFunction f;
    for (std::size_t i = 0; i < j.size(); ++i) f += atom_from_json(j[i], where + "[" + std::to_string(i) + "]");
    if (f.is_zero()) throw ConfigError(where + ": function is identically zero");
    return f;
}

// Always the raw form, so that reading it back reproduces the terms exactly.
inline json to_json(const TestFunction& f)
{
    json out = json::array();
    for (const auto& t : f.terms()) {
        json poly = json::array();
        for (cplx c : t.atom.poly) poly.push_back(complex_to_json(c));
        out.push_back({{"kind", "atom"},
                       {"center", t.atom.center},
                       {"width", t.atom.width},
                       {"modulation", t.atom.modulation},
                       {"hermite", poly},
                       {"coefficient", complex_to_json(t.coefficient)}});
    }
    return out;
}

inline Dispersion dispersion_from_json(const json& j, const std::string& where)
{
    detail::expect_keys(j, where, {"kind", "slope", "mass", "offset", "dimension"});
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError(where + ": missing 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    const double offset = detail::number_or(j, "offset", 0.0, where);
    const int dim = j.contains("dimension") ? detail::integer(j.at("dimension"), where + ".dimension") : 1;
    Dispersion d;
    if (kind == "linear") {
        if (j.contains("mass")) throw ConfigError(where + ": 'mass' does not apply to a linear dispersion");
        d = Dispersion::linear(detail::number_or(j, "slope", 1.0, where), offset, dim);
    } else if (kind == "quadratic") {
        if (j.contains("slope")) throw ConfigError(where + ": 'slope' does not apply to a quadratic dispersion");
        d = Dispersion::quadratic(detail::number_or(j, "mass", 1.0, where), offset, dim);
    } else {
        throw ConfigError(where + ": unknown dispersion kind '" + kind + "'");
    }
    try {
        validate(d);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return d;
}

inline json to_json(const Dispersion& d)
{
    json j{{"kind", to_string(d.kind)}};
    if (d.kind == Dispersion::Kind::linear)
        j["slope"] = d.slope;
    else
        j["mass"] = d.mass;
    j["offset"] = d.offset;
    j["dimension"] = d.dimension;
    return j;
}

} // namespace multinoise
