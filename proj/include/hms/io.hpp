#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hms/chen.hpp"
#include "hms/forms.hpp"
#include "hms/ncring.hpp"

namespace hms {

using nlohmann::json;

/// {"degree": N, "terms": [{"x": [...], "y": [...], "re": ..., "im": ...}]}
inline json series_to_json(const NCSeries& s) {
    json terms = json::array();
    for (const auto& [m, c] : s.terms()) {
        json t;
        t["x"] = m.x;
        t["y"] = m.y;
        t["re"] = c.real();
        t["im"] = c.imag();
        terms.push_back(t);
    }
    return json{{"degree", s.truncation_degree()}, {"terms", terms}};
}

inline NCSeries series_from_json(const json& j) {
    NCSeries s(j.at("degree").get<int>());
    for (const auto& t : j.at("terms")) {
        NCMonomial m{t.at("x").get<std::vector<int>>(), t.at("y").get<std::vector<int>>()};
        s.add_term(m, Complex(t.at("re").get<double>(), t.at("im").get<double>()));
    }
    return s;
}

inline json word_series_to_json(const WordSeries& s) {
    json terms = json::array();
    for (const auto& [w, c] : s.terms()) {
        json t;
        t["x"] = w;
        t["re"] = c.real();
        t["im"] = c.imag();
        terms.push_back(t);
    }
    return json{{"degree", s.truncation_degree()}, {"terms", terms}};
}

/// {"d": 2, "terms": [{"re": ..., "im": ..., "a": ..., "b": ...}]}
inline json form_to_json(const ExpForm2& f) {
    json terms = json::array();
    for (const auto& t : f.terms()) {
        if (!t.alpha.a.fits_int64() || !t.alpha.b.fits_int64())
            throw std::invalid_argument("form_to_json: exponent too large for the file format");
        json e;
        e["re"] = t.coeff.real();
        e["im"] = t.coeff.imag();
        e["a"] = t.alpha.a.to_int64();
        e["b"] = t.alpha.b.to_int64();
        terms.push_back(e);
    }
    return json{{"d", f.field().d()}, {"terms", terms}};
}

inline ExpForm2 form_from_json(const json& j, const FieldContext& F) {
    if (j.at("d").get<long long>() != F.d())
        throw std::invalid_argument("form file: field mismatch");
    ExpForm2 f(F);
    for (const auto& t : j.at("terms"))
        f.add_term(Complex(t.at("re").get<double>(), t.at("im").get<double>()),
                   QuadInt(t.at("a").get<long long>(), t.at("b").get<long long>()));
    return f;
}

inline ExpForm2 load_form_file(const std::string& path, const FieldContext& F) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open form file: " + path);
    json j;
    in >> j;
    return form_from_json(j, F);
}

inline json report_to_json(const Report& rep, const std::string& suite) {
    json rows = json::array();
    for (const auto& r : rep.rows) {
        rows.push_back(json{{"check", r.name},
                            {"suite", suite},
                            {"residual", r.residual},
                            {"tolerance", r.tolerance},
                            {"pass", r.pass}});
    }
    return rows;
}

} // namespace hms
