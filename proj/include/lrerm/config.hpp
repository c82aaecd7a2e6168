#pragma once

// JSON experiment configuration: strict schema checks (unknown fields are
// rejected, errors name the offending field) and builders for library objects.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dictionary.hpp"
#include "erm_solver.hpp"
#include "losses.hpp"
#include "regularizers.hpp"

namespace lrerm {

using Json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses JSON text; syntax errors report line and column.
inline Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                          e.what());
    }
}

/// View of a JSON object that records which keys were read, so leftovers can be rejected.
class Fields {
public:
    Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + " must be a JSON object");
    }

    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

    const Json& raw(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError("missing field " + name(key));
        used_.insert(key);
        return j_.at(key);
    }
    const Json* maybe(const std::string& key) {
        if (!j_.contains(key)) return nullptr;
        used_.insert(key);
        return &j_.at(key);
    }

    double number(const std::string& key) { return as_number(raw(key), name(key)); }
    double number_or(const std::string& key, double fallback) {
        const Json* v = maybe(key);
        return v ? as_number(*v, name(key)) : fallback;
    }
    double positive(const std::string& key) {
        const double v = number(key);
        if (!(v > 0.0)) throw ConfigError("field " + name(key) + " must be > 0");
        return v;
    }
    std::uint64_t count(const std::string& key) { return as_count(raw(key), name(key)); }
    std::uint64_t count_or(const std::string& key, std::uint64_t fallback) {
        const Json* v = maybe(key);
        return v ? as_count(*v, name(key)) : fallback;
    }
    std::string text(const std::string& key) {
        const Json& v = raw(key);
        if (!v.is_string()) throw ConfigError("field " + name(key) + " must be a string");
        return v.get<std::string>();
    }
    /// Scalar or array of numbers.
    std::vector<double> numbers(const std::string& key) {
        const Json& v = raw(key);
        std::vector<double> out;
        if (v.is_array()) {
            for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], name(key) + "[" + std::to_string(i) + "]"));
        } else {
            out.push_back(as_number(v, name(key)));
        }
        return out;
    }
    std::vector<std::uint64_t> counts(const std::string& key) {
        const Json& v = raw(key);
        std::vector<std::uint64_t> out;
        if (v.is_array()) {
            for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_count(v[i], name(key) + "[" + std::to_string(i) + "]"));
        } else {
            out.push_back(as_count(v, name(key)));
        }
        return out;
    }
    Fields object(const std::string& key) { return Fields(raw(key), name(key)); }

    /// Rejects keys that were never read.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.contains(it.key())) throw ConfigError("unknown field " + name(it.key()));
        }
    }

    [[nodiscard]] std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    [[nodiscard]] std::string where() const { return path_.empty() ? "config" : "field " + path_; }

    static double as_number(const Json& v, const std::string& field) {
        if (!v.is_number()) throw ConfigError("field " + field + " must be a number");
        return v.get<double>();
    }
    static std::uint64_t as_count(const Json& v, const std::string& field) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
        throw ConfigError("field " + field + " must be a non-negative integer");
    }

    const Json& j_;
    std::string path_;
    std::set<std::string> used_;
};

inline Dictionary build_dictionary(Fields f) {
    const std::string type = f.text("type");
    const std::uint64_t size = f.count("size");
    const double r = f.number("r");
    if (!(r > 1.0)) throw ConfigError("field " + f.name("r") + " must be > 1");
    if (size == 0) throw ConfigError("field " + f.name("size") + " must be >= 1");
    std::optional<Dictionary> d;
    if (type == "trig") {
        const double decay = f.number_or("decay", 1.0);
        d = Dictionary::trig(size, decay, r);
    } else if (type == "monomial") {
        f.number_or("decay", 0.0);
        d = Dictionary::monomial(size, r);
    } else if (type == "hat") {
        f.number_or("decay", 0.0);
        if (size < 2) throw ConfigError("field " + f.name("size") + " must be >= 2 for hat dictionaries");
        d = Dictionary::hat(size, r);
    } else {
        throw ConfigError("field " + f.name("type") + " must be one of trig, monomial, hat");
    }
    f.finish();
    return std::move(*d);
}

inline Regularizer build_regularizer(Fields f, std::size_t size) {
    const double r = f.number("r");
    if (!(r > 1.0)) throw ConfigError("field " + f.name("r") + " must be > 1");
    std::vector<double> eta = f.numbers("eta");
    if (eta.size() == 1) eta.assign(size, eta.front());
    if (eta.size() != size) throw ConfigError("field " + f.name("eta") + " must be a scalar or have one entry per atom");
    for (double e : eta) {
        if (!(e >= 0.0)) throw ConfigError("field " + f.name("eta") + " must be >= 0");
    }
    std::vector<AtomPenalty> atoms;
    const Json* h = f.maybe("h");
    std::vector<Json> hs;
    if (h == nullptr) {
        hs.assign(size, Json{{"kind", "zero"}});
    } else if (h->is_array()) {
        hs.assign(h->begin(), h->end());
        if (hs.size() == 1) hs.assign(size, hs.front());
    } else {
        hs.assign(size, *h);
    }
    if (hs.size() != size) throw ConfigError("field " + f.name("h") + " must have one entry per atom");
    for (std::size_t k = 0; k < size; ++k) {
        Fields a(hs[k], f.name("h") + "[" + std::to_string(k) + "]");
        const std::string kind = a.text("kind");
        if (kind == "abs") {
            const double w = a.number("w");
            if (!(w >= 0.0)) throw ConfigError("field " + a.name("w") + " must be >= 0");
            atoms.push_back(AtomPenalty::abs_weight(w, eta[k], r));
        } else if (kind == "box") {
            const double lo = a.number("a");
            const double hi = a.number("b");
            if (!(lo <= 0.0 && 0.0 <= hi)) throw ConfigError("field " + a.path() + " needs a <= 0 <= b");
            atoms.push_back(AtomPenalty::box(lo, hi, eta[k], r));
        } else if (kind == "zero") {
            atoms.push_back(AtomPenalty::zero(eta[k], r));
        } else {
            throw ConfigError("field " + a.name("kind") + " must be one of abs, box, zero");
        }
        a.finish();
    }
    f.finish();
    return Regularizer(std::move(atoms), r);
}

inline Loss build_loss(Fields f) {
    const std::string kind = f.text("kind");
    std::optional<double> yb;
    if (const Json* v = f.maybe("y_bound")) {
        if (!v->is_number() || !(v->get<double>() >= 0.0)) throw ConfigError("field " + f.name("y_bound") + " must be >= 0");
        yb = v->get<double>();
    }
    std::optional<Loss> loss;
    if (kind == "power") {
        const double p = f.number_or("p", 2.0);
        if (!(p >= 1.0)) throw ConfigError("field " + f.name("p") + " must be >= 1");
        loss = Loss::power(p, yb);
    } else if (kind == "hinge") {
        loss = Loss::hinge(yb);
    } else if (kind == "logistic") {
        loss = Loss::logistic(yb);
    } else {
        throw ConfigError("field " + f.name("kind") + " must be one of power, hinge, logistic");
    }
    f.finish();
    return *loss;
}

inline SolverOptions build_solver(Fields f) {
    SolverOptions o;
    o.tol = f.number_or("tol", o.tol);
    if (!(o.tol > 0.0)) throw ConfigError("field " + f.name("tol") + " must be > 0");
    o.max_iter = f.count_or("max_iter", o.max_iter);
    if (o.max_iter == 0) throw ConfigError("field " + f.name("max_iter") + " must be >= 1");
    if (f.has("method")) {
        const std::string m = f.text("method");
        if (m == "auto") {
            o.method = SolverMethod::automatic;
        } else if (m == "fista") {
            o.method = SolverMethod::accelerated;
        } else if (m == "prox_grad") {
            o.method = SolverMethod::proximal_gradient;
        } else if (m == "subgradient") {
            o.method = SolverMethod::subgradient;
        } else {
            throw ConfigError("field " + f.name("method") + " must be one of auto, fista, prox_grad, subgradient");
        }
    }
    f.finish();
    return o;
}

inline std::vector<Observation> build_sample(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError("field " + path + " must be a non-empty array of [x, y] pairs");
    std::vector<Observation> s;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Json& e = j[i];
        const std::string at = path + "[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw ConfigError("field " + at + " must be an [x, y] pair of numbers");
        }
        const double x = e[0].get<double>();
        if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("field " + at + " has x outside [0,1]");
        s.push_back({x, e[1].get<double>()});
    }
    return s;
}

}  // namespace lrerm
