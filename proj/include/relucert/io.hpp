#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relucert/errors.hpp"
#include "relucert/families.hpp"
#include "relucert/network.hpp"
#include "relucert/norms.hpp"
#include "relucert/reparam.hpp"

namespace relucert {

// Minimal ordered JSON value with shortest round-trip number formatting
// (std::to_chars), so identical inputs always serialize to identical bytes.
class JsonValue {
public:
    enum class Kind { Null, Bool, Int, Real, Str, Arr, Obj };

    JsonValue() : kind_(Kind::Null) {}
    static JsonValue boolean(bool b) { JsonValue v; v.kind_ = Kind::Bool; v.int_ = b; return v; }
    static JsonValue integer(long long i) { JsonValue v; v.kind_ = Kind::Int; v.int_ = i; return v; }
    static JsonValue real(double d) { JsonValue v; v.kind_ = Kind::Real; v.real_ = d; return v; }
    static JsonValue str(std::string s) { JsonValue v; v.kind_ = Kind::Str; v.str_ = std::move(s); return v; }
    static JsonValue array() { JsonValue v; v.kind_ = Kind::Arr; return v; }
    static JsonValue object() { JsonValue v; v.kind_ = Kind::Obj; return v; }

    static JsonValue vec(const Vec& xs) {
        JsonValue v = array();
        for (double x : xs) v.push(real(x));
        return v;
    }

    void push(JsonValue v) { items_.push_back(std::move(v)); }
    void set(const std::string& key, JsonValue v) {
        keys_.push_back(key);
        items_.push_back(std::move(v));
    }

    std::string dump() const {
        std::string out;
        write(out);
        return out;
    }

private:
    static void write_number(std::string& out, double d) {
        char buf[40];
        auto res = std::to_chars(buf, buf + sizeof(buf), d);
        out.append(buf, res.ptr);
    }

    static void write_string(std::string& out, const std::string& s) {
        out.push_back('"');
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                default: out.push_back(c);
            }
        }
        out.push_back('"');
    }

    void write(std::string& out) const {
        switch (kind_) {
            case Kind::Null: out += "null"; break;
            case Kind::Bool: out += int_ ? "true" : "false"; break;
            case Kind::Int: out += std::to_string(int_); break;
            case Kind::Real: write_number(out, real_); break;
            case Kind::Str: write_string(out, str_); break;
            case Kind::Arr:
                out.push_back('[');
                for (std::size_t k = 0; k < items_.size(); ++k) {
                    if (k) out.push_back(',');
                    items_[k].write(out);
                }
                out.push_back(']');
                break;
            case Kind::Obj:
                out.push_back('{');
                for (std::size_t k = 0; k < items_.size(); ++k) {
                    if (k) out.push_back(',');
                    write_string(out, keys_[k]);
                    out.push_back(':');
                    items_[k].write(out);
                }
                out.push_back('}');
                break;
        }
    }

    Kind kind_;
    long long int_ = 0;
    double real_ = 0.0;
    std::string str_;
    std::vector<std::string> keys_;
    std::vector<JsonValue> items_;
};

using nlohmann::json;

inline Vec json_to_vec(const json& j) {
    if (!j.is_array()) throw ValidationError("expected a numeric array");
    Vec out;
    for (const auto& x : j) {
        if (!x.is_number()) throw ValidationError("expected a numeric array");
        out.push_back(x.get<double>());
    }
    return out;
}

// Accepts both network file forms: structured {d,h,w,b,v,c} and flat
// {d,h,theta}.
inline ShallowNet read_network(const json& j) {
    if (!j.is_object()) throw ValidationError("network: expected a JSON object");
    if (!j.contains("d") || !j.contains("h")) throw ValidationError("network: missing d or h");
    int d = j.at("d").get<int>();
    int h = j.at("h").get<int>();
    if (j.contains("theta")) return unflatten(json_to_vec(j.at("theta")), d, h);
    for (const char* key : {"w", "b", "v", "c"})
        if (!j.contains(key)) throw ValidationError(std::string("network: missing field ") + key);
    const json& jw = j.at("w");
    if (!jw.is_array()) throw ValidationError("network: w must be an array of rows");
    std::vector<Vec> w;
    for (const auto& row : jw) w.push_back(json_to_vec(row));
    return ShallowNet::create(d, h, std::move(w), json_to_vec(j.at("b")), json_to_vec(j.at("v")),
                              j.at("c").get<double>());
}

inline ShallowNet read_network_string(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("network: malformed JSON");
    return read_network(j);
}

// Reference-point file: {"points": [[...], ...]} or a bare array of points.
inline std::vector<Vec> read_points_string(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("points: malformed JSON");
    const json& arr = j.is_object() && j.contains("points") ? j.at("points") : j;
    if (!arr.is_array()) throw ValidationError("points: expected an array of points");
    std::vector<Vec> out;
    for (const auto& p : arr) out.push_back(json_to_vec(p));
    if (out.empty()) throw ValidationError("points: empty point list");
    return out;
}

inline JsonValue net_to_json(const ShallowNet& net) {
    JsonValue o = JsonValue::object();
    o.set("d", JsonValue::integer(net.input_dim));
    o.set("h", JsonValue::integer(net.hidden_dim));
    JsonValue w = JsonValue::array();
    for (const Vec& row : net.hidden_weights) w.push(JsonValue::vec(row));
    o.set("w", std::move(w));
    o.set("b", JsonValue::vec(net.hidden_biases));
    o.set("v", JsonValue::vec(net.output_weights));
    o.set("c", JsonValue::real(net.output_bias));
    return o;
}

inline JsonValue net_to_flat_json(const ShallowNet& net) {
    JsonValue o = JsonValue::object();
    o.set("d", JsonValue::integer(net.input_dim));
    o.set("h", JsonValue::integer(net.hidden_dim));
    o.set("theta", JsonValue::vec(flatten(net)));
    return o;
}

inline JsonValue box_to_json(const BoxDomain& box) {
    JsonValue o = JsonValue::object();
    o.set("a", JsonValue::real(box.lo));
    o.set("b", JsonValue::real(box.hi));
    o.set("d", JsonValue::integer(box.dim));
    if (box.reference) {
        JsonValue pts = JsonValue::array();
        for (const Vec& p : *box.reference) pts.push(JsonValue::vec(p));
        o.set("A", std::move(pts));
    } else {
        o.set("A", JsonValue::str("box"));
    }
    return o;
}

inline JsonValue pattern_to_json(const ActivationPattern& pat) {
    JsonValue a = JsonValue::array();
    for (auto s : pat.signs) a.push(JsonValue::integer(s));
    return a;
}

inline JsonValue chamber_to_json(const Chamber& ch) {
    JsonValue o = JsonValue::object();
    o.set("pattern", pattern_to_json(ch.pattern));
    o.set("interior_point", JsonValue::vec(ch.interior_point));
    o.set("slack", JsonValue::real(ch.slack));
    o.set("gradient", JsonValue::vec(ch.gradient));
    o.set("offset", JsonValue::real(ch.offset));
    return o;
}

inline ActivationPattern read_pattern(const json& j) {
    ActivationPattern pat;
    for (const auto& s : j) pat.signs.push_back(static_cast<std::uint8_t>(s.get<int>()));
    return pat;
}

inline Chamber read_chamber(const json& j) {
    Chamber ch;
    ch.pattern = read_pattern(j.at("pattern"));
    ch.interior_point = json_to_vec(j.at("interior_point"));
    ch.slack = j.at("slack").get<double>();
    ch.gradient = json_to_vec(j.at("gradient"));
    ch.offset = j.at("offset").get<double>();
    return ch;
}

inline JsonValue norm_report_to_json(const NormReport& rep) {
    JsonValue o = JsonValue::object();
    o.set("lip_seminorm", JsonValue::real(rep.lip_seminorm));
    o.set("inf_abs", JsonValue::real(rep.inf_abs));
    o.set("argmin", JsonValue::vec(rep.argmin));
    o.set("lipnorm_A", JsonValue::real(rep.lipnorm_A));
    if (rep.holder) {
        JsonValue h = JsonValue::object();
        h.set("gamma", JsonValue::real(rep.holder->gamma));
        h.set("v", JsonValue::real(rep.holder->v));
        h.set("grid_n", JsonValue::integer(rep.holder->grid_n));
        h.set("n_pairs", JsonValue::integer(rep.holder->n_pairs));
        h.set("value", JsonValue::real(rep.holder->value));
        o.set("holder", std::move(h));
    }
    if (rep.sobolev) {
        JsonValue s = JsonValue::object();
        s.set("gamma", JsonValue::real(rep.sobolev->gamma));
        s.set("p", JsonValue::real(rep.sobolev->p));
        s.set("n_samples", JsonValue::integer(rep.sobolev->n_samples));
        s.set("seed", JsonValue::integer(static_cast<long long>(rep.sobolev->seed)));
        s.set("value", JsonValue::real(rep.sobolev->value));
        s.set("std_error", JsonValue::real(rep.sobolev->std_error));
        o.set("sobolev", std::move(s));
    }
    return o;
}

inline NormReport read_norm_report(const json& j) {
    NormReport rep;
    rep.lip_seminorm = j.at("lip_seminorm").get<double>();
    rep.inf_abs = j.at("inf_abs").get<double>();
    rep.argmin = json_to_vec(j.at("argmin"));
    rep.lipnorm_A = j.at("lipnorm_A").get<double>();
    if (j.contains("holder")) {
        HolderEstimate h;
        h.gamma = j.at("holder").at("gamma").get<double>();
        h.v = j.at("holder").at("v").get<double>();
        h.grid_n = j.at("holder").at("grid_n").get<int>();
        h.n_pairs = j.at("holder").at("n_pairs").get<long>();
        h.value = j.at("holder").at("value").get<double>();
        rep.holder = h;
    }
    if (j.contains("sobolev")) {
        SobolevEstimate s;
        s.gamma = j.at("sobolev").at("gamma").get<double>();
        s.p = j.at("sobolev").at("p").get<double>();
        s.n_samples = j.at("sobolev").at("n_samples").get<long>();
        s.seed = j.at("sobolev").at("seed").get<std::uint64_t>();
        s.value = j.at("sobolev").at("value").get<double>();
        s.std_error = j.at("sobolev").at("std_error").get<double>();
        rep.sobolev = s;
    }
    return rep;
}

inline JsonValue classification_to_json(const NeuronClassification& cls) {
    auto ints = [](const std::vector<int>& xs) {
        JsonValue a = JsonValue::array();
        for (int x : xs) a.push(JsonValue::integer(x));
        return a;
    };
    JsonValue o = JsonValue::object();
    o.set("A1", ints(cls.always_active));
    o.set("A2", ints(cls.kink));
    o.set("A3", ints(cls.inactive));
    JsonValue gs = JsonValue::array();
    for (const KinkGroup& g : cls.groups) {
        JsonValue go = JsonValue::object();
        go.set("representative", JsonValue::integer(g.representative));
        go.set("members", ints(g.members));
        go.set("orientation", ints(g.orientation));
        go.set("side0", ints(g.side0));
        go.set("side1", ints(g.side1));
        gs.push(std::move(go));
    }
    o.set("groups", std::move(gs));
    return o;
}

inline JsonValue reparam_result_to_json(const ReparamResult& res) {
    JsonValue o = JsonValue::object();
    o.set("case", JsonValue::str(to_string(res.case_tag)));
    o.set("lip_seminorm", JsonValue::real(res.lip));
    o.set("inf_abs", JsonValue::real(res.inf_abs));
    o.set("z", JsonValue::vec(res.z));
    o.set("z_pattern", pattern_to_json(res.z_pattern));
    o.set("u", JsonValue::vec(res.u));
    o.set("unit_u", JsonValue::vec(res.unit_u));
    o.set("q", JsonValue::vec(res.q));
    o.set("classification", classification_to_json(res.groups));
    o.set("bound_rhs", JsonValue::real(res.bound_rhs));
    return o;
}

inline NeuronClassification read_classification(const json& j) {
    auto ints = [](const json& a) {
        std::vector<int> out;
        for (const auto& x : a) out.push_back(x.get<int>());
        return out;
    };
    NeuronClassification cls;
    cls.always_active = ints(j.at("A1"));
    cls.kink = ints(j.at("A2"));
    cls.inactive = ints(j.at("A3"));
    for (const auto& go : j.at("groups")) {
        KinkGroup g;
        g.representative = go.at("representative").get<int>();
        g.members = ints(go.at("members"));
        g.orientation = ints(go.at("orientation"));
        g.side0 = ints(go.at("side0"));
        g.side1 = ints(go.at("side1"));
        cls.groups.push_back(std::move(g));
    }
    return cls;
}

inline ReparamCase read_case_tag(const std::string& s) {
    if (s == "constant") return ReparamCase::ConstantL0;
    if (s == "affine-only") return ReparamCase::AffineOnly;
    if (s == "grouped") return ReparamCase::Grouped;
    if (s == "full-rescale") return ReparamCase::FullRescale;
    throw ValidationError("unknown reparameterization case: " + s);
}

// Reads back the construction trace (the output network itself travels in the
// theta/theta_flat documents alongside it).
inline ReparamResult read_reparam_result(const json& j) {
    ReparamResult res;
    res.case_tag = read_case_tag(j.at("case").get<std::string>());
    res.lip = j.at("lip_seminorm").get<double>();
    res.inf_abs = j.at("inf_abs").get<double>();
    res.z = json_to_vec(j.at("z"));
    res.z_pattern = read_pattern(j.at("z_pattern"));
    res.u = json_to_vec(j.at("u"));
    res.unit_u = json_to_vec(j.at("unit_u"));
    res.q = json_to_vec(j.at("q"));
    res.groups = read_classification(j.at("classification"));
    res.bound_rhs = j.at("bound_rhs").get<double>();
    return res;
}

inline JsonValue certificate_to_json(const Certificate& cert) {
    JsonValue o = JsonValue::object();
    o.set("lipnorm_A", JsonValue::real(cert.lipnorm_A));
    o.set("maxnorm_out", JsonValue::real(cert.maxnorm_out));
    o.set("eucnorm_out", JsonValue::real(cert.eucnorm_out));
    o.set("const_K", JsonValue::real(cert.const_K));
    o.set("const_c", JsonValue::real(cert.const_c));
    o.set("const_C", JsonValue::real(cert.const_C));
    o.set("lhs", JsonValue::real(cert.lhs));
    o.set("middle", JsonValue::real(cert.middle));
    o.set("rhs", JsonValue::real(cert.rhs));
    o.set("pass_explicit", JsonValue::boolean(cert.pass_explicit));
    o.set("pass_combined_lower", JsonValue::boolean(cert.pass_combined_lower));
    o.set("pass_combined_upper", JsonValue::boolean(cert.pass_combined_upper));
    o.set("pass_weak_lower", JsonValue::boolean(cert.pass_weak_lower));
    o.set("pass_weak_upper", JsonValue::boolean(cert.pass_weak_upper));
    o.set("all_pass", JsonValue::boolean(cert.all_pass()));
    return o;
}

inline Certificate read_certificate(const json& j) {
    Certificate c;
    c.lipnorm_A = j.at("lipnorm_A").get<double>();
    c.maxnorm_out = j.at("maxnorm_out").get<double>();
    c.eucnorm_out = j.at("eucnorm_out").get<double>();
    c.const_K = j.at("const_K").get<double>();
    c.const_c = j.at("const_c").get<double>();
    c.const_C = j.at("const_C").get<double>();
    c.lhs = j.at("lhs").get<double>();
    c.middle = j.at("middle").get<double>();
    c.rhs = j.at("rhs").get<double>();
    c.pass_explicit = j.at("pass_explicit").get<bool>();
    c.pass_combined_lower = j.at("pass_combined_lower").get<bool>();
    c.pass_combined_upper = j.at("pass_combined_upper").get<bool>();
    c.pass_weak_lower = j.at("pass_weak_lower").get<bool>();
    c.pass_weak_upper = j.at("pass_weak_upper").get<bool>();
    return c;
}

inline JsonValue divergence_to_json(const std::vector<DivergenceRow>& rows,
                                    const std::vector<double>& exponents) {
    JsonValue arr = JsonValue::array();
    for (const DivergenceRow& r : rows) {
        JsonValue o = JsonValue::object();
        o.set("n", JsonValue::integer(r.n));
        o.set("lower_bound", JsonValue::real(r.lower_bound));
        o.set("norm", JsonValue::real(r.norm_value));
        if (r.holder_estimate) o.set("holder", JsonValue::real(*r.holder_estimate));
        if (r.sobolev_estimate) o.set("sobolev", JsonValue::real(*r.sobolev_estimate));
        JsonValue ratios = JsonValue::object();
        for (std::size_t k = 0; k < exponents.size(); ++k) {
            char buf[40];
            auto res = std::to_chars(buf, buf + sizeof(buf), exponents[k]);
            ratios.set(std::string(buf, res.ptr), JsonValue::real(r.ratios[k]));
        }
        o.set("ratios", std::move(ratios));
        arr.push(std::move(o));
    }
    return arr;
}

inline std::vector<DivergenceRow> read_divergence_rows(const json& j) {
    std::vector<DivergenceRow> rows;
    for (const auto& ro : j) {
        DivergenceRow r;
        r.n = ro.at("n").get<int>();
        r.lower_bound = ro.at("lower_bound").get<double>();
        r.norm_value = ro.at("norm").get<double>();
        if (ro.contains("holder")) r.holder_estimate = ro.at("holder").get<double>();
        if (ro.contains("sobolev")) r.sobolev_estimate = ro.at("sobolev").get<double>();
        for (const auto& [key, val] : ro.at("ratios").items()) {
            (void)key;
            r.ratios.push_back(val.get<double>());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::string divergence_to_csv(const std::vector<DivergenceRow>& rows,
                                     const std::vector<double>& exponents) {
    auto num = [](double d) {
        char buf[40];
        auto res = std::to_chars(buf, buf + sizeof(buf), d);
        return std::string(buf, res.ptr);
    };
    std::string out = "n,lower_bound,norm";
    bool spike = !rows.empty() && rows.front().holder_estimate.has_value();
    if (spike) out += ",holder,sobolev";
    for (double e : exponents) out += ",ratio@" + num(e);
    out.push_back('\n');
    for (const DivergenceRow& r : rows) {
        out += std::to_string(r.n) + "," + num(r.lower_bound) + "," + num(r.norm_value);
        if (spike) out += "," + num(r.holder_estimate.value_or(0.0)) + "," + num(r.sobolev_estimate.value_or(0.0));
        for (double x : r.ratios) out += "," + num(x);
        out.push_back('\n');
    }
    return out;
}

} // namespace relucert
