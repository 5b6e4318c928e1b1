#include "qnet/json_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace qnet::json {

namespace {

using nlohmann::json;

json parse_doc(const std::string& text, const char* schema) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail_validation(std::string(schema) + ": malformed JSON: " + e.what());
    }
    if (!j.is_object()) fail_validation(std::string(schema) + ": document must be an object");
    if (j.contains("schema") && j["schema"] != schema)
        fail_validation(std::string("expected schema ") + schema + ", got " + j["schema"].dump());
    return j;
}

template <class T>
T get(const json& j, const char* key, const char* schema) {
    if (!j.contains(key)) fail_validation(std::string(schema) + ": missing member '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail_validation(std::string(schema) + ": bad member '" + key + "': " + e.what());
    }
}

json row_major(const Mat& m) {
    std::vector<double> v;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) v.push_back(m(i, k));
    return v;
}

Mat from_row_major(const std::vector<double>& v, size_t n, const char* schema) {
    if (v.size() != n * n) fail_validation(std::string(schema) + ": matrix needs " + std::to_string(n * n) + " entries");
    Mat m(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k) m(i, k) = v[i * n + k];
    return m;
}

std::string out(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string dump(const RationalImpedance& z) {
    json j;
    j["schema"] = "rational_impedance.v1";
    j["ports"] = z.ports();
    j["port_names"] = z.port_names;
    j["dc_residue"] = row_major(z.dc_residue);
    j["modes"] = json::array();
    for (const auto& m : z.modes)
        j["modes"].push_back({{"omega_rad_s", m.omega}, {"r_row", std::vector<double>(m.r.data(), m.r.data() + m.r.size())}});
    return out(j);
}

RationalImpedance parse_rational(const std::string& text) {
    const char* s = "rational_impedance.v1";
    const json j = parse_doc(text, s);
    RationalImpedance z;
    const auto n = get<size_t>(j, "ports", s);
    z.port_names = get<std::vector<std::string>>(j, "port_names", s);
    z.dc_residue = from_row_major(get<std::vector<double>>(j, "dc_residue", s), n, s);
    for (const auto& m : get<json>(j, "modes", s)) {
        const auto r = get<std::vector<double>>(m, "r_row", s);
        if (r.size() != n) fail_validation(std::string(s) + ": r_row length must equal ports");
        z.modes.push_back({get<double>(m, "omega_rad_s", s), Eigen::Map<const Vec>(r.data(), static_cast<Eigen::Index>(n))});
    }
    z.validate();
    return z;
}

std::string dump(const MaxwellCapacitance& c) {
    json j;
    j["schema"] = "maxwell.v1";
    j["names"] = c.names;
    j["matrix"] = row_major(c.matrix);
    return out(j);
}

MaxwellCapacitance parse_maxwell(const std::string& text) {
    const char* s = "maxwell.v1";
    const json j = parse_doc(text, s);
    auto names = get<std::vector<std::string>>(j, "names", s);
    Mat m = from_row_major(get<std::vector<double>>(j, "matrix", s), names.size(), s);
    return make_maxwell(m, names);
}

std::string dump(const CLCascade& c) {
    json j;
    j["schema"] = "cl_cascade.v1";
    j["ports"] = c.port_names();
    j["resonators"] = c.resonator_names();
    j["maxwell"] = row_major(c.capacitance.matrix);
    j["inductors_h"] = std::vector<double>(c.shunt_inductors.data(), c.shunt_inductors.data() + c.shunt_inductors.size());
    return out(j);
}

CLCascade parse_cascade(const std::string& text) {
    const char* s = "cl_cascade.v1";
    const json j = parse_doc(text, s);
    auto ports = get<std::vector<std::string>>(j, "ports", s);
    auto res = get<std::vector<std::string>>(j, "resonators", s);
    auto ind = get<std::vector<double>>(j, "inductors_h", s);
    if (ind.size() != res.size()) fail_validation(std::string(s) + ": one inductor per resonator required");
    std::vector<std::string> names = ports;
    names.insert(names.end(), res.begin(), res.end());
    Mat m = from_row_major(get<std::vector<double>>(j, "maxwell", s), names.size(), s);
    return make_cascade(m, static_cast<int>(ports.size()), Eigen::Map<const Vec>(ind.data(), static_cast<Eigen::Index>(ind.size())), names);
}

std::string dump(const TwoPortChain& c) {
    json j;
    j["schema"] = "chain.v1";
    j["elements"] = json::array();
    for (const auto& e : c.elements) {
        json x;
        switch (e.type) {
            case ChainElement::Type::series_capacitor:
                x["type"] = "series_capacitor";
                x["C"] = *e.C;
                break;
            case ChainElement::Type::shunt_branch:
                x["type"] = "shunt";
                if (e.C) x["C"] = *e.C;
                if (e.L) x["L"] = *e.L;
                if (e.R) x["R"] = *e.R;
                break;
            case ChainElement::Type::tline:
                x["type"] = "tline";
                x["L_per_m"] = e.L_per_m;
                x["C_per_m"] = e.C_per_m;
                x["length"] = e.length;
                if (e.z0 > 0) x["z0"] = e.z0;
                break;
        }
        j["elements"].push_back(x);
    }
    return out(j);
}

TwoPortChain parse_chain(const std::string& text) {
    const char* s = "chain.v1";
    const json j = parse_doc(text, s);
    TwoPortChain c;
    for (const auto& x : get<json>(j, "elements", s)) {
        const auto type = get<std::string>(x, "type", s);
        auto opt = [&](const char* k) -> std::optional<double> {
            if (!x.contains(k)) return std::nullopt;
            return get<double>(x, k, s);
        };
        if (type == "series_capacitor") c.elements.push_back(ChainElement::series_capacitor(get<double>(x, "C", s)));
        else if (type == "shunt") c.elements.push_back(ChainElement::shunt(opt("C"), opt("L"), opt("R")));
        else if (type == "tline")
            c.elements.push_back(ChainElement::line(get<double>(x, "L_per_m", s), get<double>(x, "C_per_m", s),
                                                    get<double>(x, "length", s), opt("z0").value_or(0.0)));
        else fail_validation(std::string(s) + ": unknown element type '" + type + "'");
    }
    c.validate();
    return c;
}

std::string dump(const TransmonSpec& t) {
    json j;
    j["schema"] = "transmon_spec.v1";
    j["junctions"] = json::array();
    for (const auto& p : t.junctions) j["junctions"].push_back({{"port", p.port}, {"E_J", p.E_J}});
    j["couplers"] = t.couplers;
    j["open_ports"] = t.open_ports;
    return out(j);
}

TransmonSpec parse_transmon_spec(const std::string& text) {
    const char* s = "transmon_spec.v1";
    const json j = parse_doc(text, s);
    TransmonSpec t;
    for (const auto& x : get<json>(j, "junctions", s)) {
        JunctionPort p;
        p.port = get<std::string>(x, "port", s);
        if (x.contains("E_J")) p.E_J = get<double>(x, "E_J", s);
        else if (x.contains("L_J")) p.E_J = ej_from_inductance(get<double>(x, "L_J", s));
        else fail_validation(std::string(s) + ": junction " + p.port + " needs E_J or L_J");
        t.junctions.push_back(p);
    }
    if (j.contains("couplers")) t.couplers = get<std::vector<std::string>>(j, "couplers", s);
    if (j.contains("open_ports")) t.open_ports = get<std::vector<std::string>>(j, "open_ports", s);
    t.validate();
    return t;
}

std::string dump(const PlanFile& p) {
    json j;
    j["schema"] = "connection_plan.v1";
    j["networks"] = json::array();
    for (size_t i = 0; i < p.plan.networks.size(); ++i)
        j["networks"].push_back({{"id", p.plan.networks[i]}, {"path", i < p.paths.size() ? p.paths[i] : ""}});
    j["joins"] = json::array();
    for (const auto& [a, b] : p.plan.joins) j["joins"].push_back({a, b});
    j["leave_open"] = p.plan.leave_open;
    return out(j);
}

PlanFile parse_plan(const std::string& text) {
    const char* s = "connection_plan.v1";
    const json j = parse_doc(text, s);
    PlanFile p;
    for (const auto& n : get<json>(j, "networks", s)) {
        p.plan.networks.push_back(get<std::string>(n, "id", s));
        p.paths.push_back(n.contains("path") ? get<std::string>(n, "path", s) : std::string());
    }
    for (const auto& jn : get<json>(j, "joins", s)) {
        if (!jn.is_array() || jn.size() != 2) fail_validation(std::string(s) + ": each join is a pair of port names");
        p.plan.joins.emplace_back(jn[0].get<std::string>(), jn[1].get<std::string>());
    }
    if (j.contains("leave_open")) p.plan.leave_open = get<std::vector<std::string>>(j, "leave_open", s);
    return p;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_validation("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream o(path, std::ios::binary);
    if (!o) fail_validation("cannot write " + path);
    o << text;
}

}  // namespace qnet::json
