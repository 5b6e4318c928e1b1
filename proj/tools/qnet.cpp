#include "cli_util.hpp"

#include "qnet/decay.hpp"
#include "qnet/distributed.hpp"
#include "qnet/fixtures.hpp"
#include "qnet/interconnect.hpp"
#include "qnet/json_io.hpp"
#include "qnet/qham.hpp"
#include "qnet/synthesis.hpp"
#include "qnet/touchstone.hpp"
#include "qnet/vfit.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <random>

namespace {

using namespace qnet;
using cli::format_double;
constexpr double two_pi = 2.0 * std::numbers::pi;

struct Globals {
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 0;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header;  // provenance lines, emitted as comments in CSV

    void add(std::vector<std::string> r) { rows.push_back(std::move(r)); }

    std::string render(const std::string& fmt) const {
        if (fmt == "json") {
            nlohmann::ordered_json j;
            j["inputs"] = header;
            j["rows"] = nlohmann::ordered_json::array();
            for (const auto& r : rows) {
                nlohmann::ordered_json o;
                for (size_t c = 0; c < columns.size(); ++c) {
                    char* end = nullptr;
                    const double v = std::strtod(r[c].c_str(), &end);
                    if (!r[c].empty() && end && *end == '\0') o[columns[c]] = v;
                    else o[columns[c]] = r[c];
                }
                j["rows"].push_back(o);
            }
            return j.dump(2) + "\n";
        }
        std::string s;
        for (const auto& h : header) s += "# " + h + "\n";
        for (size_t c = 0; c < columns.size(); ++c) s += (c ? "," : "") + columns[c];
        s += "\n";
        for (const auto& r : rows) {
            for (size_t c = 0; c < r.size(); ++c) s += (c ? "," : "") + r[c];
            s += "\n";
        }
        return s;
    }
};

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty() || g.out == "-") std::cout << text;
    else json::write_file(g.out, text);
}

std::string provenance(const std::string& label, const std::string& path) {
    return label + " " + std::filesystem::path(path).filename().string() + " fnv1a64=" +
           cli::hex64(cli::fnv1a64(json::read_file(path)));
}

// A network given either as a rational model or as a cascade.
struct NetworkInput {
    std::string model, cascade;

    void add(CLI::App* sc) {
        sc->add_option("--model", model, "rational_impedance.v1 JSON");
        sc->add_option("--cascade", cascade, "cl_cascade.v1 JSON");
    }
    void check() const {
        if (model.empty() == cascade.empty()) fail_validation("give exactly one of --model or --cascade");
    }
    std::string path() const { return model.empty() ? cascade : model; }
};

TransmonSpec load_spec(const std::string& path, const NetworkInput& in, const std::vector<std::string>& qubit_targets) {
    TransmonSpec spec = json::parse_transmon_spec(json::read_file(path));
    const auto targets = cli::parse_assignments(qubit_targets);
    if (targets.empty()) return spec;
    std::map<std::string, double> omega;
    for (const auto& [k, f] : targets) omega[k] = two_pi * f;
    const auto ec = in.model.empty()
                        ? junction_charging_energies(json::parse_cascade(json::read_file(in.cascade)), spec)
                        : junction_charging_energies(json::parse_rational(json::read_file(in.model)), spec);
    return tune_junctions(ec, spec, omega);
}

HamiltonianParams load_params(const NetworkInput& in, const TransmonSpec& spec) {
    if (!in.model.empty()) return hamiltonian_params(json::parse_rational(json::read_file(in.model)), spec);
    return hamiltonian_params(json::parse_cascade(json::read_file(in.cascade)), spec);
}

std::string hz(double rad) { return format_double(rad / two_pi); }

// ---------------------------------------------------------------- commands

int cmd_sweep(const Globals& g, const std::string& chain_path, const std::string& band, int points,
              const std::string& param, const std::string& ts_format) {
    const TwoPortChain chain = json::parse_chain(json::read_file(chain_path));
    const cli::Range r = cli::parse_range(band, false);
    if (points < 2) fail_validation("--points must be at least 2");
    SampledNetwork z = sweep_chain(chain, linspace(r.lo, r.hi, points));
    SampledNetwork net = param == "Z" ? z : z_to_s(z, 50.0);
    TouchstoneFormat f = ts_format == "MA" ? TouchstoneFormat::MA
                         : ts_format == "DB" ? TouchstoneFormat::DB
                                             : TouchstoneFormat::RI;
    const std::string text = format_touchstone(net, f, "HZ", {"qnet sweep", provenance("chain", chain_path)});
    emit(g, text);
    return 0;
}

int cmd_fit(const Globals& g, const std::string& in_path, const std::string& band, FitConfig cfg,
            const std::string& weights, const std::string& report_path) {
    const cli::Range r = cli::parse_range(band, false);
    cfg.band_lo_hz = r.lo;
    cfg.band_hi_hz = r.hi;
    if (weights == "inv-mag") cfg.weight_mode = WeightMode::inverse_magnitude;
    else if (weights != "uniform") fail_validation("--weights must be uniform or inv-mag");
    const TouchstoneData td = read_touchstone(in_path);
    FitReport rep;
    const RationalImpedance z = fit(td.network, cfg, &rep);
    emit(g, json::dump(z));
    if (!report_path.empty()) {
        nlohmann::ordered_json j;
        j["input"] = provenance("touchstone", in_path);
        j["iterations"] = rep.iterations;
        j["converged"] = rep.converged;
        j["rms"] = {{"vector_fit", rep.rms_vf}, {"lossless", rep.rms_lossless}, {"final", rep.rms_final}};
        j["logmag_rms_final"] = rep.logmag_rms_final;
        j["refined"] = rep.refined;
        j["refine_improved"] = rep.refine_improved;
        j["vf_poles"] = nlohmann::ordered_json::array();
        for (auto p : rep.vf_poles) j["vf_poles"].push_back({{"re", p.real()}, {"im", p.imag()}});
        j["modes_hz"] = nlohmann::ordered_json::array();
        for (const auto& m : z.modes) j["modes_hz"].push_back(m.omega / two_pi);
        std::vector<std::string> log = rep.log;
        if (rep.rms_final > 1e-2)
            log.push_back("warning: high fit residual (relative RMS " + format_double(rep.rms_final) +
                          "); more pole pairs may be needed");
        j["log"] = log;
        json::write_file(report_path, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_synth(const Globals& g, const std::string& model) {
    emit(g, json::dump(synthesize_cascade(json::parse_rational(json::read_file(model)))));
    return 0;
}

int cmd_analyze(const Globals& g, const std::string& cascade, const std::string& random_shape) {
    CLCascade c;
    if (!random_shape.empty()) {
        const auto comma = random_shape.find(',');
        if (comma == std::string::npos) fail_validation("--random expects PORTS,MODES");
        std::mt19937_64 rng(g.seed);
        c = fixtures::random_cascade(rng, std::stoi(random_shape.substr(0, comma)),
                                     std::stoi(random_shape.substr(comma + 1)));
    } else {
        c = json::parse_cascade(json::read_file(cascade));
    }
    emit(g, json::dump(cascade_to_rational(c).first));
    return 0;
}

int cmd_connect(const Globals& g, const std::string& plan_path, const std::string& map_path) {
    const json::PlanFile pf = json::parse_plan(json::read_file(plan_path));
    const auto base = std::filesystem::path(plan_path).parent_path();
    std::vector<RationalImpedance> zs;
    for (const auto& p : pf.paths) {
        if (p.empty()) fail_validation("connection plan: every network needs a path");
        zs.push_back(json::parse_rational(json::read_file((base / p).string())));
    }
    const RationalImpedance z = connect_rational(zs, pf.plan);
    emit(g, json::dump(z));
    if (!map_path.empty()) {
        Table t;
        t.columns = {"port", "index"};
        for (size_t i = 0; i < z.port_names.size(); ++i) t.add({z.port_names[i], std::to_string(i)});
        json::write_file(map_path, t.render("csv"));
    }
    return 0;
}

int cmd_ham(const Globals& g, const NetworkInput& in, const std::string& spec_path,
            const std::vector<std::string>& qubits) {
    in.check();
    const TransmonSpec spec = load_spec(spec_path, in, qubits);
    const HamiltonianParams hp = load_params(in, spec);
    Table t;
    t.header = {provenance("network", in.path()), provenance("spec", spec_path)};
    t.columns = {"quantity", "a", "b", "rad_s", "hz"};
    auto row = [&](const std::string& q, const std::string& a, const std::string& b, double v) {
        t.add({q, a, b, format_double(v), hz(v)});
    };
    for (int i = 0; i < hp.n_qubits(); ++i) {
        row("omega_J", hp.qubit_names[i], "", hp.omega_J(i));
        row("beta_J", hp.qubit_names[i], "", hp.beta_J(i));
    }
    for (int k = 0; k < hp.n_modes(); ++k) row("omega_R", hp.mode_names[k], "", hp.omega_R(k));
    for (int i = 0; i < hp.n_qubits(); ++i)
        for (int j = i + 1; j < hp.n_qubits(); ++j) row("g", hp.qubit_names[i], hp.qubit_names[j], hp.g_qq(i, j));
    for (int i = 0; i < hp.n_qubits(); ++i)
        for (int k = 0; k < hp.n_modes(); ++k) row("g", hp.qubit_names[i], hp.mode_names[k], hp.g_qr(i, k));
    for (int k = 0; k < hp.n_modes(); ++k)
        for (int l = k + 1; l < hp.n_modes(); ++l)
            if (hp.g_rr(k, l) != 0.0) row("g", hp.mode_names[k], hp.mode_names[l], hp.g_rr(k, l));
    for (int i = 0; i < hp.n_qubits(); ++i)
        t.add({"E_J", hp.qubit_names[i], "", format_double(hp.E_J(i)), ""});
    emit(g, t.render(g.format));
    return 0;
}

int cmd_eff(const Globals& g, const NetworkInput& in, const std::string& spec_path, const std::vector<std::string>& qubits,
            std::vector<std::string> couplers) {
    in.check();
    const TransmonSpec spec = load_spec(spec_path, in, qubits);
    if (couplers.empty()) couplers = spec.couplers;
    const HamiltonianParams hp = load_params(in, spec);
    const EffectiveParams ep = effective_params(hp, couplers);
    Table t;
    t.header = {provenance("network", in.path()), provenance("spec", spec_path),
                "max |g/Delta| = " + format_double(ep.max_g_over_delta)};
    t.columns = {"quantity", "a", "b", "rad_s", "hz"};
    auto row = [&](const std::string& q, const std::string& a, const std::string& b, double v) {
        t.add({q, a, b, format_double(v), hz(v)});
    };
    const auto& qn = ep.qubit_names;
    const auto& mn = ep.mode_names;
    for (size_t i = 0; i < qn.size(); ++i) {
        row("omega_J_eff", qn[i], "", ep.omega_J_eff(i));
        row("beta_eff", qn[i], "", ep.beta_eff(i));
    }
    for (size_t k = 0; k < mn.size(); ++k) {
        row("omega_R_eff", mn[k], "", ep.omega_R_eff(k));
        row("alpha_eff", mn[k], "", ep.alpha_eff(k));
    }
    for (size_t i = 0; i < qn.size(); ++i)
        for (size_t j = i + 1; j < qn.size(); ++j) {
            row("g_eff", qn[i], qn[j], ep.g_eff_qq(i, j));
            row("cross_kerr", qn[i], qn[j], ep.cross_kerr(i, j));
        }
    for (size_t k = 0; k < mn.size(); ++k)
        for (size_t l = k + 1; l < mn.size(); ++l) row("g_eff", mn[k], mn[l], ep.g_eff_rr(k, l));
    for (size_t i = 0; i < qn.size(); ++i)
        for (size_t k = 0; k < mn.size(); ++k) row("chi", qn[i], mn[k], ep.chi(i, k));
    emit(g, t.render(g.format));
    return 0;
}

int cmd_decay(const Globals& g, const NetworkInput& in, const std::string& spec_path, const std::vector<std::string>& res,
              const std::string& sweep) {
    in.check();
    const TransmonSpec spec = json::parse_transmon_spec(json::read_file(spec_path));
    LossSpec loss;
    for (const auto& j : spec.junctions) loss.junction_ports.push_back({j.port, lj_from_ej(j.E_J)});
    for (const auto& [p, r] : cli::parse_assignments(res)) loss.external_ports.push_back({p, r});
    const CLCascade c = in.model.empty() ? json::parse_cascade(json::read_file(in.cascade))
                                         : synthesize_cascade(json::parse_rational(json::read_file(in.model)));

    std::string port;
    std::vector<double> values;
    if (!sweep.empty()) {
        const auto eq = sweep.find('=');
        if (eq == std::string::npos) fail_validation("--sweep expects PORT=lo:hi:n");
        port = sweep.substr(0, eq);
        // LJ<k> names the k-th junction of the spec
        if (port.size() > 2 && port.rfind("LJ", 0) == 0 && std::isdigit(static_cast<unsigned char>(port[2]))) {
            const size_t k = std::stoul(port.substr(2));
            if (k < 1 || k > spec.junctions.size()) fail_validation("--sweep: no junction " + port);
            port = spec.junctions[k - 1].port;
        }
        const cli::Range r = cli::parse_range(sweep.substr(eq + 1), true);
        values = linspace(r.lo, r.hi, r.points);
    } else {
        if (loss.junction_ports.empty()) fail_validation("decay: spec has no junctions");
        port = loss.junction_ports.front().port;
        values = {loss.inductance(port)};
    }
    const auto sets = sweep_junction_inductance(c, loss, port, values);
    Table t;
    t.header = {provenance("network", in.path()), provenance("spec", spec_path), "swept junction " + port};
    t.columns = {"L_H", "mode_id", "freq_hz", "kappa_per_s", "T1_s", "attribution"};
    for (size_t v = 0; v < sets.size(); ++v) {
        const auto& s = sets[v];
        for (size_t p = 0; p < s.poles.size(); p += 2)
            t.add({format_double(values[v]), std::to_string(s.mode_id[p]), format_double(s.omega[p] / two_pi),
                   format_double(s.kappa[p]), format_double(s.kappa[p] > 0 ? 1.0 / s.kappa[p] : INFINITY),
                   s.attribution[p]});
    }
    emit(g, t.render(g.format));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qnet: impedance fitting, synthesis, interconnection and transmon-network analysis"};
    app.require_subcommand(1);
    app.fallthrough();  // global options are accepted after the subcommand too
    Globals g;
    app.add_option("--out", g.out, "output file (default stdout)");
    app.add_option("--format", g.format, "table format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", g.seed, "seed for randomized fixtures");

    std::string chain, band, param = "S", ts_format = "RI";
    int points = 2000;
    auto* sweep = app.add_subcommand("sweep", "sweep a two-port chain to Touchstone");
    sweep->add_option("--chain", chain, "chain.v1 JSON")->required();
    sweep->add_option("--band", band, "lo:hi, e.g. 1GHz:22.5GHz")->required();
    sweep->add_option("--points", points, "number of frequency points");
    sweep->add_option("--param", param, "S or Z")->check(CLI::IsMember({"S", "Z"}));
    sweep->add_option("--ts-format", ts_format, "RI, MA or DB")->check(CLI::IsMember({"RI", "MA", "DB"}));

    std::string fit_in, weights = "uniform", report;
    FitConfig cfg;
    auto* fitc = app.add_subcommand("fit", "fit a lossless rational model to Touchstone data");
    fitc->add_option("--in", fit_in, "Touchstone file")->required();
    fitc->add_option("--band", band, "lo:hi")->required();
    fitc->add_option("--pairs", cfg.n_pole_pairs, "pole pairs");
    fitc->add_option("--max-iter", cfg.max_iterations, "relocation iterations");
    fitc->add_option("--refine-evals", cfg.refine_max_evals, "refinement evaluations (0 disables)");
    fitc->add_option("--weights", weights, "uniform or inv-mag");
    fitc->add_flag("--relaxed", cfg.relaxed, "relaxed pole relocation");
    fitc->add_flag("--allow-degenerate-hf-pole", cfg.allow_degenerate_hf_pole, "extra degenerate pole in refinement");
    fitc->add_option("--report", report, "fit report JSON");

    std::string model;
    auto* synth = app.add_subcommand("synth", "rational model to CL cascade");
    synth->add_option("--model", model, "rational_impedance.v1 JSON")->required();

    std::string cascade, random_shape;
    auto* analyze = app.add_subcommand("analyze", "CL cascade to rational model");
    analyze->add_option("--cascade", cascade, "cl_cascade.v1 JSON");
    analyze->add_option("--random", random_shape, "PORTS,MODES random cascade from --seed");

    std::string plan, map;
    auto* connect = app.add_subcommand("connect", "interconnect rational models");
    connect->add_option("--plan", plan, "connection_plan.v1 JSON")->required();
    connect->add_option("--map", map, "port-name map CSV");

    NetworkInput net;
    std::string spec;
    std::vector<std::string> qubits, couplers, resistors;
    auto* ham = app.add_subcommand("ham", "Hamiltonian parameters");
    net.add(ham);
    ham->add_option("--spec", spec, "transmon_spec.v1 JSON")->required();
    ham->add_option("--qubit", qubits, "PORT=frequency target, e.g. Q1=4GHz");

    auto* eff = app.add_subcommand("eff", "effective parameters");
    net.add(eff);
    eff->add_option("--spec", spec, "transmon_spec.v1 JSON")->required();
    eff->add_option("--qubit", qubits, "PORT=frequency target");
    eff->add_option("--coupler", couplers, "junction ports treated as couplers");

    std::string sweep_spec;
    auto* decay = app.add_subcommand("decay", "lossy poles and relaxation times");
    net.add(decay);
    decay->add_option("--junctions", spec, "transmon_spec.v1 JSON with E_J or L_J")->required();
    decay->add_option("--resistors", resistors, "PORT=ohms list")->required();
    decay->add_option("--sweep", sweep_spec, "PORT=lo:hi:n or LJ<k>=lo:hi:n");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sweep) return cmd_sweep(g, chain, band, points, param, ts_format);
        if (*fitc) return cmd_fit(g, fit_in, band, cfg, weights, report);
        if (*synth) return cmd_synth(g, model);
        if (*analyze) return cmd_analyze(g, cascade, random_shape);
        if (*connect) return cmd_connect(g, plan, map);
        if (*ham) return cmd_ham(g, net, spec, qubits);
        if (*eff) return cmd_eff(g, net, spec, qubits, couplers);
        if (*decay) return cmd_decay(g, net, spec, resistors, sweep_spec);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::validation ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
