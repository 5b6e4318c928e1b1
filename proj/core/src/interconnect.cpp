#include "qnet/interconnect.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace qnet {

std::string joined_name(const std::string& a, const std::string& b) { return a + "⊕" + b; }

void ConnectionPlan::validate(const std::vector<std::string>& available) const {
    std::set<std::string> seen;
    auto require = [&](const std::string& p) {
        if (std::find(available.begin(), available.end(), p) == available.end()) {
            std::ostringstream os;
            os << "connection plan: unknown port '" << p << "'; candidates:";
            for (const auto& a : available) os << ' ' << a;
            fail_validation(os.str());
        }
    };
    for (const auto& [a, b] : joins) {
        if (a == b) fail_validation("connection plan: port '" + a + "' joined to itself");
        require(a);
        require(b);
        for (const auto& p : {a, b})
            if (!seen.insert(p).second) fail_validation("connection plan: port '" + p + "' appears in more than one join");
    }
    for (const auto& p : leave_open) {
        if (seen.count(p)) fail_validation("connection plan: leave_open port '" + p + "' participates in a join");
        bool is_join = false;
        for (const auto& [a, b] : joins) is_join |= joined_name(a, b) == p;
        if (!is_join) require(p);
    }
}

MaxwellCapacitance merge_capacitance_ports(const MaxwellCapacitance& c, const std::string& j, const std::string& k) {
    return merge_capacitance_ports(c, {{j, k}});
}

MaxwellCapacitance merge_capacitance_ports(const MaxwellCapacitance& c,
                                           const std::vector<std::pair<std::string, std::string>>& joins) {
    const int n = c.size();
    std::vector<int> partner(n, -1);
    std::vector<bool> dropped(n, false);
    for (const auto& [j, k] : joins) {
        if (j == k) fail_validation("merge_capacitance_ports: cannot merge a node with itself");
        const int ij = c.index_of(j), ik = c.index_of(k);
        if (partner[ij] != -1 || partner[ik] != -1 || dropped[ij] || dropped[ik])
            fail_validation("merge_capacitance_ports: node used in more than one join");
        partner[ij] = ik;
        dropped[ik] = true;
        partner[ik] = ij;
    }
    std::vector<std::vector<int>> groups;
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) {
        if (dropped[i]) continue;
        std::vector<int> g{i};
        if (partner[i] >= 0) g.push_back(partner[i]);
        std::sort(g.begin(), g.end());
        groups.push_back(g);
        names.push_back(c.names[i]);
    }
    const int m = static_cast<int>(groups.size());
    Mat out(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            double s = 0.0;
            for (int p : groups[a])
                for (int q : groups[b]) s += c.matrix(p, q);
            out(a, b) = s;
        }
    return {out, names};
}

CLCascade disconnected_cascade(const std::vector<RationalImpedance>& zs, const std::vector<std::string>& ids) {
    if (zs.size() != ids.size()) fail_validation("connect: network id count mismatch");
    int np = 0, nr = 0;
    std::vector<CLCascade> parts;
    for (const auto& z : zs) {
        parts.push_back(synthesize_cascade(z));
        np += parts.back().n_ports;
        nr += parts.back().n_resonators();
    }
    Mat C = Mat::Zero(np + nr, np + nr);
    Vec L(nr);
    std::vector<std::string> pnames, rnames;
    int po = 0, ro = np, lo = 0;
    for (size_t i = 0; i < parts.size(); ++i) {
        const auto& p = parts[i];
        const int a = p.n_ports, b = p.n_resonators();
        const Mat& m = p.capacitance.matrix;
        C.block(po, po, a, a) = m.topLeftCorner(a, a);
        C.block(po, ro, a, b) = m.topRightCorner(a, b);
        C.block(ro, po, b, a) = m.bottomLeftCorner(b, a);
        C.block(ro, ro, b, b) = m.bottomRightCorner(b, b);
        for (const auto& s : p.port_names()) pnames.push_back(ids[i] + "." + s);
        for (const auto& s : p.resonator_names()) rnames.push_back(ids[i] + "." + s);
        L.segment(lo, b) = p.shunt_inductors;
        po += a;
        ro += b;
        lo += b;
    }
    pnames.insert(pnames.end(), rnames.begin(), rnames.end());
    return {MaxwellCapacitance{C, pnames}, np, L};
}

RationalImpedance connect_rational(const std::vector<RationalImpedance>& zs, const ConnectionPlan& plan) {
    CLCascade cas = disconnected_cascade(zs, plan.networks);
    plan.validate(cas.port_names());
    cas.capacitance = merge_capacitance_ports(cas.capacitance, plan.joins);
    cas.n_ports -= static_cast<int>(plan.joins.size());
    for (const auto& [a, b] : plan.joins) cas.capacitance.names[cas.capacitance.index_of(a)] = joined_name(a, b);
    if (!is_spd(cas.capacitance.matrix)) {
        Eigen::SelfAdjointEigenSolver<Mat> es(cas.capacitance.matrix);
        std::ostringstream os;
        os << "connect_rational: merged capacitance not SPD (eigenvalue " << es.eigenvalues().minCoeff() << ")";
        fail_numerical(os.str());
    }
    RationalImpedance z = cascade_to_rational(cas).first;

    std::vector<int> keep;
    for (int i = 0; i < z.ports(); ++i)
        if (std::find(plan.leave_open.begin(), plan.leave_open.end(), z.port_names[i]) == plan.leave_open.end())
            keep.push_back(i);
    if (keep.empty()) fail_validation("connect_rational: every port left open; empty-port network");
    RationalImpedance out;
    const int n = static_cast<int>(keep.size());
    out.dc_residue.resize(n, n);
    for (int a = 0; a < n; ++a) {
        out.port_names.push_back(z.port_names[keep[a]]);
        for (int b = 0; b < n; ++b) out.dc_residue(a, b) = z.dc_residue(keep[a], keep[b]);
    }
    for (const auto& m : z.modes) {
        Vec r(n);
        for (int a = 0; a < n; ++a) r(a) = m.r(keep[a]);
        normalize_sign(r);
        out.modes.push_back({m.omega, r});
    }
    return out;
}

CMat cascade_load_s(const CMat& sigma, const CMat& s_load) {
    const auto t = sigma.rows(), m = s_load.rows();
    if (sigma.cols() != t || s_load.cols() != m || m > t) fail_validation("cascade_load_s: nonconformable blocks");
    const auto n = t - m;
    const CMat S11 = sigma.topLeftCorner(n, n), S12 = sigma.topRightCorner(n, m);
    const CMat S21 = sigma.bottomLeftCorner(m, n), S22 = sigma.bottomRightCorner(m, m);
    const CMat A = CMat::Identity(m, m) - s_load * S22;
    Eigen::PartialPivLU<CMat> lu(A);
    if (!(lu.rcond() > 1e-15)) fail_numerical("cascade_load_s: (I - S_l S22) is singular");
    return S11 + S12 * lu.solve(s_load * S21);
}

CMat filipsson_connect(const CMat& s, int k, int l) {
    const int n = static_cast<int>(s.rows());
    if (k == l || k < 0 || l < 0 || k >= n || l >= n) fail_validation("filipsson_connect: bad port pair");
    const cplx den = 1.0 - s(k, l) - s(l, k) + s(k, l) * s(l, k) - s(k, k) * s(l, l);
    if (std::abs(den) < 1e-14) fail_numerical("filipsson_connect: vanishing denominator");
    CMat out(n - 2, n - 2);
    for (int i = 0, oi = 0; i < n; ++i) {
        if (i == k || i == l) continue;
        for (int j = 0, oj = 0; j < n; ++j) {
            if (j == k || j == l) continue;
            const cplx num = s(i, l) * s(k, j) * (1.0 - s(l, k)) + s(i, l) * s(k, k) * s(l, j) +
                             s(i, k) * s(l, j) * (1.0 - s(k, l)) + s(i, k) * s(l, l) * s(k, j);
            out(oi, oj++) = s(i, j) + num / den;
        }
        ++oi;
    }
    return out;
}

SampledNetwork filipsson_connect(const SampledNetwork& s, const std::string& port_k, const std::string& port_l) {
    if (s.kind != ParamKind::S) fail_validation("filipsson_connect: input is not S data");
    s.validate();
    auto idx = [&](const std::string& p) {
        auto it = std::find(s.port_names.begin(), s.port_names.end(), p);
        if (it == s.port_names.end()) fail_validation("filipsson_connect: unknown port '" + p + "'");
        return static_cast<int>(it - s.port_names.begin());
    };
    const int k = idx(port_k), l = idx(port_l);
    SampledNetwork out = s;
    out.port_names.clear();
    for (int i = 0; i < s.ports(); ++i)
        if (i != k && i != l) out.port_names.push_back(s.port_names[i]);
    for (size_t f = 0; f < s.data.size(); ++f) {
        try {
            out.data[f] = filipsson_connect(s.data[f], k, l);
        } catch (const Error& e) {
            fail_numerical(std::string(e.what()) + " at frequency index " + std::to_string(f));
        }
    }
    return out;
}

SampledNetwork block_diagonal(const std::vector<SampledNetwork>& nets, const std::vector<std::string>& ids) {
    if (nets.empty() || nets.size() != ids.size()) fail_validation("block_diagonal: bad inputs");
    SampledNetwork out;
    out.kind = nets[0].kind;
    out.freqs = nets[0].freqs;
    out.z_ref = nets[0].z_ref;
    int n = 0;
    for (size_t i = 0; i < nets.size(); ++i) {
        if (nets[i].kind != out.kind || nets[i].freqs != out.freqs)
            fail_validation("block_diagonal: networks must share kind and frequency grid");
        for (const auto& p : nets[i].port_names) out.port_names.push_back(ids[i] + "." + p);
        n += nets[i].ports();
    }
    for (size_t f = 0; f < out.freqs.size(); ++f) {
        CMat m = CMat::Zero(n, n);
        int o = 0;
        for (const auto& net : nets) {
            const int a = net.ports();
            m.block(o, o, a, a) = net.data[f];
            o += a;
        }
        out.data.push_back(m);
    }
    return out;
}

}  // namespace qnet
