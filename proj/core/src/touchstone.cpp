#include "qnet/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

namespace qnet {

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

double unit_scale(const std::string& u) {
    if (u == "HZ") return 1.0;
    if (u == "KHZ") return 1e3;
    if (u == "MHZ") return 1e6;
    if (u == "GHZ") return 1e9;
    fail_validation("touchstone: unknown frequency unit '" + u + "'");
}

cplx decode(double a, double b, TouchstoneFormat fmt) {
    constexpr double deg = std::numbers::pi / 180.0;
    switch (fmt) {
        case TouchstoneFormat::RI: return {a, b};
        case TouchstoneFormat::MA: return std::polar(a, b * deg);
        case TouchstoneFormat::DB: return std::polar(std::pow(10.0, a / 20.0), b * deg);
    }
    return {};
}

std::pair<double, double> encode(cplx v, TouchstoneFormat fmt) {
    constexpr double deg = 180.0 / std::numbers::pi;
    switch (fmt) {
        case TouchstoneFormat::RI: return {v.real(), v.imag()};
        case TouchstoneFormat::MA: return {std::abs(v), std::arg(v) * deg};
        case TouchstoneFormat::DB: return {20.0 * std::log10(std::abs(v)), std::arg(v) * deg};
    }
    return {};
}

// Column order within a record: 2-port files are column-major (11 21 12 22).
std::pair<int, int> entry_index(int k, int n) {
    if (n == 2) return {k % 2, k / 2};
    return {k / n, k % n};
}

}  // namespace

int ports_from_extension(const std::string& path) {
    static const std::regex re(R"(\.[sS](\d+)[pP]$)");
    std::smatch m;
    if (!std::regex_search(path, m, re)) fail_validation("touchstone: cannot infer port count from '" + path + "'");
    return std::stoi(m[1]);
}

TouchstoneData parse_touchstone(const std::string& text, int n) {
    if (n < 1) fail_validation("touchstone: port count must be >= 1");
    TouchstoneData out;
    SampledNetwork& net = out.network;
    std::string unit = "GHZ";
    std::string param = "S";
    TouchstoneFormat fmt = TouchstoneFormat::MA;
    double r_ref = 50.0;
    bool have_option = false;
    std::vector<double> numbers;

    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto bang = line.find('!');
        if (bang != std::string::npos) {
            out.comments.push_back(line.substr(bang + 1));
            line = line.substr(0, bang);
        }
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
        if (trimmed.empty()) continue;
        if (trimmed[0] == '#') {
            if (have_option) continue;  // only the first option line counts
            have_option = true;
            std::istringstream os(upper(trimmed.substr(1)));
            std::string tok;
            while (os >> tok) {
                if (tok == "HZ" || tok == "KHZ" || tok == "MHZ" || tok == "GHZ") unit = tok;
                else if (tok == "S" || tok == "Z" || tok == "Y") param = tok;
                else if (tok == "RI") fmt = TouchstoneFormat::RI;
                else if (tok == "MA") fmt = TouchstoneFormat::MA;
                else if (tok == "DB") fmt = TouchstoneFormat::DB;
                else if (tok == "R") {
                    if (!(os >> r_ref)) fail_validation("touchstone: missing reference resistance");
                } else
                    fail_validation("touchstone: unsupported option '" + tok + "'");
            }
            continue;
        }
        std::istringstream ls(trimmed);
        std::string tok;
        while (ls >> tok) {
            try {
                size_t used = 0;
                numbers.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                fail_validation("touchstone: bad number '" + tok + "'");
            }
        }
    }

    const size_t rec = 1 + 2 * static_cast<size_t>(n) * n;
    if (numbers.size() % rec != 0) fail_validation("touchstone: value count is not a multiple of the record size");
    const double fs = unit_scale(unit);
    net.kind = param == "S" ? ParamKind::S : (param == "Z" ? ParamKind::Z : ParamKind::Y);
    net.z_ref = r_ref;
    for (int p = 0; p < n; ++p) net.port_names.push_back("P" + std::to_string(p + 1));
    for (size_t off = 0; off < numbers.size(); off += rec) {
        net.freqs.push_back(numbers[off] * fs);
        CMat m(n, n);
        for (int k = 0; k < n * n; ++k) {
            auto [i, j] = entry_index(k, n);
            m(i, j) = decode(numbers[off + 1 + 2 * k], numbers[off + 2 + 2 * k], fmt);
        }
        if (net.kind == ParamKind::Z) m *= r_ref;
        if (net.kind == ParamKind::Y) m /= r_ref;
        net.data.push_back(m);
    }
    net.validate();
    return out;
}

TouchstoneData read_touchstone(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail_validation("touchstone: cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_touchstone(ss.str(), ports_from_extension(path));
}

std::string format_touchstone(const SampledNetwork& net, TouchstoneFormat fmt, const std::string& unit_in,
                              const std::vector<std::string>& comments) {
    net.validate();
    const std::string unit = upper(unit_in);
    const double fs = unit_scale(unit);
    const int n = net.ports();
    std::ostringstream os;
    for (const auto& c : comments) os << '!' << c << '\n';
    const char* fname = fmt == TouchstoneFormat::RI ? "RI" : (fmt == TouchstoneFormat::MA ? "MA" : "DB");
    os << "# " << unit << ' ' << kind_name(net.kind) << ' ' << fname << " R " << net.z_ref << '\n';
    os << std::setprecision(15);
    for (size_t i = 0; i < net.freqs.size(); ++i) {
        CMat m = net.data[i];
        if (net.kind == ParamKind::Z) m /= net.z_ref;
        if (net.kind == ParamKind::Y) m *= net.z_ref;
        os << net.freqs[i] / fs;
        for (int k = 0; k < n * n; ++k) {
            auto [r, c] = entry_index(k, n);
            auto [a, b] = encode(m(r, c), fmt);
            // wide networks: each matrix row starts a line, at most four pairs per line
            if (n > 2 && k > 0 && (k % n == 0 || (k % n) % 4 == 0)) os << "\n ";
            os << ' ' << a << ' ' << b;
        }
        os << '\n';
    }
    return os.str();
}

void write_touchstone(const std::string& path, const SampledNetwork& net, TouchstoneFormat fmt,
                      const std::string& unit, const std::vector<std::string>& comments) {
    std::ofstream f(path);
    if (!f) fail_validation("touchstone: cannot write '" + path + "'");
    f << format_touchstone(net, fmt, unit, comments);
}

}  // namespace qnet
