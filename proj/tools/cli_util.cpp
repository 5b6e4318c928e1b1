#include "cli_util.hpp"

#include "qnet/netcore.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace qnet::cli {

double parse_si(const std::string& text) {
    const char* b = text.data();
    const char* e = b + text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    double v = 0.0;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p == b) fail_validation("not a number: '" + text + "'");
    std::string rest(p, e);
    while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.pop_back();
    if (rest.empty()) return v;
    static const std::map<char, double> prefix = {{'f', 1e-15}, {'p', 1e-12}, {'n', 1e-9}, {'u', 1e-6},
                                                  {'m', 1e-3},  {'k', 1e3},   {'M', 1e6},  {'G', 1e9},
                                                  {'T', 1e12}};
    static const std::vector<std::string> units = {"Hz", "hz", "HZ", "H", "F", "Ohm", "ohm", "s"};
    auto is_unit = [&](const std::string& u) {
        for (const auto& x : units)
            if (u == x) return true;
        return false;
    };
    if (is_unit(rest)) return v;
    auto it = prefix.find(rest.front());
    if (it != prefix.end() && (rest.size() == 1 || is_unit(rest.substr(1)))) return v * it->second;
    fail_validation("unknown unit suffix in '" + text + "'");
}

Range parse_range(const std::string& text, bool need_points) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 2 && parts.size() != 3) fail_validation("range must be lo:hi or lo:hi:n, got '" + text + "'");
    Range r;
    r.lo = parse_si(parts[0]);
    r.hi = parse_si(parts[1]);
    if (parts.size() == 3) r.points = static_cast<int>(parse_si(parts[2]));
    if (!(r.hi > r.lo)) fail_validation("empty range '" + text + "'");
    if (need_points && r.points < 2) fail_validation("range '" + text + "' needs at least 2 points");
    return r;
}

std::map<std::string, double> parse_assignments(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const auto& raw : items) {
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0) fail_validation("expected NAME=VALUE, got '" + item + "'");
            out[item.substr(0, eq)] = parse_si(item.substr(eq + 1));
        }
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace qnet::cli
