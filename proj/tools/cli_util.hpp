#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qnet::cli {

// "4GHz", "250MHz", "18nH", "10n", "50", "1.5e9". SI prefixes f p n u m k M G T;
// an optional unit (Hz, H, F, Ohm, s) is ignored.
double parse_si(const std::string& text);

struct Range {
    double lo = 0.0, hi = 0.0;
    int points = 0;
};
// "lo:hi" or "lo:hi:n"
Range parse_range(const std::string& text, bool need_points);

// "A=1,B=2" (also repeated "A=1" items)
std::map<std::string, double> parse_assignments(const std::vector<std::string>& items);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

std::string format_double(double v);

}  // namespace qnet::cli
