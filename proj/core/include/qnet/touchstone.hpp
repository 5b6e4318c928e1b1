#pragma once

#include "qnet/netcore.hpp"

#include <string>
#include <vector>

namespace qnet {

enum class TouchstoneFormat { RI, MA, DB };

struct TouchstoneData {
    SampledNetwork network;  // Z and Y data are stored denormalized (ohms, siemens)
    std::vector<std::string> comments;
};

// n_ports comes from the .sNp extension when reading files.
TouchstoneData parse_touchstone(const std::string& text, int n_ports);
TouchstoneData read_touchstone(const std::string& path);

std::string format_touchstone(const SampledNetwork& net, TouchstoneFormat fmt = TouchstoneFormat::RI,
                              const std::string& unit = "HZ", const std::vector<std::string>& comments = {});
void write_touchstone(const std::string& path, const SampledNetwork& net,
                      TouchstoneFormat fmt = TouchstoneFormat::RI, const std::string& unit = "HZ",
                      const std::vector<std::string>& comments = {});

int ports_from_extension(const std::string& path);

}  // namespace qnet
