#pragma once

#include "qnet/distributed.hpp"
#include "qnet/interconnect.hpp"
#include "qnet/netcore.hpp"
#include "qnet/qham.hpp"
#include "qnet/synthesis.hpp"

#include <string>
#include <vector>

namespace qnet::json {

// Every document carries a "schema" member; a mismatching schema is a validation error.
std::string dump(const RationalImpedance& z);         // rational_impedance.v1
std::string dump(const MaxwellCapacitance& c);        // maxwell.v1
std::string dump(const CLCascade& c);                 // cl_cascade.v1
std::string dump(const TwoPortChain& c);              // chain.v1
std::string dump(const TransmonSpec& s);              // transmon_spec.v1

RationalImpedance parse_rational(const std::string& text);
MaxwellCapacitance parse_maxwell(const std::string& text);
CLCascade parse_cascade(const std::string& text);
TwoPortChain parse_chain(const std::string& text);
// Junction entries may give E_J or L_J.
TransmonSpec parse_transmon_spec(const std::string& text);

struct PlanFile {
    ConnectionPlan plan;
    std::vector<std::string> paths;  // one per plan.networks entry, relative to the plan file
};
std::string dump(const PlanFile& p);  // connection_plan.v1
PlanFile parse_plan(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace qnet::json
