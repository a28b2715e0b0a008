#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "hpmean/dpp.hpp"

namespace hpmean::io {

/// Shortest decimal text that parses back to exactly `v` ("inf", "-inf", "nan" otherwise).
std::string format_double(double v);

std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);
std::string to_string(LatticeKind lattice);
LatticeKind lattice_from_string(const std::string& name);

nlohmann::json to_json(const DomainSpec& spec);
DomainSpec domain_spec_from_json(const nlohmann::json& j);

/// {"spec", "metric", "lattice", "epsilon", "spacing", "vertical_spacing", "fingerprint",
///  "interior_count", "nodes": [[x1,x2,x3],...], "interior": [bool,...], "stencil_sizes": [...]}
nlohmann::json to_json(const DiscreteDomain& dom);

/// {"exponent" (number or "inf"), "iterations", "final_residual", "tol", "seconds",
///  "domain_fingerprint", "residual_history": [[k, change],...], "values": [...]}
nlohmann::json to_json(const SolveResult& result);
SolveResult solve_result_from_json(const nlohmann::json& j);

/// CSV with header x1,x2,x3,kind,value,residual; residual is |u - mu_p(u)| at
/// interior nodes and 0 on the strip.
void write_solution_csv(std::ostream& os, const DiscreteDomain& dom, const SolveResult& result,
                        std::span<const double> residuals);

}  // namespace hpmean::io
