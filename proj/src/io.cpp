#include "hpmean/io.hpp"

#include <charconv>
#include <limits>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hpmean/errors.hpp"

namespace hpmean::io {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string to_string(Metric metric) {
    return metric == Metric::HeisenbergKoranyi ? "heisenberg" : "euclidean";
}

Metric metric_from_string(const std::string& name) {
    if (name == "heisenberg") return Metric::HeisenbergKoranyi;
    if (name == "euclidean") return Metric::Euclidean3;
    throw InvalidArgument("unknown metric '" + name + "' (expected heisenberg or euclidean)");
}

std::string to_string(LatticeKind lattice) { return lattice == LatticeKind::Full3D ? "full3d" : "axisymmetric"; }

LatticeKind lattice_from_string(const std::string& name) {
    if (name == "full3d") return LatticeKind::Full3D;
    if (name == "axisymmetric") return LatticeKind::Axisymmetric;
    throw InvalidArgument("unknown lattice '" + name + "' (expected full3d or axisymmetric)");
}

namespace {

json point_json(const Point& x) { return json::array({x.x1, x.x2, x.x3}); }

Point point_from_json(const json& j) {
    require(j.is_array() && j.size() == 3, "expected a point [x1, x2, x3]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

}  // namespace

json to_json(const DomainSpec& spec) {
    return {{"kind", to_string(spec.kind)},
            {"center", point_json(spec.center)},
            {"inner_radius", spec.inner_radius},
            {"outer_radius", spec.outer_radius},
            {"axis_clearance", spec.axis_clearance}};
}

DomainSpec domain_spec_from_json(const json& j) {
    DomainSpec spec;
    spec.kind = shape_kind_from_string(j.at("kind").get<std::string>());
    spec.center = point_from_json(j.at("center"));
    spec.inner_radius = j.value("inner_radius", 0.0);
    spec.outer_radius = j.at("outer_radius").get<double>();
    spec.axis_clearance = j.value("axis_clearance", 0.0);
    spec.validate();
    return spec;
}

json to_json(const DiscreteDomain& dom) {
    json nodes = json::array();
    json interior = json::array();
    for (std::size_t i = 0; i < dom.nodes.size(); ++i) {
        nodes.push_back(point_json(dom.nodes[i]));
        interior.push_back(i < dom.interior_count);
    }
    json sizes = json::array();
    for (std::size_t i = 0; i < dom.interior_count; ++i) sizes.push_back(dom.stencil_size(i));
    return {{"spec", to_json(dom.spec)},
            {"metric", to_string(dom.metric)},
            {"lattice", to_string(dom.lattice)},
            {"epsilon", dom.epsilon},
            {"spacing", dom.spacing},
            {"vertical_spacing", dom.vertical_spacing},
            {"fingerprint", hex(dom.fingerprint())},
            {"interior_count", dom.interior_count},
            {"nodes", std::move(nodes)},
            {"interior", std::move(interior)},
            {"stencil_sizes", std::move(sizes)}};
}

json to_json(const SolveResult& r) {
    json history = json::array();
    for (const auto& [k, change] : r.residual_history) history.push_back(json::array({k, change}));
    json exponent = std::isinf(r.exponent) ? json("inf") : json(r.exponent);
    return {{"exponent", exponent},
            {"iterations", r.iterations},
            {"final_residual", r.final_residual},
            {"tol", r.tol},
            {"seconds", r.seconds},
            {"domain_fingerprint", hex(r.domain_fingerprint)},
            {"residual_history", std::move(history)},
            {"values", r.values}};
}

SolveResult solve_result_from_json(const json& j) {
    SolveResult r;
    const json& e = j.at("exponent");
    r.exponent = e.is_string() ? std::numeric_limits<double>::infinity() : e.get<double>();
    r.iterations = j.at("iterations").get<std::size_t>();
    r.final_residual = j.at("final_residual").get<double>();
    r.tol = j.at("tol").get<double>();
    r.seconds = j.value("seconds", 0.0);
    r.domain_fingerprint = std::stoull(j.at("domain_fingerprint").get<std::string>(), nullptr, 16);
    for (const auto& h : j.at("residual_history"))
        r.residual_history.emplace_back(h.at(0).get<std::size_t>(), h.at(1).get<double>());
    r.values = j.at("values").get<std::vector<double>>();
    return r;
}

void write_solution_csv(std::ostream& os, const DiscreteDomain& dom, const SolveResult& result,
                        std::span<const double> residuals) {
    require(result.values.size() == dom.nodes.size(), "write_solution_csv: result does not match the domain");
    require(residuals.size() == dom.interior_count, "write_solution_csv: residuals must cover interior nodes");
    os << "x1,x2,x3,kind,value,residual\n";
    for (std::size_t i = 0; i < dom.nodes.size(); ++i) {
        const Point& x = dom.nodes[i];
        const bool inner = i < dom.interior_count;
        os << format_double(x.x1) << ',' << format_double(x.x2) << ',' << format_double(x.x3) << ','
           << (inner ? "interior" : "strip") << ',' << format_double(result.values[i]) << ','
           << format_double(inner ? residuals[i] : 0.0) << '\n';
    }
}

}  // namespace hpmean::io
