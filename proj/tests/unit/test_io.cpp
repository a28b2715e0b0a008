#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"

#include "hpmean/dpp.hpp"
#include "hpmean/errors.hpp"
#include "hpmean/io.hpp"

using namespace hpmean;

TEST_CASE("format_double round-trips") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("enum names") {
    CHECK(io::metric_from_string(io::to_string(Metric::Euclidean3)) == Metric::Euclidean3);
    CHECK(io::lattice_from_string(io::to_string(LatticeKind::Axisymmetric)) == LatticeKind::Axisymmetric);
    CHECK_THROWS_AS(io::metric_from_string("riemann"), InvalidArgument);
    CHECK(shape_kind_from_string(to_string(ShapeKind::AxisExcludedAnnulus)) == ShapeKind::AxisExcludedAnnulus);
}

TEST_CASE("DomainSpec JSON round trip") {
    const auto spec = DomainSpec::axis_excluded_annulus({0.1, -0.2, 0.3}, 0.4, 1.1, 0.25);
    const auto back = io::domain_spec_from_json(io::to_json(spec));
    CHECK(back.kind == spec.kind);
    CHECK(back.center == spec.center);
    CHECK(back.inner_radius == spec.inner_radius);
    CHECK(back.outer_radius == spec.outer_radius);
    CHECK(back.axis_clearance == spec.axis_clearance);
}

TEST_CASE("SolveResult JSON and CSV layouts") {
    const auto dom = discretize(DomainSpec::koranyi_ball({0, 0, 0}, 1.0), 0.5, 0.0625);
    const Datum G = [](const Point& x) { return x.x1 - x.x3; };
    const auto r = solve(dom, G, Exponent(3.0));

    const auto j = io::to_json(r);
    const auto back = io::solve_result_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.values == r.values);
    CHECK(back.iterations == r.iterations);
    CHECK(back.final_residual == r.final_residual);
    CHECK(back.domain_fingerprint == r.domain_fingerprint);
    CHECK(back.residual_history == r.residual_history);

    SolveResult inf_result = r;
    inf_result.exponent = std::numeric_limits<double>::infinity();
    CHECK(io::to_json(inf_result).at("exponent") == "inf");
    CHECK(std::isinf(io::solve_result_from_json(io::to_json(inf_result)).exponent));

    const auto dj = io::to_json(dom);
    CHECK(dj.at("nodes").size() == dom.nodes.size());
    CHECK(dj.at("interior_count") == dom.interior_count);
    CHECK(dj.at("stencil_sizes").size() == dom.interior_count);

    const auto res = node_residuals(dom, r.values, Exponent(3.0));
    std::ostringstream os;
    io::write_solution_csv(os, dom, r, res);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x1,x2,x3,kind,value,residual");
    std::size_t rows = 0, interior = 0;
    while (std::getline(is, line)) {
        ++rows;
        if (line.find(",interior,") != std::string::npos) ++interior;
    }
    CHECK(rows == dom.nodes.size());
    CHECK(interior == dom.interior_count);
}
