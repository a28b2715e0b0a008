#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hpmean/geometry.hpp"
#include "hpmean/pmean.hpp"

namespace hpmean {

enum class ShapeKind { KoranyiBall, KoranyiAnnulus, EuclideanBall, EuclideanAnnulus, AxisExcludedAnnulus };

/// The open set Omega. Radii are measured in the metric of the shape's kind;
/// the axis clearance is the horizontal distance from the vertical line through `center`.
struct DomainSpec {
    ShapeKind kind = ShapeKind::KoranyiBall;
    Point center;
    double inner_radius = 0.0;
    double outer_radius = 1.0;
    double axis_clearance = 0.0;

    static DomainSpec koranyi_ball(const Point& c, double R);
    static DomainSpec koranyi_annulus(const Point& c, double r, double R);
    static DomainSpec euclidean_ball(const Point& c, double R);
    static DomainSpec euclidean_annulus(const Point& c, double r, double R);
    static DomainSpec axis_excluded_annulus(const Point& c, double r, double R, double clearance);

    Metric metric() const;
    /// Throws InvalidArgument on inconsistent radii.
    void validate() const;
    bool contains(const Point& x) const;
};

std::string to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(const std::string& name);

/// How the nodes of a discrete domain sample Omega and its strip.
enum class LatticeKind {
    /// Axis-aligned lattice of R^3; every ball quadrature is the set of lattice
    /// nodes inside the ball, each weighted by the cell volume.
    Full3D,
    /// Rotation orbits about the vertical axis through the centre, represented by
    /// nodes (rho, 0, x3) in the centre's frame. Each ball quadrature is a
    /// dilated unit-ball lattice pushed to the (rho, x3) grid by bilinear weights.
    /// Valid for data invariant under those rotations.
    Axisymmetric,
};

struct DiscretizationOptions {
    LatticeKind lattice = LatticeKind::Full3D;
    /// Vertical (x3) spacing; 0 means equal to h.
    double vertical_spacing = 0.0;
    /// Cells per axis of the unit-ball lattice used by axisymmetric quadratures.
    std::size_t reference_resolution = 24;
    Execution execution = Execution::Parallel;
};

/// Lattice discretisation of Omega and its outer epsilon-strip.
/// Nodes are stored interior first; stencils index into the whole node array.
struct DiscreteDomain {
    DomainSpec spec;
    Metric metric = Metric::HeisenbergKoranyi;
    LatticeKind lattice = LatticeKind::Full3D;
    double epsilon = 0.0;
    double spacing = 0.0;
    double vertical_spacing = 0.0;

    std::vector<Point> nodes;
    std::size_t interior_count = 0;

    /// CSR stencils: interior node i uses entries [offsets[i], offsets[i+1]).
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> indices;
    std::vector<double> weights;

    /// Unit-ball quadrature behind axisymmetric stencils (empty for Full3D).
    BallQuadrature reference;

    std::span<const Point> interior_nodes() const { return {nodes.data(), interior_count}; }
    std::span<const Point> strip_nodes() const {
        return {nodes.data() + interior_count, nodes.size() - interior_count};
    }
    std::size_t stencil_size(std::size_t i) const { return offsets[i + 1] - offsets[i]; }
    /// Identity of (spec, epsilon, spacings, lattice, node count) for compatibility checks.
    std::uint64_t fingerprint() const;
};

/// Throws InvalidArgument unless 0 < epsilon < 1 and 0 < h <= epsilon/8;
/// NumericalError if Omega captures no node.
DiscreteDomain discretize(const DomainSpec& spec, double epsilon, double h,
                          const DiscretizationOptions& options = {});

using Datum = std::function<double(const Point&)>;

/// Natural p-mean of `values` over the stencil of interior node `node`.
PMeanResult dpp_apply(const DiscreteDomain& dom, std::span<const double> values, std::size_t node,
                      const Exponent& p, const PMeanOptions& options = {});

struct SweepStats {
    double max_change = 0.0;
    /// Residual evaluations summed over all nodes.
    std::size_t root_steps = 0;
};

/// One Jacobi sweep: next[i] = dpp_apply(current, i) for interior nodes, strip
/// entries copied. With `warm_start` each root search starts from current[i].
/// Serial and parallel executions give identical results.
SweepStats sweep(const DiscreteDomain& dom, std::span<const double> current, std::span<double> next,
                 const Exponent& p, double pmean_tol, bool warm_start, Execution execution);

enum class InitialGuess { StripMean, StripSup, StripInf };

struct SolveOptions {
    /// Stop when the sup-norm change of a sweep is <= tol. 0 selects 1e-9 (1 + range of G).
    double tol = 0.0;
    std::size_t max_iterations = 1000000;
    double pmean_tol = 1e-12;
    InitialGuess initial = InitialGuess::StripMean;
    Execution execution = Execution::Parallel;
};

struct SolveResult {
    std::vector<double> values;
    std::size_t iterations = 0;
    double final_residual = 0.0;
    double tol = 0.0;
    /// (iteration, sup-change) at iterations 1, 2, 4, 8, ... and the last one.
    std::vector<std::pair<std::size_t, double>> residual_history;
    double exponent = 2.0;
    std::uint64_t domain_fingerprint = 0;
    double seconds = 0.0;
};

/// Values of G at the strip nodes, in strip order.
std::vector<double> strip_values(const DiscreteDomain& dom, const Datum& G);

/// Jacobi fixed-point iteration of the DPP. Throws NumericalError (message carries
/// the residual history) when max_iterations is exceeded.
SolveResult solve(const DiscreteDomain& dom, std::span<const double> strip, const Exponent& p,
                  const SolveOptions& options = {});
SolveResult solve(const DiscreteDomain& dom, const Datum& G, const Exponent& p, const SolveOptions& options = {});

/// |u(x) - mu_p(u)(x)| at each interior node.
std::vector<double> node_residuals(const DiscreteDomain& dom, std::span<const double> values, const Exponent& p,
                                   double pmean_tol = 1e-12, Execution execution = Execution::Parallel);

/// sup over interior nodes of |u - mu_p(u)|.
double fixed_point_residual(const DiscreteDomain& dom, std::span<const double> values, const Exponent& p,
                            double pmean_tol = 1e-12, Execution execution = Execution::Parallel);

struct CheckOutcome {
    bool passed = true;
    /// Smallest slack-free margin over all tested nodes (negative means violated).
    double worst_margin = 0.0;
    std::optional<std::size_t> witness;
};

/// u_F <= u_G + strip_gap + slack at every node, slack = 2 max(tol_F, tol_G).
CheckOutcome comparison_check(const DiscreteDomain& dom, const SolveResult& result_F,
                              const SolveResult& result_G, double strip_gap);

enum class SolutionSide { Sub, Super };

/// Sub: field(x) <= mu_p(field, eps)(x) + slack at every interior node; Super: the
/// reverse. The field is evaluated exactly at the quadrature points of each node's
/// ball (lattice nodes for Full3D, dilated reference points for Axisymmetric).
CheckOutcome subsolution_check(const Datum& field, const DiscreteDomain& dom, const Exponent& p,
                               double slack, SolutionSide side = SolutionSide::Sub,
                               double pmean_tol = 1e-12, Execution execution = Execution::Parallel);

/// max over interior nodes x with d(x, y) <= delta0 of |u(x) - G(y)|. Distances on
/// axisymmetric domains are taken to the whole rotation orbit of each node.
/// Throws NumericalError when no interior node lies within delta0.
double boundary_gap(const DiscreteDomain& dom, const SolveResult& result, const Point& y, double delta0,
                    const Datum& G);

}  // namespace hpmean
