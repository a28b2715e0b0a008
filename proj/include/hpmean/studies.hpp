#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hpmean/calculus.hpp"
#include "hpmean/dpp.hpp"

namespace hpmean::studies {

/// Least-squares slope of log|y| against log x. Needs two or more points with y != 0.
std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y);

// Asymptotic mean value expansion -----------------------------------------------

struct AmvpConfig {
    ScalarField field;
    Point x0;
    Exponent p{2.0};
    Metric metric = Metric::HeisenbergKoranyi;
    std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
    /// Lattice cells per axis of the unit ball's bounding box.
    std::size_t resolution = 128;
    /// Extra resolutions whose spread around the main one is reported as the quadrature noise floor.
    std::vector<std::size_t> floor_resolutions{96, 112};
    double pmean_tol = 1e-13;
    Execution execution = Execution::Parallel;
};

struct AmvpRow {
    double epsilon = 0.0;
    /// mu_p(u, eps)(x0) - u(x0)
    double mean_minus_u = 0.0;
    /// c eps^2 Delta^N u(x0) with the continuum constant c
    double predicted = 0.0;
    /// Leading term built from the lattice's own moments; equals `predicted` up to quadrature error.
    double lattice_leading = 0.0;
    /// mean_minus_u - lattice_leading
    double remainder = 0.0;
    /// max |D_n - D| over the floor resolutions
    double noise_floor = 0.0;
    /// |remainder| clears the root-finding tolerance and the summation rounding bound
    bool resolved = false;
};

struct AmvpReport {
    std::vector<AmvpRow> rows;
    std::size_t ball_nodes = 0;
    double constant = 0.0;
    double laplacian = 0.0;
    /// Delta^N u(x0) vanishes: the leading term is zero and no order can be fitted.
    bool degenerate = false;
    std::optional<double> leading_order;
    /// (mu_p - u) / eps^2 at the smallest eps
    double leading_coefficient = 0.0;
    double expected_coefficient = 0.0;
    std::optional<double> remainder_order;
    /// "fitted", "noise-limited" (fewer than two resolved rows) or "degenerate"
    std::string remainder_status;
};

/// Throws VanishingGradient if the horizontal gradient vanishes at x0.
AmvpReport amvp_study(const AmvpConfig& config);

// Lattice plans -------------------------------------------------------------------

/// Spacing rule shared by the DPP studies: h = eps / h_ratio and, for the
/// vertical direction, hv = min(h, vertical_coeff * eps^vertical_power)
/// (vertical_coeff = 0 keeps hv = h).
struct LatticePlan {
    LatticeKind lattice = LatticeKind::Axisymmetric;
    double h_ratio = 8.0;
    double vertical_coeff = 0.14;
    double vertical_power = 1.5;
    std::size_t reference_resolution = 20;
    Execution execution = Execution::Parallel;

    double spacing(double epsilon) const;
    DiscretizationOptions options(double epsilon) const;
};

// Convergence to an exact solution --------------------------------------------------

struct ConvergenceConfig {
    DomainSpec domain;
    Exponent p{3.0};
    std::vector<double> epsilons{0.2, 0.1, 0.05};
    LatticePlan plan;
    /// Exact solution; also supplies the strip data.
    Datum exact;
    SolveOptions solve;
};

struct ConvergenceRow {
    double epsilon = 0.0;
    double h = 0.0;
    double vertical_spacing = 0.0;
    std::size_t nodes = 0;
    std::size_t interior = 0;
    std::size_t iterations = 0;
    double seconds = 0.0;
    double final_residual = 0.0;
    double sup_error = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::optional<double> rate;
};

ConvergenceReport convergence_study(const ConvergenceConfig& config);

// Boundary gap decay ------------------------------------------------------------------

struct BoundaryGapConfig {
    DomainSpec domain;
    Exponent p{3.0};
    std::vector<double> epsilons{0.2, 0.1, 0.05};
    LatticePlan plan;
    Datum datum;
    std::vector<Point> boundary_points;
    /// delta0 = delta_factor * eps
    double delta_factor = 1.0;
    SolveOptions solve;
};

struct BoundaryGapRow {
    double epsilon = 0.0;
    double delta0 = 0.0;
    std::vector<double> gaps;  // one per boundary point
    double max_gap = 0.0;
    std::size_t iterations = 0;
    double seconds = 0.0;
};

struct BoundaryGapReport {
    std::vector<BoundaryGapRow> rows;
    /// max_gap strictly decreases from row to row
    bool monotone = false;
};

BoundaryGapReport boundary_gap_study(const BoundaryGapConfig& config);

/// sin(2 pi |c^-1 x|) + (c^-1 x)_3: continuous, invariant under rotations about
/// the vertical axis through c and not p-harmonic.
Datum rotational_test_datum(const Point& c);

}  // namespace hpmean::studies
