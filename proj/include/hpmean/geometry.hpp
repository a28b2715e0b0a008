#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hpmean {

/// A point of the first Heisenberg group, identified with R^3.
struct Point {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

enum class Metric { HeisenbergKoranyi, Euclidean3 };

/// Serial kernels are the reference; parallel ones must reproduce them bit for bit.
enum class Execution { Serial, Parallel };

// Group structure -----------------------------------------------------------

Point group_mul(const Point& a, const Point& b);
Point group_inv(const Point& a);

/// Korányi gauge ((x1^2+x2^2)^2 + 16 x3^2)^(1/4), or the Euclidean norm.
double gauge(const Point& a, Metric metric);

/// d(a, b) = gauge(a^-1 * b). Left-invariant in both modes.
double distance(const Point& a, const Point& b, Metric metric);

/// Anisotropic dilation (l x1, l x2, l^2 x3). Throws on lambda <= 0.
Point dilate(double lambda, const Point& a);

/// Left translation by `a`: a * z in the Heisenberg group, a + z in R^3.
Point translate(const Point& a, const Point& z, Metric metric);

/// The metric's own scaling: dilate() for Heisenberg, lambda * z for Euclidean.
Point scale(double lambda, const Point& z, Metric metric);

/// Exponent of volume growth: Q = 4 for the Heisenberg group, 3 for R^3.
int homogeneous_dimension(Metric metric);

// Ball quadrature -----------------------------------------------------------

enum class QuadratureScheme { Lattice, MonteCarlo };

/// Finite measure approximating Lebesgue measure on a metric ball.
struct BallQuadrature {
    Point center;
    double radius = 1.0;
    Metric metric = Metric::HeisenbergKoranyi;
    QuadratureScheme scheme = QuadratureScheme::Lattice;
    std::uint64_t seed = 0;
    std::vector<Point> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

struct QuadratureOptions {
    QuadratureScheme scheme = QuadratureScheme::Lattice;
    /// Lattice: cells per axis of the bounding box. MonteCarlo: sample count.
    std::size_t resolution = 64;
    std::uint64_t seed = 0;
    Execution execution = Execution::Parallel;
};

/// Half-extents of the bounding box of the ball of radius r around the origin:
/// [-r,r]^2 x [-r^2/4, r^2/4] for Korányi balls, [-r,r]^3 for Euclidean ones.
Point ball_half_extents(double radius, Metric metric);

/// Midpoint-lattice or Monte-Carlo quadrature of the ball of `radius` around `center`.
/// Deterministic for fixed inputs; throws NumericalError if no cell centre falls inside.
BallQuadrature ball_quadrature(const Point& center, double radius, Metric metric,
                               const QuadratureOptions& options = {});

/// Sum of the quadrature weights.
double ball_volume(const BallQuadrature& q);

/// Maps a quadrature of the unit ball at the origin onto the ball of `radius`
/// around `center` (left translation after dilation); weights scale by radius^Q.
BallQuadrature rescale(const BallQuadrature& unit, const Point& center, double radius);

}  // namespace hpmean
