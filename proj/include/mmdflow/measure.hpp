#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mmdflow {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed convex hull of a support; endpoints may be infinite.
struct Interval {
    double lo = -kInf;
    double hi = kInf;

    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
    bool bounded() const { return lo > -kInf && hi < kInf; }
};

struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

/// A probability measure on the real line.
///
/// Quantiles follow the left-continuous convention
/// Q(s) = min{x : cdf_right(x) >= s}, so for every variant
/// quantile(s) <= x  <=>  s <= cdf_right(x).
///
/// Measures are immutable values; all queries are const and thread-safe.
class Measure {
public:
    struct Discrete {
        std::vector<double> x;          // strictly increasing
        std::vector<double> w;          // in (0, 1], sum 1
        std::vector<double> cumulative; // W_k, last entry exactly 1
    };
    struct Uniform {
        double a;
        double b;
    };
    struct Gaussian {
        double mean;
        double std;
    };
    struct Laplace {
        double loc;
        double scale;
    };
    /// Law of |Z| with Z ~ N(mu, sigma^2).
    struct FoldedNormal {
        double mu;
        double sigma;
    };
    struct Exponential {
        double rate;
    };
    struct Mixture {
        std::vector<double> weights;
        std::vector<Measure> components;
    };
    /// Equal-weight sample; duplicates allowed.
    struct Empirical {
        std::vector<double> sorted;
    };
    /// A quantile grid g on midpoints, read as the push-forward of the
    /// uniform law on (0,1) under the step function g.
    struct GridQuantile {
        std::vector<double> values;
        std::vector<double> sorted;
    };

    using Variant = std::variant<Discrete, Uniform, Gaussian, Laplace, FoldedNormal, Exponential,
                                 Mixture, Empirical, GridQuantile>;

    static Measure dirac(double x);
    static Measure discrete(std::vector<double> x, std::vector<double> w);
    static Measure uniform(double a, double b);
    static Measure gaussian(double mean, double std);
    static Measure laplace(double loc, double scale);
    static Measure folded_normal(double mu, double sigma = 1.0);
    static Measure exponential(double rate);
    static Measure mixture(std::vector<double> weights, std::vector<Measure> components);
    static Measure empirical(std::vector<double> samples);
    static Measure grid_quantile(std::vector<double> values);

    const Variant& data() const { return data_; }
    std::string_view kind() const;

    /// R+(x) = mu((-inf, x]).
    double cdf_right(double x) const;
    /// R-(x) = mu((-inf, x)).
    double cdf_left(double x) const;
    /// Throws DomainError unless 0 < s < 1.
    double quantile(double s) const;
    Interval support_hull() const;

    /// Density of the absolutely continuous variants; throws
    /// AtomicTargetError for measures with atoms.
    double pdf(double x) const;
    std::vector<Atom> atoms() const;
    bool has_atoms() const;
    /// True when the support is an interval (possibly a point), i.e. the
    /// quantile function is continuous on (0,1).
    bool has_convex_support() const;

    double mean() const;
    /// E|u - X| for X ~ this measure, in closed form for every variant.
    double expected_abs_deviation(double u) const;
    /// Points where the CDF jumps or its density has a kink; used to split
    /// quadrature ranges.
    std::vector<double> breakpoints() const;
    /// sup of the density (infinite with atoms). Numeric for mixtures and
    /// folded normals.
    double sup_density() const;
    /// inf of the density over the interior of the support hull (zero if
    /// the hull is unbounded or the support is not convex).
    double inf_density_on_hull() const;

    /// Re-parseable expression, e.g. "gaussian(5, 1)".
    std::string to_string() const;

private:
    explicit Measure(Variant v) : data_(std::move(v)) {}

    Variant data_;
};

/// Integral of R+(x)(1 - R+(x)) over the line, i.e. half the mean
/// interaction distance  (1/2) E|X - X'|.
double half_mean_distance(const Measure& m);

/// E|u - X| via  int_{-inf}^u R + int_u^inf (1 - R), by quadrature.
/// Independent of the closed forms in Measure::expected_abs_deviation.
double expected_abs_deviation_quadrature(const Measure& m, double u, double abs_tol = 1e-10);

/// Truncation range outside which both tails are below `tail` in probability.
Interval effective_range(const Measure& m, double tail = 1e-12);

namespace detail {
double normal_cdf(double z);
double normal_pdf(double z);
double normal_quantile(double p);
} // namespace detail

} // namespace mmdflow
