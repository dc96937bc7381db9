#include "mmdflow/measure.hpp"

#include "mmdflow/errors.hpp"
#include "mmdflow/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numbers>
#include <numeric>

namespace mmdflow {

namespace detail {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// Acklam's rational approximation (relative error ~1.2e-9), refined by one
// Halley step on the CDF. Evaluated on the lower half only, where erfc keeps
// full relative accuracy.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0,1)");
    if (p > 0.5) return -normal_quantile(1.0 - p);

    static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                             -2.759285104469687e+02, 1.383577518672690e+02,
                                             -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                             -1.556989798598866e+02, 6.680131188771972e+01,
                                             -1.328068155288572e+01};
    static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                             -2.400758277161838e+00, -2.549732539343734e+00,
                                             4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                             2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

} // namespace detail

namespace {

using detail::normal_cdf;
using detail::normal_pdf;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kWeightTolerance = 1e-12;

std::string fmt_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += fmt_number(xs[i]);
    }
    return out + "]";
}

std::vector<double> cumulative_weights(const std::vector<double>& w) {
    std::vector<double> cum(w.size());
    std::partial_sum(w.begin(), w.end(), cum.begin());
    cum.back() = 1.0;
    return cum;
}

// Equal-weight sorted samples: R+(x) = #{x_j <= x} / n.
double empirical_cdf_right(const std::vector<double>& sorted, double x) {
    const auto c = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    return static_cast<double>(c) / static_cast<double>(sorted.size());
}

double empirical_cdf_left(const std::vector<double>& sorted, double x) {
    const auto c = std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    return static_cast<double>(c) / static_cast<double>(sorted.size());
}

// Smallest k with k/n >= s, computed with the same division as the CDF so
// that the Galois relation holds exactly.
double empirical_quantile(const std::vector<double>& sorted, double s) {
    const auto n = sorted.size();
    const double nd = static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(s * nd));
    k = std::clamp<std::size_t>(k, 1, n);
    while (k > 1 && static_cast<double>(k - 1) / nd >= s) --k;
    while (k < n && static_cast<double>(k) / nd < s) ++k;
    return sorted[k - 1];
}

double empirical_abs_deviation(const std::vector<double>& sorted, double u) {
    double sum = 0.0;
    for (double x : sorted) sum += std::abs(u - x);
    return sum / static_cast<double>(sorted.size());
}

double empirical_half_mean_distance(const std::vector<double>& sorted) {
    // (1/2n^2) sum_{i,j} |x_i - x_j| = (1/n^2) sum_i (2i - n + 1) x_(i)
    const double n = static_cast<double>(sorted.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        sum += (2.0 * static_cast<double>(i) - n + 1.0) * sorted[i];
    return sum / (n * n);
}

std::vector<double> unique_values(const std::vector<double>& sorted) {
    std::vector<double> out(sorted);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Atom> empirical_atoms(const std::vector<double>& sorted) {
    std::vector<Atom> out;
    const double unit = 1.0 / static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        out.push_back({sorted[i], static_cast<double>(j - i) * unit});
        i = j;
    }
    return out;
}

// Antiderivative of the standard normal CDF.
double normal_cdf_integral(double z) { return z * normal_cdf(z) + normal_pdf(z); }

double folded_normal_mean(double mu, double sigma) {
    return sigma * std::sqrt(2.0 / std::numbers::pi) * std::exp(-mu * mu / (2.0 * sigma * sigma)) +
           mu * (1.0 - 2.0 * normal_cdf(-mu / sigma));
}

// Numeric inversion of a right-continuous CDF: bracket expansion by doubling
// from `start`, then bisection on  cdf_right(x) >= s  to 1e-12 in x.
double invert_cdf(const Measure& m, double s, double start) {
    const Interval hull = m.support_hull();
    double step = 1.0;
    double lo = start - step;
    double hi = start + step;
    while (m.cdf_right(lo) >= s) {
        if (lo <= hull.lo) return hull.lo;
        step *= 2.0;
        lo = std::max(start - step, hull.lo);
        if (step > 1e300) throw NumericalError("invert_cdf: lower bracket diverged");
    }
    step = std::max(step, 1.0);
    while (m.cdf_right(hi) < s) {
        step *= 2.0;
        hi = std::min(start + step, hull.hi);
        if (step > 1e300) throw NumericalError("invert_cdf: upper bracket diverged");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (m.cdf_right(mid) >= s)
            hi = mid;
        else
            lo = mid;
    }
    // An atom inside the final bracket carries the exact minimiser.
    for (const Atom& a : m.atoms())
        if (a.location > lo && a.location <= hi && m.cdf_right(a.location) >= s) return a.location;
    return hi;
}

double golden_max(const Measure& m, double a, double b) {
    constexpr double r = 0.6180339887498949;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = m.pdf(c);
    double fd = m.pdf(d);
    for (int it = 0; it < 100 && b - a > 1e-12 * (1.0 + std::abs(a)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = m.pdf(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = m.pdf(d);
        }
    }
    return std::max(fc, fd);
}

// Scans the density on the effective range and refines the best cell.
double numeric_sup_density(const Measure& m) {
    const Interval range = effective_range(m, 1e-9);
    constexpr int cells = 4000;
    const double h = (range.hi - range.lo) / cells;
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i <= cells; ++i) {
        const double v = m.pdf(range.lo + i * h);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    for (double x : m.breakpoints()) {
        if (x >= range.lo && x <= range.hi) {
            best_val = std::max({best_val, m.pdf(x), m.pdf(std::nextafter(x, kInf))});
        }
    }
    const double a = range.lo + std::max(best - 1, 0) * h;
    const double b = range.lo + std::min(best + 1, cells) * h;
    return std::max(best_val, golden_max(m, a, b));
}

} // namespace

Measure Measure::dirac(double x) { return discrete({x}, {1.0}); }

Measure Measure::discrete(std::vector<double> x, std::vector<double> w) {
    if (x.empty() || x.size() != w.size())
        throw DomainError("discrete: need equally many (>= 1) locations and weights");
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) throw DomainError("discrete: atom locations must be finite");
        if (i > 0 && !(x[i] > x[i - 1]))
            throw DomainError("discrete: atom locations must be strictly increasing");
        if (!(w[i] > 0.0 && w[i] <= 1.0)) throw DomainError("discrete: weights must lie in (0, 1]");
        total += w[i];
    }
    if (std::abs(total - 1.0) > kWeightTolerance)
        throw DomainError("discrete: weights must sum to 1 (got " + fmt_number(total) + ")");
    auto cum = cumulative_weights(w);
    return Measure(Discrete{std::move(x), std::move(w), std::move(cum)});
}

Measure Measure::uniform(double a, double b) {
    if (!(std::isfinite(a) && std::isfinite(b) && a < b))
        throw DomainError("uniform: need finite a < b");
    return Measure(Uniform{a, b});
}

Measure Measure::gaussian(double mean, double std) {
    if (!(std::isfinite(mean) && std > 0.0 && std::isfinite(std)))
        throw DomainError("gaussian: need finite mean and std > 0");
    return Measure(Gaussian{mean, std});
}

Measure Measure::laplace(double loc, double scale) {
    if (!(std::isfinite(loc) && scale > 0.0 && std::isfinite(scale)))
        throw DomainError("laplace: need finite location and scale > 0");
    return Measure(Laplace{loc, scale});
}

Measure Measure::folded_normal(double mu, double sigma) {
    if (!(std::isfinite(mu) && sigma > 0.0 && std::isfinite(sigma)))
        throw DomainError("folded_normal: need finite mu and sigma > 0");
    return Measure(FoldedNormal{mu, sigma});
}

Measure Measure::exponential(double rate) {
    if (!(rate > 0.0 && std::isfinite(rate))) throw DomainError("exponential: need rate > 0");
    return Measure(Exponential{rate});
}

Measure Measure::mixture(std::vector<double> weights, std::vector<Measure> components) {
    if (components.empty() || weights.size() != components.size())
        throw DomainError("mixture: need equally many (>= 1) weights and components");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("mixture: weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > kWeightTolerance)
        throw DomainError("mixture: weights must sum to 1 (got " + fmt_number(total) + ")");
    return Measure(Mixture{std::move(weights), std::move(components)});
}

Measure Measure::empirical(std::vector<double> samples) {
    if (samples.empty()) throw DomainError("empirical: need at least one sample");
    for (double x : samples)
        if (!std::isfinite(x)) throw DomainError("empirical: samples must be finite");
    std::sort(samples.begin(), samples.end());
    return Measure(Empirical{std::move(samples)});
}

Measure Measure::grid_quantile(std::vector<double> values) {
    if (values.empty()) throw DomainError("grid_quantile: need at least one value");
    for (double x : values)
        if (!std::isfinite(x)) throw DomainError("grid_quantile: values must be finite");
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    return Measure(GridQuantile{std::move(values), std::move(sorted)});
}

std::string_view Measure::kind() const {
    return std::visit(Overloaded{
                          [](const Discrete&) { return std::string_view("discrete"); },
                          [](const Uniform&) { return std::string_view("uniform"); },
                          [](const Gaussian&) { return std::string_view("gaussian"); },
                          [](const Laplace&) { return std::string_view("laplace"); },
                          [](const FoldedNormal&) { return std::string_view("folded_normal"); },
                          [](const Exponential&) { return std::string_view("exponential"); },
                          [](const Mixture&) { return std::string_view("mixture"); },
                          [](const Empirical&) { return std::string_view("empirical"); },
                          [](const GridQuantile&) { return std::string_view("grid"); },
                      },
                      data_);
}

double Measure::cdf_right(double x) const {
    return std::visit(
        Overloaded{
            [x](const Discrete& d) {
                const auto k = std::upper_bound(d.x.begin(), d.x.end(), x) - d.x.begin();
                return k == 0 ? 0.0 : d.cumulative[static_cast<std::size_t>(k - 1)];
            },
            [x](const Uniform& u) { return std::clamp((x - u.a) / (u.b - u.a), 0.0, 1.0); },
            [x](const Gaussian& g) { return normal_cdf((x - g.mean) / g.std); },
            [x](const Laplace& l) {
                const double z = (x - l.loc) / l.scale;
                return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
            },
            [x](const FoldedNormal& f) {
                if (x <= 0.0) return 0.0;
                const double zp = (x + f.mu) / (f.sigma * std::numbers::sqrt2);
                const double zm = (x - f.mu) / (f.sigma * std::numbers::sqrt2);
                const double central = 0.5 * (std::erf(zp) + std::erf(zm));
                if (central <= 0.5) return central;
                return 1.0 - 0.5 * (std::erfc(zp) + std::erfc(zm));
            },
            [x](const Exponential& e) { return x <= 0.0 ? 0.0 : -std::expm1(-e.rate * x); },
            [x](const Mixture& m) {
                double r = 0.0;
                for (std::size_t i = 0; i < m.components.size(); ++i)
                    r += m.weights[i] * m.components[i].cdf_right(x);
                return std::min(r, 1.0);
            },
            [x](const Empirical& e) { return empirical_cdf_right(e.sorted, x); },
            [x](const GridQuantile& g) { return empirical_cdf_right(g.sorted, x); },
        },
        data_);
}

double Measure::cdf_left(double x) const {
    return std::visit(
        Overloaded{
            [x](const Discrete& d) {
                const auto k = std::lower_bound(d.x.begin(), d.x.end(), x) - d.x.begin();
                return k == 0 ? 0.0 : d.cumulative[static_cast<std::size_t>(k - 1)];
            },
            [x](const Mixture& m) {
                double r = 0.0;
                for (std::size_t i = 0; i < m.components.size(); ++i)
                    r += m.weights[i] * m.components[i].cdf_left(x);
                return std::min(r, 1.0);
            },
            [x](const Empirical& e) { return empirical_cdf_left(e.sorted, x); },
            [x](const GridQuantile& g) { return empirical_cdf_left(g.sorted, x); },
            [this, x](const auto&) { return cdf_right(x); },
        },
        data_);
}

namespace {

// Smallest double y with cdf_right(y) >= s, searched near the closed-form
// value x. Makes the Galois relation exact in floating point.
double galois_snap(const Measure& m, double x, double s) {
    auto ok = [&](double y) { return m.cdf_right(y) >= s; };
    double step = std::max(std::abs(x), 1e-300) * 4.0 * std::numeric_limits<double>::epsilon();
    double lo = x, hi = x;
    if (ok(x)) {
        do {
            lo = x - step;
            step *= 2.0;
        } while (ok(lo));
    } else {
        do {
            hi = x + step;
            step *= 2.0;
        } while (!ok(hi));
    }
    for (;;) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (ok(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace

double Measure::quantile(double s) const {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("quantile: s must lie in (0,1), got " + fmt_number(s));
    const bool snap = std::holds_alternative<Uniform>(data_) || std::holds_alternative<Gaussian>(data_) ||
                      std::holds_alternative<Laplace>(data_) || std::holds_alternative<Exponential>(data_);
    const double x = std::visit(
        Overloaded{
            [s](const Discrete& d) {
                const auto k = std::lower_bound(d.cumulative.begin(), d.cumulative.end(), s) -
                               d.cumulative.begin();
                return d.x[std::min(static_cast<std::size_t>(k), d.x.size() - 1)];
            },
            [s](const Uniform& u) { return u.a + s * (u.b - u.a); },
            [s](const Gaussian& g) { return g.mean + g.std * detail::normal_quantile(s); },
            [s](const Laplace& l) {
                return s < 0.5 ? l.loc + l.scale * std::log(2.0 * s)
                               : l.loc - l.scale * std::log(2.0 - 2.0 * s);
            },
            [this, s](const FoldedNormal& f) { return invert_cdf(*this, s, std::abs(f.mu)); },
            [s](const Exponential& e) { return -std::log1p(-s) / e.rate; },
            [this, s](const Mixture&) { return invert_cdf(*this, s, mean()); },
            [s](const Empirical& e) { return empirical_quantile(e.sorted, s); },
            [s](const GridQuantile& g) { return empirical_quantile(g.sorted, s); },
        },
        data_);
    return snap ? galois_snap(*this, x, s) : x;
}

Interval Measure::support_hull() const {
    return std::visit(Overloaded{
                          [](const Discrete& d) { return Interval{d.x.front(), d.x.back()}; },
                          [](const Uniform& u) { return Interval{u.a, u.b}; },
                          [](const Gaussian&) { return Interval{}; },
                          [](const Laplace&) { return Interval{}; },
                          [](const FoldedNormal&) { return Interval{0.0, kInf}; },
                          [](const Exponential&) { return Interval{0.0, kInf}; },
                          [](const Mixture& m) {
                              Interval h{kInf, -kInf};
                              for (std::size_t i = 0; i < m.components.size(); ++i) {
                                  if (m.weights[i] == 0.0) continue;
                                  const Interval c = m.components[i].support_hull();
                                  h.lo = std::min(h.lo, c.lo);
                                  h.hi = std::max(h.hi, c.hi);
                              }
                              return h;
                          },
                          [](const Empirical& e) { return Interval{e.sorted.front(), e.sorted.back()}; },
                          [](const GridQuantile& g) { return Interval{g.sorted.front(), g.sorted.back()}; },
                      },
                      data_);
}

double Measure::pdf(double x) const {
    return std::visit(
        Overloaded{
            [x](const Uniform& u) { return (x >= u.a && x <= u.b) ? 1.0 / (u.b - u.a) : 0.0; },
            [x](const Gaussian& g) { return normal_pdf((x - g.mean) / g.std) / g.std; },
            [x](const Laplace& l) { return std::exp(-std::abs(x - l.loc) / l.scale) / (2.0 * l.scale); },
            [x](const FoldedNormal& f) {
                if (x < 0.0) return 0.0;
                return (normal_pdf((x - f.mu) / f.sigma) + normal_pdf((x + f.mu) / f.sigma)) / f.sigma;
            },
            [x](const Exponential& e) { return x < 0.0 ? 0.0 : e.rate * std::exp(-e.rate * x); },
            [x](const Mixture& m) {
                double r = 0.0;
                for (std::size_t i = 0; i < m.components.size(); ++i)
                    r += m.weights[i] * m.components[i].pdf(x);
                return r;
            },
            [](const auto&) -> double { throw AtomicTargetError("pdf: measure has atoms"); },
        },
        data_);
}

std::vector<Atom> Measure::atoms() const {
    return std::visit(Overloaded{
                          [](const Discrete& d) {
                              std::vector<Atom> out;
                              for (std::size_t i = 0; i < d.x.size(); ++i) out.push_back({d.x[i], d.w[i]});
                              return out;
                          },
                          [](const Mixture& m) {
                              std::vector<Atom> out;
                              for (std::size_t i = 0; i < m.components.size(); ++i) {
                                  if (m.weights[i] == 0.0) continue;
                                  for (Atom a : m.components[i].atoms()) {
                                      a.mass *= m.weights[i];
                                      out.push_back(a);
                                  }
                              }
                              std::sort(out.begin(), out.end(),
                                        [](const Atom& l, const Atom& r) { return l.location < r.location; });
                              std::vector<Atom> merged;
                              for (const Atom& a : out) {
                                  if (!merged.empty() && merged.back().location == a.location)
                                      merged.back().mass += a.mass;
                                  else
                                      merged.push_back(a);
                              }
                              return merged;
                          },
                          [](const Empirical& e) { return empirical_atoms(e.sorted); },
                          [](const GridQuantile& g) { return empirical_atoms(g.sorted); },
                          [](const auto&) { return std::vector<Atom>{}; },
                      },
                      data_);
}

bool Measure::has_atoms() const { return !atoms().empty(); }

bool Measure::has_convex_support() const {
    return std::visit(Overloaded{
                          [](const Discrete& d) { return d.x.size() == 1; },
                          [](const Mixture& m) {
                              std::vector<Interval> parts;
                              for (std::size_t i = 0; i < m.components.size(); ++i) {
                                  if (m.weights[i] == 0.0) continue;
                                  if (!m.components[i].has_convex_support()) return false;
                                  parts.push_back(m.components[i].support_hull());
                              }
                              std::sort(parts.begin(), parts.end(),
                                        [](const Interval& l, const Interval& r) { return l.lo < r.lo; });
                              double reach = parts.front().hi;
                              for (const Interval& p : parts) {
                                  if (p.lo > reach) return false;
                                  reach = std::max(reach, p.hi);
                              }
                              return true;
                          },
                          [](const Empirical& e) { return e.sorted.front() == e.sorted.back(); },
                          [](const GridQuantile& g) { return g.sorted.front() == g.sorted.back(); },
                          [](const auto&) { return true; },
                      },
                      data_);
}

double Measure::mean() const {
    return std::visit(
        Overloaded{
            [](const Discrete& d) { return std::inner_product(d.x.begin(), d.x.end(), d.w.begin(), 0.0); },
            [](const Uniform& u) { return 0.5 * (u.a + u.b); },
            [](const Gaussian& g) { return g.mean; },
            [](const Laplace& l) { return l.loc; },
            [](const FoldedNormal& f) { return folded_normal_mean(f.mu, f.sigma); },
            [](const Exponential& e) { return 1.0 / e.rate; },
            [](const Mixture& m) {
                double r = 0.0;
                for (std::size_t i = 0; i < m.components.size(); ++i) r += m.weights[i] * m.components[i].mean();
                return r;
            },
            [](const Empirical& e) {
                return std::accumulate(e.sorted.begin(), e.sorted.end(), 0.0) / static_cast<double>(e.sorted.size());
            },
            [](const GridQuantile& g) {
                return std::accumulate(g.sorted.begin(), g.sorted.end(), 0.0) / static_cast<double>(g.sorted.size());
            },
        },
        data_);
}

double Measure::expected_abs_deviation(double u) const {
    return std::visit(
        Overloaded{
            [u](const Discrete& d) {
                double r = 0.0;
                for (std::size_t i = 0; i < d.x.size(); ++i) r += d.w[i] * std::abs(u - d.x[i]);
                return r;
            },
            [u](const Uniform& un) {
                if (u <= un.a) return 0.5 * (un.a + un.b) - u;
                if (u >= un.b) return u - 0.5 * (un.a + un.b);
                return ((u - un.a) * (u - un.a) + (un.b - u) * (un.b - u)) / (2.0 * (un.b - un.a));
            },
            [u](const Gaussian& g) {
                const double d = u - g.mean;
                const double z = d / g.std;
                return d * std::erf(z / std::numbers::sqrt2) + 2.0 * g.std * normal_pdf(z);
            },
            [u](const Laplace& l) {
                const double d = std::abs(u - l.loc);
                return d + l.scale * std::exp(-d / l.scale);
            },
            [u](const FoldedNormal& f) {
                const double mean = folded_normal_mean(f.mu, f.sigma);
                if (u <= 0.0) return mean - u;
                const double sg = f.sigma;
                // int_0^u R(x) dx through the antiderivative of the normal CDF.
                const double cdf_integral =
                    sg * (normal_cdf_integral((u - f.mu) / sg) - normal_cdf_integral(-f.mu / sg)) +
                    sg * (normal_cdf_integral((u + f.mu) / sg) - normal_cdf_integral(f.mu / sg)) - u;
                return 2.0 * cdf_integral + mean - u;
            },
            [u](const Exponential& e) {
                if (u <= 0.0) return 1.0 / e.rate - u;
                return u - 1.0 / e.rate + 2.0 * std::exp(-e.rate * u) / e.rate;
            },
            [u](const Mixture& m) {
                double r = 0.0;
                for (std::size_t i = 0; i < m.components.size(); ++i)
                    r += m.weights[i] * m.components[i].expected_abs_deviation(u);
                return r;
            },
            [u](const Empirical& e) { return empirical_abs_deviation(e.sorted, u); },
            [u](const GridQuantile& g) { return empirical_abs_deviation(g.sorted, u); },
        },
        data_);
}

std::vector<double> Measure::breakpoints() const {
    return std::visit(Overloaded{
                          [](const Discrete& d) { return d.x; },
                          [](const Uniform& u) { return std::vector<double>{u.a, u.b}; },
                          [](const Gaussian&) { return std::vector<double>{}; },
                          [](const Laplace& l) { return std::vector<double>{l.loc}; },
                          [](const FoldedNormal&) { return std::vector<double>{0.0}; },
                          [](const Exponential&) { return std::vector<double>{0.0}; },
                          [](const Mixture& m) {
                              std::vector<double> out;
                              for (const Measure& c : m.components) {
                                  const auto b = c.breakpoints();
                                  out.insert(out.end(), b.begin(), b.end());
                              }
                              std::sort(out.begin(), out.end());
                              out.erase(std::unique(out.begin(), out.end()), out.end());
                              return out;
                          },
                          [](const Empirical& e) { return unique_values(e.sorted); },
                          [](const GridQuantile& g) { return unique_values(g.sorted); },
                      },
                      data_);
}

double Measure::sup_density() const {
    if (has_atoms()) return kInf;
    return std::visit(Overloaded{
                          [](const Uniform& u) { return 1.0 / (u.b - u.a); },
                          [](const Gaussian& g) { return 1.0 / (std::sqrt(2.0 * std::numbers::pi) * g.std); },
                          [](const Laplace& l) { return 1.0 / (2.0 * l.scale); },
                          [](const Exponential& e) { return e.rate; },
                          [this](const auto&) { return numeric_sup_density(*this); },
                      },
                      data_);
}

double Measure::inf_density_on_hull() const {
    if (has_atoms() || !has_convex_support()) return 0.0;
    const Interval hull = support_hull();
    if (!hull.bounded()) return 0.0;
    return std::visit(Overloaded{
                          [](const Uniform& u) { return 1.0 / (u.b - u.a); },
                          [this, hull](const auto&) {
                              constexpr int cells = 4000;
                              const double h = (hull.hi - hull.lo) / cells;
                              double lowest = kInf;
                              for (int i = 0; i < cells; ++i) lowest = std::min(lowest, pdf(hull.lo + (i + 0.5) * h));
                              return lowest;
                          },
                      },
                      data_);
}

std::string Measure::to_string() const {
    return std::visit(
        Overloaded{
            [](const Discrete& d) {
                if (d.x.size() == 1) return "dirac(" + fmt_number(d.x[0]) + ")";
                return "discrete(x=" + fmt_list(d.x) + ", w=" + fmt_list(d.w) + ")";
            },
            [](const Uniform& u) { return "uniform(" + fmt_number(u.a) + ", " + fmt_number(u.b) + ")"; },
            [](const Gaussian& g) { return "gaussian(" + fmt_number(g.mean) + ", " + fmt_number(g.std) + ")"; },
            [](const Laplace& l) { return "laplace(" + fmt_number(l.loc) + ", " + fmt_number(l.scale) + ")"; },
            [](const FoldedNormal& f) {
                return "folded_normal(" + fmt_number(f.mu) + ", " + fmt_number(f.sigma) + ")";
            },
            [](const Exponential& e) { return "exponential(" + fmt_number(e.rate) + ")"; },
            [](const Mixture& m) {
                std::string out = "mixture(";
                for (std::size_t i = 0; i < m.components.size(); ++i) {
                    if (i) out += " + ";
                    out += fmt_number(m.weights[i]) + "*" + m.components[i].to_string();
                }
                return out + ")";
            },
            [](const Empirical& e) { return "empirical(x=" + fmt_list(e.sorted) + ")"; },
            [](const GridQuantile& g) { return "grid(g=" + fmt_list(g.values) + ")"; },
        },
        data_);
}

Interval effective_range(const Measure& m, double tail) {
    const Interval hull = m.support_hull();
    return {hull.lo > -kInf ? hull.lo : m.quantile(tail), hull.hi < kInf ? hull.hi : m.quantile(1.0 - tail)};
}

double half_mean_distance(const Measure& m) {
    return std::visit(
        Overloaded{
            [](const Measure::Discrete& d) {
                double r = 0.0;
                for (std::size_t k = 0; k + 1 < d.x.size(); ++k)
                    r += d.cumulative[k] * (1.0 - d.cumulative[k]) * (d.x[k + 1] - d.x[k]);
                return r;
            },
            [](const Measure::Uniform& u) { return (u.b - u.a) / 6.0; },
            [](const Measure::Gaussian& g) { return g.std / std::sqrt(std::numbers::pi); },
            [](const Measure::Laplace& l) { return 0.75 * l.scale; },
            [](const Measure::Exponential& e) { return 0.5 / e.rate; },
            [](const Measure::Empirical& e) { return empirical_half_mean_distance(e.sorted); },
            [](const Measure::GridQuantile& g) { return empirical_half_mean_distance(g.sorted); },
            [&m](const auto&) {
                const Interval range = effective_range(m);
                const auto bps = m.breakpoints();
                auto f = [&m](double x, Side side) {
                    const double r = side == Side::Right ? m.cdf_right(x) : m.cdf_left(x);
                    return r * (1.0 - r);
                };
                const auto res = integrate_piecewise(f, range.lo, range.hi, bps, 1e-12);
                if (!res.converged) throw NumericalError("half_mean_distance: quadrature did not converge");
                return res.value;
            },
        },
        m.data());
}

double expected_abs_deviation_quadrature(const Measure& m, double u, double abs_tol) {
    const Interval range = effective_range(m);
    const auto bps = m.breakpoints();
    auto below = [&m](double x, Side side) { return side == Side::Right ? m.cdf_right(x) : m.cdf_left(x); };
    auto above = [&m](double x, Side side) {
        return 1.0 - (side == Side::Right ? m.cdf_right(x) : m.cdf_left(x));
    };
    double total = 0.0;
    if (u <= range.lo) {
        total = (range.lo - u) + integrate_piecewise(above, range.lo, range.hi, bps, abs_tol).value;
    } else if (u >= range.hi) {
        total = (u - range.hi) + integrate_piecewise(below, range.lo, range.hi, bps, abs_tol).value;
    } else {
        total = integrate_piecewise(below, range.lo, u, bps, abs_tol).value +
                integrate_piecewise(above, u, range.hi, bps, abs_tol).value;
    }
    return total;
}

} // namespace mmdflow
