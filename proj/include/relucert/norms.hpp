#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "relucert/config.hpp"
#include "relucert/errors.hpp"
#include "relucert/geometry.hpp"
#include "relucert/network.hpp"
#include "relucert/rng.hpp"

namespace relucert {

struct HolderEstimate {
    double gamma = 1.0;
    double v = 1.0;      // sup restricted to [lo, v]^d
    int grid_n = 0;
    long n_pairs = 0;
    double value = 0.0;
};

struct SobolevEstimate {
    double gamma = 0.5;
    double p = 2.0;
    long n_samples = 0;
    std::uint64_t seed = 0;
    double value = 0.0;
    double std_error = 0.0;
};

struct NormReport {
    double lip_seminorm = 0.0;
    double inf_abs = 0.0;
    Vec argmin;
    double lipnorm_A = 0.0; // inf_abs + lip_seminorm, by definition
    std::optional<HolderEstimate> holder;
    std::optional<SobolevEstimate> sobolev;
};

// Exact Lipschitz seminorm of the realization on the box: the function is
// piecewise affine and the domain convex, so the supremum difference quotient
// is the largest chamber gradient norm. Returns the witness chamber.
inline std::pair<double, Chamber> lipschitz_seminorm(const ShallowNet& net, const BoxDomain& box,
                                                     const GeomConfig& cfg = {}) {
    std::vector<Chamber> chambers = enumerate_chambers(net, box, cfg);
    if (chambers.empty()) throw InfeasibleGeometry("lipschitz_seminorm: no chambers certified");
    const Chamber* best = &chambers.front();
    double best_norm = euclid_norm(best->gradient);
    for (const Chamber& ch : chambers) {
        double g = euclid_norm(ch.gradient);
        if (g > best_norm) {
            best_norm = g;
            best = &ch;
        }
    }
    return {best_norm, *best};
}

namespace detail {

// Per-chamber closed polytope constraints (not slack-shrunk): used to take
// exact affine minima/maxima over chamber-and-box.
inline LpProblem chamber_lp(const ShallowNet& net, const BoxDomain& box, const Chamber& ch,
                            const NeuronClassification& cls, const Vec& objective) {
    const int d = box.dim;
    LpProblem lp;
    lp.objective = objective;
    for (int i : cls.kink) {
        double sgn = ch.pattern.signs[i] ? 1.0 : -1.0;
        double nw = euclid_norm(net.hidden_weights[i]);
        std::vector<double> row(d, 0.0);
        for (int j = 0; j < d; ++j) row[j] = -sgn * net.hidden_weights[i][j] / nw;
        lp.ineq_lhs.push_back(std::move(row));
        lp.ineq_rhs.push_back(sgn * net.hidden_biases[i] / nw);
    }
    for (int j = 0; j < d; ++j) {
        std::vector<double> row(d, 0.0);
        row[j] = -1.0;
        lp.ineq_lhs.push_back(row);
        lp.ineq_rhs.push_back(-box.lo);
        row[j] = 1.0;
        lp.ineq_lhs.push_back(std::move(row));
        lp.ineq_rhs.push_back(box.hi);
    }
    return lp;
}

inline bool lex_less(const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace detail

// inf over A of |realization| with a deterministic argmin. Over the whole box
// the affine piece of every chamber is minimized/maximized by two LPs; a sign
// change pins an exact zero on the segment between the two optimizers. Ties
// resolve by smallest chamber pattern, then lexicographically smallest point.
inline std::pair<double, Vec> inf_abs_on_set(const ShallowNet& net, const BoxDomain& box,
                                             const GeomConfig& cfg = {}) {
    if (box.reference) {
        double best = 0.0;
        Vec arg;
        bool first = true;
        for (const Vec& p : *box.reference) {
            double v = std::abs(evaluate(net, p));
            if (first || v < best || (v == best && detail::lex_less(p, arg))) {
                best = v;
                arg = p;
                first = false;
            }
        }
        return {best, arg};
    }

    NeuronClassification cls = detail::classify_sets(net, box, cfg);
    std::vector<Chamber> chambers = enumerate_chambers(net, box, cfg);
    bool found = false;
    double best = 0.0;
    Vec arg;
    for (const Chamber& ch : chambers) {
        Vec minus = ch.gradient;
        for (double& c : minus) c = -c;
        LpResult lo = solve_lp(detail::chamber_lp(net, box, ch, cls, minus));
        LpResult hi = solve_lp(detail::chamber_lp(net, box, ch, cls, ch.gradient));
        if (lo.status != LpResult::Status::Optimal || hi.status != LpResult::Status::Optimal)
            continue;
        double fmin = ch.offset + dot(ch.gradient, lo.x);
        double fmax = ch.offset + dot(ch.gradient, hi.x);
        double value;
        Vec point;
        if (fmin > 0.0) {
            value = fmin;
            point = lo.x;
        } else if (fmax < 0.0) {
            value = -fmax;
            point = hi.x;
        } else {
            value = 0.0;
            // Zero crossing of the affine piece on the segment lo.x -> hi.x.
            double t = (fmax - fmin) > 0.0 ? fmin / (fmin - fmax) : 0.0;
            point.resize(box.dim);
            for (int j = 0; j < box.dim; ++j) point[j] = lo.x[j] + t * (hi.x[j] - lo.x[j]);
        }
        box.clamp(point);
        if (!found || value < best || (value == best && detail::lex_less(point, arg))) {
            found = true;
            best = value;
            arg = std::move(point);
        }
    }
    if (!found) throw InfeasibleGeometry("inf_abs_on_set: no chamber certified");
    return {best, arg};
}

// Lipschitz norm |||f|||_A = inf_A |f| + Lip(f) as a NormReport.
inline NormReport lipnorm(const ShallowNet& net, const BoxDomain& box, const GeomConfig& cfg = {}) {
    NormReport rep;
    auto [L, chamber] = lipschitz_seminorm(net, box, cfg);
    auto [inf_abs, arg] = inf_abs_on_set(net, box, cfg);
    rep.lip_seminorm = L;
    rep.inf_abs = inf_abs;
    rep.argmin = std::move(arg);
    rep.lipnorm_A = rep.inf_abs + rep.lip_seminorm;
    return rep;
}

// Certified lower bound of the Hoelder norm (exponent gamma, sup restricted
// to [lo, v]^d): sup |f| over grid points plus the maximal difference
// quotient over grid pairs. Monotone nondecreasing under nested refinement.
// Full grid for d <= 3; higher dimensions fall back to sampled pairs, a
// weaker lower bound.
inline HolderEstimate holder_norm_estimate(const ShallowNet& net, const BoxDomain& box,
                                           double gamma, double v, int grid_n) {
    if (gamma < 0.0 || gamma > 1.0) throw DomainError("holder_norm_estimate: gamma outside [0,1]");
    if (v < box.lo || v > box.hi) throw DomainError("holder_norm_estimate: v outside box");
    if (grid_n < 2) throw DomainError("holder_norm_estimate: grid_n must be >= 2");
    const int d = box.dim;
    HolderEstimate est;
    est.gamma = gamma;
    est.v = v;
    est.grid_n = grid_n;

    std::vector<Vec> pts;
    std::vector<double> vals;
    if (d <= 3) {
        std::size_t total = 1;
        for (int j = 0; j < d; ++j) total *= static_cast<std::size_t>(grid_n);
        // The quotient scan is quadratic in the node count.
        if (total > 50'000)
            throw DomainError("holder_norm_estimate: grid too large for the pair scan");
        pts.reserve(total);
        Vec x(d, box.lo);
        std::vector<int> idx(d, 0);
        for (std::size_t k = 0; k < total; ++k) {
            for (int j = 0; j < d; ++j)
                x[j] = box.lo + idx[j] * (box.hi - box.lo) / (grid_n - 1);
            pts.push_back(x);
            for (int j = d - 1; j >= 0; --j) {
                if (++idx[j] < grid_n) break;
                idx[j] = 0;
            }
        }
    } else {
        // Coordinate-sampled fallback (fixed internal stream, deterministic).
        CounterRng rng(0x48F0C3A5u);
        const std::size_t total = 100'000;
        pts.reserve(total);
        Vec x(d);
        for (std::size_t k = 0; k < total; ++k) {
            for (int j = 0; j < d; ++j)
                x[j] = rng.uniform(k * static_cast<std::size_t>(d) + j, box.lo, box.hi);
            pts.push_back(x);
        }
    }
    vals.reserve(pts.size());
    for (const Vec& p : pts) vals.push_back(evaluate(net, p));

    double sup_abs = 0.0;
    const double vtol = 1e-12 * (box.hi - box.lo);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        bool in_sub = true;
        for (double c : pts[k])
            if (c > v + vtol) {
                in_sub = false;
                break;
            }
        if (in_sub) sup_abs = std::max(sup_abs, std::abs(vals[k]));
    }

    double max_quot = 0.0;
    long pairs = 0;
    if (d <= 3) {
        for (std::size_t a = 0; a < pts.size(); ++a) {
            for (std::size_t b = a + 1; b < pts.size(); ++b) {
                double df = std::abs(vals[a] - vals[b]);
                double dist = 0.0;
                for (int j = 0; j < d; ++j) {
                    double t = pts[a][j] - pts[b][j];
                    dist += t * t;
                }
                dist = std::sqrt(dist);
                double q = df / std::pow(dist, gamma);
                max_quot = std::max(max_quot, q);
                ++pairs;
            }
        }
    } else {
        CounterRng rng(0x7B1E55D1u);
        const long npairs = 100'000;
        Vec xa(d), xb(d);
        for (long k = 0; k < npairs; ++k) {
            for (int j = 0; j < d; ++j) {
                xa[j] = rng.uniform(static_cast<std::uint64_t>(2 * k) * d + j, box.lo, box.hi);
                xb[j] = rng.uniform(static_cast<std::uint64_t>(2 * k + 1) * d + j, box.lo, box.hi);
            }
            double dist = 0.0;
            for (int j = 0; j < d; ++j) {
                double t = xa[j] - xb[j];
                dist += t * t;
            }
            dist = std::sqrt(dist);
            if (dist == 0.0) continue;
            double q = std::abs(evaluate(net, xa) - evaluate(net, xb)) / std::pow(dist, gamma);
            max_quot = std::max(max_quot, q);
            ++pairs;
        }
    }
    est.n_pairs = pairs;
    est.value = sup_abs + max_quot;
    return est;
}

// Monte-Carlo estimate of the Sobolev-Slobodeckij norm W^{gamma,p}: L^p term
// plus the Gagliardo double integral, both by plain uniform sampling over the
// box (the kernel is integrable for piecewise-affine f whenever gamma < 1).
// Deterministic given the seed; the reported standard error combines both
// terms by the delta method.
inline SobolevEstimate sobolev_slobodeckij_estimate(const ShallowNet& net, const BoxDomain& box,
                                                    double gamma, double p, long n_samples,
                                                    std::uint64_t seed) {
    if (gamma < 0.0 || gamma > 1.0) throw DomainError("sobolev estimate: gamma outside [0,1]");
    if (p < 1.0) throw DomainError("sobolev estimate: p must be >= 1");
    if (n_samples < 2) throw DomainError("sobolev estimate: n_samples must be >= 2");
    const int d = box.dim;
    const double volume = std::pow(box.hi - box.lo, d);

    CounterRng root(seed);
    CounterRng sx = root.split(0), px = root.split(1), py = root.split(2);

    auto mean_se = [n_samples](double sum, double sumsq) {
        double mean = sum / n_samples;
        double var = std::max(0.0, sumsq / n_samples - mean * mean);
        return std::pair<double, double>(mean, std::sqrt(var / n_samples));
    };

    // L^p term.
    double s1 = 0.0, s1sq = 0.0;
    {
        Vec x(d);
        for (long k = 0; k < n_samples; ++k) {
            for (int j = 0; j < d; ++j)
                x[j] = sx.uniform(static_cast<std::uint64_t>(k) * d + j, box.lo, box.hi);
            double t = std::pow(std::abs(evaluate(net, x)), p);
            s1 += t;
            s1sq += t * t;
        }
    }
    auto [m1, se1] = mean_se(s1, s1sq);

    // Gagliardo double-integral term.
    double s2 = 0.0, s2sq = 0.0;
    {
        Vec x(d), y(d);
        const double expo = gamma * p + d;
        for (long k = 0; k < n_samples; ++k) {
            for (int j = 0; j < d; ++j) {
                x[j] = px.uniform(static_cast<std::uint64_t>(k) * d + j, box.lo, box.hi);
                y[j] = py.uniform(static_cast<std::uint64_t>(k) * d + j, box.lo, box.hi);
            }
            double dist = 0.0;
            for (int j = 0; j < d; ++j) {
                double t = x[j] - y[j];
                dist += t * t;
            }
            dist = std::sqrt(dist);
            if (dist == 0.0) continue;
            double kern = std::pow(std::abs(evaluate(net, x) - evaluate(net, y)), p) / std::pow(dist, expo);
            s2 += kern;
            s2sq += kern * kern;
        }
    }
    auto [m2, se2] = mean_se(s2, s2sq);

    auto term = [p](double volfac, double mean) {
        return mean > 0.0 ? std::pow(volfac * mean, 1.0 / p) : 0.0;
    };
    auto term_se = [p](double volfac, double mean, double se) {
        if (mean <= 0.0 || se <= 0.0) return 0.0;
        double t = std::pow(volfac * mean, 1.0 / p);
        return t / (p * mean) * se; // delta method: d/dm (volfac*m)^{1/p}
    };

    SobolevEstimate est;
    est.gamma = gamma;
    est.p = p;
    est.n_samples = n_samples;
    est.seed = seed;
    double t1 = term(volume, m1);
    double t2 = term(volume * volume, m2);
    est.value = t1 + t2;
    double e1 = term_se(volume, m1, se1);
    double e2 = term_se(volume * volume, m2, se2);
    est.std_error = std::sqrt(e1 * e1 + e2 * e2);
    return est;
}

// Gamma(d/2) for integer d >= 1 via the exact half-integer recurrence from
// Gamma(1/2) = sqrt(pi) and Gamma(1) = 1.
inline double gamma_half_integer(int d) {
    if (d < 1) throw DomainError("gamma_half_integer: d must be >= 1");
    if (d % 2 == 0) {
        double g = 1.0; // Gamma(1)
        for (int k = 1; k < d / 2; ++k) g *= k;
        return g;
    }
    double g = std::sqrt(M_PI); // Gamma(1/2)
    for (double x = 0.5; x < d / 2.0 - 0.25; x += 1.0) g *= x;
    return g;
}

namespace detail {

// pi^{d/2} / Gamma(d/2) with the sqrt(pi) of odd d cancelled symbolically, so
// the closed-form integrals below are exact at the arguments that occur.
inline double pi_pow_over_gamma(int d) {
    auto pow_int = [](double base, int e) {
        double r = 1.0;
        for (int k = 0; k < e; ++k) r *= base;
        return r;
    };
    if (d % 2 == 0) {
        double fact = 1.0;
        for (int k = 1; k < d / 2; ++k) fact *= k;
        return pow_int(M_PI, d / 2) / fact;
    }
    double half_prod = 1.0; // Gamma(d/2) / sqrt(pi)
    for (double x = 0.5; x < d / 2.0 - 0.25; x += 1.0) half_prod *= x;
    return pow_int(M_PI, (d - 1) / 2) / half_prod;
}

inline double pow_maybe_int(double base, double e) {
    double ri = std::nearbyint(e);
    if (ri == e && std::abs(ri) < 64.0) {
        double r = 1.0;
        double b = base;
        int n = static_cast<int>(std::abs(ri));
        for (int k = 0; k < n; ++k) r *= b;
        return ri < 0 ? 1.0 / r : r;
    }
    return std::pow(base, e);
}

} // namespace detail

// int_{||x|| <= r} ||x||^gamma dx = 2 pi^{d/2} r^{d+gamma} / ((d+gamma) Gamma(d/2)).
inline double ball_integral(int d, double r, double gamma) {
    if (d < 1) throw DomainError("ball_integral: d must be >= 1");
    if (!(r > 0.0)) throw DomainError("ball_integral: radius must be positive");
    if (!(gamma > -static_cast<double>(d))) throw DomainError("ball_integral: gamma <= -d");
    return 2.0 * detail::pi_pow_over_gamma(d) * detail::pow_maybe_int(r, d + gamma) / (d + gamma);
}

// Closed-form upper bound of the box double integral of ||x - y||^gamma:
// 2 pi^{d/2} d^{(d+gamma)/2} (b-a)^{2d+gamma} / ((d+gamma) Gamma(d/2)).
inline double box_double_integral_bound(int d, double a, double b, double gamma) {
    if (d < 1) throw DomainError("box_double_integral_bound: d must be >= 1");
    if (!(b > a)) throw DomainError("box_double_integral_bound: requires b > a");
    if (!(gamma > -static_cast<double>(d))) throw DomainError("box_double_integral_bound: gamma <= -d");
    return 2.0 * detail::pi_pow_over_gamma(d) * detail::pow_maybe_int(static_cast<double>(d), (d + gamma) / 2.0) *
           detail::pow_maybe_int(b - a, 2 * d + gamma) / (d + gamma);
}

// ||| f |||_{gamma,v} <= factor * ||| f |||_{lambda,w}: the factor
// max{1, [sqrt(d)(b-a)]^{lambda-gamma}}.
inline double holder_comparison_factor(int d, double a, double b, double gamma, double lambda) {
    if (d < 1) throw DomainError("holder_comparison_factor: d must be >= 1");
    if (!(b > a)) throw DomainError("holder_comparison_factor: requires b > a");
    if (!(0.0 <= gamma && gamma <= lambda && lambda <= 1.0))
        throw OrderViolation("holder_comparison_factor: requires 0 <= gamma <= lambda <= 1");
    return std::max(1.0, std::pow(std::sqrt(static_cast<double>(d)) * (b - a), lambda - gamma));
}

// W^{gamma,p} <= factor * W^{lambda,q} comparison constant:
// [max{(b-a)^d, 2 pi^{d/2} d^{E/2} (b-a)^{d+E} (q-p) / ((lambda-gamma) q p Gamma(d/2))}]^{(q-p)/(qp)}
// with E = (lambda-gamma) q p / (q-p).
inline double sobolev_comparison_factor(int d, double a, double b, double gamma, double lambda,
                                        double p, double q) {
    if (d < 1) throw DomainError("sobolev_comparison_factor: d must be >= 1");
    if (!(b > a)) throw DomainError("sobolev_comparison_factor: requires b > a");
    if (!(0.0 <= gamma && gamma < lambda && lambda <= 1.0))
        throw OrderViolation("sobolev_comparison_factor: requires gamma < lambda in [0,1]");
    if (!(1.0 <= p && p < q))
        throw OrderViolation("sobolev_comparison_factor: requires 1 <= p < q");
    const double E = (lambda - gamma) * q * p / (q - p);
    double branch1 = detail::pow_maybe_int(b - a, static_cast<double>(d));
    double branch2 = 2.0 * detail::pi_pow_over_gamma(d) * std::pow(static_cast<double>(d), E / 2.0) *
                     std::pow(b - a, d + E) * (q - p) / ((lambda - gamma) * q * p);
    return std::pow(std::max(branch1, branch2), (q - p) / (q * p));
}

// Lip(N^theta) <= ||theta||^2.
inline double param_lip_upper(const Vec& theta) {
    double n = euclid_norm(theta);
    return n * n;
}

// |||N^theta|||_A <= ||theta|| + (2 + max{|a|, |b|} sqrt(d)) ||theta||^2.
inline double param_lipnorm_upper(const Vec& theta, const BoxDomain& box) {
    double n = euclid_norm(theta);
    double coef = 2.0 + std::max(std::abs(box.lo), std::abs(box.hi)) * std::sqrt(box.dim);
    return n + coef * n * n;
}

} // namespace relucert
