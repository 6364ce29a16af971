#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relucert/errors.hpp"
#include "relucert/network.hpp"
#include "relucert/norms.hpp"
#include "relucert/reparam.hpp"
#include "relucert/rng.hpp"

namespace relucert {

enum class FamilyKind { ShrinkingSlope, Staircase, Spike };

inline const char* to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::ShrinkingSlope: return "shrinking-slope";
        case FamilyKind::Staircase: return "staircase";
        case FamilyKind::Spike: return "spike";
    }
    return "?";
}

// Spike exponent selection: both constraints gamma*q < 1-gamma and
// (p-d)*q < d must hold strictly; take half the binding bound, dropping any
// branch whose denominator is nonpositive (that constraint then holds for
// every positive q).
inline double select_spike_q(double gamma, double p, int d) {
    std::vector<double> bounds;
    if (gamma > 0.0) bounds.push_back((1.0 - gamma) / std::max(gamma, 1e-6));
    if (p > d) bounds.push_back(d / std::max(p - d, 1e-6));
    double q = bounds.empty() ? 1.0 : 0.5 * *std::min_element(bounds.begin(), bounds.end());
    if (!(q > 0.0) || !(gamma * q < 1.0 - gamma) || !((p - d) * q < d))
        throw InfeasibleQ("select_spike_q: no feasible exponent");
    return q;
}

// Family of parameter vectors indexed by n, with the parameters the lower
// bound proofs require. Spike carries the exponent q and the (gamma, p) it
// was tuned for.
struct FamilySpec {
    FamilyKind kind = FamilyKind::ShrinkingSlope;
    int n = 1;
    int d = 1;
    int h = 1;
    double a = 0.0;
    double b = 1.0;
    double q = 0.0;     // Spike only
    double gamma = 0.0; // Spike only
    double p = 0.0;     // Spike only

    void validate() const {
        if (n < 1) throw DomainError("FamilySpec: n must be >= 1");
        if (d < 1 || h < 1) throw DomainError("FamilySpec: dimensions must be positive");
        if (!(b > a)) throw DomainError("FamilySpec: requires b > a");
        if (kind == FamilyKind::Spike) {
            if (!(gamma * q < 1.0 - gamma) || !((p - d) * q < d) || !(q > 0.0))
                throw InfeasibleQ("FamilySpec: spike exponent violates its constraints");
        }
    }
};

// theta(n): one neuron of unit slope along x_1 with kink at the lower box
// face and output weight 1/n. Realization n^{-1} max{x_1 - a, 0}.
inline ShallowNet shrinking_slope_family(int n, int d, int h, double a, double b) {
    if (n < 1) throw DomainError("shrinking_slope_family: n must be >= 1");
    (void)b;
    ShallowNet net = ShallowNet::zeros(d, h);
    net.hidden_weights[0][0] = 1.0;
    net.hidden_biases[0] = -a;
    net.output_weights[0] = 1.0 / n;
    return net;
}

// theta(n): h unit-slope neurons with kinks at a + i(b-a)/(h+1) and output
// bias n. Realization n + sum_i max{x_1 - a - i(b-a)/(h+1), 0}.
inline ShallowNet staircase_family(int n, int d, int h, double a, double b) {
    if (n < 1) throw DomainError("staircase_family: n must be >= 1");
    ShallowNet net = ShallowNet::zeros(d, h);
    for (int i = 0; i < h; ++i) {
        net.hidden_weights[i][0] = 1.0;
        net.hidden_biases[i] = -a - (i + 1) * (b - a) / (h + 1);
        net.output_weights[i] = 1.0;
    }
    net.output_bias = static_cast<double>(n);
    return net;
}

// theta(n): one neuron with all d weights n^q and bias n^{-1} - n^q d b, so
// the realization max{n^q <1, x> + n^{-1} - n^q d b, 0} peaks at n^{-1} in
// the upper box corner while its support shrinks like n^{-1-q}.
inline ShallowNet spike_family(int n, int d, int h, double a, double b, double gamma, double p,
                               std::optional<double> q_override = std::nullopt) {
    if (n < 1) throw DomainError("spike_family: n must be >= 1");
    (void)a;
    double q = q_override ? *q_override : select_spike_q(gamma, p, d);
    ShallowNet net = ShallowNet::zeros(d, h);
    double nq = std::pow(static_cast<double>(n), q);
    for (int j = 0; j < d; ++j) net.hidden_weights[0][j] = nq;
    net.hidden_biases[0] = 1.0 / n - nq * d * b;
    net.output_weights[0] = 1.0;
    return net;
}

inline ShallowNet make_family(const FamilySpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case FamilyKind::ShrinkingSlope:
            return shrinking_slope_family(spec.n, spec.d, spec.h, spec.a, spec.b);
        case FamilyKind::Staircase:
            return staircase_family(spec.n, spec.d, spec.h, spec.a, spec.b);
        case FamilyKind::Spike:
            return spike_family(spec.n, spec.d, spec.h, spec.a, spec.b, spec.gamma, spec.p, spec.q);
    }
    throw DomainError("make_family: unknown kind");
}

// Proven lower bound on ||vartheta||_2 over ALL vartheta with the family's
// realization. These are the three closed forms from the lower-bound proofs,
// never obtained by searching over reparameterizations (search only yields
// upper bounds on the infimum).
inline double lower_bound_any_reparam(const FamilySpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case FamilyKind::ShrinkingSlope:
            return 1.0 / std::sqrt(static_cast<double>(spec.n));
        case FamilyKind::Staircase:
            return static_cast<double>(spec.n);
        case FamilyKind::Spike:
            return std::pow(static_cast<double>(spec.n), spec.q / 2.0) *
                   std::pow(static_cast<double>(spec.d), 0.25);
    }
    throw DomainError("lower_bound_any_reparam: unknown kind");
}

struct DivergenceRow {
    int n = 0;
    double lower_bound = 0.0;
    double norm_value = 0.0; // exact lipnorm, or the Hoelder estimate for Spike
    std::optional<double> holder_estimate;
    std::optional<double> sobolev_estimate;
    std::vector<double> ratios; // lower_bound / norm_value^exponent, per exponent
};

struct EstimatorConfig {
    int grid_n = 1001;
    long n_samples = 100'000;
    std::uint64_t seed = 0;
};

// One row per n: the certified lower bound, the relevant norm (exact
// Lipschitz norm over A = box for the Lipschitz-exponent families,
// Hoelder/Sobolev estimates for Spike), and the ratio per probed exponent.
inline std::vector<DivergenceRow> divergence_report(FamilyKind kind, const std::vector<int>& n_list,
                                                    const std::vector<double>& exponents,
                                                    double gamma, double v, double p,
                                                    const EstimatorConfig& est, int d, int h,
                                                    double a, double b,
                                                    const GeomConfig& cfg = {}) {
    for (double e : exponents)
        if (!(e >= 0.0)) throw DomainError("divergence_report: exponents must be >= 0");
    std::vector<int> ns = n_list;
    std::sort(ns.begin(), ns.end());
    BoxDomain box = BoxDomain::whole(a, b, d);
    std::vector<DivergenceRow> rows;
    for (int n : ns) {
        FamilySpec spec;
        spec.kind = kind;
        spec.n = n;
        spec.d = d;
        spec.h = h;
        spec.a = a;
        spec.b = b;
        if (kind == FamilyKind::Spike) {
            spec.gamma = gamma;
            spec.p = p;
            spec.q = select_spike_q(gamma, p, d);
        }
        ShallowNet net = make_family(spec);
        DivergenceRow row;
        row.n = n;
        row.lower_bound = lower_bound_any_reparam(spec);
        if (kind == FamilyKind::Spike) {
            row.holder_estimate = holder_norm_estimate(net, box, gamma, v, est.grid_n).value;
            row.sobolev_estimate =
                sobolev_slobodeckij_estimate(net, box, gamma, p, est.n_samples, est.seed).value;
            row.norm_value = *row.holder_estimate;
        } else {
            NormReport rep = lipnorm(net, box, cfg);
            row.norm_value = rep.lipnorm_A;
        }
        for (double e : exponents)
            row.ratios.push_back(row.lower_bound / std::pow(row.norm_value, e));
        rows.push_back(std::move(row));
    }
    return rows;
}

// Output-bias rigidity of the staircase realization: every generated
// realization-preserving transform keeps the output bias at n exactly and the
// reparameterizer reproduces it within 1e-9. Sampling transforms exhibits
// the rigidity; it does not quantify over all reparameterizations.
inline bool staircase_bias_invariance_check(int n, int trials, std::uint64_t seed, int d = 1,
                                            int h = 5, double a = 0.0, double b = 1.0,
                                            const GeomConfig& cfg = {}) {
    if (trials < 1) throw DomainError("staircase_bias_invariance_check: trials must be >= 1");
    BoxDomain box = BoxDomain::whole(a, b, d);
    ShallowNet net = staircase_family(n, d, h, a, b);
    CounterRng rng(seed);
    std::uint64_t ctr = 0;
    for (int t = 0; t < trials; ++t) {
        int i = static_cast<int>(rng.below(ctr++, static_cast<std::uint64_t>(h)));
        double lam = rng.uniform(ctr++, 0.0, 10.0);
        if (lam <= 0.0) lam = 1.0;
        net = neuron_scale(net, i, lam);
        if (rng.below(ctr++, 2) == 0) {
            std::vector<int> sigma(h);
            for (int k = 0; k < h; ++k) sigma[k] = k;
            for (int k = h - 1; k > 0; --k)
                std::swap(sigma[k], sigma[rng.below(ctr++, static_cast<std::uint64_t>(k + 1))]);
            net = permute_neurons(net, sigma);
        }
        if (net.output_bias != static_cast<double>(n)) return false;
        ReparamResult rep = reparameterize(net, box, cfg);
        if (std::abs(rep.output.output_bias - n) > 1e-9) return false;
    }
    return true;
}

} // namespace relucert
