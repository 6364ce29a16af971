#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "relucert/config.hpp"
#include "relucert/errors.hpp"
#include "relucert/geometry.hpp"
#include "relucert/network.hpp"
#include "relucert/norms.hpp"
#include "relucert/rng.hpp"

namespace relucert {

enum class ReparamCase {
    ConstantL0,  // L = 0: constant realization, only the output bias survives
    AffineOnly,  // L > 0, no kink meets the open box: one affine-residual neuron
    Grouped,     // 0 < N < h: one neuron per distinct kink plus the residual
    FullRescale, // N = h: per-neuron rescale by sqrt(L)/||w_i||
};

inline const char* to_string(ReparamCase c) {
    switch (c) {
        case ReparamCase::ConstantL0: return "constant";
        case ReparamCase::AffineOnly: return "affine-only";
        case ReparamCase::Grouped: return "grouped";
        case ReparamCase::FullRescale: return "full-rescale";
    }
    return "?";
}

// Output of the constructive reparameterization together with all trace data
// of the construction and the certified max-norm bound.
struct ReparamResult {
    ShallowNet output;
    ReparamCase case_tag = ReparamCase::ConstantL0;
    double lip = 0.0;            // L, exact Lipschitz seminorm on the box
    double inf_abs = 0.0;        // inf over the box of |realization|
    Vec z;                       // deterministic argmin of |realization|
    ActivationPattern z_pattern; // pattern of z's positive-volume chamber
    Vec u;                       // affine residual
    Vec unit_u;                  // sqrt(L) u / ||u|| (zero branch when u = 0)
    Vec q;                       // box corner minimizing <unit_u, .>
    NeuronClassification groups;
    double bound_rhs = 0.0;
};

// Right side of the main bound: max{ max{2, |a| sqrt(d), |b| sqrt(d)} sqrt(L),
// inf |N| + 2 h (b-a) sqrt(d) L }.
inline double bound_rhs_value(double L, double inf_abs, int d, int h, double a, double b) {
    const double sqd = std::sqrt(static_cast<double>(d));
    double c1 = std::max({2.0, std::abs(a) * sqd, std::abs(b) * sqd}) * std::sqrt(L);
    double c2 = inf_abs + 2.0 * h * (b - a) * sqd * L;
    return std::max(c1, c2);
}

inline double bound_rhs(const ShallowNet& net, const BoxDomain& box, const GeomConfig& cfg = {}) {
    BoxDomain whole = box;
    whole.reference.reset();
    auto [L, witness] = lipschitz_seminorm(net, whole, cfg);
    auto [inf_abs, z] = inf_abs_on_set(net, whole, cfg);
    return bound_rhs_value(L, inf_abs, box.dim, net.hidden_dim, box.lo, box.hi);
}

namespace detail {

// Box corner minimizing <dir, .>: per coordinate the lower corner when the
// coefficient is positive, the upper when negative, the lower on ties.
inline Vec minimizing_corner(const Vec& dir, const BoxDomain& box) {
    Vec q(box.dim, box.lo);
    for (int j = 0; j < box.dim; ++j) q[j] = dir[j] < 0.0 ? box.hi : box.lo;
    return q;
}

} // namespace detail

inline ReparamResult reparameterize(const ShallowNet& net, const BoxDomain& box,
                                    const GeomConfig& cfg = {}) {
    if (net.input_dim != box.dim) throw DimMismatch("reparameterize: box dimension mismatch");
    const int d = net.input_dim, h = net.hidden_dim;
    BoxDomain whole = box;
    whole.reference.reset();

    ReparamResult res;
    auto [L, witness] = lipschitz_seminorm(net, whole, cfg);
    auto [inf_abs, z] = inf_abs_on_set(net, whole, cfg);
    res.lip = L;
    res.inf_abs = inf_abs;
    res.z = z;
    res.bound_rhs = bound_rhs_value(L, inf_abs, d, h, box.lo, box.hi);

    // Noise floor for the computed L. Chamber gradients are sums of the
    // products v_i * w_i, so the floor scales with sum_i |v_i| ||w_i||; that
    // quantity is invariant under per-neuron rescaling, keeping the case
    // split stable when a neuron is inflated.
    double grad_scale = 0.0;
    for (int i = 0; i < h; ++i)
        grad_scale += std::abs(net.output_weights[i]) * euclid_norm(net.hidden_weights[i]);
    const double tol_L = 1e-12 * (1.0 + grad_scale);
    const double value_at_z = evaluate(net, z);

    if (L <= tol_L) {
        res.case_tag = ReparamCase::ConstantL0;
        res.output = ShallowNet::zeros(d, h);
        res.output.output_bias = value_at_z;
        res.u.assign(d, 0.0);
        res.unit_u.assign(d, 0.0);
        res.q.assign(d, box.lo);
        res.groups = detail::classify_sets(net, whole, cfg);
        res.z_pattern.signs.assign(h, 0);
        for (int i : res.groups.always_active) res.z_pattern.signs[i] = 1;
        return res;
    }

    Chamber zch = chamber_of_point(net, z, whole, cfg);
    res.z_pattern = zch.pattern;
    res.groups = detail::classify_sets(net, whole, cfg);
    for (KinkGroup& g : res.groups.groups)
        for (int i : g.members) (zch.pattern.signs[i] ? g.side1 : g.side0).push_back(i);
    const std::vector<KinkGroup>& groups = res.groups.groups;
    const int N = static_cast<int>(groups.size());
    const double sqrtL = std::sqrt(L);

    // Affine residual: always-active neurons plus, per group, the members
    // active on z's side of the kink.
    Vec u(d, 0.0);
    for (int i : res.groups.always_active)
        for (int j = 0; j < d; ++j) u[j] += net.output_weights[i] * net.hidden_weights[i][j];
    for (const KinkGroup& g : groups)
        for (int i : g.side1)
            for (int j = 0; j < d; ++j) u[j] += net.output_weights[i] * net.hidden_weights[i][j];
    const double unorm = euclid_norm(u);
    Vec uu(d, 0.0);
    if (unorm > 0.0)
        for (int j = 0; j < d; ++j) uu[j] = sqrtL * u[j] / unorm;
    Vec q = detail::minimizing_corner(uu, box);
    res.u = u;
    res.unit_u = uu;
    res.q = q;

    if (N == h) {
        if (!res.groups.always_active.empty() || !res.groups.inactive.empty())
            throw InternalCaseViolation("reparameterize: N == h with nonempty A1 or A3");
        res.case_tag = ReparamCase::FullRescale;
        ShallowNet out = ShallowNet::zeros(d, h);
        for (int i = 0; i < h; ++i) {
            double nw = euclid_norm(net.hidden_weights[i]);
            for (int j = 0; j < d; ++j) out.hidden_weights[i][j] = sqrtL * net.hidden_weights[i][j] / nw;
            out.hidden_biases[i] = sqrtL * net.hidden_biases[i] / nw;
            out.output_weights[i] = net.output_weights[i] * nw / sqrtL;
        }
        out.output_bias = net.output_bias;
        res.output = std::move(out);
        return res;
    }

    // Shared by the affine-only and grouped cases: the residual neuron and
    // output bias.
    ShallowNet out = ShallowNet::zeros(d, h);
    const int residual_slot = N; // slot 0 when N == 0
    out.hidden_weights[residual_slot] = uu;
    out.hidden_biases[residual_slot] = -dot(uu, q);
    out.output_weights[residual_slot] = unorm / sqrtL;
    double qz = 0.0;
    for (int j = 0; j < d; ++j) qz += u[j] * (q[j] - z[j]);
    out.output_bias = value_at_z + qz;

    if (N == 0) {
        res.case_tag = ReparamCase::AffineOnly;
        res.output = std::move(out);
        return res;
    }

    res.case_tag = ReparamCase::Grouped;
    for (int s = 0; s < N; ++s) {
        const KinkGroup& g = groups[s];
        const int m = g.representative;
        double nw = euclid_norm(net.hidden_weights[m]);
        // Oriented so that z's chamber lies on the inactive side of the new
        // neuron: positive multiple when z's pattern has the representative
        // inactive, negative when active.
        double sgn = zch.pattern.signs[m] ? -1.0 : 1.0;
        for (int j = 0; j < d; ++j)
            out.hidden_weights[s][j] = sgn * sqrtL * net.hidden_weights[m][j] / nw;
        out.hidden_biases[s] = sgn * sqrtL * net.hidden_biases[m] / nw;
        double vsum = 0.0;
        for (int i : g.members) vsum += net.output_weights[i] * euclid_norm(net.hidden_weights[i]);
        out.output_weights[s] = vsum / sqrtL;
    }
    res.output = std::move(out);
    return res;
}

// Maximum absolute deviation of the two realizations over a seeded uniform
// sample plus all chamber interior points of both nets and the box corners.
inline double verify_equivalence(const ShallowNet& net1, const ShallowNet& net2,
                                 const BoxDomain& box, long n_samples, std::uint64_t seed,
                                 const GeomConfig& cfg = {}) {
    if (net1.input_dim != net2.input_dim || net1.input_dim != box.dim)
        throw DimMismatch("verify_equivalence: dimension mismatch");
    const int d = box.dim;
    std::vector<Vec> points;
    CounterRng rng(seed);
    Vec x(d);
    for (long k = 0; k < n_samples; ++k) {
        for (int j = 0; j < d; ++j)
            x[j] = rng.uniform(static_cast<std::uint64_t>(k) * d + j, box.lo, box.hi);
        points.push_back(x);
    }
    BoxDomain whole = box;
    whole.reference.reset();
    for (const ShallowNet* n : {&net1, &net2})
        for (const Chamber& ch : enumerate_chambers(*n, whole, cfg)) points.push_back(ch.interior_point);
    if (d <= 20) {
        for (std::uint64_t mask = 0; mask < (1ULL << d); ++mask) {
            Vec corner(d);
            for (int j = 0; j < d; ++j) corner[j] = (mask >> j) & 1ULL ? box.hi : box.lo;
            points.push_back(corner);
        }
    }
    double dev = 0.0;
    for (const Vec& p : points) dev = std::max(dev, std::abs(evaluate(net1, p) - evaluate(net2, p)));
    return dev;
}

// Certificate of the explicit norm inequalities. K is the constant
// max{2, |a| sqrt(d), |b| sqrt(d), 2 h (b-a) sqrt(d)}; the chain reads
//   ||vartheta|| <= sqrt(D) K max{lip^{1/2}, lip} <= 8 sqrt(D) K^2 max{||vartheta||^{1/2}, ||vartheta||^2}
// and the weak form uses c = sqrt(D) K, C = 8 sqrt(D) K^2.
struct Certificate {
    double lipnorm_A = 0.0;
    double maxnorm_out = 0.0;   // max-norm of the reparameterized vector
    double eucnorm_out = 0.0;   // Euclidean norm of the reparameterized vector
    double const_K = 0.0;
    double const_c = 0.0;
    double const_C = 0.0;
    double lhs = 0.0;           // ||vartheta||
    double middle = 0.0;        // c max{lip^{1/2}, lip}
    double rhs = 0.0;           // C max{||vartheta||^{1/2}, ||vartheta||^2}
    bool pass_explicit = false;  // max-norm form of the certified bound
    bool pass_combined_lower = false;
    bool pass_combined_upper = false;
    bool pass_weak_lower = false;
    bool pass_weak_upper = false;

    bool all_pass() const {
        return pass_explicit && pass_combined_lower && pass_combined_upper && pass_weak_lower &&
               pass_weak_upper;
    }
};

inline Certificate certify(const ShallowNet& net, const BoxDomain& box, const GeomConfig& cfg = {}) {
    ReparamResult rep = reparameterize(net, box, cfg);
    auto [infA, argA] = inf_abs_on_set(net, box, cfg);
    const double lipA = infA + rep.lip;

    const int d = box.dim, h = net.hidden_dim;
    const double sqd = std::sqrt(static_cast<double>(d));
    const double K = std::max({2.0, std::abs(box.lo) * sqd, std::abs(box.hi) * sqd,
                               2.0 * h * (box.hi - box.lo) * sqd});
    const double sqD = std::sqrt(static_cast<double>(net.param_count()));

    Certificate cert;
    cert.lipnorm_A = lipA;
    Vec out = flatten(rep.output);
    cert.maxnorm_out = max_norm(out);
    cert.eucnorm_out = euclid_norm(out);
    cert.const_K = K;
    cert.const_c = sqD * K;
    cert.const_C = 8.0 * sqD * K * K;

    const double lip_pow = std::max(std::sqrt(lipA), lipA);
    const double out_pow = std::max(std::sqrt(cert.eucnorm_out), cert.eucnorm_out * cert.eucnorm_out);
    cert.lhs = cert.eucnorm_out;
    cert.middle = cert.const_c * lip_pow;
    cert.rhs = cert.const_C * out_pow;

    auto leq = [](double a, double b) { return a <= b * (1.0 + kCertTol); };
    cert.pass_explicit = leq(cert.maxnorm_out, K * lip_pow);
    cert.pass_combined_lower = leq(cert.lhs, cert.middle);
    cert.pass_combined_upper = leq(cert.middle, cert.rhs);
    cert.pass_weak_lower = leq(std::max(1.0, cert.eucnorm_out), cert.const_c * std::max(1.0, lipA));
    cert.pass_weak_upper = leq(cert.const_c * std::max(1.0, lipA),
                               cert.const_C * std::max(1.0, cert.eucnorm_out * cert.eucnorm_out));
    return cert;
}

// Box constant locating a global minimizer of a least-squares fit against
// an L-Lipschitz target on [a, b] (d = 1):
// C = max{ max{2, |a|, |b|} h^{1/2} L^{1/2}, (2 (b-a) h^2 + h) L + sup|f| }.
inline double global_min_box(double a, double b, int h, double L, double sup_f) {
    if (!(b > a)) throw DomainError("global_min_box: requires b > a");
    if (h < 1) throw DomainError("global_min_box: h must be >= 1");
    if (!(L >= 0.0) || !(sup_f >= 0.0)) throw DomainError("global_min_box: L and sup_f must be >= 0");
    double c1 = std::max({2.0, std::abs(a), std::abs(b)}) * std::sqrt(static_cast<double>(h)) * std::sqrt(L);
    double c2 = (2.0 * (b - a) * h * h + h) * L + sup_f;
    return std::max(c1, c2);
}

} // namespace relucert
