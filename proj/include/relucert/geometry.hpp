#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "relucert/config.hpp"
#include "relucert/errors.hpp"
#include "relucert/linprog.hpp"
#include "relucert/network.hpp"

namespace relucert {

// Kink hyperplane {x : offset + <normal, x> = 0} of a hidden neuron. A zero
// normal is flagged degenerate and never takes part in the kink machinery.
struct Hyperplane {
    Vec normal;
    double offset = 0.0;

    static Hyperplane of_neuron(const ShallowNet& net, int i) {
        return Hyperplane{net.hidden_weights[i], net.hidden_biases[i]};
    }

    bool degenerate() const { return euclid_norm(normal) == 0.0; }

    double affine_at(const Vec& x) const { return offset + dot(normal, x); }

    // Scale for relative tolerance tests.
    double scale() const { return std::max({1.0, euclid_norm(normal), std::abs(offset)}); }
};

// Per-neuron active/inactive signs identifying one chamber; signs[i] == 1
// means the active side H_i^1.
struct ActivationPattern {
    std::vector<std::uint8_t> signs;

    bool operator==(const ActivationPattern& o) const { return signs == o.signs; }
    bool operator<(const ActivationPattern& o) const { return signs < o.signs; }
};

// One positive-volume cell of the kink arrangement restricted to the box. The
// realization is affine on it: x |-> offset + <gradient, x>. slack is a
// certified Euclidean ball radius around interior_point on which every sign
// of the pattern is strict and which stays inside the box.
struct Chamber {
    ActivationPattern pattern;
    Vec interior_point;
    double slack = 0.0;
    Vec gradient;
    double offset = 0.0;
};

// One set of coincident kinks among the A2 neurons. orientation[k] is +1 when
// member k's (w, b) is a positive multiple of the representative's and -1
// when it is a negative multiple. side0/side1 are the D_s^0 / D_s^1 split
// relative to the reference point's chamber.
struct KinkGroup {
    int representative = 0;
    std::vector<int> members;
    std::vector<int> orientation;
    std::vector<int> side0, side1;
};

// A1: always active on the box; A2: kink meets the open box; A3: inactive on
// the open box.
struct NeuronClassification {
    std::vector<int> always_active;
    std::vector<int> kink;
    std::vector<int> inactive;
    std::vector<KinkGroup> groups;
};

struct IsolationWitness {
    std::vector<Vec> points;
    double radius = 0.0;
};

// Exact range of x |-> b + <w, x> over the closed box; the extremes sit at
// the corner selected coordinatewise by the sign of w.
inline std::pair<double, double> affine_range_on_box(const Hyperplane& h, const BoxDomain& box) {
    if (static_cast<int>(h.normal.size()) != box.dim)
        throw DimMismatch("affine_range_on_box: dimension mismatch");
    double lo = h.offset, hi = h.offset;
    for (double wj : h.normal) {
        if (wj >= 0.0) {
            lo += wj * box.lo;
            hi += wj * box.hi;
        } else {
            lo += wj * box.hi;
            hi += wj * box.lo;
        }
    }
    return {lo, hi};
}

// Tests whether two kinks cut the box along the same hyperplane, i.e.
// whether (w, b) are proportional. Returns +1 for a positive
// multiple, -1 for a negative multiple, nullopt for distinct kinks.
inline std::optional<int> same_kink(const Hyperplane& h1, const Hyperplane& h2,
                                    const BoxDomain& box, const GeomConfig& cfg = {}) {
    (void)box;
    const double n1 = euclid_norm(h1.normal), n2 = euclid_norm(h2.normal);
    if (n1 == 0.0 || n2 == 0.0) throw DegenerateNormal("same_kink: zero normal");
    const std::size_t d = h1.normal.size();
    if (h2.normal.size() != d) throw DimMismatch("same_kink: dimension mismatch");
    // Compare unit-normalized (w, b)/||w||.
    double scale = std::max({1.0, std::abs(h1.offset) / n1, std::abs(h2.offset) / n2});
    double dev_plus = 0.0, dev_minus = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double a = h1.normal[j] / n1, b = h2.normal[j] / n2;
        dev_plus = std::max(dev_plus, std::abs(a - b));
        dev_minus = std::max(dev_minus, std::abs(a + b));
    }
    double ob1 = h1.offset / n1, ob2 = h2.offset / n2;
    dev_plus = std::max(dev_plus, std::abs(ob1 - ob2));
    dev_minus = std::max(dev_minus, std::abs(ob1 + ob2));
    if (dev_plus <= cfg.tol_geom * scale) return 1;
    if (dev_minus <= cfg.tol_geom * scale) return -1;
    return std::nullopt;
}

namespace detail {

// A1/A2/A3 membership and the kink-group partition of A2 (independent of any
// reference point). Degenerate neurons go to A1 if b >= 0, else A3.
inline NeuronClassification classify_sets(const ShallowNet& net, const BoxDomain& box,
                                          const GeomConfig& cfg) {
    if (net.input_dim != box.dim) throw DimMismatch("classify_neurons: box dimension mismatch");
    NeuronClassification cls;
    for (int i = 0; i < net.hidden_dim; ++i) {
        Hyperplane h = Hyperplane::of_neuron(net, i);
        if (h.degenerate()) {
            (h.offset >= 0.0 ? cls.always_active : cls.inactive).push_back(i);
            continue;
        }
        auto [lo, hi] = affine_range_on_box(h, box);
        double tol = cfg.tol_geom * h.scale();
        if (lo >= -tol)
            cls.always_active.push_back(i);
        else if (hi <= tol)
            cls.inactive.push_back(i);
        else
            cls.kink.push_back(i);
    }
    for (int i : cls.kink) {
        Hyperplane hi = Hyperplane::of_neuron(net, i);
        bool placed = false;
        for (KinkGroup& g : cls.groups) {
            auto rel = same_kink(Hyperplane::of_neuron(net, g.representative), hi, box, cfg);
            if (rel) {
                g.members.push_back(i);
                g.orientation.push_back(*rel);
                placed = true;
                break;
            }
        }
        if (!placed) {
            KinkGroup g;
            g.representative = i; // smallest index: A2 is scanned in ascending order
            g.members.push_back(i);
            g.orientation.push_back(1);
            cls.groups.push_back(g);
        }
    }
    return cls;
}

// Chebyshev-style slack LP: maximize t subject to
//   sign_i * (b_i + <w_i, x>) / ||w_i||  >=  t   for the listed A2 neurons,
//   box.lo + t <= x_j <= box.hi - t,
// so the optimum is the largest Euclidean ball radius around x on which the
// pattern is strict and which stays inside the box.
inline LpResult slack_lp(const ShallowNet& net, const BoxDomain& box,
                         const std::vector<int>& kink_neurons,
                         const std::vector<std::uint8_t>& kink_signs) {
    const int d = box.dim;
    LpProblem lp;
    lp.objective.assign(d + 1, 0.0);
    lp.objective[d] = 1.0;
    for (std::size_t k = 0; k < kink_neurons.size(); ++k) {
        int i = kink_neurons[k];
        double sgn = kink_signs[k] ? 1.0 : -1.0;
        double nw = euclid_norm(net.hidden_weights[i]);
        std::vector<double> row(d + 1, 0.0);
        for (int j = 0; j < d; ++j) row[j] = -sgn * net.hidden_weights[i][j] / nw;
        row[d] = 1.0;
        lp.ineq_lhs.push_back(std::move(row));
        lp.ineq_rhs.push_back(sgn * net.hidden_biases[i] / nw);
    }
    for (int j = 0; j < d; ++j) {
        std::vector<double> row(d + 1, 0.0);
        row[j] = -1.0;
        row[d] = 1.0;
        lp.ineq_lhs.push_back(row);
        lp.ineq_rhs.push_back(-box.lo);
        std::fill(row.begin(), row.end(), 0.0);
        row[j] = 1.0;
        row[d] = 1.0;
        lp.ineq_lhs.push_back(std::move(row));
        lp.ineq_rhs.push_back(box.hi);
    }
    return solve_lp(lp);
}

inline Vec chamber_gradient(const ShallowNet& net, const ActivationPattern& pat) {
    Vec g(net.input_dim, 0.0);
    for (int i = 0; i < net.hidden_dim; ++i) {
        if (!pat.signs[i]) continue;
        for (int j = 0; j < net.input_dim; ++j)
            g[j] += net.output_weights[i] * net.hidden_weights[i][j];
    }
    return g;
}

inline double chamber_offset(const ShallowNet& net, const ActivationPattern& pat) {
    double o = net.output_bias;
    for (int i = 0; i < net.hidden_dim; ++i)
        if (pat.signs[i]) o += net.output_weights[i] * net.hidden_biases[i];
    return o;
}

inline Chamber make_chamber(const ShallowNet& net, ActivationPattern pat, Vec point, double slack) {
    Chamber ch;
    ch.gradient = chamber_gradient(net, pat);
    ch.offset = chamber_offset(net, pat);
    ch.pattern = std::move(pat);
    ch.interior_point = std::move(point);
    ch.slack = slack;
    return ch;
}

} // namespace detail

// Chamber of the tessellation whose closure contains z, realized
// constructively: among the sign patterns consistent with z (free signs where
// z sits on a kink within tolerance), pick the one whose slack LP certifies
// the largest ball; ties prefer the lexicographically largest pattern.
inline Chamber chamber_of_point(const ShallowNet& net, const Vec& z, const BoxDomain& box,
                                const GeomConfig& cfg = {}) {
    if (static_cast<int>(z.size()) != box.dim || net.input_dim != box.dim)
        throw DimMismatch("chamber_of_point: dimension mismatch");
    if (!box.contains(z)) throw DomainError("chamber_of_point: point outside box");
    NeuronClassification cls = detail::classify_sets(net, box, cfg);

    std::vector<int> forced_idx;
    std::vector<std::uint8_t> forced_sign;
    std::vector<int> free_idx;
    for (int i : cls.kink) {
        Hyperplane h = Hyperplane::of_neuron(net, i);
        double e = h.affine_at(z);
        double tol = cfg.tol_geom * h.scale();
        if (e > tol) {
            forced_idx.push_back(i);
            forced_sign.push_back(1);
        } else if (e < -tol) {
            forced_idx.push_back(i);
            forced_sign.push_back(0);
        } else {
            free_idx.push_back(i);
        }
    }
    if (static_cast<int>(free_idx.size()) > std::min(cfg.pattern_cap, 62))
        throw PatternCapExceeded("chamber_of_point: too many kinks through the point");

    ActivationPattern base;
    base.signs.assign(net.hidden_dim, 0);
    for (int i : cls.always_active) base.signs[i] = 1;
    for (std::size_t k = 0; k < forced_idx.size(); ++k) base.signs[forced_idx[k]] = forced_sign[k];

    bool found = false;
    double best_slack = 0.0;
    ActivationPattern best_pat;
    Vec best_point;
    const std::uint64_t combos = 1ULL << free_idx.size();
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
        ActivationPattern pat = base;
        for (std::size_t k = 0; k < free_idx.size(); ++k)
            pat.signs[free_idx[k]] = static_cast<std::uint8_t>((mask >> k) & 1ULL);
        std::vector<std::uint8_t> signs;
        signs.reserve(cls.kink.size());
        for (int i : cls.kink) signs.push_back(pat.signs[i]);
        LpResult r = detail::slack_lp(net, box, cls.kink, signs);
        if (r.status != LpResult::Status::Optimal || r.value <= cfg.tol_vol) continue;
        Vec point(r.x.begin(), r.x.begin() + box.dim);
        box.clamp(point);
        if (!found || r.value > best_slack ||
            (r.value == best_slack && best_pat < pat)) {
            found = true;
            best_slack = r.value;
            best_pat = pat;
            best_point = std::move(point);
        }
    }
    if (!found)
        throw InfeasibleGeometry("chamber_of_point: no positive-volume pattern certified; "
                                 "tolerance configuration is inconsistent");
    return detail::make_chamber(net, std::move(best_pat), std::move(best_point), best_slack);
}

// Full classification including the z-relative orientation split of every
// kink group: D_s^ell collects the members whose sign in z's chamber pattern
// is ell.
inline NeuronClassification classify_neurons(const ShallowNet& net, const BoxDomain& box,
                                             const Vec& z, const GeomConfig& cfg = {}) {
    if (!box.contains(z)) throw DomainError("classify_neurons: reference point outside box");
    NeuronClassification cls = detail::classify_sets(net, box, cfg);
    if (!cls.kink.empty()) {
        Chamber ch = chamber_of_point(net, z, box, cfg);
        for (KinkGroup& g : cls.groups) {
            for (int i : g.members)
                (ch.pattern.signs[i] ? g.side1 : g.side0).push_back(i);
        }
    }
    return cls;
}

// All positive-volume chambers of the arrangement on the box, in lexicographic
// pattern order. A1/A3 neurons are frozen to their fixed sign; the free
// choices are one side per kink group, so at most 2^#groups LPs are solved.
inline std::vector<Chamber> enumerate_chambers(const ShallowNet& net, const BoxDomain& box,
                                               const GeomConfig& cfg = {}) {
    if (net.input_dim != box.dim) throw DimMismatch("enumerate_chambers: dimension mismatch");
    if (net.hidden_dim > std::min(cfg.pattern_cap, 62))
        throw PatternCapExceeded("enumerate_chambers: hidden_dim exceeds pattern_cap");
    NeuronClassification cls = detail::classify_sets(net, box, cfg);

    ActivationPattern base;
    base.signs.assign(net.hidden_dim, 0);
    for (int i : cls.always_active) base.signs[i] = 1;

    std::vector<Chamber> out;
    const std::size_t ngroups = cls.groups.size();
    const std::uint64_t combos = 1ULL << ngroups;
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
        ActivationPattern pat = base;
        for (std::size_t s = 0; s < ngroups; ++s) {
            std::uint8_t side = static_cast<std::uint8_t>((mask >> s) & 1ULL);
            const KinkGroup& g = cls.groups[s];
            for (std::size_t k = 0; k < g.members.size(); ++k)
                pat.signs[g.members[k]] = g.orientation[k] > 0 ? side : static_cast<std::uint8_t>(1 - side);
        }
        std::vector<std::uint8_t> signs;
        signs.reserve(cls.kink.size());
        for (int i : cls.kink) signs.push_back(pat.signs[i]);
        LpResult r = detail::slack_lp(net, box, cls.kink, signs);
        if (r.status != LpResult::Status::Optimal || r.value <= cfg.tol_vol) continue;
        Vec point(r.x.begin(), r.x.begin() + box.dim);
        box.clamp(point);
        out.push_back(detail::make_chamber(net, std::move(pat), std::move(point), r.value));
    }
    std::sort(out.begin(), out.end(),
              [](const Chamber& a, const Chamber& b) { return a.pattern < b.pattern; });
    return out;
}

namespace detail {

// Maximize the ball radius t around a point constrained to lie on kink s,
// with fixed sides for the other kinks:
//   b_s + <w_s, p> = 0,
//   sigma_t * (b_t + <w_t, p>) / ||w_t|| >= t   (t != s),
//   box.lo + t <= p_j <= box.hi - t.
inline LpResult isolation_lp(const std::vector<Hyperplane>& kinks, std::size_t s,
                             const std::vector<int>& other_signs, const BoxDomain& box) {
    const int d = box.dim;
    LpProblem lp;
    lp.objective.assign(d + 1, 0.0);
    lp.objective[d] = 1.0;
    {
        std::vector<double> row(d + 1, 0.0);
        for (int j = 0; j < d; ++j) row[j] = kinks[s].normal[j];
        lp.eq_lhs.push_back(std::move(row));
        lp.eq_rhs.push_back(-kinks[s].offset);
    }
    for (std::size_t k = 0; k < kinks.size(); ++k) {
        if (k == s) continue;
        double sgn = other_signs[k];
        double nw = euclid_norm(kinks[k].normal);
        std::vector<double> row(d + 1, 0.0);
        for (int j = 0; j < d; ++j) row[j] = -sgn * kinks[k].normal[j] / nw;
        row[d] = 1.0;
        lp.ineq_lhs.push_back(std::move(row));
        lp.ineq_rhs.push_back(sgn * kinks[k].offset / nw);
    }
    for (int j = 0; j < d; ++j) {
        std::vector<double> row(d + 1, 0.0);
        row[j] = -1.0;
        row[d] = 1.0;
        lp.ineq_lhs.push_back(row);
        lp.ineq_rhs.push_back(-box.lo);
        std::fill(row.begin(), row.end(), 0.0);
        row[j] = 1.0;
        row[d] = 1.0;
        lp.ineq_lhs.push_back(std::move(row));
        lp.ineq_rhs.push_back(box.hi);
    }
    return solve_lp(lp);
}

} // namespace detail

// One interior point per distinct kink together with a single certified
// radius: the closed eps-ball around p_s stays inside the box and avoids
// every other kink. The search solves, along each kink, the ball-radius LP
// with the other kinks' sides fixed from a seed point on the kink; ambiguous
// sides (seed on another kink) are branched. The final radius carries a 0.9
// safety factor, and every invariant is re-checked before returning.
inline IsolationWitness isolation_points(const std::vector<Hyperplane>& kinks,
                                         const BoxDomain& box, const GeomConfig& cfg = {}) {
    if (kinks.empty()) throw DomainError("isolation_points: empty kink list");
    for (const Hyperplane& h : kinks) {
        if (static_cast<int>(h.normal.size()) != box.dim)
            throw DimMismatch("isolation_points: dimension mismatch");
        if (h.degenerate()) throw DegenerateNormal("isolation_points: zero normal");
    }
    const std::size_t n = kinks.size();
    IsolationWitness wit;
    wit.points.resize(n);
    double min_radius = std::numeric_limits<double>::infinity();

    for (std::size_t s = 0; s < n; ++s) {
        // Seed: deepest interior point on kink s ignoring the other kinks.
        LpResult seed = detail::isolation_lp({kinks[s]}, 0, {0}, box);
        if (seed.status != LpResult::Status::Optimal || seed.value <= cfg.tol_vol)
            throw NoInteriorPoint("isolation_points: kink does not meet the open box");
        Vec q(seed.x.begin(), seed.x.begin() + box.dim);

        std::vector<int> signs(n, 0);
        std::vector<std::size_t> ambiguous;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == s) continue;
            double e = kinks[k].affine_at(q);
            if (std::abs(e) <= cfg.tol_geom * kinks[k].scale())
                ambiguous.push_back(k);
            else
                signs[k] = e > 0.0 ? 1 : -1;
        }
        if (ambiguous.size() > 16)
            throw PatternCapExceeded("isolation_points: too many coincident kinks at the seed");

        double best = -1.0;
        Vec best_p;
        const std::uint64_t combos = 1ULL << ambiguous.size();
        for (std::uint64_t mask = 0; mask < combos; ++mask) {
            for (std::size_t k = 0; k < ambiguous.size(); ++k)
                signs[ambiguous[k]] = ((mask >> k) & 1ULL) ? 1 : -1;
            LpResult r = detail::isolation_lp(kinks, s, signs, box);
            if (r.status != LpResult::Status::Optimal) continue;
            if (r.value > best) {
                best = r.value;
                best_p.assign(r.x.begin(), r.x.begin() + box.dim);
                box.clamp(best_p);
            }
        }
        if (best <= cfg.tol_vol)
            throw InfeasibleGeometry("isolation_points: could not certify a positive radius");
        wit.points[s] = std::move(best_p);
        min_radius = std::min(min_radius, best);
    }
    wit.radius = 0.9 * min_radius;

    // Machine-check the witness invariants.
    for (std::size_t s = 0; s < n; ++s) {
        const Vec& p = wit.points[s];
        if (std::abs(kinks[s].affine_at(p)) > 1e2 * cfg.tol_geom * kinks[s].scale())
            throw InfeasibleGeometry("isolation_points: witness drifted off its kink");
        for (double c : p)
            if (c - wit.radius < box.lo - cfg.tol_geom || c + wit.radius > box.hi + cfg.tol_geom)
                throw InfeasibleGeometry("isolation_points: ball leaves the box");
        for (std::size_t k = 0; k < n; ++k) {
            if (k == s) continue;
            double distance = std::abs(kinks[k].affine_at(p)) / euclid_norm(kinks[k].normal);
            if (distance <= wit.radius)
                throw InfeasibleGeometry("isolation_points: ball touches another kink");
        }
    }
    return wit;
}

} // namespace relucert
