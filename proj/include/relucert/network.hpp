#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "relucert/errors.hpp"

namespace relucert {

using Vec = std::vector<double>;

inline bool all_finite(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline double euclid_norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double max_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * y[j];
    return s;
}

// Shallow ReLU network x |-> c + sum_i v_i max{b_i + <w_i, x>, 0} on d inputs
// and h hidden units. This structured form is the canonical in-memory
// representation; the flat parameter vector is an interchange view.
//
// All fields are immutable after construction in the sense that no library
// operation mutates a net in place; transformations return fresh values.
struct ShallowNet {
    int input_dim = 0;                    // d
    int hidden_dim = 0;                   // h
    std::vector<Vec> hidden_weights;      // h rows of length d (w_i)
    Vec hidden_biases;                    // length h (b_i)
    Vec output_weights;                   // length h (v_i)
    double output_bias = 0.0;             // c

    int param_count() const { return input_dim * hidden_dim + 2 * hidden_dim + 1; }

    static ShallowNet zeros(int d, int h) {
        if (d < 1 || h < 1) throw DomainError("ShallowNet: dimensions must be positive");
        ShallowNet n;
        n.input_dim = d;
        n.hidden_dim = h;
        n.hidden_weights.assign(h, Vec(d, 0.0));
        n.hidden_biases.assign(h, 0.0);
        n.output_weights.assign(h, 0.0);
        return n;
    }

    // Validating factory; non-finite entries and shape mismatches are
    // rejected here so downstream algorithms can assume finiteness.
    static ShallowNet create(int d, int h, std::vector<Vec> w, Vec b, Vec v, double c) {
        if (d < 1 || h < 1) throw DomainError("ShallowNet: dimensions must be positive");
        if (static_cast<int>(w.size()) != h || static_cast<int>(b.size()) != h ||
            static_cast<int>(v.size()) != h)
            throw LengthMismatch("ShallowNet: field lengths do not match hidden_dim");
        for (const Vec& row : w) {
            if (static_cast<int>(row.size()) != d)
                throw LengthMismatch("ShallowNet: weight row length does not match input_dim");
            if (!all_finite(row)) throw NonFiniteValue("ShallowNet: non-finite weight");
        }
        if (!all_finite(b) || !all_finite(v) || !std::isfinite(c))
            throw NonFiniteValue("ShallowNet: non-finite parameter");
        ShallowNet n;
        n.input_dim = d;
        n.hidden_dim = h;
        n.hidden_weights = std::move(w);
        n.hidden_biases = std::move(b);
        n.output_weights = std::move(v);
        n.output_bias = c;
        return n;
    }
};

// The cube [lo, hi]^dim together with the reference subset A used by the
// Lipschitz norm's infimum term. reference == nullopt means A is the whole
// box; otherwise A is the given finite point list.
struct BoxDomain {
    double lo = 0.0;
    double hi = 1.0;
    int dim = 1;
    std::optional<std::vector<Vec>> reference;

    static BoxDomain whole(double a, double b, int d) {
        BoxDomain box;
        box.lo = a;
        box.hi = b;
        box.dim = d;
        box.validate();
        return box;
    }

    static BoxDomain with_points(double a, double b, int d, std::vector<Vec> pts) {
        BoxDomain box;
        box.lo = a;
        box.hi = b;
        box.dim = d;
        box.reference = std::move(pts);
        box.validate();
        return box;
    }

    void validate() const {
        if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi))
            throw DomainError("BoxDomain: requires finite lo < hi");
        if (dim < 1) throw DomainError("BoxDomain: dimension must be positive");
        if (reference) {
            if (reference->empty()) throw DomainError("BoxDomain: reference set must be nonempty");
            for (const Vec& p : *reference) {
                if (static_cast<int>(p.size()) != dim)
                    throw DimMismatch("BoxDomain: reference point dimension mismatch");
                for (double x : p)
                    if (!std::isfinite(x) || x < lo || x > hi)
                        throw DomainError("BoxDomain: reference point outside box");
            }
        }
    }

    double width() const { return hi - lo; }

    bool contains(const Vec& x) const {
        if (static_cast<int>(x.size()) != dim) return false;
        for (double c : x)
            if (c < lo || c > hi) return false;
        return true;
    }

    // LP vertices can drift an ulp past a face; snap them back.
    void clamp(Vec& x) const {
        for (double& c : x) c = std::min(std::max(c, lo), hi);
    }
};

// Flat layout of Setting 2.4: theta_{(i-1)d+j} = w_{i,j}, theta_{dh+i} = b_i,
// theta_{dh+h+i} = v_i, theta_d = c (1-based indices).
inline Vec flatten(const ShallowNet& net) {
    const int d = net.input_dim, h = net.hidden_dim;
    Vec p(static_cast<std::size_t>(net.param_count()), 0.0);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < d; ++j) p[static_cast<std::size_t>(i) * d + j] = net.hidden_weights[i][j];
    for (int i = 0; i < h; ++i) p[static_cast<std::size_t>(d) * h + i] = net.hidden_biases[i];
    for (int i = 0; i < h; ++i) p[static_cast<std::size_t>(d) * h + h + i] = net.output_weights[i];
    p[static_cast<std::size_t>(d) * h + 2 * h] = net.output_bias;
    return p;
}

inline ShallowNet unflatten(const Vec& p, int d, int h) {
    if (d < 1 || h < 1) throw DomainError("unflatten: dimensions must be positive");
    const std::size_t expect = static_cast<std::size_t>(d) * h + 2 * h + 1;
    if (p.size() != expect)
        throw LengthMismatch("unflatten: vector length " + std::to_string(p.size()) +
                             " != d*h+2*h+1 = " + std::to_string(expect));
    std::vector<Vec> w(h, Vec(d));
    Vec b(h), v(h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < d; ++j) w[i][j] = p[static_cast<std::size_t>(i) * d + j];
    for (int i = 0; i < h; ++i) b[i] = p[static_cast<std::size_t>(d) * h + i];
    for (int i = 0; i < h; ++i) v[i] = p[static_cast<std::size_t>(d) * h + h + i];
    return ShallowNet::create(d, h, std::move(w), std::move(b), std::move(v),
                              p[static_cast<std::size_t>(d) * h + 2 * h]);
}

inline double evaluate(const ShallowNet& net, const Vec& x) {
    if (static_cast<int>(x.size()) != net.input_dim)
        throw DimMismatch("evaluate: input dimension mismatch");
    double acc = net.output_bias;
    for (int i = 0; i < net.hidden_dim; ++i) {
        double pre = net.hidden_biases[i];
        const Vec& w = net.hidden_weights[i];
        for (int j = 0; j < net.input_dim; ++j) pre += w[j] * x[j];
        acc += net.output_weights[i] * std::max(pre, 0.0);
    }
    return acc;
}

// Direct evaluation from the flat layout; kept arithmetically identical to
// evaluate() so the two agree bit-for-bit.
inline double evaluate_flat(const Vec& p, int d, int h, const Vec& x) {
    if (static_cast<int>(x.size()) != d) throw DimMismatch("evaluate_flat: input dimension mismatch");
    const std::size_t expect = static_cast<std::size_t>(d) * h + 2 * h + 1;
    if (p.size() != expect) throw LengthMismatch("evaluate_flat: bad parameter length");
    double acc = p[static_cast<std::size_t>(d) * h + 2 * h];
    for (int i = 0; i < h; ++i) {
        double pre = p[static_cast<std::size_t>(d) * h + i];
        for (int j = 0; j < d; ++j) pre += p[static_cast<std::size_t>(i) * d + j] * x[j];
        acc += p[static_cast<std::size_t>(d) * h + h + i] * std::max(pre, 0.0);
    }
    return acc;
}

// w_i <- lam*w_i, b_i <- lam*b_i, v_i <- v_i/lam; ReLU homogeneity keeps the
// realization unchanged. i is a 0-based neuron index.
inline ShallowNet neuron_scale(const ShallowNet& net, int i, double lam) {
    if (!(lam > 0.0) || !std::isfinite(lam))
        throw NonpositiveScale("neuron_scale: scale must be a positive finite real");
    if (i < 0 || i >= net.hidden_dim) throw DomainError("neuron_scale: neuron index out of range");
    ShallowNet out = net;
    for (double& c : out.hidden_weights[i]) c *= lam;
    out.hidden_biases[i] *= lam;
    out.output_weights[i] /= lam;
    return out;
}

// Result neuron k is the original neuron sigma[k]; sigma must be a
// permutation of {0, ..., h-1}.
inline ShallowNet permute_neurons(const ShallowNet& net, const std::vector<int>& sigma) {
    const int h = net.hidden_dim;
    if (static_cast<int>(sigma.size()) != h)
        throw InvalidPermutation("permute_neurons: permutation length mismatch");
    std::vector<bool> seen(h, false);
    for (int s : sigma) {
        if (s < 0 || s >= h || seen[s]) throw InvalidPermutation("permute_neurons: not a permutation");
        seen[s] = true;
    }
    ShallowNet out = net;
    for (int k = 0; k < h; ++k) {
        out.hidden_weights[k] = net.hidden_weights[sigma[k]];
        out.hidden_biases[k] = net.hidden_biases[sigma[k]];
        out.output_weights[k] = net.output_weights[sigma[k]];
    }
    return out;
}

} // namespace relucert
