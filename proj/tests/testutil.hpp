#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "relucert/network.hpp"
#include "relucert/rng.hpp"

namespace testutil {

using relucert::BoxDomain;
using relucert::CounterRng;
using relucert::ShallowNet;
using relucert::Vec;

// Random net with entries uniform in [-range, range].
inline ShallowNet random_net(const CounterRng& rng, int d, int h, double range = 5.0) {
    ShallowNet net = ShallowNet::zeros(d, h);
    std::uint64_t c = 0;
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < d; ++j) net.hidden_weights[i][j] = rng.uniform(c++, -range, range);
    for (int i = 0; i < h; ++i) net.hidden_biases[i] = rng.uniform(c++, -range, range);
    for (int i = 0; i < h; ++i) net.output_weights[i] = rng.uniform(c++, -range, range);
    net.output_bias = rng.uniform(c++, -range, range);
    return net;
}

inline Vec random_point(const CounterRng& rng, std::uint64_t base, const BoxDomain& box) {
    Vec x(box.dim);
    for (int j = 0; j < box.dim; ++j) x[j] = rng.uniform(base + j, box.lo, box.hi);
    return x;
}

// Grid difference-quotient oracle for the Lipschitz seminorm, d <= 2. Exact
// values converge to the seminorm from below as the grid refines. Pairs are
// restricted to a local window (short pairs carry the largest quotients for a
// piecewise affine function) plus a seeded set of long pairs.
struct GridQuotientOracle {
    double max_quotient = 0.0;
    bool any_exceeds(double bound) const { return max_quotient > bound; }
};

inline GridQuotientOracle grid_quotient_oracle(const ShallowNet& net, const BoxDomain& box,
                                               int pts_per_axis, int window,
                                               long random_pairs = 200000,
                                               std::uint64_t seed = 1234) {
    GridQuotientOracle oracle;
    const int d = box.dim;
    const double step = (box.hi - box.lo) / (pts_per_axis - 1);
    if (d == 1) {
        std::vector<double> vals(pts_per_axis);
        Vec x(1);
        for (int i = 0; i < pts_per_axis; ++i) {
            x[0] = box.lo + i * step;
            vals[i] = relucert::evaluate(net, x);
        }
        for (int i = 0; i < pts_per_axis; ++i) {
            int jmax = std::min(pts_per_axis - 1, i + window);
            for (int j = i + 1; j <= jmax; ++j) {
                double q = std::abs(vals[i] - vals[j]) / ((j - i) * step);
                oracle.max_quotient = std::max(oracle.max_quotient, q);
            }
        }
    } else {
        const int n = pts_per_axis;
        std::vector<double> vals(static_cast<std::size_t>(n) * n);
        Vec x(2);
        for (int i = 0; i < n; ++i) {
            x[0] = box.lo + i * step;
            for (int j = 0; j < n; ++j) {
                x[1] = box.lo + j * step;
                vals[static_cast<std::size_t>(i) * n + j] = relucert::evaluate(net, x);
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double v0 = vals[static_cast<std::size_t>(i) * n + j];
                for (int di = 0; di <= window; ++di) {
                    if (i + di >= n) break;
                    int js = di == 0 ? 1 : -window;
                    for (int dj = js; dj <= window; ++dj) {
                        int jj = j + dj;
                        if (jj < 0 || jj >= n) continue;
                        double dist = step * std::sqrt(double(di) * di + double(dj) * dj);
                        double q = std::abs(v0 - vals[static_cast<std::size_t>(i + di) * n + jj]) / dist;
                        oracle.max_quotient = std::max(oracle.max_quotient, q);
                    }
                }
            }
        }
    }
    CounterRng rng(seed);
    Vec xa(d), xb(d);
    for (long k = 0; k < random_pairs; ++k) {
        for (int j = 0; j < d; ++j) {
            xa[j] = rng.uniform(static_cast<std::uint64_t>(4 * k) * d + j, box.lo, box.hi);
            xb[j] = rng.uniform(static_cast<std::uint64_t>(4 * k + 2) * d + j, box.lo, box.hi);
        }
        double dist = 0.0;
        for (int j = 0; j < d; ++j) dist += (xa[j] - xb[j]) * (xa[j] - xb[j]);
        dist = std::sqrt(dist);
        if (dist == 0.0) continue;
        double q = std::abs(relucert::evaluate(net, xa) - relucert::evaluate(net, xb)) / dist;
        oracle.max_quotient = std::max(oracle.max_quotient, q);
    }
    return oracle;
}

} // namespace testutil
