#include <catch2/catch_amalgamated.hpp>

#include "relucert/network.hpp"
#include "relucert/rng.hpp"
#include "testutil.hpp"

using namespace relucert;

TEST_CASE("flatten layout and parameter count") {
    // d=3, h=5 gives the 26-dimensional parameter space.
    ShallowNet net = ShallowNet::zeros(3, 5);
    CHECK(net.param_count() == 26);
    CHECK(flatten(net).size() == 26);

    CHECK(ShallowNet::zeros(1, 1).param_count() == 4);

    ShallowNet z23 = ShallowNet::zeros(2, 3);
    Vec p = flatten(z23);
    CHECK(p.size() == 13);
    for (double x : p) CHECK(x == 0.0);
}

TEST_CASE("flatten indices follow the layout") {
    ShallowNet net = ShallowNet::zeros(2, 2);
    net.hidden_weights = {{1, 2}, {3, 4}};
    net.hidden_biases = {5, 6};
    net.output_weights = {7, 8};
    net.output_bias = 9;
    Vec p = flatten(net);
    CHECK(p == Vec{1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("unflatten round trip and errors") {
    CounterRng rng(42);
    for (int t = 0; t < 20; ++t) {
        int d = 1 + static_cast<int>(rng.below(100 + t, 3));
        int h = 1 + static_cast<int>(rng.below(200 + t, 5));
        ShallowNet net = testutil::random_net(rng.split(t), d, h);
        Vec p = flatten(net);
        ShallowNet back = unflatten(p, d, h);
        CHECK(flatten(back) == p); // bit-exact round trip
    }
    ShallowNet z = unflatten(Vec(4, 0.0), 1, 1);
    CHECK(z.output_bias == 0.0);
    CHECK(z.hidden_weights[0][0] == 0.0);

    CHECK_THROWS_AS(unflatten(Vec(5, 0.0), 1, 1), LengthMismatch);
    Vec bad(4, 0.0);
    bad[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(unflatten(bad, 1, 1), NonFiniteValue);
    bad[2] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(unflatten(bad, 1, 1), NonFiniteValue);
}

TEST_CASE("evaluate") {
    ShallowNet zero = ShallowNet::zeros(2, 3);
    CHECK(evaluate(zero, {0.3, -0.7}) == 0.0);

    ShallowNet id1 = ShallowNet::create(1, 1, {{1.0}}, {0.0}, {1.0}, 0.0);
    CHECK(evaluate(id1, {0.5}) == 0.5);

    // d=2: 5 + 2*max{3+4-1, 0} = 17, cross-checked term by term.
    ShallowNet net = ShallowNet::create(2, 1, {{3.0, 4.0}}, {-1.0}, {2.0}, 5.0);
    Vec x{1.0, 1.0};
    double pre = -1.0 + 3.0 * x[0] + 4.0 * x[1];
    double expected = 5.0 + 2.0 * std::max(pre, 0.0);
    CHECK(evaluate(net, x) == expected);
    CHECK(evaluate(net, x) == 17.0);

    CHECK_THROWS_AS(evaluate(net, {1.0}), DimMismatch);
}

TEST_CASE("flat evaluation matches structured evaluation bit for bit") {
    CounterRng rng(7);
    BoxDomain box = BoxDomain::whole(-1.0, 2.0, 3);
    for (int t = 0; t < 25; ++t) {
        ShallowNet net = testutil::random_net(rng.split(t), 3, 4);
        Vec p = flatten(net);
        for (int k = 0; k < 40; ++k) {
            Vec x = testutil::random_point(rng.split(1000 + t), k * 3, box);
            double a = evaluate(net, x);
            double b = evaluate_flat(p, 3, 4, x);
            CHECK(a == b);
        }
    }
}

TEST_CASE("vector norms") {
    CHECK(euclid_norm({}) == 0.0);
    CHECK(max_norm({}) == 0.0);
    CHECK(euclid_norm({3.0, 4.0}) == 5.0);
    CHECK(max_norm({3.0, 4.0}) == 4.0);
    CHECK(euclid_norm({-2.0, 1.0, 2.0}) == 3.0);
    CHECK(max_norm({-2.0, 1.0, 2.0}) == 2.0);
}

TEST_CASE("neuron_scale preserves the realization") {
    CounterRng rng(11);
    BoxDomain box = BoxDomain::whole(0.0, 1.0, 2);
    ShallowNet net = testutil::random_net(rng, 2, 3);

    ShallowNet same = neuron_scale(net, 1, 1.0);
    CHECK(flatten(same) == flatten(net));

    ShallowNet scaled = neuron_scale(net, 0, 2.0);
    for (int k = 0; k < 100; ++k) {
        Vec x = testutil::random_point(rng.split(5), k * 2, box);
        double f0 = evaluate(net, x);
        double f1 = evaluate(scaled, x);
        CHECK(std::abs(f1 - f0) <= 1e-12 * (1.0 + std::abs(f0)));
    }

    CHECK_THROWS_AS(neuron_scale(net, 0, 0.0), NonpositiveScale);
    CHECK_THROWS_AS(neuron_scale(net, 0, -1.0), NonpositiveScale);
}

TEST_CASE("permute_neurons") {
    CounterRng rng(13);
    BoxDomain box = BoxDomain::whole(0.0, 1.0, 2);
    ShallowNet net = testutil::random_net(rng, 2, 3);

    ShallowNet same = permute_neurons(net, {0, 1, 2});
    CHECK(flatten(same) == flatten(net));

    ShallowNet swapped = permute_neurons(net, {1, 0, 2});
    for (int k = 0; k < 50; ++k) {
        Vec x = testutil::random_point(rng.split(6), k * 2, box);
        CHECK(evaluate(swapped, x) == Catch::Approx(evaluate(net, x)).margin(1e-12));
    }

    // sigma = (2,3,1) in 1-based terms, then its inverse, restores the net.
    ShallowNet cycled = permute_neurons(net, {1, 2, 0});
    ShallowNet restored = permute_neurons(cycled, {2, 0, 1});
    CHECK(flatten(restored) == flatten(net));

    CHECK_THROWS_AS(permute_neurons(net, {0, 1}), InvalidPermutation);
    CHECK_THROWS_AS(permute_neurons(net, {0, 0, 2}), InvalidPermutation);
    CHECK_THROWS_AS(permute_neurons(net, {0, 1, 3}), InvalidPermutation);
}

TEST_CASE("realization invariance under random transform chains") {
    CounterRng rng(17);
    BoxDomain box = BoxDomain::whole(-1.0, 2.0, 2);
    for (int t = 0; t < 10; ++t) {
        ShallowNet net = testutil::random_net(rng.split(t), 2, 4);
        ShallowNet tr = net;
        CounterRng trng = rng.split(100 + t);
        std::uint64_t c = 0;
        for (int step = 0; step < 6; ++step) {
            int i = static_cast<int>(trng.below(c++, 4));
            double lam = trng.uniform(c++, 1e-3, 10.0);
            tr = neuron_scale(tr, i, lam);
            std::vector<int> sigma{0, 1, 2, 3};
            std::size_t p1 = trng.below(c++, 4);
            std::size_t p2 = trng.below(c++, 4);
            std::swap(sigma[p1], sigma[p2]);
            tr = permute_neurons(tr, sigma);
        }
        for (int k = 0; k < 1000; ++k) {
            Vec x = testutil::random_point(rng.split(900 + t), static_cast<std::uint64_t>(k) * 2, box);
            double f0 = evaluate(net, x);
            double f1 = evaluate(tr, x);
            REQUIRE(std::abs(f1 - f0) <= 1e-10 * (1.0 + std::abs(f0)));
        }
    }
}

TEST_CASE("BoxDomain validation") {
    CHECK_THROWS_AS(BoxDomain::whole(1.0, 1.0, 2), DomainError);
    CHECK_THROWS_AS(BoxDomain::whole(2.0, 1.0, 2), DomainError);
    CHECK_THROWS_AS(BoxDomain::with_points(0.0, 1.0, 2, {}), DomainError);
    CHECK_THROWS_AS(BoxDomain::with_points(0.0, 1.0, 2, {{0.5}}), DimMismatch);
    CHECK_THROWS_AS(BoxDomain::with_points(0.0, 1.0, 2, {{0.5, 1.5}}), DomainError);
    BoxDomain ok = BoxDomain::with_points(0.0, 1.0, 2, {{0.5, 0.25}});
    CHECK(ok.contains({0.5, 0.25}));
    CHECK(!ok.contains({1.5, 0.0}));
}

TEST_CASE("counter rng basics") {
    CounterRng a(1), b(1), c(2);
    for (int k = 0; k < 1000; ++k) {
        double u = a.uniform01(k);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(u == b.uniform01(k)); // same seed, same counter, same value
    }
    CHECK(a.raw(0) != c.raw(0));
    CHECK(a.split(1).raw(0) != a.split(2).raw(0));
    // Mean of uniform01 over a block is near 1/2.
    double s = 0.0;
    for (int k = 0; k < 100000; ++k) s += a.uniform01(k);
    CHECK(std::abs(s / 100000 - 0.5) < 0.01);
}
