#include "doctest.h"

#include "wfcoal/flows.hpp"
#include "wfcoal/mapping.hpp"
#include "wfcoal/rng.hpp"

#include <map>

using namespace wfcoal;

namespace {

ParentMap pm(std::initializer_list<int> one_based) {
    std::vector<int> t;
    for (int v : one_based) t.push_back(v - 1);
    return ParentMap(t);
}

// factorization oracle: exists b with a = b c
bool leq_brute(const ParentMap& a, const ParentMap& c) {
    for (const auto& b : enumerate_all_maps(a.size()))
        if (compose(b, c) == a) return true;
    return false;
}

}  // namespace

TEST_CASE("image size") {
    CHECK(ParentMap::identity(3).image_size() == 3);
    CHECK(ParentMap::constant(3, 1).image_size() == 1);
    CHECK(pm({1, 1, 2}).image_size() == 2);
    CHECK(ParentMap::constant(3, 2).is_boundary());
    CHECK(ParentMap::constant(3, 2).boundary_label() == 2);
    CHECK_FALSE(ParentMap::identity(3).is_boundary());
}

TEST_CASE("compose") {
    auto id = ParentMap::identity(2);
    auto b = pm({2, 2});
    CHECK(compose(id, b) == b);
    CHECK(compose(ParentMap::constant(3, 1), pm({3, 2, 1})) == ParentMap::constant(3, 1));
    CHECK(compose(pm({2, 1}), pm({2, 2})) == pm({1, 1}));
    CHECK_THROWS_AS(compose(id, ParentMap::identity(3)), std::invalid_argument);
}

TEST_CASE("compose is associative and image size shrinks") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        auto a = sample_uniform_map(n, rng);
        auto b = sample_uniform_map(n, rng);
        auto c = sample_uniform_map(n, rng);
        CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
        CHECK(compose(a, b).image_size() <= std::min(a.image_size(), b.image_size()));
    }
}

TEST_CASE("leq: level-set criterion") {
    auto id2 = ParentMap::identity(2);
    for (const auto& c : enumerate_all_maps(3)) {
        CHECK(leq(ParentMap::constant(3, 1), c));  // constants are minimal
        CHECK(leq(c, ParentMap::identity(3)));     // Id is maximal
    }
    CHECK_FALSE(leq(id2, pm({1, 1})));
    CHECK_THROWS_AS(leq(id2, ParentMap::identity(3)), std::invalid_argument);
}

TEST_CASE("leq agrees with factorization search for N <= 4") {
    for (int n = 2; n <= 4; ++n) {
        auto all = enumerate_all_maps(n);
        Rng rng(static_cast<std::uint64_t>(n));
        // exhaustive for n <= 3, sampled pairs for n = 4
        const std::size_t pairs = n <= 3 ? all.size() * all.size() : 4000;
        for (std::size_t t = 0; t < pairs; ++t) {
            const auto& a = n <= 3 ? all[t / all.size()] : all[rng.below(all.size())];
            const auto& c = n <= 3 ? all[t % all.size()] : all[rng.below(all.size())];
            CHECK(leq(a, c) == leq_brute(a, c));
        }
    }
}

TEST_CASE("apply_selection") {
    Population x{{10, 20, 30}};
    CHECK(apply_selection(ParentMap::identity(3), x) == x);
    CHECK(apply_selection(ParentMap::constant(3, 2), x) == Population{{20, 20, 20}});
    Population uv{{1, 2}};
    CHECK(apply_selection(pm({2, 1}), uv) == Population{{2, 1}});
    CHECK_THROWS_AS(apply_selection(pm({2, 1}), x), std::invalid_argument);
}

TEST_CASE("sample_uniform_map is uniform") {
    Rng rng(12345);
    CHECK(sample_uniform_map(1, rng) == ParentMap::constant(1, 1));

    const int runs = 100'000;
    std::map<std::string, long> freq;
    long boundary = 0;
    for (int r = 0; r < runs; ++r) {
        auto a = sample_uniform_map(2, rng);
        ++freq[a.encode()];
        if (a.is_boundary()) ++boundary;
    }
    CHECK(freq.size() == 4);
    // 3 sigma binomial window around 1/4
    const double sigma = std::sqrt(0.25 * 0.75 / runs);
    for (const auto& [enc, count] : freq)
        CHECK(std::fabs(static_cast<double>(count) / runs - 0.25) < 3 * sigma);
    const double sigma_b = std::sqrt(0.25 / runs);
    CHECK(std::fabs(static_cast<double>(boundary) / runs - 0.5) < 3 * sigma_b);
}

TEST_CASE("order chain of running compositions") {
    Rng rng(99);
    for (int n : {2, 3, 5}) {
        std::vector<ParentMap> a;
        for (int p = 0; p < 6; ++p) a.push_back(sample_uniform_map(n, rng));
        // a_{p,n} = a_p a_{p+1,n}
        std::vector<ParentMap> running(a.size(), ParentMap::identity(n));
        running.back() = a.back();
        for (int p = static_cast<int>(a.size()) - 2; p >= 0; --p)
            running[static_cast<std::size_t>(p)] =
                compose(a[static_cast<std::size_t>(p)], running[static_cast<std::size_t>(p) + 1]);
        for (std::size_t p = 0; p + 1 < running.size(); ++p) CHECK(leq(running[p], running[p + 1]));
        CHECK(leq(running.back(), ParentMap::identity(n)));
    }
}

TEST_CASE("tensor identity: uniform selection averages to the empirical product") {
    // exact rational check on populations over a finite type space
    struct Case {
        int n;
        std::vector<int> values;
        int types;
    };
    for (const auto& c : {Case{2, {0, 1}, 2}, Case{3, {0, 1, 1}, 2}, Case{3, {0, 1, 2}, 3},
                          Case{4, {0, 0, 1, 2}, 3}}) {
        auto delta = DistVec<Rat>::zero(c.n, c.types);
        delta.weights[delta.index_of(c.values)] = 1;

        // oracle: enumerate all N^N maps
        auto averaged = DistVec<Rat>::zero(c.n, c.types);
        auto all = enumerate_all_maps(c.n);
        const Rat w = make_rat(1, BigInt(static_cast<long>(all.size())));
        for (const auto& a : all) {
            auto pushed = apply_parent_map(delta, a);
            for (std::size_t i = 0; i < averaged.weights.size(); ++i)
                averaged.weights[i] += w * pushed.weights[i];
        }

        // m(x)^(x)N computed directly from type counts
        std::vector<Rat> empirical(static_cast<std::size_t>(c.types), Rat(0));
        for (int v : c.values) empirical[static_cast<std::size_t>(v)] += make_rat(1, c.n);
        auto product = iid_product(empirical, c.n);

        // the implementation's averaged-selection operator
        auto selected = apply_selection_average(delta);

        for (std::size_t i = 0; i < averaged.weights.size(); ++i) {
            CHECK(averaged.weights[i] == product.weights[i]);
            CHECK(selected.weights[i] == product.weights[i]);
        }
    }
}

TEST_CASE("text encoding round trip") {
    CHECK(pm({2, 1, 1}).encode() == "2,1,1");
    CHECK(ParentMap::decode("2,1,1") == pm({2, 1, 1}));
    CHECK_THROWS(ParentMap::decode("4,1,1"));
    CHECK_THROWS(ParentMap::decode(""));
}
