#include "doctest.h"

#include "wfcoal/ancestry.hpp"
#include "wfcoal/block_chain.hpp"
#include "wfcoal/trees.hpp"

#include <map>
#include <set>

using namespace wfcoal;

namespace {

MutationKernel<Rat> test_kernel_exact() {
    MutationKernel<Rat> k;
    k.rows = {{make_rat(9, 10), make_rat(1, 10)}, {make_rat(2, 10), make_rat(8, 10)}};
    k.stationary = std::vector<Rat>{make_rat(2, 3), make_rat(1, 3)};
    return k;
}

// all permutations of [m] as vectors
std::vector<std::vector<int>> all_perms(int m) {
    std::vector<int> base(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) base[static_cast<std::size_t>(i)] = i;
    std::vector<std::vector<int>> out;
    do {
        out.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    return out;
}

// odometer over per-level permutation tuples
struct GroupEnumerator {
    std::vector<std::vector<std::vector<int>>> perms_by_level;
    explicit GroupEnumerator(const LevelProfile& profile) {
        for (int v : profile.q) perms_by_level.push_back(all_perms(v));
    }
    template <typename F>
    void for_each(F&& fn) const {
        std::vector<std::size_t> pick(perms_by_level.size(), 0);
        for (;;) {
            std::vector<std::vector<int>> s;
            for (std::size_t p = 0; p < pick.size(); ++p) s.push_back(perms_by_level[p][pick[p]]);
            fn(s);
            std::size_t pos = 0;
            while (pos < pick.size() && ++pick[pos] == perms_by_level[pos].size()) {
                pick[pos] = 0;
                ++pos;
            }
            if (pos == pick.size()) break;
        }
    }
};

std::vector<SurjSeq> all_sequences(const LevelProfile& profile) {
    const int depth = profile.depth();
    std::vector<std::vector<std::vector<int>>> level_choices;
    for (int p = 0; p <= depth; ++p) {
        const int from = profile.q[static_cast<std::size_t>(p)];
        const int to = p == depth ? 1 : profile.q[static_cast<std::size_t>(p + 1)];
        level_choices.push_back(enumerate_surjections(from, to));
    }
    std::vector<SurjSeq> out;
    std::vector<std::size_t> pick(level_choices.size(), 0);
    for (;;) {
        SurjSeq a;
        for (std::size_t p = 0; p < pick.size(); ++p) a.push_back(level_choices[p][pick[p]]);
        out.push_back(std::move(a));
        std::size_t pos = 0;
        while (pos < pick.size() && ++pick[pos] == level_choices[pos].size()) {
            pick[pos] = 0;
            ++pos;
        }
        if (pos == pick.size()) break;
    }
    return out;
}

bool weakly_increasing(const SurjSeq& a) {
    for (const auto& level : a)
        for (std::size_t i = 0; i + 1 < level.size(); ++i)
            if (level[i] > level[i + 1]) return false;
    return true;
}

}  // namespace

TEST_CASE("profiles") {
    auto p20 = enumerate_profiles(2, 0);
    REQUIRE(p20.size() == 1);
    CHECK(p20[0].q == std::vector<int>{2});
    auto p21 = enumerate_profiles(2, 1);
    REQUIRE(p21.size() == 1);
    CHECK(p21[0].q == std::vector<int>{2, 2});
    auto p31 = enumerate_profiles(3, 1);
    REQUIRE(p31.size() == 2);
    CHECK(p31[0].q == std::vector<int>{3, 2});
    CHECK(p31[1].q == std::vector<int>{3, 3});
    CHECK_THROWS_AS(enumerate_profiles(1, 0), std::invalid_argument);
}

TEST_CASE("surjection counting and enumeration") {
    CHECK(surjection_count(5, 1) == 1);
    CHECK(surjection_count(4, 4) == 24);
    CHECK(surjection_count(3, 2) == 6);
    CHECK(surjection_count(2, 3) == 0);
    CHECK(enumerate_surjections(3, 2).size() == 6);
    auto wi = enumerate_weakly_increasing_surjections(3, 2);
    REQUIRE(wi.size() == 2);  // compositions (1,2) and (2,1)
    CHECK(wi[0] == std::vector<int>{0, 1, 1});
    CHECK(wi[1] == std::vector<int>{0, 0, 1});
}

TEST_CASE("pi composition") {
    // single constant level
    auto c1 = pi_compose({{0, 0, 0}}, 3);
    REQUIRE(c1.size() == 1);
    CHECK(c1[0].is_boundary());
    // the worked example: a_0 = (1,1,2), a_1 = (1,1)
    auto c2 = pi_compose({{0, 0, 1}, {0, 0}}, 3);
    REQUIRE(c2.size() == 2);
    CHECK(c2[0].encode() == "1,1,2");
    CHECK(c2[1].encode() == "1,1,1");
    // image sizes follow the profile shifted by one
    SurjSeq a{{0, 1, 2}, {0, 1}, {0, 0}};
    auto c3 = pi_compose(a, 3);
    CHECK(c3[0].image_size() == 3);
    CHECK(c3[1].image_size() == 2);
    CHECK(c3[2].image_size() == 1);
    CHECK_THROWS_AS(pi_compose({{0, 2}}, 2), std::invalid_argument);
}

TEST_CASE("standardization") {
    // already standardized histories come back unchanged
    SurjSeq a{{0, 0, 1}, {0, 0}};
    auto history = pi_compose(a, 3);
    CHECK(standardize(history) == a);
    // constant map over [2]
    auto single = standardize({ParentMap::decode("2,2")});
    REQUIRE(single.size() == 1);
    CHECK(single[0] == std::vector<int>{0, 0});
    // round trip on every excursion of N=3, length <= 2: the standardized
    // composition reproduces the history after increasing relabeling
    enumerate_excursions(3, 2, [&](const Excursion& e) {
        auto std_seq = standardize(e.maps());
        auto rebuilt = pi_compose(std_seq, 3);
        REQUIRE(rebuilt.size() == e.maps().size());
        for (std::size_t p = 0; p < rebuilt.size(); ++p) {
            // relabel e.maps()[p] through the increasing bijection of its image
            auto img = e.maps()[p].image();
            std::vector<int> rank(static_cast<std::size_t>(3), -1);
            for (std::size_t r = 0; r < img.size(); ++r) rank[static_cast<std::size_t>(img[r])] = static_cast<int>(r);
            for (int i = 0; i < 3; ++i)
                CHECK(rebuilt[p](i) == rank[static_cast<std::size_t>(e.maps()[p](i))]);
        }
    });
    CHECK_THROWS_AS(standardize({ParentMap::identity(2)}), std::invalid_argument);
}

TEST_CASE("group action") {
    SurjSeq a{{0, 0, 1}, {0, 0}};
    // identity tuple fixes everything
    std::vector<std::vector<int>> id{{0, 1, 2}, {0, 1}};
    CHECK(group_action(id, a) == a);
    // action property: s(s'(a)) = (s s')(a) over the full group of a small shape
    LevelProfile profile{{3, 2}};
    GroupEnumerator group(profile);
    std::vector<std::vector<std::vector<int>>> elements;
    group.for_each([&](const std::vector<std::vector<int>>& s) { elements.push_back(s); });
    Rng rng(4);
    for (int trial = 0; trial < 60; ++trial) {
        const auto& s = elements[rng.below(elements.size())];
        const auto& t = elements[rng.below(elements.size())];
        std::vector<std::vector<int>> st;
        for (std::size_t p = 0; p < s.size(); ++p) {
            std::vector<int> comp(s[p].size());
            for (std::size_t j = 0; j < comp.size(); ++j)
                comp[j] = s[p][static_cast<std::size_t>(t[p][j])];
            st.push_back(comp);
        }
        CHECK(group_action(s, group_action(t, a)) == group_action(st, a));
    }
    CHECK_THROWS_AS(group_action({{0, 1}}, a), std::invalid_argument);
}

TEST_CASE("planar tree encoding and stabilizer") {
    // binary cherry: two leaves under the root
    auto cherry = PlanarTree::from_surjections({{0, 0}}, 2);
    CHECK(cherry.encode() == "( ( ) ( ) )");
    CHECK(cherry.stabilizer_order() == 2);
    CHECK(cherry.height() == 1);
    CHECK(cherry.vertex_count() == 3);
    // a path has no symmetry
    auto path = PlanarTree::parse("( ( ( ) ) )");
    CHECK(path.stabilizer_order() == 1);
    // serialization grammar round trip, multiplicities included
    auto mixed = PlanarTree::parse("( ( )^2 ( ( ) ) )");
    const bool multiplicity_kept = mixed.encode().find("^2") != std::string::npos;
    CHECK(multiplicity_kept);
    CHECK(PlanarTree::parse(mixed.encode()) == mixed);
    CHECK(mixed.stabilizer_order() == 2);
    auto deep = PlanarTree::from_surjections({{0, 1, 0, 1}, {0, 0}}, 4);
    CHECK(PlanarTree::parse(deep.encode()) == deep);
    CHECK_THROWS(PlanarTree::parse("( ("));
}

TEST_CASE("orbit-stabilizer on all small shapes") {
    // every profile with at most 8 total vertices (root included)
    std::vector<LevelProfile> shapes;
    for (int n = 2; n <= 6; ++n)
        for (int depth = 0; depth <= 2; ++depth)
            for (const auto& profile : enumerate_profiles(n, depth))
                if (1 + profile.total() <= 8) shapes.push_back(profile);
    REQUIRE(!shapes.empty());

    for (const auto& profile : shapes) {
        const int n = profile.q[0];
        auto sequences = all_sequences(profile);
        GroupEnumerator group(profile);
        BigInt group_order = 1;
        for (int v : profile.q) group_order *= factorial(v);

        // brute-force orbits by closure under the action
        std::map<SurjSeq, int> orbit_of;
        int orbit_count = 0;
        for (const auto& a : sequences) {
            if (orbit_of.count(a)) continue;
            const int id = orbit_count++;
            group.for_each([&](const std::vector<std::vector<int>>& s) { orbit_of[group_action(s, a)] = id; });
        }

        std::map<int, long> orbit_sizes;
        for (const auto& [seq, id] : orbit_of) ++orbit_sizes[id];

        std::map<int, bool> has_weakly_increasing;
        for (const auto& [seq, id] : orbit_of)
            if (weakly_increasing(seq)) has_weakly_increasing[id] = true;

        for (const auto& a : sequences) {
            // brute-force stabilizer size
            long fixed = 0;
            group.for_each([&](const std::vector<std::vector<int>>& s) {
                if (group_action(s, a) == a) ++fixed;
            });
            auto tree = PlanarTree::from_surjections(a, n);
            CHECK(tree.stabilizer_order() == fixed);
            // orbit-stabilizer identity
            CHECK(BigInt(orbit_sizes[orbit_of[a]]) * fixed == group_order);
        }

        // every orbit has a weakly increasing representative, and the
        // representative enumeration finds each orbit exactly once
        for (int id = 0; id < orbit_count; ++id) CHECK(has_weakly_increasing[id]);
        auto reps = enumerate_orbit_reps(profile);
        CHECK(static_cast<int>(reps.size()) == orbit_count);
        BigInt covered = 0;
        for (const auto& rep : reps) {
            CHECK(weakly_increasing(rep.rep));
            CHECK(rep.orbit_size == BigInt(orbit_sizes[orbit_of[rep.rep]]));
            covered += rep.orbit_size;
        }
        CHECK(covered == BigInt(static_cast<long>(sequences.size())));
    }
}

TEST_CASE("level masses reproduce the absorption law") {
    CHECK(level_mass(2, 0) == make_rat(1, 2));
    CHECK(level_mass(1, 0) == 1);
    for (int n : {2, 3}) {
        auto law = absorption_distribution(n, n, 1e-10);
        auto pmf_t = law.mrca_pmf();
        Rat sum = 0;
        for (int depth = 0; depth <= 6; ++depth) {
            Rat mass = level_mass(n, depth);
            CHECK(mass == pmf_t[static_cast<std::size_t>(depth)]);
            sum += mass;
        }
        // normalization: the partial masses plus the exact chain tail give 1
        Rat tail = law.survival[8];  // P(T > 6) = P(S >= 8)
        CHECK(sum + tail == 1);
    }
}

TEST_CASE("orbit-compressed and orbit-expanded partial series agree") {
    auto kernel = test_kernel_exact();
    const auto& mu = *kernel.stationary;
    for (int depth_cap : {0, 1, 3}) {
        auto expanded = series_partial_orbit_expanded(kernel, mu, 2, depth_cap);
        auto compressed = symmetrize(series_partial_orbit_compressed(kernel, mu, 2, depth_cap));
        for (std::size_t i = 0; i < expanded.weights.size(); ++i)
            CHECK(expanded.weights[i] == compressed.weights[i]);
        // included mass equals P(T <= depth_cap)
        auto law = absorption_distribution(2, 2, 1e-12);
        Rat expected_mass = 0;
        auto pmf_t = law.mrca_pmf();
        for (int d = 0; d <= depth_cap; ++d) expected_mass += pmf_t[static_cast<std::size_t>(d)];
        CHECK(expanded.total_mass() == expected_mass);
    }
}

TEST_CASE("invariant measure series converges to the stationary law") {
    MutationKernel<double> kernel;
    kernel.rows = {{0.9, 0.1}, {0.2, 0.8}};
    kernel.stationary = std::vector<double>{2.0 / 3.0, 1.0 / 3.0};

    auto series = invariant_measure_series(kernel, 2, 1e-6);
    CHECK(series.radius < 1e-6);
    auto direct = exact_stationary(kernel, 2);
    CHECK(tv_distance(series.measure, direct) <= series.radius + 1e-10);

    // rank-one mutation erases ancestry in one step: the stationary law is
    // the plain product measure
    MutationKernel<double> rank_one;
    rank_one.rows = {{0.3, 0.7}, {0.3, 0.7}};
    rank_one.stationary = std::vector<double>{0.3, 0.7};
    auto flat = invariant_measure_series(rank_one, 3, 1e-8);
    auto product = iid_product(std::vector<double>{0.3, 0.7}, 3);
    CHECK(tv_distance(flat.measure, product) <= flat.radius + 1e-10);

    CHECK_THROWS_AS(invariant_measure_series(MutationKernel<double>{{{0.5, 0.5}, {0.5, 0.5}}, std::nullopt}, 2, 1e-6),
                    std::invalid_argument);
}
