#include "doctest.h"

#include "wfcoal/ancestry.hpp"
#include "wfcoal/block_chain.hpp"
#include "wfcoal/stats.hpp"

#include <map>

using namespace wfcoal;

namespace {

ParentMap pm(std::initializer_list<int> one_based) {
    std::vector<int> t;
    for (int v : one_based) t.push_back(v - 1);
    return ParentMap(t);
}

// Exact distribution of the backward chain over the N^N maps, stepped via the
// conditional transition rows. Used as the chain-level oracle for N = 2.
struct ChainDp {
    std::vector<ParentMap> maps;
    std::vector<Rat> prob;

    explicit ChainDp(int n) : maps(enumerate_all_maps(n)) {
        prob.assign(maps.size(), make_rat(1, BigInt(static_cast<long>(maps.size()))));
    }

    void step() {
        std::vector<Rat> next(maps.size(), Rat(0));
        for (std::size_t i = 0; i < maps.size(); ++i) {
            if (prob[i] == 0) continue;
            for (std::size_t j = 0; j < maps.size(); ++j) {
                Rat p = conditional_transition_prob(maps[i], maps[j]);
                if (p != 0) next[j] += prob[i] * p;
            }
        }
        prob.swap(next);
    }
};

}  // namespace

TEST_CASE("excursion invariants") {
    auto e = Excursion({pm({2, 1}), pm({1, 1})});
    CHECK(e.length() == 1);
    CHECK(e.total_size() == 3);
    CHECK(e.mrca_label() == 1);
    CHECK(e.encode() == "2,1;1,1");
    CHECK(Excursion::decode("2,1;1,1") == e);
    CHECK_THROWS_AS(Excursion({pm({2, 1})}), std::invalid_argument);              // not absorbed
    CHECK_THROWS_AS(Excursion({pm({1, 1}), pm({1, 1})}), std::invalid_argument);  // interior boundary
}

TEST_CASE("conditional transition rows") {
    auto id = ParentMap::identity(2);
    for (const auto& b : enumerate_all_maps(2)) CHECK(conditional_transition_prob(id, b) == make_rat(1, 4));
    auto e1 = ParentMap::constant(3, 1);
    CHECK(conditional_transition_prob(e1, e1) == make_rat(1, 3));
    CHECK(conditional_transition_prob(e1, ParentMap::identity(3)) == 0);
    // N=2 from (1,1): exactly the two constants get 1/2
    int supported = 0;
    for (const auto& b : enumerate_all_maps(2)) {
        Rat p = conditional_transition_prob(pm({1, 1}), b);
        if (p != 0) {
            CHECK(p == make_rat(1, 2));
            CHECK(b.is_boundary());
            ++supported;
        }
    }
    CHECK(supported == 2);
    // rows sum to one
    for (int n : {2, 3})
        for (const auto& a : enumerate_all_maps(n)) {
            Rat sum = 0;
            for (const auto& b : enumerate_all_maps(n)) sum += conditional_transition_prob(a, b);
            CHECK(sum == 1);
        }
}

TEST_CASE("backward step") {
    Rng rng(5);
    // constants absorb
    auto e2 = ParentMap::constant(3, 2);
    for (int t = 0; t < 50; ++t) CHECK(backward_step(e2, rng).is_boundary());
    // N=2 from Id: boundary probability 1/2
    long hits = 0;
    const int runs = 100'000;
    for (int t = 0; t < runs; ++t)
        if (backward_step(ParentMap::identity(2), rng).is_boundary()) ++hits;
    CHECK(std::fabs(static_cast<double>(hits) / runs - 0.5) < 3 * std::sqrt(0.25 / runs));
    // conditional law matches the exact rows (chi-square at 0.1%)
    std::map<std::string, long> freq;
    for (int t = 0; t < runs; ++t) ++freq[backward_step(ParentMap::identity(2), rng).encode()];
    std::vector<long> observed;
    std::vector<double> expected;
    for (const auto& b : enumerate_all_maps(2)) {
        observed.push_back(freq[b.encode()]);
        expected.push_back(to_double(conditional_transition_prob(ParentMap::identity(2), b)));
    }
    CHECK(chi_square_pvalue(chi_square_stat(observed, expected), 3) > 0.001);
}

TEST_CASE("run_to_absorption terminates with valid excursions") {
    Rng rng(21);
    CHECK(run_to_absorption(1, rng).length() == 0);
    long t0 = 0;
    const int runs = 20'000;
    for (int r = 0; r < runs; ++r)
        if (run_to_absorption(2, rng).length() == 0) ++t0;
    CHECK(std::fabs(static_cast<double>(t0) / runs - 0.5) < 3 * std::sqrt(0.25 / runs));
    // every run terminates and the crude tail bound holds within 3 sigma
    for (int n = 2; n <= 6; ++n) {
        std::vector<long> lengths;
        for (int r = 0; r < 10'000; ++r) lengths.push_back(run_to_absorption(n, rng).length());
        for (long horizon : {2L, 5L, 10L}) {
            long over = 0;
            for (long l : lengths) over += l > horizon;
            const double crude = std::pow(1.0 - std::pow(static_cast<double>(n), -(n - 1)),
                                          static_cast<double>(horizon) + 1);
            const double sigma = std::sqrt(crude * (1 - crude) / 10'000.0) + 1e-9;
            CHECK(static_cast<double>(over) / 10'000.0 <= crude + 3 * sigma);
        }
    }
}

TEST_CASE("mrca label is uniform") {
    // N=3: chi-square over simulated runs at the 0.1% level
    Rng rng(2024);
    std::vector<long> counts(3, 0);
    for (int r = 0; r < 100'000; ++r)
        ++counts[static_cast<std::size_t>(run_to_absorption(3, rng).mrca_label() - 1)];
    CHECK(chi_square_pvalue(chi_square_stat(counts, {1.0 / 3, 1.0 / 3, 1.0 / 3}), 2) > 0.001);

    // N=2: exact chain iteration to horizon 40; the two label masses agree
    // exactly at every step and the remaining tail is below 1e-12
    ChainDp dp(2);
    Rat mass1 = 0, mass2 = 0;
    std::size_t idx_e1 = 0, idx_e2 = 0;
    for (std::size_t i = 0; i < dp.maps.size(); ++i) {
        if (dp.maps[i] == pm({1, 1})) idx_e1 = i;
        if (dp.maps[i] == pm({2, 2})) idx_e2 = i;
    }
    // collect absorbed mass per label, zeroing the boundary states afterwards
    for (int step = 0; step <= 40; ++step) {
        mass1 += dp.prob[idx_e1];
        mass2 += dp.prob[idx_e2];
        dp.prob[idx_e1] = 0;
        dp.prob[idx_e2] = 0;
        dp.step();
    }
    CHECK(mass1 == mass2);
    Rat tail = Rat(1) - mass1 - mass2;
    CHECK(tail > 0);
    CHECK(tail < make_rat(1, big_pow(10, 12)));
}

TEST_CASE("excursion probability") {
    auto e = Excursion({pm({1, 1})});
    CHECK(excursion_probability(e) == make_rat(1, 4));  // N=2, |c|=1
    // sum over the two length-0 excursions is P(T=0) = 1/2
    Rat total = excursion_probability(Excursion({pm({1, 1})})) + excursion_probability(Excursion({pm({2, 2})}));
    CHECK(total == make_rat(1, 2));
    // p(c) <= N^-N
    Rng rng(3);
    for (int n : {2, 3, 4})
        for (int r = 0; r < 50; ++r)
            CHECK(excursion_probability(run_to_absorption(n, rng)) <=
                  make_rat(1, big_pow(n, static_cast<unsigned long>(n))));
}

TEST_CASE("excursion sums match the absorption law") {
    // N=2: sum of p(c) over excursions of length <= L equals P(T <= L)
    for (int L : {0, 1, 5, 12}) {
        Rat sum = 0;
        enumerate_excursions(2, L, [&](const Excursion& e) { sum += excursion_probability(e); });
        // oracle: exact geometric law, P(T <= L) = 1 - (1/2)^(L+1)
        CHECK(sum == Rat(1) - make_rat(1, big_pow(2, static_cast<unsigned long>(L) + 1)));
    }
    // N=3: per-length masses match the block-count mrca law exactly
    auto law = absorption_distribution(3, 3, 1e-6);
    auto pmf_t = law.mrca_pmf();
    std::map<int, Rat> mass_by_len;
    enumerate_excursions(3, 4, [&](const Excursion& e) { mass_by_len[e.length()] += excursion_probability(e); });
    for (int len = 0; len <= 4; ++len) CHECK(mass_by_len[len] == pmf_t[static_cast<std::size_t>(len)]);
}

TEST_CASE("enumerate_excursions counting and order") {
    std::vector<Excursion> out;
    enumerate_excursions(2, 1, [&](const Excursion& e) { out.push_back(e); });
    // lengths 0 then 1, lexicographic within each length
    REQUIRE(out.size() == 6);
    CHECK(out[0].encode() == "1,1");
    CHECK(out[1].encode() == "2,2");
    CHECK(out[2].length() == 1);
    for (std::size_t i = 2; i + 1 < out.size(); ++i) CHECK(out[i].encode() < out[i + 1].encode());

    auto counts = count_excursions(2, 10);
    CHECK(counts[0] == 2);
    CHECK(counts[1] == 4);
    for (int l = 1; l <= 10; ++l) CHECK(counts[static_cast<std::size_t>(l)] == (1ull << l) * 2);

    auto c3 = count_excursions(3, 2);
    CHECK(c3[0] == 3);
    CHECK(c3[1] == 72);  // 24 non-boundary first entries, 3 constants below each

    // streamed counts agree with the DP
    std::map<int, long> streamed;
    enumerate_excursions(3, 2, [&](const Excursion& e) { ++streamed[e.length()]; });
    for (int l = 0; l <= 2; ++l) CHECK(streamed[l] == static_cast<long>(c3[static_cast<std::size_t>(l)]));

    int single = 0;
    enumerate_excursions(1, 5, [&](const Excursion&) { ++single; });
    CHECK(single == 1);

    CHECK_THROWS_AS(enumerate_excursions(3, 30, [](const Excursion&) {}), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_excursions(4, 1, [](const Excursion&) {}), std::invalid_argument);
}

TEST_CASE("star composition") {
    auto id = ParentMap::identity(2);
    // a constant: collapses to the length-0 excursion (a)
    auto r1 = star_compose({id, pm({2, 1}), pm({1, 1})}, pm({2, 2}));
    CHECK(r1.absorbed);
    CHECK(r1.maps.size() == 1);
    CHECK(r1.maps[0] == pm({2, 2}));
    // a = Id: drops the leading Id, returns the original excursion
    auto r2 = star_compose({id, pm({2, 1}), pm({1, 1})}, id);
    CHECK(r2.absorbed);
    REQUIRE(r2.maps.size() == 3);
    CHECK(r2.maps[1] == pm({2, 1}));
    CHECK(r2.maps[2] == pm({1, 1}));
    // no boundary hit: full sequence, flagged
    auto r3 = star_compose({id, pm({2, 1})}, pm({2, 1}));
    CHECK_FALSE(r3.absorbed);
    CHECK(r3.maps.size() == 2);
    CHECK_THROWS_AS(star_compose({pm({2, 1})}, id), std::invalid_argument);  // must start at Id
}

TEST_CASE("star-composed excursion has the excursion law") {
    // law of (Id, B) * A on excursions of length <= 3, by exact enumeration
    // of A and of the B-chain prefixes it depends on; compare against p(c).
    const int n = 2;
    auto all = enumerate_all_maps(n);
    const Rat uniform = make_rat(1, BigInt(static_cast<long>(all.size())));
    std::map<std::string, Rat> law;

    for (const auto& a : all) {
        // s = 0: A itself constant
        if (a.is_boundary()) {
            law[Excursion({a}).encode()] += uniform;
            continue;
        }
        // result (A, B_0 A, ..., B_{s-1} A) depends only on the chain prefix
        struct Prefix {
            std::vector<ParentMap> maps;
            Rat prob;
        };
        std::vector<Prefix> frontier;
        for (const auto& b0 : all) frontier.push_back({{b0}, uniform});
        for (int s = 1; s <= 3; ++s) {
            std::vector<Prefix> next;
            for (const auto& pre : frontier) {
                bool interior_ok = true;
                for (std::size_t p = 0; p + 1 < pre.maps.size(); ++p)
                    if (compose(pre.maps[p], a).is_boundary()) interior_ok = false;
                if (!interior_ok) continue;
                if (compose(pre.maps.back(), a).is_boundary()) {
                    std::vector<ParentMap> result{a};
                    for (const auto& b : pre.maps) result.push_back(compose(b, a));
                    law[Excursion(result).encode()] += uniform * pre.prob;
                    continue;
                }
                if (s == 3) continue;  // longer results are out of scope
                for (const auto& b : all) {
                    Rat p = conditional_transition_prob(pre.maps.back(), b);
                    if (p == 0) continue;
                    Prefix extended = pre;
                    extended.maps.push_back(b);
                    extended.prob *= p;
                    next.push_back(std::move(extended));
                }
            }
            frontier.swap(next);
        }
    }

    enumerate_excursions(2, 3, [&](const Excursion& e) {
        CHECK(law[e.encode()] == excursion_probability(e));
    });
}
