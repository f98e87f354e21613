#include "wfcoal/ancestry.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace wfcoal {

Excursion::Excursion(std::vector<ParentMap> maps) : maps_(std::move(maps)) {
    if (maps_.empty()) throw std::invalid_argument("Excursion: empty sequence");
    const int n = maps_[0].size();
    for (const auto& m : maps_)
        if (m.size() != n) throw std::invalid_argument("Excursion: mixed population sizes");
    for (std::size_t p = 0; p + 1 < maps_.size(); ++p) {
        if (maps_[p].is_boundary())
            throw std::invalid_argument("Excursion: interior boundary entry");
        if (!leq(maps_[p + 1], maps_[p]))
            throw std::invalid_argument("Excursion: sequence not weakly decreasing");
    }
    if (!maps_.back().is_boundary())
        throw std::invalid_argument("Excursion: last entry not constant");
}

long Excursion::total_size() const {
    long total = 0;
    for (const auto& m : maps_) total += m.image_size();
    return total;
}

std::string Excursion::encode() const {
    std::ostringstream out;
    for (std::size_t p = 0; p < maps_.size(); ++p) {
        if (p) out << ';';
        out << maps_[p].encode();
    }
    return out.str();
}

Excursion Excursion::decode(const std::string& text) {
    std::vector<ParentMap> maps;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ';')) maps.push_back(ParentMap::decode(tok));
    return Excursion(std::move(maps));
}

ParentMap backward_step(const ParentMap& b, Rng& rng) {
    return compose(sample_uniform_map(b.size(), rng), b);
}

Rat conditional_transition_prob(const ParentMap& a, const ParentMap& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("conditional_transition_prob: size mismatch");
    if (!leq(b, a)) return Rat(0);
    return make_rat(1, big_pow(a.size(), static_cast<unsigned long>(a.image_size())));
}

Excursion run_to_absorption(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("run_to_absorption: n < 1");
    std::vector<ParentMap> maps;
    maps.push_back(sample_uniform_map(n, rng));
    while (!maps.back().is_boundary()) maps.push_back(backward_step(maps.back(), rng));
    return Excursion(std::move(maps));
}

Rat excursion_probability(const Excursion& e) {
    const long exp = e.population_size() + e.total_size() - 1;
    return make_rat(1, big_pow(e.population_size(), static_cast<unsigned long>(exp)));
}

StarComposeResult star_compose(const std::vector<ParentMap>& id_prefixed, const ParentMap& a) {
    if (id_prefixed.empty()) throw std::invalid_argument("star_compose: empty sequence");
    const int n = a.size();
    if (id_prefixed[0].size() != n) throw std::invalid_argument("star_compose: size mismatch");
    if (!id_prefixed[0].is_identity())
        throw std::invalid_argument("star_compose: sequence must start at Id");
    for (std::size_t p = 0; p + 1 < id_prefixed.size(); ++p)
        if (!leq(id_prefixed[p + 1], id_prefixed[p]))
            throw std::invalid_argument("star_compose: sequence not weakly decreasing");
    StarComposeResult out;
    for (const auto& c : id_prefixed) {
        ParentMap composed = compose(c, a);
        out.maps.push_back(composed);
        if (composed.is_boundary()) {
            out.absorbed = true;
            return out;
        }
    }
    return out;  // never entered the boundary: t_n = n convention
}

namespace {

// Successors of c in the backward chain are exactly {b : b <= c}.
std::vector<int> successor_indices(const std::vector<ParentMap>& all, const ParentMap& c) {
    std::vector<int> out;
    for (std::size_t j = 0; j < all.size(); ++j)
        if (leq(all[j], c)) out.push_back(static_cast<int>(j));
    return out;
}

}  // namespace

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return a > UINT64_MAX - b ? UINT64_MAX : a + b;
}

}  // namespace

std::vector<std::uint64_t> count_excursions(int n, int max_len) {
    if (n < 1 || max_len < 0) throw std::invalid_argument("count_excursions: bad arguments");
    if (n == 1) {
        std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_len) + 1, 0);
        counts[0] = 1;
        return counts;
    }
    auto all = enumerate_all_maps(n);
    const std::size_t m = all.size();
    std::vector<std::vector<int>> succ(m);
    for (std::size_t j = 0; j < m; ++j) succ[j] = successor_indices(all, all[j]);
    // paths[j] = number of weakly decreasing prefixes of the given length
    // ending at non-boundary map j; counts saturate at UINT64_MAX
    std::vector<std::uint64_t> paths(m, 0), counts;
    std::uint64_t boundary_count = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (all[j].is_boundary())
            ++boundary_count;
        else
            paths[j] = 1;
    }
    counts.push_back(boundary_count);  // length 0: the N constant maps
    for (int len = 1; len <= max_len; ++len) {
        std::uint64_t total = 0;
        std::vector<std::uint64_t> next(m, 0);
        for (std::size_t j = 0; j < m; ++j) {
            if (paths[j] == 0) continue;
            for (int k : succ[j]) {
                if (all[static_cast<std::size_t>(k)].is_boundary())
                    total = sat_add(total, paths[j]);
                else {
                    auto& slot = next[static_cast<std::size_t>(k)];
                    slot = sat_add(slot, paths[j]);
                }
            }
        }
        counts.push_back(total);
        paths.swap(next);
    }
    return counts;
}

void enumerate_excursions(int n, int max_len, const std::function<void(const Excursion&)>& sink,
                          std::uint64_t guard) {
    if (n < 1 || max_len < 0) throw std::invalid_argument("enumerate_excursions: bad arguments");
    if (n > 3) throw std::invalid_argument("enumerate_excursions: only feasible for N <= 3");
    if (n == 1) {
        sink(Excursion({ParentMap::constant(1, 1)}));
        return;
    }
    auto counts = count_excursions(n, max_len);
    std::uint64_t total = 0;
    for (auto c : counts) total = sat_add(total, c);
    if (total > guard) throw std::invalid_argument("enumerate_excursions: predicted count exceeds guard");

    auto all = enumerate_all_maps(n);  // already in lexicographic order
    std::vector<std::vector<int>> succ(all.size());
    for (std::size_t j = 0; j < all.size(); ++j) succ[j] = successor_indices(all, all[j]);

    // Emit by length, then lex over concatenated encodings: the DFS explores
    // candidate maps in lex order at every level, so each fixed-length pass
    // is already lexicographic.
    std::vector<ParentMap> stack;
    std::function<void(int, int)> dfs = [&](int at, int remaining) {
        if (remaining == 0) {
            for (int k : succ[static_cast<std::size_t>(at)]) {
                if (!all[static_cast<std::size_t>(k)].is_boundary()) continue;
                stack.push_back(all[static_cast<std::size_t>(k)]);
                sink(Excursion(stack));
                stack.pop_back();
            }
            return;
        }
        for (int k : succ[static_cast<std::size_t>(at)]) {
            if (all[static_cast<std::size_t>(k)].is_boundary()) continue;
            stack.push_back(all[static_cast<std::size_t>(k)]);
            dfs(k, remaining - 1);
            stack.pop_back();
        }
    };
    for (int len = 0; len <= max_len; ++len) {
        for (std::size_t j = 0; j < all.size(); ++j) {
            if (len == 0) {
                if (all[j].is_boundary()) sink(Excursion({all[j]}));
            } else {
                if (all[j].is_boundary()) continue;
                stack.push_back(all[j]);
                dfs(static_cast<int>(j), len - 1);
                stack.pop_back();
            }
        }
    }
}

}  // namespace wfcoal
