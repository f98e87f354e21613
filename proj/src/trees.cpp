#include "wfcoal/trees.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "wfcoal/block_chain.hpp"

namespace wfcoal {

namespace {

void profiles_rec(int depth, std::vector<int>& cur, std::vector<LevelProfile>& out,
                  std::uint64_t guard) {
    if (static_cast<int>(cur.size()) == depth + 1) {
        if (out.size() >= guard) throw std::invalid_argument("enumerate_profiles: guard exceeded");
        out.push_back(LevelProfile{cur});
        return;
    }
    for (int v = 2; v <= cur.back(); ++v) {
        cur.push_back(v);
        profiles_rec(depth, cur, out, guard);
        cur.pop_back();
    }
}

}  // namespace

std::vector<LevelProfile> enumerate_profiles(int n_particles, int depth, std::uint64_t guard) {
    if (n_particles < 2) throw std::invalid_argument("enumerate_profiles: need N >= 2");
    if (depth < 0) throw std::invalid_argument("enumerate_profiles: negative depth");
    std::vector<LevelProfile> out;
    std::vector<int> cur{n_particles};
    profiles_rec(depth, cur, out, guard);
    // ascending entries enumerate in lexicographic order already
    return out;
}

BigInt surjection_count(int m, int k) {
    if (m < 1 || k < 0) throw std::invalid_argument("surjection_count: bad arguments");
    if (k > m) return 0;
    return factorial(k) * stirling2(m, k);
}

void validate_surjection_sequence(const SurjSeq& a, int n_particles) {
    if (a.empty()) throw std::invalid_argument("surjection sequence: empty");
    int domain = n_particles;
    for (std::size_t p = 0; p < a.size(); ++p) {
        if (static_cast<int>(a[p].size()) != domain)
            throw std::invalid_argument("surjection sequence: domain size mismatch");
        int codomain = 0;
        std::vector<char> hit;
        for (int v : a[p]) {
            if (v < 0 || v >= domain) throw std::invalid_argument("surjection sequence: value out of range");
            codomain = std::max(codomain, v + 1);
        }
        hit.assign(static_cast<std::size_t>(codomain), 0);
        for (int v : a[p]) hit[static_cast<std::size_t>(v)] = 1;
        for (char h : hit)
            if (!h) throw std::invalid_argument("surjection sequence: not surjective onto [max+1]");
        domain = codomain;
    }
    if (domain != 1) throw std::invalid_argument("surjection sequence: must terminate in [1]");
}

LevelProfile profile_of(const SurjSeq& a, int n_particles) {
    validate_surjection_sequence(a, n_particles);
    LevelProfile profile;
    profile.q.push_back(n_particles);
    for (std::size_t p = 0; p + 1 < a.size(); ++p) {
        int codomain = 0;
        for (int v : a[p]) codomain = std::max(codomain, v + 1);
        profile.q.push_back(codomain);
    }
    return profile;
}

std::vector<std::vector<int>> enumerate_surjections(int m, int k, std::uint64_t guard) {
    if (m < 1 || k < 1 || k > m) throw std::invalid_argument("enumerate_surjections: bad arguments");
    BigInt predicted = big_pow(k, static_cast<unsigned long>(m));
    if (predicted > BigInt(static_cast<unsigned long>(guard)))
        throw std::invalid_argument("enumerate_surjections: guard exceeded");
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(m), 0);
    for (;;) {
        std::vector<char> hit(static_cast<std::size_t>(k), 0);
        for (int v : cur) hit[static_cast<std::size_t>(v)] = 1;
        bool onto = true;
        for (char h : hit) onto = onto && h;
        if (onto) out.push_back(cur);
        int pos = m - 1;
        while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == k - 1) {
            cur[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++cur[static_cast<std::size_t>(pos)];
    }
    return out;
}

std::vector<std::vector<int>> enumerate_weakly_increasing_surjections(int m, int k) {
    if (m < 1 || k < 1 || k > m) throw std::invalid_argument("enumerate_weakly_increasing_surjections: bad arguments");
    // compositions of m into k positive parts, lexicographic
    std::vector<std::vector<int>> out;
    std::vector<int> parts;
    std::function<void(int, int)> rec = [&](int left, int slots) {
        if (slots == 1) {
            parts.push_back(left);
            std::vector<int> surj;
            for (int t = 0; t < k; ++t)
                for (int c = 0; c < parts[static_cast<std::size_t>(t)]; ++c) surj.push_back(t);
            out.push_back(surj);
            parts.pop_back();
            return;
        }
        for (int first = 1; first + (slots - 1) <= left; ++first) {
            parts.push_back(first);
            rec(left - first, slots - 1);
            parts.pop_back();
        }
    };
    rec(m, k);
    return out;
}

std::vector<ParentMap> pi_compose(const SurjSeq& a, int n_particles) {
    validate_surjection_sequence(a, n_particles);
    std::vector<ParentMap> out;
    std::vector<int> running(a[0]);  // length N, values already inside [0, N)
    out.emplace_back(running);
    for (std::size_t p = 1; p < a.size(); ++p) {
        for (auto& v : running) v = a[p][static_cast<std::size_t>(v)];
        out.emplace_back(running);
    }
    return out;
}

SurjSeq standardize(const std::vector<ParentMap>& history) {
    if (history.empty()) throw std::invalid_argument("standardize: empty history");
    const int n = history[0].size();
    for (std::size_t p = 0; p + 1 < history.size(); ++p) {
        if (history[p].is_boundary()) throw std::invalid_argument("standardize: interior boundary entry");
        if (!leq(history[p + 1], history[p]))
            throw std::invalid_argument("standardize: history not weakly decreasing");
    }
    if (!history.back().is_boundary()) throw std::invalid_argument("standardize: last entry not constant");

    SurjSeq out;
    // rank within the sorted image of each entry
    std::vector<std::vector<int>> ranks(history.size(), std::vector<int>(static_cast<std::size_t>(n), -1));
    for (std::size_t p = 0; p < history.size(); ++p) {
        auto img = history[p].image();
        for (std::size_t r = 0; r < img.size(); ++r) ranks[p][static_cast<std::size_t>(img[r])] = static_cast<int>(r);
    }
    // a_0 : [N] ->> [q_1]
    {
        std::vector<int> a0(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) a0[static_cast<std::size_t>(i)] = ranks[0][static_cast<std::size_t>(history[0](i))];
        out.push_back(std::move(a0));
    }
    for (std::size_t p = 1; p < history.size(); ++p) {
        auto prev_img = history[p - 1].image();
        std::vector<int> ap(prev_img.size());
        // a preimage representative of each previous-image value
        for (std::size_t r = 0; r < prev_img.size(); ++r) {
            int rep = -1;
            for (int i = 0; i < n; ++i)
                if (history[p - 1](i) == prev_img[r]) {
                    rep = i;
                    break;
                }
            ap[r] = ranks[p][static_cast<std::size_t>(history[p](rep))];
        }
        out.push_back(std::move(ap));
    }
    return out;
}

namespace {

// encoding, stabilizer, height, vertex count of a subtree
struct NodeInfo {
    std::string enc;
    BigInt stab = 1;
    int height = 0;
    long count = 1;
};

NodeInfo leaf_info() {
    NodeInfo info;
    info.enc = "( )";
    info.height = 1;
    return info;
}

NodeInfo combine_children(std::vector<NodeInfo> children) {
    if (children.empty()) return leaf_info();
    std::sort(children.begin(), children.end(),
              [](const NodeInfo& a, const NodeInfo& b) { return a.enc < b.enc; });
    NodeInfo out;
    out.enc = "(";
    out.stab = 1;
    out.count = 1;
    const int child_height = children[0].height;
    std::size_t i = 0;
    while (i < children.size()) {
        if (children[i].height != child_height)
            throw std::invalid_argument("PlanarTree: leaves must share one level");
        std::size_t j = i;
        while (j < children.size() && children[j].enc == children[i].enc) ++j;
        const long mult = static_cast<long>(j - i);
        out.enc += " " + children[i].enc;
        if (mult > 1) out.enc += "^" + std::to_string(mult);
        out.stab *= factorial(mult);
        for (long rep = 0; rep < mult; ++rep) out.stab *= children[i].stab;
        out.count += mult * children[i].count;
        i = j;
    }
    out.enc += " )";
    out.height = child_height + 1;
    return out;
}

}  // namespace

PlanarTree PlanarTree::from_surjections(const SurjSeq& a, int n_particles) {
    validate_surjection_sequence(a, n_particles);
    // bottom-up: leaves are [N], level p+1 nodes are the codomain of a_p
    std::vector<NodeInfo> level(static_cast<std::size_t>(n_particles), leaf_info());
    for (const auto& ap : a) {
        int codomain = 0;
        for (int v : ap) codomain = std::max(codomain, v + 1);
        std::vector<std::vector<NodeInfo>> grouped(static_cast<std::size_t>(codomain));
        for (std::size_t u = 0; u < ap.size(); ++u)
            grouped[static_cast<std::size_t>(ap[u])].push_back(level[u]);
        std::vector<NodeInfo> next;
        next.reserve(grouped.size());
        for (auto& g : grouped) next.push_back(combine_children(std::move(g)));
        level = std::move(next);
    }
    // the last codomain is [1]: its single node is the root
    PlanarTree tree;
    tree.encoding_ = level[0].enc;
    // ht counts the levels above the root
    tree.height_ = level[0].height - 1;
    tree.vertex_count_ = level[0].count;
    tree.stabilizer_ = level[0].stab;
    return tree;
}

namespace {

NodeInfo parse_node(const std::string& text, std::size_t& pos) {
    auto skip_ws = [&] {
        while (pos < text.size() && text[pos] == ' ') ++pos;
    };
    skip_ws();
    if (pos >= text.size() || text[pos] != '(') throw std::invalid_argument("PlanarTree::parse: expected '('");
    ++pos;
    std::vector<NodeInfo> children;
    for (;;) {
        skip_ws();
        if (pos >= text.size()) throw std::invalid_argument("PlanarTree::parse: unterminated node");
        if (text[pos] == ')') {
            ++pos;
            break;
        }
        NodeInfo child = parse_node(text, pos);
        long mult = 1;
        if (pos < text.size() && text[pos] == '^') {
            ++pos;
            std::size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (start == pos) throw std::invalid_argument("PlanarTree::parse: missing multiplicity");
            mult = std::stol(text.substr(start, pos - start));
            if (mult < 1) throw std::invalid_argument("PlanarTree::parse: bad multiplicity");
        }
        for (long rep = 0; rep < mult; ++rep) children.push_back(child);
    }
    return combine_children(std::move(children));
}

}  // namespace

PlanarTree PlanarTree::parse(const std::string& text) {
    std::size_t pos = 0;
    NodeInfo info = parse_node(text, pos);
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos != text.size()) throw std::invalid_argument("PlanarTree::parse: trailing input");
    PlanarTree tree;
    tree.encoding_ = info.enc;
    tree.height_ = info.height - 1;
    tree.vertex_count_ = info.count;
    tree.stabilizer_ = info.stab;
    return tree;
}

SurjSeq group_action(const std::vector<std::vector<int>>& s, const SurjSeq& a) {
    if (s.size() != a.size()) throw std::invalid_argument("group_action: shape mismatch");
    SurjSeq out(a.size());
    for (std::size_t p = 0; p < a.size(); ++p) {
        const auto& perm = s[p];
        if (perm.size() != a[p].size()) throw std::invalid_argument("group_action: permutation size mismatch");
        std::vector<int> inv(perm.size());
        std::vector<char> seen(perm.size(), 0);
        for (std::size_t j = 0; j < perm.size(); ++j) {
            if (perm[j] < 0 || perm[j] >= static_cast<int>(perm.size()) || seen[static_cast<std::size_t>(perm[j])])
                throw std::invalid_argument("group_action: not a permutation");
            seen[static_cast<std::size_t>(perm[j])] = 1;
            inv[static_cast<std::size_t>(perm[j])] = static_cast<int>(j);
        }
        std::vector<int> next(a[p].size());
        for (std::size_t j = 0; j < a[p].size(); ++j) {
            int mid = a[p][static_cast<std::size_t>(inv[j])];
            next[j] = p + 1 < a.size() ? s[p + 1][static_cast<std::size_t>(mid)] : mid;
        }
        out[p] = std::move(next);
    }
    return out;
}

std::vector<OrbitRep> enumerate_orbit_reps(const LevelProfile& profile) {
    const int depth = profile.depth();
    const int n_particles = profile.q[0];
    std::vector<std::vector<std::vector<int>>> level_choices;
    BigInt group_order = 1;
    for (int p = 0; p <= depth; ++p) {
        const int from = profile.q[static_cast<std::size_t>(p)];
        const int to = p == depth ? 1 : profile.q[static_cast<std::size_t>(p + 1)];
        level_choices.push_back(enumerate_weakly_increasing_surjections(from, to));
        group_order *= factorial(from);
    }
    std::map<std::string, OrbitRep> by_tree;
    std::vector<std::size_t> pick(level_choices.size(), 0);
    for (;;) {
        SurjSeq a;
        for (std::size_t p = 0; p < pick.size(); ++p) a.push_back(level_choices[p][pick[p]]);
        auto tree = PlanarTree::from_surjections(a, n_particles);
        auto it = by_tree.find(tree.encode());
        if (it == by_tree.end()) {
            OrbitRep rep;
            rep.rep = a;
            rep.stabilizer = tree.stabilizer_order();
            rep.orbit_size = group_order / rep.stabilizer;
            rep.tree = std::move(tree);
            by_tree.emplace(rep.tree.encode(), std::move(rep));
        } else if (a < it->second.rep) {
            it->second.rep = a;
        }
        std::size_t pos = 0;
        while (pos < pick.size() && ++pick[pos] == level_choices[pos].size()) {
            pick[pos] = 0;
            ++pos;
        }
        if (pos == pick.size()) break;
    }
    std::vector<OrbitRep> out;
    out.reserve(by_tree.size());
    for (auto& [enc, rep] : by_tree) out.push_back(std::move(rep));
    return out;
}

Rat sequence_weight(const LevelProfile& profile) {
    const int n_particles = profile.q[0];
    BigInt num = n_particles;  // the image-size shift: sizes run over (q_1,...,1)
    BigInt den = big_pow(n_particles, static_cast<unsigned long>(profile.total()));
    for (int v : profile.q) {
        num *= falling_factorial(n_particles, v);
        den *= factorial(v);
    }
    return make_rat(num, den);
}

Rat level_mass(int n_particles, int depth) {
    if (n_particles == 1) return depth == 0 ? Rat(1) : Rat(0);
    Rat mass = 0;
    for (const auto& profile : enumerate_profiles(n_particles, depth)) {
        BigInt sequences = 1;
        for (int p = 0; p <= depth; ++p) {
            const int from = profile.q[static_cast<std::size_t>(p)];
            const int to = p == depth ? 1 : profile.q[static_cast<std::size_t>(p + 1)];
            sequences *= surjection_count(from, to);
        }
        mass += sequence_weight(profile) * Rat(sequences);
    }
    return mass;
}

SeriesResult invariant_measure_series(const MutationKernel<double>& kernel, int particles, double eps) {
    kernel.validate();
    if (!kernel.stationary)
        throw std::invalid_argument("invariant_measure_series: kernel has no stationary distribution");
    if (eps <= 0) throw std::invalid_argument("invariant_measure_series: eps <= 0");
    const auto& mu = *kernel.stationary;

    SeriesResult result;
    if (particles == 1) {
        result.measure = DistVec<double>::zero(1, kernel.type_count());
        for (std::size_t t = 0; t < mu.size(); ++t) result.measure.weights[t] = mu[t];
        result.radius = 0;
        return result;
    }

    // truncation depth: smallest h with 2 P(T > h) < eps, computed from the
    // exact absorption law (T = (S-1)_+, so P(T > h) = P(S >= h+2))
    auto law = absorption_law(block_transition_matrix(particles), particles, Rat(eps) / 8);
    const Rat eps_rat(eps);
    int depth = -1;
    for (std::size_t k = 2; k < law.survival.size(); ++k) {
        if (Rat(2) * law.survival[k] < eps_rat) {
            depth = static_cast<int>(k) - 2;
            break;
        }
    }
    if (depth < 0) throw std::runtime_error("invariant_measure_series: truncation search failed");
    result.depth = depth;
    result.radius = 2.0 * to_double(law.survival[static_cast<std::size_t>(depth) + 2]);

    auto raw = series_partial_orbit_compressed(kernel, mu, particles, depth);
    result.measure = symmetrize(raw);
    return result;
}

}  // namespace wfcoal
