#include "wfcoal/flows.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <set>
#include <string>

namespace wfcoal {

std::pair<Population, ParentMap> selection_step(const Population& x, Rng& rng) {
    ParentMap a = sample_uniform_map(x.size(), rng);
    return {apply_selection(a, x), a};
}

Population mutation_step(const Population& x, const MutationKernel<double>& kernel, Rng& rng) {
    const int e = kernel.type_count();
    Population y;
    y.values.reserve(x.values.size());
    for (int v : x.values) {
        if (v < 0 || v >= e) throw std::invalid_argument("mutation_step: value outside type space");
        const auto& row = kernel.rows[static_cast<std::size_t>(v)];
        double u = rng.uniform01();
        int to = e - 1;
        double acc = 0;
        for (int t = 0; t < e; ++t) {
            acc += row[static_cast<std::size_t>(t)];
            if (u < acc) {
                to = t;
                break;
            }
        }
        y.values.push_back(to);
    }
    return y;
}

namespace {

std::vector<std::vector<double>> matrix_power(const std::vector<std::vector<double>>& m, int steps) {
    const std::size_t e = m.size();
    std::vector<std::vector<double>> acc(e, std::vector<double>(e, 0.0));
    for (std::size_t i = 0; i < e; ++i) acc[i][i] = 1.0;
    for (int s = 0; s < steps; ++s) {
        std::vector<std::vector<double>> next(e, std::vector<double>(e, 0.0));
        for (std::size_t i = 0; i < e; ++i)
            for (std::size_t k = 0; k < e; ++k) {
                if (acc[i][k] == 0) continue;
                for (std::size_t j = 0; j < e; ++j) next[i][j] += acc[i][k] * m[k][j];
            }
        acc.swap(next);
    }
    return acc;
}

}  // namespace

double dobrushin(const MutationKernel<double>& kernel, int steps) {
    if (steps < 0) throw std::invalid_argument("dobrushin: steps < 0");
    kernel.validate();
    auto p = matrix_power(kernel.rows, steps);
    const std::size_t e = p.size();
    double beta = 0;
    for (std::size_t x = 0; x < e; ++x)
        for (std::size_t y = x + 1; y < e; ++y) {
            double d = 0;
            for (std::size_t z = 0; z < e; ++z) d += std::fabs(p[x][z] - p[y][z]);
            beta = std::max(beta, d);
        }
    return beta;
}

MixingParameters fit_mixing_parameters(const MutationKernel<double>& kernel) {
    MixingParameters out;
    const double beta1 = dobrushin(kernel, 1);
    if (beta1 == 0) {
        out.lambda = std::numeric_limits<double>::infinity();
        out.rank_one = true;
        return out;
    }
    if (beta1 / 2.0 >= 1.0)
        throw std::domain_error(
            "fit_mixing_parameters: beta(M)/2 >= 1; supply (delta, lambda) from a larger block power");
    out.lambda = -std::log(beta1 / 2.0);
    return out;
}

namespace {

// Closed-class analysis of the count-level support graph of the M D chain.
// States are type-count vectors; the transition support from a count c is:
// every count c'' whose support is contained in an achievable post-mutation
// support (each type t present in c can place its c_t individuals on any
// nonempty subset of its kernel row support, of size at most c_t).
struct CountGraph {
    std::vector<std::vector<int>> classes;
    std::vector<std::vector<int>> edges;
};

void enumerate_counts(int types, int remaining, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == types - 1) {
        cur.push_back(remaining);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int k = 0; k <= remaining; ++k) {
        cur.push_back(k);
        enumerate_counts(types, remaining - k, cur, out);
        cur.pop_back();
    }
}

CountGraph build_count_graph(const MutationKernel<double>& kernel, int particles) {
    const int e = kernel.type_count();
    CountGraph g;
    std::vector<int> cur;
    enumerate_counts(e, particles, cur, g.classes);
    std::map<std::vector<int>, int> ids;
    for (std::size_t i = 0; i < g.classes.size(); ++i) ids[g.classes[i]] = static_cast<int>(i);

    std::vector<unsigned> row_support(static_cast<std::size_t>(e), 0);
    for (int t = 0; t < e; ++t)
        for (int u = 0; u < e; ++u)
            if (kernel.rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(u)] > 0)
                row_support[static_cast<std::size_t>(t)] |= 1u << u;

    // nonempty subsets of a mask with at most `cap` bits
    auto subsets_capped = [](unsigned mask, int cap) {
        std::vector<unsigned> out;
        for (unsigned s = mask;; s = (s - 1) & mask) {
            if (s != 0 && __builtin_popcount(s) <= cap) out.push_back(s);
            if (s == 0) break;
        }
        return out;
    };

    g.edges.resize(g.classes.size());
    for (std::size_t ci = 0; ci < g.classes.size(); ++ci) {
        // achievable post-mutation supports
        std::set<unsigned> unions{0u};
        for (int t = 0; t < e; ++t) {
            const int ct = g.classes[ci][static_cast<std::size_t>(t)];
            if (ct == 0) continue;
            std::set<unsigned> next;
            for (unsigned base : unions)
                for (unsigned s : subsets_capped(row_support[static_cast<std::size_t>(t)], ct))
                    next.insert(base | s);
            unions.swap(next);
        }
        std::set<int> targets;
        for (unsigned support : unions) {
            for (std::size_t cj = 0; cj < g.classes.size(); ++cj) {
                bool ok = true;
                for (int t = 0; t < e && ok; ++t)
                    if (g.classes[cj][static_cast<std::size_t>(t)] > 0 && !(support & (1u << t))) ok = false;
                if (ok) targets.insert(static_cast<int>(cj));
            }
        }
        g.edges[ci].assign(targets.begin(), targets.end());
    }
    return g;
}

// Tarjan strongly connected components; returns component id per node.
std::vector<int> scc_ids(const std::vector<std::vector<int>>& adj, int& component_count) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> ids(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
        num(static_cast<std::size_t>(n), -1), stack;
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    int counter = 0;
    component_count = 0;
    std::function<void(int)> dfs = [&](int v) {
        num[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = counter++;
        stack.push_back(v);
        on_stack[static_cast<std::size_t>(v)] = 1;
        for (int w : adj[static_cast<std::size_t>(v)]) {
            if (num[static_cast<std::size_t>(w)] == -1) {
                dfs(w);
                low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], low[static_cast<std::size_t>(w)]);
            } else if (on_stack[static_cast<std::size_t>(w)]) {
                low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], num[static_cast<std::size_t>(w)]);
            }
        }
        if (low[static_cast<std::size_t>(v)] == num[static_cast<std::size_t>(v)]) {
            for (;;) {
                int w = stack.back();
                stack.pop_back();
                on_stack[static_cast<std::size_t>(w)] = 0;
                ids[static_cast<std::size_t>(w)] = component_count;
                if (w == v) break;
            }
            ++component_count;
        }
    };
    for (int v = 0; v < n; ++v)
        if (num[static_cast<std::size_t>(v)] == -1) dfs(v);
    return ids;
}

}  // namespace

DistVec<double> exact_stationary(const MutationKernel<double>& kernel, int particles) {
    kernel.validate();
    const int e = kernel.type_count();
    const std::size_t dim = DistVec<double>::space_size(particles, e, 10'000);

    // uniqueness diagnostic: exactly one closed class at the count level
    auto graph = build_count_graph(kernel, particles);
    int comp_count = 0;
    auto comp = scc_ids(graph.edges, comp_count);
    std::vector<char> closed(static_cast<std::size_t>(comp_count), 1);
    for (std::size_t v = 0; v < graph.edges.size(); ++v)
        for (int w : graph.edges[v])
            if (comp[v] != comp[static_cast<std::size_t>(w)]) closed[static_cast<std::size_t>(comp[v])] = 0;
    int closed_count = 0;
    for (char c : closed) closed_count += c;
    if (closed_count != 1)
        throw std::domain_error(
            "exact_stationary: the selection/mutation chain has " + std::to_string(closed_count) +
            " closed classes; the stationary law is not unique (degenerate kernel)");

    auto one_step = [&](const DistVec<double>& d) {
        return apply_selection_average(apply_mutation_tensor(d, kernel));
    };

    DistVec<double> pi;
    if (dim <= 1024) {
        // dense solve of pi (M D) = pi with the normalization row appended
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (std::size_t x = 0; x < dim; ++x) {
            auto basis = DistVec<double>::zero(particles, e, 10'000);
            basis.weights[x] = 1.0;
            auto image = one_step(basis);
            for (std::size_t y = 0; y < dim; ++y)
                a(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = image.weights[y];
        }
        Eigen::MatrixXd lhs = a - Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
        lhs.row(static_cast<Eigen::Index>(dim) - 1).setOnes();
        rhs(static_cast<Eigen::Index>(dim) - 1) = 1.0;
        Eigen::VectorXd sol = lhs.fullPivLu().solve(rhs);
        pi = DistVec<double>::zero(particles, e, 10'000);
        for (std::size_t x = 0; x < dim; ++x) pi.weights[x] = sol(static_cast<Eigen::Index>(x));
    } else {
        // power iteration from the uniform law
        pi = DistVec<double>::zero(particles, e, 10'000);
        const double u = 1.0 / static_cast<double>(dim);
        for (auto& w : pi.weights) w = u;
        for (int it = 0; it < 200'000; ++it) {
            auto next = one_step(pi);
            double diff = tv_distance(pi, next);
            pi = std::move(next);
            if (diff < 1e-13) break;
        }
    }
    // clamp tiny negatives from the linear solve and renormalize
    double total = 0;
    for (auto& w : pi.weights) {
        if (w < 0 && w > -1e-12) w = 0;
        total += w;
    }
    for (auto& w : pi.weights) w /= total;
    auto residual = tv_distance(pi, one_step(pi));
    if (residual > 1e-12)
        throw std::runtime_error("exact_stationary: fixed-point residual " + std::to_string(residual));
    return pi;
}

}  // namespace wfcoal
