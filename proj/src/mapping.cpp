#include "wfcoal/mapping.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace wfcoal {

ParentMap::ParentMap(std::vector<int> targets) : targets_(std::move(targets)) {
    const int n = static_cast<int>(targets_.size());
    if (n == 0) throw std::invalid_argument("ParentMap: empty target vector");
    for (int t : targets_)
        if (t < 0 || t >= n) throw std::invalid_argument("ParentMap: target out of range");
}

ParentMap ParentMap::identity(int n) {
    std::vector<int> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = i;
    return ParentMap(std::move(t));
}

ParentMap ParentMap::constant(int n, int label) {
    if (label < 1 || label > n) throw std::invalid_argument("ParentMap::constant: bad label");
    return ParentMap(std::vector<int>(static_cast<std::size_t>(n), label - 1));
}

int ParentMap::image_size() const {
    std::vector<char> seen(targets_.size(), 0);
    int count = 0;
    for (int t : targets_)
        if (!seen[static_cast<std::size_t>(t)]) {
            seen[static_cast<std::size_t>(t)] = 1;
            ++count;
        }
    return count;
}

int ParentMap::boundary_label() const {
    if (!is_boundary()) throw std::logic_error("boundary_label: map is not constant");
    return targets_[0] + 1;
}

bool ParentMap::is_identity() const {
    for (int i = 0; i < size(); ++i)
        if (targets_[static_cast<std::size_t>(i)] != i) return false;
    return true;
}

std::vector<int> ParentMap::image() const {
    std::vector<int> img(targets_);
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    return img;
}

std::string ParentMap::encode() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        if (i) out << ',';
        out << targets_[i] + 1;
    }
    return out.str();
}

ParentMap ParentMap::decode(const std::string& text) {
    std::vector<int> targets;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) throw std::invalid_argument("ParentMap::decode: empty field");
        targets.push_back(std::stoi(tok) - 1);
    }
    return ParentMap(std::move(targets));
}

ParentMap compose(const ParentMap& a, const ParentMap& b) {
    if (a.size() != b.size()) throw std::invalid_argument("compose: size mismatch");
    std::vector<int> t(static_cast<std::size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i) t[static_cast<std::size_t>(i)] = a(b(i));
    return ParentMap(std::move(t));
}

bool leq(const ParentMap& a, const ParentMap& c) {
    if (a.size() != c.size()) throw std::invalid_argument("leq: size mismatch");
    const int n = a.size();
    // value of a on each level set of c; -1 = unseen
    std::vector<int> assigned(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        int& slot = assigned[static_cast<std::size_t>(c(i))];
        if (slot == -1)
            slot = a(i);
        else if (slot != a(i))
            return false;
    }
    return true;
}

ParentMap sample_uniform_map(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_uniform_map: n < 1");
    std::vector<int> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        t[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    return ParentMap(std::move(t));
}

std::vector<ParentMap> enumerate_all_maps(int n, std::size_t cap) {
    if (n < 1) throw std::invalid_argument("enumerate_all_maps: n < 1");
    double count = 1;
    for (int i = 0; i < n; ++i) count *= n;
    if (count > static_cast<double>(cap))
        throw std::invalid_argument("enumerate_all_maps: N^N exceeds cap");
    std::vector<ParentMap> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<int> t(static_cast<std::size_t>(n), 0);
    for (;;) {
        out.emplace_back(t);
        int pos = n - 1;
        while (pos >= 0 && t[static_cast<std::size_t>(pos)] == n - 1) {
            t[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++t[static_cast<std::size_t>(pos)];
    }
    return out;
}

Population apply_selection(const ParentMap& a, const Population& x) {
    if (a.size() != x.size()) throw std::invalid_argument("apply_selection: size mismatch");
    Population y;
    y.values.resize(x.values.size());
    for (int i = 0; i < a.size(); ++i)
        y.values[static_cast<std::size_t>(i)] = x.values[static_cast<std::size_t>(a(i))];
    return y;
}

}  // namespace wfcoal
