// Graph topologies the Gibbs measure and the NLS flow live on: discrete
// tori, user edge lists, and fixed-point-free automorphism groups.
#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dnls {

inline constexpr std::int64_t kMaxVertices = std::int64_t(1) << 24;  // memory guard

/// Finite undirected graph without self-loops or duplicate edges, plus the
/// lattice spacing h. Immutable after construction.
struct GraphTopology {
    int n = 0;
    double h = 1.0;
    std::vector<std::pair<int, int>> edges;  // u < v, sorted
    std::vector<std::vector<int>> adjacency;
    int max_degree = 0;       // D
    double avg_degree = 0.0;  // 2|E|/n

    // set only by make_torus; torus_translations requires it
    bool is_torus = false;
    int torus_L = 0;
    int torus_d = 0;
};

/// Group of edge-preserving vertex permutations. For translatable graphs
/// every non-identity element is fixed-point free and |maps| = n.
struct AutomorphismGroup {
    std::vector<std::vector<int>> maps;
};

namespace detail {

inline GraphTopology finalize(int n, double h, std::vector<std::pair<int, int>> edges) {
    if (n < 1) throw std::invalid_argument("graph: n must be >= 1");
    if (h <= 0.0) throw std::invalid_argument("graph: h must be > 0");
    GraphTopology g;
    g.n = n;
    g.h = h;
    for (auto& [u, v] : edges) {
        if (u == v) throw std::invalid_argument("graph: self-loop at vertex " + std::to_string(u));
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw std::invalid_argument("graph: vertex index out of range");
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw std::invalid_argument("graph: duplicate edge");
    g.edges = std::move(edges);
    g.adjacency.assign(n, {});
    for (auto [u, v] : g.edges) {
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    }
    for (auto& nb : g.adjacency) g.max_degree = std::max<int>(g.max_degree, int(nb.size()));
    g.avg_degree = 2.0 * double(g.edges.size()) / double(n);
    return g;
}

}  // namespace detail

/// d-dimensional discrete torus {0, 1/L, ..., (L-1)/L}^d: n = L^d, h = 1/L,
/// nearest-neighbor edges with periodic wraparound. Vertices are indexed
/// row-major over coordinates. For L = 2 the two wraparound neighbors along
/// an axis coincide; the single undirected edge is stored once (degree d).
inline GraphTopology make_torus(int L, int d) {
    if (L < 2) throw std::invalid_argument("make_torus: L must be >= 2");
    if (d < 1) throw std::invalid_argument("make_torus: d must be >= 1");
    std::int64_t n = 1;
    for (int k = 0; k < d; ++k) {
        n *= L;
        if (n > kMaxVertices) throw std::overflow_error("make_torus: L^d exceeds the size cap");
    }
    // stride of axis k in the row-major index
    std::vector<std::int64_t> stride(d, 1);
    for (int k = d - 2; k >= 0; --k) stride[k] = stride[k + 1] * L;

    std::set<std::pair<int, int>> edge_set;
    std::vector<int> coord(d, 0);
    for (std::int64_t v = 0; v < n; ++v) {
        for (int k = 0; k < d; ++k) {
            int ck = int((v / stride[k]) % L);
            std::int64_t w = v + ((ck + 1) % L - ck) * stride[k];
            int a = int(v), b = int(w);
            if (a > b) std::swap(a, b);
            if (a != b) edge_set.insert({a, b});
        }
    }
    GraphTopology g = detail::finalize(int(n), 1.0 / double(L),
                                       {edge_set.begin(), edge_set.end()});
    g.is_torus = true;
    g.torus_L = L;
    g.torus_d = d;
    return g;
}

/// The n coordinate translations of a torus, identity included.
inline AutomorphismGroup torus_translations(const GraphTopology& g) {
    if (!g.is_torus) throw std::invalid_argument("torus_translations: topology is not a torus");
    int L = g.torus_L, d = g.torus_d;
    std::vector<std::int64_t> stride(d, 1);
    for (int k = d - 2; k >= 0; --k) stride[k] = stride[k + 1] * L;

    AutomorphismGroup group;
    group.maps.reserve(g.n);
    for (int t = 0; t < g.n; ++t) {
        std::vector<int> shift(d);
        for (int k = 0; k < d; ++k) shift[k] = int((t / stride[k]) % L);
        std::vector<int> perm(g.n);
        for (int v = 0; v < g.n; ++v) {
            std::int64_t img = 0;
            for (int k = 0; k < d; ++k) {
                int ck = int((v / stride[k]) % L);
                img += std::int64_t((ck + shift[k]) % L) * stride[k];
            }
            perm[v] = int(img);
        }
        group.maps.push_back(std::move(perm));
    }
    return group;
}

/// Edge-list text format: header `n <int> h <float>`, then one `u v` pair
/// per line. Blank lines and lines starting with '#' are skipped.
inline GraphTopology load_edge_list(std::istream& in) {
    std::string line;
    int n = -1;
    double h = 0.0;
    std::vector<std::pair<int, int>> edges;
    bool have_header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line;
        auto pos = trimmed.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        if (trimmed[pos] == '#') continue;
        std::istringstream ls(trimmed);
        if (!have_header) {
            std::string kn, kh;
            if (!(ls >> kn >> n >> kh >> h) || kn != "n" || kh != "h")
                throw std::invalid_argument("edge list: bad header at line " + std::to_string(lineno) +
                                            " (expected `n <int> h <float>`)");
            have_header = true;
        } else {
            int u, v;
            if (!(ls >> u >> v))
                throw std::invalid_argument("edge list: bad edge at line " + std::to_string(lineno));
            edges.emplace_back(u, v);
        }
    }
    if (!have_header) throw std::invalid_argument("edge list: missing header");
    return detail::finalize(n, h, std::move(edges));
}

/// Exporter for the same format; round trip is the identity on (n, h, edges).
inline void save_edge_list(const GraphTopology& g, std::ostream& out) {
    out << "n " << g.n << " h ";
    // shortest round-trip decimal for h
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, g.h);
        if (std::stod(buf) == g.h) break;
    }
    out << buf << "\n";
    for (auto [u, v] : g.edges) out << u << " " << v << "\n";
}

/// True iff the permutation maps the edge set onto itself.
inline bool preserves_edges(const GraphTopology& g, const std::vector<int>& perm) {
    if (int(perm.size()) != g.n) return false;
    for (auto [u, v] : g.edges) {
        int a = perm[u], b = perm[v];
        if (a > b) std::swap(a, b);
        if (!std::binary_search(g.edges.begin(), g.edges.end(), std::make_pair(a, b)))
            return false;
    }
    return true;
}

}  // namespace dnls
