#ifndef MSDE_GRAPH_HPP
#define MSDE_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace msde {

/// A sampled (dv,dc)-regular bipartite graph.  Edges are numbered check-major
/// (edge e belongs to check e / dc, position e % dc); var_edges lists each
/// variable's dv incident edge ids.  Multi-edges from the configuration model
/// are kept and counted in metadata.
struct TannerGraph {
    int n_var = 0;
    int n_chk = 0;
    int dv = 0;
    int dc = 0;
    std::vector<std::int32_t> edge_var;   // edge id -> variable node
    std::vector<std::int32_t> var_edges;  // n_var * dv edge ids, var-major
    int multi_edge_count = 0;

    int num_edges() const { return static_cast<int>(edge_var.size()); }
};

/// Configuration model: a uniform random matching of variable half-edges to
/// check half-edges.  Same seed, same graph.
inline TannerGraph sample_graph(int n_var, int dv, int dc, std::uint64_t seed) {
    if (n_var < 1 || dv < 2 || dc < 2)
        throw std::invalid_argument("sample_graph: need n_var >= 1 and degrees >= 2");
    long long half = static_cast<long long>(n_var) * dv;
    if (half % dc != 0)
        throw std::invalid_argument("sample_graph: n_var * dv must be divisible by dc");

    TannerGraph g;
    g.n_var = n_var;
    g.dv = dv;
    g.dc = dc;
    g.n_chk = static_cast<int>(half / dc);

    int n_edges = static_cast<int>(half);
    std::vector<std::int32_t> var_half(n_edges);
    for (int v = 0; v < n_var; ++v)
        for (int k = 0; k < dv; ++k) var_half[static_cast<std::size_t>(v) * dv + k] = v;

    std::mt19937_64 rng(seed);
    std::shuffle(var_half.begin(), var_half.end(), rng);
    g.edge_var = std::move(var_half);  // slot e belongs to check e / dc

    g.var_edges.assign(static_cast<std::size_t>(n_var) * dv, -1);
    std::vector<int> fill(n_var, 0);
    for (int e = 0; e < n_edges; ++e) {
        int v = g.edge_var[e];
        g.var_edges[static_cast<std::size_t>(v) * dv + fill[v]++] = e;
    }

    // count repeated (variable, check) pairs
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(n_edges));
    for (int e = 0; e < n_edges; ++e) {
        std::uint64_t key = (static_cast<std::uint64_t>(g.edge_var[e]) << 32) |
                            static_cast<std::uint32_t>(e / dc);
        if (!seen.insert(key).second) ++g.multi_edge_count;
    }
    return g;
}

}  // namespace msde

#endif
