#pragma once

#include "remodel/spectral.hpp"
#include "remodel/witten.hpp"

namespace remodel {

// stable labeled graph with markings in the branch-point set
struct StableGraph {
    struct Vertex {
        long genus = 0;
        int mark = 0;                 // branch point index
        std::vector<long> leg_ids;    // ordinary leaves attached here (0-based slot)
        std::vector<long> leg_k;      // their heights, aligned with leg_ids
        std::vector<long> dilaton;    // dilaton heights (each >= 2), sorted
    };
    struct Edge {
        int v1 = 0, v2 = 0;
        long k1 = 0, k2 = 0; // heights at the two half-edges (k1 at v1)
    };
    std::vector<Vertex> verts;
    std::vector<Edge> edges;
    long aut = 1;

    long total_genus() const;
    std::string signature() const;
};

// all stable labeled graphs of type (g, n) with markings in {0..nmarks-1},
// deduplicated up to isomorphism, with |Aut| filled in
std::vector<StableGraph> stable_graphs(long g, long n, int nmarks);

// the graph-sum form, assembled in pole-profile coordinates for comparison
// with the recursion output; entries must come out rational
OmegaTensor graph_sum_B(CurveData& cd, long g, long n);

// per-graph weight trace (signature and weight) for auditability
struct GraphTraceRow {
    std::string signature;
    std::string weight;
};
OmegaTensor graph_sum_B(CurveData& cd, long g, long n, std::vector<GraphTraceRow>* trace);

} // namespace remodel
