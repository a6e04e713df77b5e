#pragma once

#include <string>
#include <vector>

#include "invariants.hpp"

namespace skelink {

struct ProximityMatrix {
    int n = 0;
    std::vector<std::vector<double>> p;
    std::string variant = "c";  // "c" or "ca"
    std::vector<double> v;      // weight vector when renormalized; empty otherwise
    bool renormalized = false;
};

struct ProximityWeights {
    double lambda = 0.0;
    std::vector<double> w;  // sum 1, all positive
    double residual = 0.0;  // max-norm of P w - lambda w
    int iterations = 0;
};

// P with entries c_{ij} (or c^a_{ij}); with v supplied, the renormalized form
// p_{ij} v_i / v_j.
ProximityMatrix proximity_matrix(const ClosenessTable& closeness, const std::string& variant,
                                 const std::vector<double>* v = nullptr);

ProximityMatrix proximity_matrix_from(const std::vector<std::vector<double>>& entries,
                                      const std::vector<double>* v = nullptr);

// Components of the graph with edges where p_{ij} > 0 (off-diagonal).
std::vector<std::vector<int>> matrix_components(const std::vector<std::vector<double>>& p);

// Power iteration from the uniform vector; throws HypothesisError naming the
// disconnected component sets when the matrix is reducible.
ProximityWeights proximity_weights(const ProximityMatrix& matrix, double tol = 1e-12,
                                   int max_iterations = 100000);

// w~_i proportional to w_i * V_i, normalized to sum 1.
std::vector<double> renormalized_weights(const std::vector<double>& w,
                                         const std::vector<double>& V);

struct TieredGraph {
    struct Edge {
        int i = 0, j = 0;
        double height = 0.0;
    };
    std::vector<double> vertex_height;  // s_i per object
    std::vector<Edge> edges;            // linked pairs, i < j
};

TieredGraph build_tiered_graph(const ClosenessTable& closeness, const SignificanceVector& sig,
                               const std::string& variant = "c");

// All vertices; edges with height >= b; connected components sorted by
// smallest member.
std::vector<std::vector<int>> edge_threshold_subgraph(const TieredGraph& graph, double b);

struct VertexSubgraph {
    std::vector<int> vertices;
    std::vector<TieredGraph::Edge> edges;
};

// Vertices with height >= a and the edges joining surviving pairs.
VertexSubgraph vertex_threshold_subgraph(const TieredGraph& graph, double a);

struct MergeEvent {
    double b = 0.0;
    std::vector<std::vector<int>> components;  // state after adding edges at height b
};

// Sweep b down through the distinct edge heights; record every component merge
// (single-linkage dendrogram over the edge heights).
std::vector<MergeEvent> merge_sequence(const TieredGraph& graph);

}  // namespace skelink
