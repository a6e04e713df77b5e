#include "proximity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "util.hpp"

namespace skelink {

ProximityMatrix proximity_matrix(const ClosenessTable& closeness, const std::string& variant,
                                 const std::vector<double>* v) {
    if (variant != "c" && variant != "ca") throw InputError("variant must be c or ca");
    ProximityMatrix m;
    m.n = closeness.n;
    m.variant = variant;
    m.p = (variant == "c") ? closeness.c : closeness.c_add;
    if (v) {
        if ((int)v->size() != m.n) throw InputError("weight vector size mismatch");
        for (double vi : *v)
            if (vi <= 0.0) throw InputError("weight vector entries must be positive");
        m.renormalized = true;
        m.v = *v;
        for (int i = 0; i < m.n; ++i)
            for (int j = 0; j < m.n; ++j) m.p[i][j] *= (*v)[i] / (*v)[j];
    }
    return m;
}

ProximityMatrix proximity_matrix_from(const std::vector<std::vector<double>>& entries,
                                      const std::vector<double>* v) {
    int n = (int)entries.size();
    for (const auto& row : entries)
        if ((int)row.size() != n) throw InputError("proximity matrix must be square");
    ProximityMatrix m;
    m.n = n;
    m.p = entries;
    if (v) {
        if ((int)v->size() != n) throw InputError("weight vector size mismatch");
        for (double vi : *v)
            if (vi <= 0.0) throw InputError("weight vector entries must be positive");
        m.renormalized = true;
        m.v = *v;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m.p[i][j] *= (*v)[i] / (*v)[j];
    }
    return m;
}

std::vector<std::vector<int>> matrix_components(const std::vector<std::vector<double>>& p) {
    int n = (int)p.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (p[i][j] > 0.0 || p[j][i] > 0.0) parent[find(i)] = find(j);
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : groups) out.push_back(members);
    std::sort(out.begin(), out.end());
    return out;
}

ProximityWeights proximity_weights(const ProximityMatrix& matrix, double tol,
                                   int max_iterations) {
    int n = matrix.n;
    if (n == 0) throw InputError("empty proximity matrix");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (matrix.p[i][j] < 0.0) throw InputError("proximity matrix must be nonnegative");

    auto components = matrix_components(matrix.p);
    if (components.size() > 1) {
        std::ostringstream os;
        os << "proximity matrix is reducible; unlinked component sets:";
        for (const auto& comp : components) {
            os << " {";
            for (size_t k = 0; k < comp.size(); ++k) os << (k ? "," : "") << comp[k] + 1;
            os << "}";
        }
        throw HypothesisError(os.str());
    }

    ProximityWeights result;
    std::vector<double> w(n, 1.0 / n), pw(n, 0.0);
    for (int it = 0; it < max_iterations; ++it) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += matrix.p[i][j] * w[j];
            pw[i] = acc;
        }
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
            num += pw[i] * w[i];
            den += w[i] * w[i];
        }
        double lambda = num / den;
        double residual = 0.0;
        for (int i = 0; i < n; ++i) residual = std::max(residual, std::abs(pw[i] - lambda * w[i]));
        double sum = std::accumulate(pw.begin(), pw.end(), 0.0);
        for (int i = 0; i < n; ++i) w[i] = pw[i] / sum;
        result.lambda = lambda;
        result.iterations = it + 1;
        result.residual = residual;
        if (residual < tol) break;
    }
    // Recompute the residual for the normalized vector actually returned.
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += matrix.p[i][j] * w[j];
        pw[i] = acc;
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        num += pw[i] * w[i];
        den += w[i] * w[i];
    }
    result.lambda = num / den;
    result.residual = 0.0;
    for (int i = 0; i < n; ++i)
        result.residual = std::max(result.residual, std::abs(pw[i] - result.lambda * w[i]));
    result.w = std::move(w);
    return result;
}

std::vector<double> renormalized_weights(const std::vector<double>& w,
                                         const std::vector<double>& V) {
    if (w.size() != V.size()) throw InputError("weight vector size mismatch");
    std::vector<double> out(w.size());
    double sum = 0.0;
    for (size_t i = 0; i < w.size(); ++i) {
        if (V[i] <= 0.0) throw InputError("V entries must be positive");
        out[i] = w[i] * V[i];
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

TieredGraph build_tiered_graph(const ClosenessTable& closeness, const SignificanceVector& sig,
                               const std::string& variant) {
    const auto& c = (variant == "ca") ? closeness.c_add : closeness.c;
    TieredGraph graph;
    graph.vertex_height = sig.s;
    for (int i = 0; i < closeness.n; ++i)
        for (int j = i + 1; j < closeness.n; ++j)
            if (c[i][j] > 0.0) graph.edges.push_back({i, j, c[i][j]});
    return graph;
}

namespace {

std::vector<std::vector<int>> components_of(int n, const std::vector<TieredGraph::Edge>& edges) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& e : edges) parent[find(e.i)] = find(e.j);
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : groups) out.push_back(members);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<std::vector<int>> edge_threshold_subgraph(const TieredGraph& graph, double b) {
    std::vector<TieredGraph::Edge> kept;
    for (const auto& e : graph.edges)
        if (e.height >= b) kept.push_back(e);
    return components_of((int)graph.vertex_height.size(), kept);
}

VertexSubgraph vertex_threshold_subgraph(const TieredGraph& graph, double a) {
    VertexSubgraph sub;
    int n = (int)graph.vertex_height.size();
    std::vector<char> keep(n, 0);
    for (int i = 0; i < n; ++i)
        if (graph.vertex_height[i] >= a) {
            keep[i] = 1;
            sub.vertices.push_back(i);
        }
    for (const auto& e : graph.edges)
        if (keep[e.i] && keep[e.j]) sub.edges.push_back(e);
    return sub;
}

std::vector<MergeEvent> merge_sequence(const TieredGraph& graph) {
    std::vector<double> heights;
    for (const auto& e : graph.edges) heights.push_back(e.height);
    std::sort(heights.begin(), heights.end(), std::greater<>());
    heights.erase(std::unique(heights.begin(), heights.end()), heights.end());

    std::vector<MergeEvent> events;
    size_t prev_count = graph.vertex_height.size();
    for (double b : heights) {
        auto comps = edge_threshold_subgraph(graph, b);
        if (comps.size() < prev_count) {
            events.push_back({b, comps});
            prev_count = comps.size();
        }
    }
    return events;
}

}  // namespace skelink
