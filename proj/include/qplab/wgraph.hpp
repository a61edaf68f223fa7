#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace qplab::wgraph {

/// Marker for a missing transition (an edge excluded from assignments).
inline constexpr double kAbsent = std::numeric_limits<double>::infinity();

enum class Provenance { Unset, User, Analytic, Numeric };

/// The l x l transition difficulty matrix V(K_i, K_j), diagonal zero.
struct ClassGraph {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> V;
    std::vector<std::vector<Provenance>> provenance;

    int size() const { return static_cast<int>(labels.size()); }
    void validate() const;  // throws on negative entries / nonzero diagonal

    std::string to_json() const;
    static ClassGraph from_json(const std::string& text);
};

/// An arrow assignment over L \ W, one outgoing arrow per node, acyclic.
struct WGraph {
    std::set<int> W;             // sink set (0-based node ids)
    std::map<int, int> arrows;   // node -> target for every node outside W

    bool valid(int l) const;     // checks both defining conditions
};

/// Calls fn for every W-graph over l nodes with sink set W. Brute force over
/// all (l-1)^(l-|W|) assignments with a cycle check; l > 10 is refused.
void for_each_wgraph(int l, const std::set<int>& W,
                     const std::function<void(const WGraph&)>& fn);

/// Materialized enumeration (small l).
std::vector<WGraph> enumerate_wgraphs(int l, const std::set<int>& W);

double graph_cost(const ClassGraph& g, const WGraph& w);

/// W(K_i): exact minimum of the total arrow cost over {i}-graphs.
double w_value(const ClassGraph& g, int i);

struct MinimizingSet {
    double nu = 0.0;
    std::set<int> L0;
};

/// nu = min_j W(K_j) and the argmin set L0 (where limiting invariant
/// measures concentrate).
MinimizingSet minimizing_set(const ClassGraph& g);

/// Hwang-Sheu time-scale exponent: nu minus the cheapest two-sink W-graph.
double lambda_value(const ClassGraph& g);

/// Predicted decay exponent of mu^eps(B(K_i, rho)): W(K_i) - nu.
double mass_exponent(const ClassGraph& g, int i);

}  // namespace qplab::wgraph
