#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ggm/errors.hpp"

namespace ggm {

enum class GraphKind { Undirected, Bidirected, Directed };

// Sorted set of vertex labels in 1..p, no duplicates.
using VertexSet = std::vector<int>;

// Permutation of 1..p listing the vertices in order.
using Ordering = std::vector<int>;

VertexSet make_vertex_set(std::vector<int> labels);
bool contains(const VertexSet& s, int v);
VertexSet set_union(const VertexSet& a, const VertexSet& b);
VertexSet set_minus(const VertexSet& a, const VertexSet& b);
bool disjoint(const VertexSet& a, const VertexSet& b);

/// Simple graph on vertices 1..p. Undirected and bidirected graphs store
/// symmetric adjacency; a directed graph stores i -> j only. At most one
/// edge per vertex pair, no self-loops.
class Graph {
public:
    Graph(int p, GraphKind kind);

    int p() const { return p_; }
    GraphKind kind() const { return kind_; }

    void add_edge(int i, int j);
    void remove_edge(int i, int j);
    // Directed graphs: true iff i -> j. Other kinds: symmetric.
    bool has_edge(int i, int j) const;
    // True iff some edge joins i and j, ignoring direction.
    bool adjacent(int i, int j) const;

    // Canonical edge list: (i, j) with i < j for undirected/bidirected,
    // (tail, head) for directed. Sorted.
    std::vector<std::pair<int, int>> edges() const;
    int edge_count() const;

    // Neighbors under adjacent(); sorted.
    VertexSet neighbors(int v) const;

    bool operator==(const Graph& other) const = default;

private:
    void check_vertex(int v) const;

    int p_;
    GraphKind kind_;
    std::vector<char> adj_;  // p*p row-major, adj_[(i-1)*p + (j-1)]
};

bool is_acyclic(const Graph& g);
bool is_well_numbering(const Graph& g, const Ordering& ord);

// Deterministic topological sort, lowest label first among the ready vertices.
Ordering topological_extension(const Graph& g);

// C blocks every path from A to B (undirected global Markov criterion).
bool separates_undirected(const Graph& g, const VertexSet& A, const VertexSet& B,
                          const VertexSet& C);

// No path from A to B has all of its nonendpoint vertices inside C
// (bidirected global Markov criterion).
bool separates_bidirected(const Graph& g, const VertexSet& A, const VertexSet& B,
                          const VertexSet& C);

// Every path between A and B is blocked relative to C: a noncollider in C, or
// a collider outside C with no descendant in C.
bool d_separates(const Graph& g, const VertexSet& A, const VertexSet& B,
                 const VertexSet& C);

VertexSet parents(const Graph& g, int j);
VertexSet children(const Graph& g, int j);

// Seeds plus all vertices with a directed path into a seed.
VertexSet ancestors(const Graph& g, const VertexSet& seeds);

// Keeps vertex labels; drops every edge with an endpoint outside keep.
Graph induced_subgraph(const Graph& g, const VertexSet& keep);

// Marry parents sharing a child, then drop directions.
Graph moralize(const Graph& g);

// Minimum-cardinality C within V \ {i,j} with separates_undirected(g,{i},{j},C);
// lexicographically smallest among minimum separators. Requires the edge i - j
// to be absent. Empty set when i and j are already disconnected.
VertexSet min_vertex_separator(const Graph& g, int i, int j);

// Minimum-cardinality C within allowed that d-separates i and j, via min vertex
// cut in the moral graph of the ancestral subgraph of {i,j}. Lexicographic
// tie-break. nullopt when no d-separator exists within allowed.
std::optional<VertexSet> min_d_separator(const Graph& g, int i, int j,
                                         const VertexSet& allowed);

// Edge-list text format: header "p=<int>", then one edge per line:
// "i -- j", "i <-> j" or "i -> j" depending on the graph kind.
Graph parse_edge_list(std::istream& in);
Graph parse_edge_list_string(const std::string& text);
std::string format_edge_list(const Graph& g);

}  // namespace ggm
