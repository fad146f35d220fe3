#pragma once

// Shared fixtures: small reference graphs, the 3x3 covariance with a single
// marginal zero, and a covariance exactly pairwise faithful to the 4-vertex
// chain graph. The two larger reduction fixtures (seven-vertex undirected,
// five-vertex DAG) are reconstructions carrying the documented minimum
// separators ({4,5} and {5,7} for pair (3,6); parents {3,4} and separator {2}
// for pair (1,5)).

#include <Eigen/Dense>

#include "ggm/graph.hpp"

namespace fixtures {

using ggm::Graph;
using ggm::GraphKind;

// Chain 1 - 2 - 4 - 3 as an undirected graph on 4 vertices.
inline Graph chain4_undirected() {
    Graph g(4, GraphKind::Undirected);
    g.add_edge(1, 2);
    g.add_edge(2, 4);
    g.add_edge(3, 4);
    return g;
}

inline Graph chain4_bidirected() {
    Graph g(4, GraphKind::Bidirected);
    g.add_edge(1, 2);
    g.add_edge(2, 4);
    g.add_edge(3, 4);
    return g;
}

// DAG 1 -> 2, 2 -> 4, 3 -> 4.
inline Graph dag4() {
    Graph g(4, GraphKind::Directed);
    g.add_edge(1, 2);
    g.add_edge(2, 4);
    g.add_edge(3, 4);
    return g;
}

// Seven-vertex undirected graph; with the uncertain edge 3 - 6 removed, the
// minimum separators of (3,6) are {4,5} and {5,7}.
inline Graph sep7_known() {
    Graph g(7, GraphKind::Undirected);
    g.add_edge(1, 3);
    g.add_edge(2, 3);
    g.add_edge(3, 4);
    g.add_edge(3, 5);
    g.add_edge(4, 7);
    g.add_edge(5, 6);
    g.add_edge(6, 7);
    return g;
}

inline Graph sep7_upper() {
    Graph g = sep7_known();
    g.add_edge(3, 6);
    return g;
}

// Five-vertex DAG; with the uncertain edge 1 -> 5 removed, parents(5) = {3,4}
// and the minimum d-separator of (1,5) inside {2,3,4} is {2}.
inline Graph dag5_known() {
    Graph g(5, GraphKind::Directed);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    g.add_edge(2, 4);
    g.add_edge(3, 5);
    g.add_edge(4, 5);
    return g;
}

inline Graph dag5_upper() {
    Graph g = dag5_known();
    g.add_edge(1, 5);
    return g;
}

// sigma13 = 0, yet every saturated partial correlation is nonzero.
inline Eigen::MatrixXd sigma3() {
    Eigen::MatrixXd s(3, 3);
    s << 2, 1, 0, 1, 2, 1, 0, 1, 1;
    return s;
}

// Concentration matrix with unit diagonal and -0.45 on the chain4 edges;
// its inverse is exactly pairwise faithful to chain4_undirected, with
// saturated partial correlations 0.45 on edges and 0 elsewhere.
inline Eigen::MatrixXd chain4_concentration() {
    Eigen::MatrixXd k = Eigen::MatrixXd::Identity(4, 4);
    auto set = [&](int i, int j) { k(i - 1, j - 1) = k(j - 1, i - 1) = -0.45; };
    set(1, 2);
    set(2, 4);
    set(3, 4);
    return k;
}

inline Eigen::MatrixXd chain4_sigma() {
    Eigen::MatrixXd k = chain4_concentration();
    return k.inverse();
}

}  // namespace fixtures
