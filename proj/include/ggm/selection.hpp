#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ggm/graph.hpp"
#include "ggm/multiple_testing.hpp"
#include "ggm/stats.hpp"

namespace ggm {

/// Target graph class; DAG selection requires an a-priori well-numbering.
struct GraphClass {
    GraphKind kind = GraphKind::Undirected;
    std::optional<Ordering> order;  // required for Directed

    void validate(int p) const;
    bool is_dag() const { return kind == GraphKind::Directed; }
};

/// Edges known absent (E0) and present (E1); pairs are vertex labels,
/// canonicalized to i < j (for DAGs: low rank -> high rank).
struct PriorKnowledge {
    std::vector<std::pair<int, int>> absent;
    std::vector<std::pair<int, int>> present;
};

/// One testing problem per uncertain pair, in rank space for DAGs.
struct Hypothesis {
    int i = 0, j = 0;  // i < j
    VertexSet C;
};

struct HypothesisSet {
    GraphClass cls;
    int p = 0;
    std::vector<Hypothesis> hypotheses;
};

// C(i,j) = V\{i,j} (undirected), {} (bidirected) or {1..j}\{i,j} in ordering
// ranks (dag). One hypothesis per pair not fixed by the prior.
HypothesisSet build_hypotheses(const GraphClass& cls, int p, const PriorKnowledge& prior);

enum class ReduceMode { None, Parents, MinimalSeparator };

// Shrink each conditioning set using the upper graph implied by the prior:
// minimum vertex separator (undirected), minimum d-separator or parents of j
// (dag). Bidirected sets are already empty and pass through unchanged.
HypothesisSet reduce_conditioning(const GraphClass& cls, const HypothesisSet& hyps,
                                  const PriorKnowledge& prior, ReduceMode mode);

struct EdgeEvidence {
    int i = 0, j = 0;  // vertex labels (not ranks)
    VertexSet C;       // conditioning set, vertex labels
    double r = 0.0, z = 0.0;
    int n_C = 0;
    double p_unadjusted = 1.0, p_adjusted = 1.0;
    bool selected = false;
    bool from_prior = false;  // edge forced by E1
};

struct SelectionResult {
    Graph graph;
    double alpha = 0.0;
    AdjustMethod method = AdjustMethod::Holm;
    ErrorRateSpec error_spec;
    std::vector<EdgeEvidence> table;
    int mc_draws = 0;
    std::uint64_t mc_seed = 0;

    std::string to_json() const;
    std::string to_dot() const;
};

struct MonteCarlo {
    int draws = 10000;
    std::uint64_t seed = 0;
};

// Full pipeline: summarize -> hypotheses (-> reduction) -> statistics ->
// adjustment -> error-rate layer -> graph assembly.
SelectionResult run_selection(const Dataset& data, const GraphClass& cls,
                              const PriorKnowledge& prior, AdjustMethod method,
                              const ErrorRateSpec& spec, const MonteCarlo& mc,
                              ReduceMode reduce = ReduceMode::None);

// Ground-truth graph of a population covariance: edge (i,j) iff the class
// conditioning set gives |rho_{ij.C(i,j)}| above tol relative to the largest
// magnitude.
Graph faithful_graph(const Eigen::MatrixXd& sigma, const GraphClass& cls,
                     double tol = 1e-8);

// Internals shared with the simulation harness: everything downstream of
// summarize() for an empty prior, computing rejections for several methods on
// one set of statistics.
namespace detail {

struct CoreResult {
    CorrelationVector entries;           // one per hypothesis
    std::vector<double> p_unadjusted;    // aligned
    std::vector<AdjustedPValues> byMethod;
    std::vector<std::set<int>> rejections;  // after the error-rate layer
};

CoreResult select_core(const CovarianceSummary& cs, const GraphClass& cls,
                       const HypothesisSet& hyps,
                       const std::vector<AdjustMethod>& methods,
                       const ErrorRateSpec& spec, const MonteCarlo& mc);

}  // namespace detail

}  // namespace ggm
