#pragma once

#include <cstdint>
#include <iosfwd>

#include "ggm/selection.hpp"

namespace ggm {

// count rows drawn from N(0, cov); cov is eigenvalue-clipped at zero and must
// not have substantially negative eigenvalues. Deterministic per (seed, row).
Eigen::MatrixXd sample_mvn(const Eigen::MatrixXd& cov, int count, std::uint64_t seed);

/// Ground-truth model recipe: a random graph of the requested class and size
/// whose nonzero (partial) correlations have magnitudes inside [lo, hi].
struct ModelSpec {
    int p = 7;
    GraphClass cls;
    int edge_count = 9;
    double lo = 0.2, hi = 0.55;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GeneratedModel {
    Eigen::MatrixXd sigma;
    Graph faithful;
};

// Construct (Sigma, G_faithful) for the spec: unit-diagonal concentration
// matrix scaled to diagonal dominance (undirected), the analogous direct
// construction on Sigma (bidirected), or triangular regression coefficients
// hitting the target partial correlations exactly (dag).
GeneratedModel generate_model(const ModelSpec& spec);

struct HarnessConfig {
    ModelSpec model;
    std::vector<int> sample_sizes;
    int replicates = 2000;
    std::vector<AdjustMethod> methods;
    ErrorRateSpec error_spec;
    int mc_draws = 2000;
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct ErrorRateRow {
    AdjustMethod method;
    int n = 0;
    double rate = 0.0;     // empirical error rate for the configured error kind
    double stderr_ = 0.0;  // sqrt(rate (1 - rate) / R)
    int replicates = 0;
    double recovery = 0.0;  // fraction of replicates with exact graph recovery
    int failures = 0;       // replicates aborted by numeric errors
};

struct ErrorRateTable {
    std::vector<ErrorRateRow> rows;
};

// Empirical error rates over replicated selection runs against the generated
// ground truth; bit-identical for a fixed master seed.
ErrorRateTable estimate_error_rates(const HarnessConfig& cfg);

// CSV: method,n,rate,stderr,R
void write_error_rate_csv(std::ostream& out, const ErrorRateTable& table);

}  // namespace ggm
