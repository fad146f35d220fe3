#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ggm/stats.hpp"

namespace ggm {

enum class AdjustMethod { Bonferroni, Holm, Sidak, SidakStep, MaxT, MaxTStep };

std::string method_name(AdjustMethod m);
AdjustMethod parse_method(const std::string& name);

/// Adjusted p-values aligned with the hypothesis (pair) labels of the input.
struct AdjustedPValues {
    std::vector<double> values;
    AdjustMethod method = AdjustMethod::Bonferroni;
    // Monte-Carlo metadata, meaningful for the max-T methods only.
    int draws = 0;
    std::uint64_t seed = 0;
};

enum class ErrorRateKind { FWER, GFWER, TPPFP, FDR };

struct ErrorRateSpec {
    ErrorRateKind kind = ErrorRateKind::FWER;
    double alpha = 0.05;
    int k = 0;          // GFWER
    double lambda = 0;  // TPPFP

    void validate() const;
};

using PValueVector = std::vector<double>;

AdjustedPValues bonferroni(const PValueVector& p);
AdjustedPValues holm(const PValueVector& p);
AdjustedPValues sidak(const PValueVector& p);
AdjustedPValues sidak_step(const PValueVector& p);

// Single-step max-T (Monte-Carlo): adjusted p of hypothesis h is the fraction
// of null draws whose maximum |Z| coordinate reaches |z_h|. The null is
// N(0, N^{-1} Chat N^{-t}) with N = diag(sqrt(n_C - 3)) and Chat the z-scale
// (unit-diagonal) covariance estimate, eigenvalue-clipped at 1e-10.
// Deterministic given (draws, seed); draws shared with maxt_step.
AdjustedPValues maxt(const CorrelationVector& entries, const AsymptoticCovariance& chat,
                     int draws, std::uint64_t seed);

// Step-down max-T: order |z| descending; the a-th adjusted value uses the
// maximum over the a-th through last ordered coordinates, with enforced
// monotonicity along the ordering.
AdjustedPValues maxt_step(const CorrelationVector& entries,
                          const AsymptoticCovariance& chat, int draws,
                          std::uint64_t seed);

// Labels (indices into adj.values) with adjusted p <= alpha.
std::set<int> reject_set(const AdjustedPValues& adj, double alpha);

// k-GFWER augmentation: add the k most significant not-yet-rejected labels.
std::set<int> augment_gfwer(const std::set<int>& fwer_rejections,
                            const AdjustedPValues& adj, int k);

// lambda-TPPFP augmentation: add the floor(lambda r0 / (1 - lambda)) most
// significant remaining labels, r0 = |fwer_rejections|.
std::set<int> augment_tppfp(const std::set<int>& fwer_rejections,
                            const AdjustedPValues& adj, double lambda);

// Benjamini-Yekutieli step-up on unadjusted p-values.
std::set<int> fdr_by(const PValueVector& p, double alpha);

}  // namespace ggm
