#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "ggm/graph.hpp"

namespace ggm {

/// n observations of p variables, one row per observation.
struct Dataset {
    Eigen::MatrixXd values;          // n x p
    std::vector<std::string> names;  // p labels

    int n() const { return int(values.rows()); }
    int p() const { return int(values.cols()); }
};

// CSV with a header row of variable names, numeric cells only.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const Dataset& d);

/// Sufficient statistics: sample mean and covariance (divisor n-1).
struct CovarianceSummary {
    int n = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd S;  // positive definite, checked at construction
};

CovarianceSummary summarize(const Dataset& d);

// sigma_ij / sqrt(sigma_ii sigma_jj); works on S or a population Sigma.
double correlation(const Eigen::MatrixXd& sigma, int i, int j);

// Partial correlation of i, j given C: invert the (C u {i,j}) submatrix K and
// return -K_ij / sqrt(K_ii K_jj). Vertices are 1-based. C = {} reduces to
// correlation().
double partial_correlation(const Eigen::MatrixXd& sigma, int i, int j,
                           const VertexSet& C);

double fisher_z(double r);

// n - |C|, the sample size available after conditioning.
int effective_sample_size(int n, const VertexSet& C);

// Two-sided p-value 2[1 - Phi(sqrt(n_eff - 3) |z|)].
double z_pvalue(double z, int n_eff);

// Two-sided p-value of sqrt(n_eff - 2) r / sqrt(1 - r^2) against t_{n_eff-2}.
double t_pvalue(double r, int n_eff);

double normal_cdf(double x);

// Pairs (i, j), 1 <= i < j <= p, in lexicographic order.
std::vector<std::pair<int, int>> all_pairs(int p);

// Entry of a correlation-vector: one tested pair with its conditioning set.
struct CorrelationEntry {
    int i = 0, j = 0;
    VertexSet C;
    double r = 0.0;  // (partial) correlation
    double z = 0.0;  // fisher_z(r)
    int n_C = 0;     // effective sample size
};

using CorrelationVector = std::vector<CorrelationEntry>;

enum class CovProvenance { ClosedForm, DeltaMethod };

/// Asymptotic covariance over the pair index set of a CorrelationVector.
struct AsymptoticCovariance {
    Eigen::MatrixXd omega;
    CovProvenance provenance = CovProvenance::ClosedForm;
};

// Isserlis matrix over pairs (i <= j): Iss_{ij,uv} = s_iu s_jv + s_iv s_ju.
Eigen::MatrixXd isserlis(const Eigen::MatrixXd& sigma);

enum class CorrelationMode { Marginal, Saturated };

// Closed-form asymptotic covariance of the full vector of ordinary (marginal)
// correlations; in saturated mode the same formulas apply to the saturated
// partial correlations. rho holds one value per pair of all_pairs(p).
AsymptoticCovariance asym_cov_closed(const std::vector<double>& rho, int p,
                                     CorrelationMode mode);

// Delta-method covariance J Iss(Sigma) J^t with a numerically differentiated
// Jacobian of vech(S) -> (r_{ij.C(i,j)}); supports arbitrary per-pair
// conditioning sets.
AsymptoticCovariance asym_cov_delta(const Eigen::MatrixXd& sigma,
                                    const CorrelationVector& entries);

// Corr(Omega): scale to unit diagonal.
AsymptoticCovariance z_scale(const AsymptoticCovariance& omega);

}  // namespace ggm
