#include "ggm/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ggm {

Dataset read_csv(std::istream& in) {
    Dataset d;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::istringstream header(line);
        std::string cell;
        while (std::getline(header, cell, ',')) d.names.push_back(cell);
    }
    if (d.names.empty()) throw ValidationError("CSV header has no columns");
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) {
            try {
                std::size_t pos = 0;
                double v = std::stod(cell, &pos);
                if (pos != cell.size()) throw std::invalid_argument(cell);
                vals.push_back(v);
            } catch (const std::exception&) {
                throw ValidationError("bad numeric cell at row " + std::to_string(lineno) +
                                      ", column " + std::to_string(vals.size() + 1));
            }
        }
        if (vals.size() != d.names.size())
            throw ValidationError("row " + std::to_string(lineno) + " has " +
                                  std::to_string(vals.size()) + " cells, expected " +
                                  std::to_string(d.names.size()));
        for (double v : vals)
            if (!std::isfinite(v))
                throw ValidationError("non-finite value at row " + std::to_string(lineno));
        rows.push_back(std::move(vals));
    }
    d.values.resize(long(rows.size()), long(d.names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) d.values(long(r), long(c)) = rows[r][c];
    return d;
}

Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open CSV file: " + path);
    return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& d) {
    for (int c = 0; c < d.p(); ++c) out << (c ? "," : "") << d.names[c];
    out << "\n";
    out.precision(17);
    for (int r = 0; r < d.n(); ++r) {
        for (int c = 0; c < d.p(); ++c) out << (c ? "," : "") << d.values(r, c);
        out << "\n";
    }
}

CovarianceSummary summarize(const Dataset& d) {
    int n = d.n(), p = d.p();
    if (n < p + 1)
        throw ValidationError("need n >= p + 1 observations (n=" + std::to_string(n) +
                              ", p=" + std::to_string(p) + ")");
    if (!d.values.allFinite()) throw ValidationError("dataset has non-finite entries");
    CovarianceSummary cs;
    cs.n = n;
    cs.mean = d.values.colwise().mean();
    Eigen::MatrixXd centered = d.values.rowwise() - cs.mean.transpose();
    cs.S = centered.transpose() * centered / double(n - 1);
    Eigen::LLT<Eigen::MatrixXd> llt(cs.S);
    if (llt.info() != Eigen::Success)
        throw NumericError("sample covariance matrix is not positive definite");
    return cs;
}

double correlation(const Eigen::MatrixXd& sigma, int i, int j) {
    int p = int(sigma.rows());
    if (i < 1 || i > p || j < 1 || j > p) throw ValidationError("vertex out of range");
    if (i == j) throw ValidationError("correlation needs i != j");
    double dii = sigma(i - 1, i - 1), djj = sigma(j - 1, j - 1);
    if (dii <= 0.0 || djj <= 0.0) throw NumericError("zero or negative diagonal entry");
    return sigma(i - 1, j - 1) / std::sqrt(dii * djj);
}

double partial_correlation(const Eigen::MatrixXd& sigma, int i, int j,
                           const VertexSet& C) {
    if (C.empty()) return correlation(sigma, i, j);
    if (contains(C, i) || contains(C, j))
        throw ValidationError("conditioning set may not contain i or j");
    VertexSet idx = set_union(C, make_vertex_set({i, j}));
    int m = int(idx.size());
    Eigen::MatrixXd sub(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) sub(a, b) = sigma(idx[a] - 1, idx[b] - 1);
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() != Eigen::Success)
        throw NumericError("conditioning submatrix is not positive definite");
    Eigen::MatrixXd K = llt.solve(Eigen::MatrixXd::Identity(m, m));
    int ai = int(std::lower_bound(idx.begin(), idx.end(), i) - idx.begin());
    int aj = int(std::lower_bound(idx.begin(), idx.end(), j) - idx.begin());
    return -K(ai, aj) / std::sqrt(K(ai, ai) * K(aj, aj));
}

double fisher_z(double r) {
    if (!(std::abs(r) < 1.0)) throw ValidationError("fisher_z needs |r| < 1");
    return 0.5 * std::log((1.0 + r) / (1.0 - r));
}

int effective_sample_size(int n, const VertexSet& C) {
    int n_C = n - int(C.size());
    if (n_C < 4)
        throw ValidationError("effective sample size " + std::to_string(n_C) +
                              " too small for z inference (need >= 4)");
    return n_C;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double z_pvalue(double z, int n_eff) {
    if (n_eff < 4) throw ValidationError("z_pvalue needs n_eff >= 4");
    return std::erfc(std::sqrt(double(n_eff - 3)) * std::abs(z) / std::sqrt(2.0));
}

double t_pvalue(double r, int n_eff) {
    if (!(std::abs(r) < 1.0)) throw ValidationError("t_pvalue needs |r| < 1");
    if (n_eff < 3) throw ValidationError("t_pvalue needs n_eff >= 3");
    double df = double(n_eff - 2);
    double t = std::sqrt(df) * r / std::sqrt(1.0 - r * r);
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

std::vector<std::pair<int, int>> all_pairs(int p) {
    std::vector<std::pair<int, int>> out;
    for (int i = 1; i <= p; ++i)
        for (int j = i + 1; j <= p; ++j) out.emplace_back(i, j);
    return out;
}

Eigen::MatrixXd isserlis(const Eigen::MatrixXd& sigma) {
    int p = int(sigma.rows());
    if (!sigma.isApprox(sigma.transpose(), 1e-12))
        throw ValidationError("isserlis needs a symmetric matrix");
    std::vector<std::pair<int, int>> pairs;  // i <= j
    for (int i = 1; i <= p; ++i)
        for (int j = i; j <= p; ++j) pairs.emplace_back(i, j);
    int m = int(pairs.size());
    Eigen::MatrixXd iss(m, m);
    for (int a = 0; a < m; ++a) {
        auto [i, j] = pairs[a];
        for (int b = 0; b < m; ++b) {
            auto [u, v] = pairs[b];
            iss(a, b) = sigma(i - 1, u - 1) * sigma(j - 1, v - 1) +
                        sigma(i - 1, v - 1) * sigma(j - 1, u - 1);
        }
    }
    return iss;
}

namespace {

// Symmetric lookup with unit diagonal over the pair-indexed rho vector.
struct RhoTable {
    const std::vector<double>& rho;
    int p;

    double operator()(int i, int j) const {
        if (i == j) return 1.0;
        if (i > j) std::swap(i, j);
        // index of (i, j) in all_pairs(p)
        int idx = (i - 1) * p - (i - 1) * i / 2 + (j - i - 1);
        return rho[std::size_t(idx)];
    }
};

}  // namespace

AsymptoticCovariance asym_cov_closed(const std::vector<double>& rho, int p,
                                     CorrelationMode mode) {
    auto pairs = all_pairs(p);
    if (rho.size() != pairs.size())
        throw ValidationError("asym_cov_closed needs one correlation per pair");
    // Saturated partial correlations are the negated normalized concentration
    // entries, and the inverse-covariance dual of the sampling problem makes
    // these formulas exact in those entries.  Negating every input (covariances
    // are invariant under negating all variables jointly) evaluates the
    // formulas at the concentration scale; the marginal mode uses rho as-is.
    std::vector<double> work = rho;
    if (mode == CorrelationMode::Saturated)
        for (double& v : work) v = -v;
    RhoTable t{work, p};
    int m = int(pairs.size());
    Eigen::MatrixXd omega(m, m);
    for (int a = 0; a < m; ++a) {
        auto [i, j] = pairs[a];
        for (int b = a; b < m; ++b) {
            auto [k, l] = pairs[b];
            double w;
            if (a == b) {
                double rij = t(i, j);
                w = (1.0 - rij * rij) * (1.0 - rij * rij);
            } else if (i == k || i == l || j == k || j == l) {
                // Pairs sharing vertex s, other endpoints x and y.
                int s = (i == k || i == l) ? i : j;
                int x = (s == i) ? j : i;
                int y = (s == k) ? l : k;
                double rsx = t(s, x), rsy = t(s, y), rxy = t(x, y);
                w = -0.5 * rsx * rsy * (1.0 - rsx * rsx - rsy * rsy - rxy * rxy) +
                    rxy * (1.0 - rsx * rsx - rsy * rsy);
            } else {
                double rij = t(i, j), rkl = t(k, l);
                double rik = t(i, k), ril = t(i, l), rjk = t(j, k), rjl = t(j, l);
                w = 0.5 * rij * rkl * (rik * rik + ril * ril + rjk * rjk + rjl * rjl) +
                    rik * rjl + ril * rjk - rik * rjk * rkl - rij * rik * ril -
                    rij * rjk * rjl - ril * rjl * rkl;
            }
            omega(a, b) = w;
            omega(b, a) = w;
        }
    }
    return {omega, CovProvenance::ClosedForm};
}

AsymptoticCovariance asym_cov_delta(const Eigen::MatrixXd& sigma,
                                    const CorrelationVector& entries) {
    int p = int(sigma.rows());
    std::vector<std::pair<int, int>> vech;  // i <= j
    for (int i = 1; i <= p; ++i)
        for (int j = i; j <= p; ++j) vech.emplace_back(i, j);
    int nv = int(vech.size());
    int m = int(entries.size());

    auto eval = [&](const Eigen::MatrixXd& s) {
        Eigen::VectorXd r(m);
        for (int a = 0; a < m; ++a)
            r(a) = partial_correlation(s, entries[a].i, entries[a].j, entries[a].C);
        return r;
    };

    // Central differences in the vech coordinates with symmetrized perturbations.
    double base = std::cbrt(std::numeric_limits<double>::epsilon());
    Eigen::MatrixXd jac(m, nv);
    for (int k = 0; k < nv; ++k) {
        auto [i, j] = vech[k];
        double h = base * std::max(1.0, std::abs(sigma(i - 1, j - 1)));
        Eigen::MatrixXd up = sigma, down = sigma;
        up(i - 1, j - 1) += h;
        down(i - 1, j - 1) -= h;
        if (i != j) {
            up(j - 1, i - 1) += h;
            down(j - 1, i - 1) -= h;
        }
        jac.col(k) = (eval(up) - eval(down)) / (2.0 * h);
    }
    if (!jac.allFinite()) throw NumericError("non-finite Jacobian in asym_cov_delta");
    Eigen::MatrixXd omega = jac * isserlis(sigma) * jac.transpose();
    omega = 0.5 * (omega + omega.transpose()).eval();
    return {omega, CovProvenance::DeltaMethod};
}

AsymptoticCovariance z_scale(const AsymptoticCovariance& omega) {
    int m = int(omega.omega.rows());
    Eigen::VectorXd d = omega.omega.diagonal();
    for (int a = 0; a < m; ++a)
        if (!(d(a) > 0.0)) throw NumericError("z_scale needs a positive diagonal");
    Eigen::VectorXd inv = d.cwiseSqrt().cwiseInverse();
    AsymptoticCovariance out{inv.asDiagonal() * omega.omega * inv.asDiagonal(),
                             omega.provenance};
    out.omega.diagonal().setOnes();
    return out;
}

}  // namespace ggm
