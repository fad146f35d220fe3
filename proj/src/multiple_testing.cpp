#include "ggm/multiple_testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ggm/rng.hpp"

namespace ggm {

std::string method_name(AdjustMethod m) {
    switch (m) {
        case AdjustMethod::Bonferroni: return "bonferroni";
        case AdjustMethod::Holm: return "holm";
        case AdjustMethod::Sidak: return "sidak";
        case AdjustMethod::SidakStep: return "sidak-step";
        case AdjustMethod::MaxT: return "maxt";
        case AdjustMethod::MaxTStep: return "maxt-step";
    }
    return "?";
}

AdjustMethod parse_method(const std::string& name) {
    for (AdjustMethod m : {AdjustMethod::Bonferroni, AdjustMethod::Holm,
                           AdjustMethod::Sidak, AdjustMethod::SidakStep,
                           AdjustMethod::MaxT, AdjustMethod::MaxTStep})
        if (method_name(m) == name) return m;
    throw ValidationError("unknown adjustment method: " + name);
}

void ErrorRateSpec::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must be in (0,1)");
    if (kind == ErrorRateKind::GFWER && k < 0) throw ValidationError("k must be >= 0");
    if (kind == ErrorRateKind::TPPFP && !(lambda >= 0.0 && lambda < 1.0))
        throw ValidationError("lambda must be in [0,1)");
}

static void check_pvalues(const PValueVector& p) {
    if (p.empty()) throw ValidationError("empty p-value vector");
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("p-value outside [0,1]");
}

// Indices of p sorted ascending, ties broken by label.
static std::vector<int> ascending_order(const PValueVector& p) {
    std::vector<int> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return p[a] < p[b]; });
    return order;
}

AdjustedPValues bonferroni(const PValueVector& p) {
    check_pvalues(p);
    AdjustedPValues out{{}, AdjustMethod::Bonferroni};
    double m = double(p.size());
    for (double v : p) out.values.push_back(std::min(m * v, 1.0));
    return out;
}

AdjustedPValues holm(const PValueVector& p) {
    check_pvalues(p);
    auto order = ascending_order(p);
    int m = int(p.size());
    AdjustedPValues out{PValueVector(p.size()), AdjustMethod::Holm};
    double running = 0.0;
    for (int a = 0; a < m; ++a) {
        running = std::max(running, std::min(double(m - a) * p[order[a]], 1.0));
        out.values[order[a]] = running;
    }
    return out;
}

AdjustedPValues sidak(const PValueVector& p) {
    check_pvalues(p);
    AdjustedPValues out{{}, AdjustMethod::Sidak};
    double m = double(p.size());
    for (double v : p) out.values.push_back(1.0 - std::pow(1.0 - v, m));
    return out;
}

AdjustedPValues sidak_step(const PValueVector& p) {
    check_pvalues(p);
    auto order = ascending_order(p);
    int m = int(p.size());
    AdjustedPValues out{PValueVector(p.size()), AdjustMethod::SidakStep};
    double running = 0.0;
    for (int a = 0; a < m; ++a) {
        running = std::max(running, 1.0 - std::pow(1.0 - p[order[a]], double(m - a)));
        out.values[order[a]] = running;
    }
    return out;
}

namespace {

// Factor F of the max-T null covariance N^{-1} Chat N^{-t}: a draw is F x with
// x standard normal. Eigenvalues of Chat below 1e-10 are clipped up.
Eigen::MatrixXd null_factor(const CorrelationVector& entries,
                            const AsymptoticCovariance& chat) {
    int m = int(entries.size());
    if (chat.omega.rows() != m || chat.omega.cols() != m)
        throw ValidationError("covariance size does not match the hypothesis count");
    Eigen::MatrixXd sym = 0.5 * (chat.omega + chat.omega.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success)
        throw NumericError("eigendecomposition of the null covariance failed");
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-10);
    if (!ev.allFinite()) throw NumericError("non-repairable null covariance");
    Eigen::MatrixXd factor = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
    for (int h = 0; h < m; ++h) {
        if (entries[h].n_C < 4) throw ValidationError("effective sample size too small");
        factor.row(h) /= std::sqrt(double(entries[h].n_C - 3));
    }
    return factor;
}

struct MaxTNull {
    Eigen::MatrixXd factor;
    CounterRng rng;
    int m;

    MaxTNull(const CorrelationVector& entries, const AsymptoticCovariance& chat,
             std::uint64_t seed)
        : factor(null_factor(entries, chat)), rng(seed, /*stream=*/0x6d617874),
          m(int(entries.size())) {}

    // |Z| coordinates of draw b; indexing by (b, k) keeps draws independent of
    // evaluation order.
    Eigen::VectorXd abs_draw(int b) const {
        Eigen::VectorXd x(m);
        for (int k = 0; k < m; ++k) x(k) = rng.normal(std::uint64_t(b) * m + k);
        return (factor * x).cwiseAbs();
    }
};

// Descending |z| order, ties broken by label.
std::vector<int> descending_z_order(const CorrelationVector& entries) {
    std::vector<int> order(entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(entries[a].z) > std::abs(entries[b].z);
    });
    return order;
}

}  // namespace

AdjustedPValues maxt(const CorrelationVector& entries, const AsymptoticCovariance& chat,
                     int draws, std::uint64_t seed) {
    if (draws < 1000) throw ValidationError("max-T needs at least 1000 draws");
    MaxTNull null(entries, chat, seed);
    int m = null.m;
    std::vector<long> count(m, 0);
    for (int b = 0; b < draws; ++b) {
        double top = null.abs_draw(b).maxCoeff();
        for (int h = 0; h < m; ++h)
            if (top >= std::abs(entries[h].z)) ++count[h];
    }
    AdjustedPValues out{PValueVector(m), AdjustMethod::MaxT, draws, seed};
    for (int h = 0; h < m; ++h) {
        double unadj = z_pvalue(entries[h].z, entries[h].n_C);
        out.values[h] = std::clamp(double(count[h]) / draws, unadj, 1.0);
    }
    return out;
}

AdjustedPValues maxt_step(const CorrelationVector& entries,
                          const AsymptoticCovariance& chat, int draws,
                          std::uint64_t seed) {
    if (draws < 1000) throw ValidationError("max-T needs at least 1000 draws");
    MaxTNull null(entries, chat, seed);
    int m = null.m;
    auto order = descending_z_order(entries);
    std::vector<long> count(m, 0);
    for (int b = 0; b < draws; ++b) {
        Eigen::VectorXd abs_z = null.abs_draw(b);
        double tail_max = 0.0;
        for (int a = m - 1; a >= 0; --a) {
            tail_max = std::max(tail_max, abs_z(order[a]));
            if (tail_max >= std::abs(entries[order[a]].z)) ++count[a];
        }
    }
    AdjustedPValues out{PValueVector(m), AdjustMethod::MaxTStep, draws, seed};
    double running = 0.0;
    for (int a = 0; a < m; ++a) {
        int h = order[a];
        double unadj = z_pvalue(entries[h].z, entries[h].n_C);
        running = std::max(running, std::clamp(double(count[a]) / draws, unadj, 1.0));
        out.values[h] = running;
    }
    return out;
}

std::set<int> reject_set(const AdjustedPValues& adj, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must be in (0,1)");
    std::set<int> out;
    for (int h = 0; h < int(adj.values.size()); ++h)
        if (adj.values[h] <= alpha) out.insert(h);
    return out;
}

// The extra most-significant labels outside base; ties by label.
static std::vector<int> remaining_by_significance(const std::set<int>& base,
                                                  const AdjustedPValues& adj) {
    std::vector<int> rest;
    for (int h = 0; h < int(adj.values.size()); ++h)
        if (!base.count(h)) rest.push_back(h);
    std::stable_sort(rest.begin(), rest.end(),
                     [&](int a, int b) { return adj.values[a] < adj.values[b]; });
    return rest;
}

std::set<int> augment_gfwer(const std::set<int>& fwer_rejections,
                            const AdjustedPValues& adj, int k) {
    if (k < 0) throw ValidationError("k must be >= 0");
    std::set<int> out = fwer_rejections;
    auto rest = remaining_by_significance(fwer_rejections, adj);
    for (int a = 0; a < std::min<int>(k, int(rest.size())); ++a) out.insert(rest[a]);
    return out;
}

std::set<int> augment_tppfp(const std::set<int>& fwer_rejections,
                            const AdjustedPValues& adj, double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw ValidationError("lambda must be in [0,1)");
    double r0 = double(fwer_rejections.size());
    int extra = int(std::floor(lambda * r0 / (1.0 - lambda)));
    std::set<int> out = fwer_rejections;
    auto rest = remaining_by_significance(fwer_rejections, adj);
    for (int a = 0; a < std::min<int>(extra, int(rest.size())); ++a) out.insert(rest[a]);
    return out;
}

std::set<int> fdr_by(const PValueVector& p, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must be in (0,1)");
    if (p.empty()) return {};
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("p-value outside [0,1]");
    int m = int(p.size());
    double cm = 0.0;
    for (int i = 1; i <= m; ++i) cm += 1.0 / i;
    auto order = ascending_order(p);
    int cutoff = -1;  // last rank a (0-based) with p_(a) <= (a+1) alpha / (m cm)
    for (int a = 0; a < m; ++a)
        if (p[order[a]] <= double(a + 1) * alpha / (double(m) * cm)) cutoff = a;
    std::set<int> out;
    for (int a = 0; a <= cutoff; ++a) out.insert(order[a]);
    return out;
}

}  // namespace ggm
