#include "ggm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "ggm/rng.hpp"

namespace ggm {

Eigen::MatrixXd sample_mvn(const Eigen::MatrixXd& cov, int count, std::uint64_t seed) {
    int p = int(cov.rows());
    if (count < 0) throw ValidationError("sample count must be nonnegative");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
    if (es.info() != Eigen::Success)
        throw NumericError("eigendecomposition of the sampling covariance failed");
    double top = es.eigenvalues().maxCoeff();
    if (es.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, top))
        throw NumericError("sampling covariance is not positive semidefinite");
    Eigen::MatrixXd factor =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    CounterRng rng(seed, /*stream=*/0x6d766e);
    Eigen::MatrixXd out(count, p);
    Eigen::VectorXd x(p);
    for (int r = 0; r < count; ++r) {
        for (int k = 0; k < p; ++k) x(k) = rng.normal(std::uint64_t(r) * p + k);
        out.row(r) = (factor * x).transpose();
    }
    return out;
}

void ModelSpec::validate() const {
    if (p < 2) throw ValidationError("model needs p >= 2");
    int max_edges = p * (p - 1) / 2;
    if (edge_count < 0 || edge_count > max_edges)
        throw ValidationError("edge count out of range");
    if (!(lo > 0.0 && lo <= hi && hi < 1.0))
        throw ValidationError("need 0 < lo <= hi < 1");
}

namespace {

// Random edge selection: Fisher-Yates prefix over the pair list.
std::vector<std::pair<int, int>> choose_edges(int p, int count, const CounterRng& rng,
                                              std::uint64_t& idx) {
    auto pairs = all_pairs(p);
    for (std::size_t a = 0; a + 1 < pairs.size() && int(a) < count; ++a) {
        std::size_t b = a + rng.uniform_int(idx++, pairs.size() - a);
        std::swap(pairs[a], pairs[b]);
    }
    pairs.resize(count);
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

struct EdgeValue {
    int i, j;
    double value;  // signed target magnitude
};

std::vector<EdgeValue> draw_values(const std::vector<std::pair<int, int>>& edges,
                                   double lo, double hi, const CounterRng& rng,
                                   std::uint64_t& idx) {
    std::vector<EdgeValue> out;
    for (auto [i, j] : edges) {
        double mag = lo + (hi - lo) * rng.uniform(idx++);
        double sign = rng.bits(idx++) & 1 ? 1.0 : -1.0;
        out.push_back({i, j, sign * mag});
    }
    return out;
}

// Unit-diagonal symmetric matrix from signed off-diagonal values, rescaled by a
// common factor to strict diagonal dominance. Returns the factor applied.
double dominant_matrix(int p, const std::vector<EdgeValue>& vals, Eigen::MatrixXd& m) {
    m = Eigen::MatrixXd::Identity(p, p);
    for (const auto& e : vals) {
        m(e.i - 1, e.j - 1) = e.value;
        m(e.j - 1, e.i - 1) = e.value;
    }
    double worst = 0.0;
    for (int i = 0; i < p; ++i)
        worst = std::max(worst, m.row(i).cwiseAbs().sum() - std::abs(m(i, i)));
    double factor = worst < 0.995 ? 1.0 : 0.995 / worst;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j) m(i, j) *= factor;
    return factor;
}

GeneratedModel generate_dag(const ModelSpec& spec, const CounterRng& rng,
                            std::uint64_t& idx) {
    int p = spec.p;
    auto edges = choose_edges(p, spec.edge_count, rng, idx);
    auto vals = draw_values(edges, spec.lo, spec.hi, rng, idx);

    // Regression construction: coefficients chosen so that the partial
    // correlation given {1..j}\{i,j} equals the target exactly; residual
    // variances are 1.
    Eigen::MatrixXd sigma(p, p);
    sigma(0, 0) = 1.0;
    Graph g(p, GraphKind::Directed);
    for (int j = 2; j <= p; ++j) {
        int q = j - 1;
        Eigen::MatrixXd prefix = sigma.topLeftCorner(q, q);
        Eigen::MatrixXd prec = prefix.llt().solve(Eigen::MatrixXd::Identity(q, q));
        Eigen::VectorXd coef = Eigen::VectorXd::Zero(q);
        for (const auto& e : vals) {
            if (e.j != j) continue;
            double cond_var = 1.0 / prec(e.i - 1, e.i - 1);
            double m = e.value;
            coef(e.i - 1) = m / std::sqrt((1.0 - m * m) * cond_var);
            g.add_edge(e.i, e.j);
        }
        Eigen::VectorXd cross = prefix * coef;
        sigma.block(0, q, q, 1) = cross;
        sigma.block(q, 0, 1, q) = cross.transpose();
        sigma(q, q) = coef.dot(cross) + 1.0;
    }
    return {sigma, g};
}

}  // namespace

GeneratedModel generate_model(const ModelSpec& spec) {
    spec.validate();
    GraphClass cls = spec.cls;
    if (cls.is_dag() && !cls.order) {
        cls.order = Ordering(spec.p);
        for (int v = 1; v <= spec.p; ++v) (*cls.order)[v - 1] = v;
    }
    cls.validate(spec.p);

    constexpr int kBudget = 10000;
    for (int attempt = 0; attempt < kBudget; ++attempt) {
        CounterRng rng(spec.seed, std::uint64_t(attempt) + 1);
        std::uint64_t idx = 0;

        if (cls.is_dag()) return generate_dag(spec, rng, idx);

        auto edges = choose_edges(spec.p, spec.edge_count, rng, idx);
        auto vals = draw_values(edges, spec.lo, spec.hi, rng, idx);
        Eigen::MatrixXd m;
        double factor = dominant_matrix(spec.p, vals, m);
        bool in_range = true;
        for (const auto& e : vals)
            in_range = in_range && std::abs(e.value) * factor >= 0.9 * spec.lo;
        if (!in_range) continue;

        Graph g(spec.p, cls.kind);
        for (auto [i, j] : edges) g.add_edge(i, j);
        if (cls.kind == GraphKind::Bidirected) return {m, g};
        // Undirected: m is the concentration matrix.
        Eigen::MatrixXd sigma = m.llt().solve(Eigen::MatrixXd::Identity(spec.p, spec.p));
        return {sigma, g};
    }
    throw NumericError("generate_model: retry budget exhausted");
}

void HarnessConfig::validate() const {
    model.validate();
    if (replicates < 1) throw ValidationError("need at least one replicate");
    if (sample_sizes.empty()) throw ValidationError("no sample sizes given");
    for (int n : sample_sizes)
        if (n < model.p + 1) throw ValidationError("each n must be >= p + 1");
    if (methods.empty()) throw ValidationError("no methods given");
    error_spec.validate();
    for (AdjustMethod m : methods)
        if ((m == AdjustMethod::MaxT || m == AdjustMethod::MaxTStep) && mc_draws < 1000)
            throw ValidationError("max-T needs at least 1000 draws");
}

ErrorRateTable estimate_error_rates(const HarnessConfig& cfg) {
    cfg.validate();
    GeneratedModel model = generate_model(cfg.model);

    GraphClass cls = cfg.model.cls;
    if (cls.is_dag() && !cls.order) {
        cls.order = Ordering(cfg.model.p);
        for (int v = 1; v <= cfg.model.p; ++v) (*cls.order)[v - 1] = v;
    }
    std::set<std::pair<int, int>> truth;
    for (auto [i, j] : model.faithful.edges()) truth.emplace(i, j);

    HypothesisSet hyps = build_hypotheses(cls, cfg.model.p, {});
    int n_methods = int(cfg.methods.size());

    ErrorRateTable table;
    for (int n : cfg.sample_sizes) {
        std::vector<long> events(n_methods, 0), recovered(n_methods, 0);
        std::vector<double> fdp_sum(n_methods, 0.0);
        long failures = 0;
        for (int rep = 0; rep < cfg.replicates; ++rep) {
            std::uint64_t rep_seed = splitmix64(
                splitmix64(cfg.master_seed) ^
                splitmix64((std::uint64_t(std::uint32_t(n)) << 32) | std::uint32_t(rep)));
            try {
                Dataset data;
                data.values = sample_mvn(model.sigma, n, rep_seed);
                data.names.resize(cfg.model.p);
                CovarianceSummary cs = summarize(data);
                auto core = detail::select_core(cs, cls, hyps, cfg.methods,
                                                cfg.error_spec,
                                                {cfg.mc_draws, splitmix64(rep_seed)});
                for (int m = 0; m < n_methods; ++m) {
                    const auto& rejected = core.rejections[m];
                    int false_edges = 0;
                    for (int h : rejected) {
                        auto& hyp = hyps.hypotheses[h];
                        if (!truth.count({hyp.i, hyp.j})) ++false_edges;
                    }
                    switch (cfg.error_spec.kind) {
                        case ErrorRateKind::FWER:
                            events[m] += false_edges >= 1;
                            break;
                        case ErrorRateKind::GFWER:
                            events[m] += false_edges >= cfg.error_spec.k + 1;
                            break;
                        case ErrorRateKind::TPPFP:
                            events[m] += !rejected.empty() &&
                                         double(false_edges) / double(rejected.size()) >
                                             cfg.error_spec.lambda;
                            break;
                        case ErrorRateKind::FDR:
                            if (!rejected.empty())
                                fdp_sum[m] +=
                                    double(false_edges) / double(rejected.size());
                            break;
                    }
                    bool exact = rejected.size() == truth.size();
                    if (exact)
                        for (int h : rejected)
                            exact = exact && truth.count({hyps.hypotheses[h].i,
                                                          hyps.hypotheses[h].j});
                    recovered[m] += exact;
                }
            } catch (const NumericError&) {
                ++failures;
            }
        }
        int done = cfg.replicates - int(failures);
        for (int m = 0; m < n_methods; ++m) {
            ErrorRateRow row;
            row.method = cfg.methods[m];
            row.n = n;
            row.replicates = done;
            row.failures = int(failures);
            row.rate = cfg.error_spec.kind == ErrorRateKind::FDR
                           ? fdp_sum[m] / std::max(done, 1)
                           : double(events[m]) / std::max(done, 1);
            row.stderr_ = std::sqrt(row.rate * (1.0 - row.rate) / std::max(done, 1));
            row.recovery = double(recovered[m]) / std::max(done, 1);
            table.rows.push_back(row);
        }
    }
    return table;
}

void write_error_rate_csv(std::ostream& out, const ErrorRateTable& table) {
    out << "method,n,rate,stderr,R\n";
    out.precision(17);
    for (const auto& row : table.rows)
        out << method_name(row.method) << "," << row.n << "," << row.rate << ","
            << row.stderr_ << "," << row.replicates << "\n";
}

}  // namespace ggm
