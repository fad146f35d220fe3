#include "ggm/selection.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace ggm {

void GraphClass::validate(int p) const {
    if (kind == GraphKind::Directed) {
        if (!order) throw ValidationError("DAG selection requires a well-numbering");
        if (int(order->size()) != p)
            throw ValidationError("ordering length does not match variable count");
        std::vector<char> seen(p + 1, 0);
        for (int v : *order) {
            if (v < 1 || v > p || seen[v])
                throw ValidationError("ordering is not a permutation of 1..p");
            seen[v] = 1;
        }
    } else if (order) {
        throw ValidationError("an ordering only applies to DAG selection");
    }
}

namespace {

// rank[label] in 1..p; identity for undirected/bidirected classes.
std::vector<int> rank_of_label(const GraphClass& cls, int p) {
    std::vector<int> rank(p + 1, 0);
    if (cls.is_dag())
        for (int a = 0; a < p; ++a) rank[(*cls.order)[a]] = a + 1;
    else
        for (int v = 1; v <= p; ++v) rank[v] = v;
    return rank;
}

int label_of_rank(const GraphClass& cls, int a) {
    return cls.is_dag() ? (*cls.order)[a - 1] : a;
}

// Prior edges as canonical rank pairs (i < j).
struct RankPrior {
    std::set<std::pair<int, int>> absent, present;
};

RankPrior to_rank_space(const GraphClass& cls, int p, const PriorKnowledge& prior) {
    auto rank = rank_of_label(cls, p);
    RankPrior out;
    auto convert = [&](const std::vector<std::pair<int, int>>& in, bool directed_check,
                       std::set<std::pair<int, int>>& dest) {
        for (auto [i, j] : in) {
            if (i < 1 || i > p || j < 1 || j > p || i == j)
                throw ValidationError("prior edge (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") is invalid");
            int a = rank[i], b = rank[j];
            if (directed_check && cls.is_dag() && a > b)
                throw ValidationError("prior-present edge " + std::to_string(i) + "->" +
                                      std::to_string(j) +
                                      " points against the well-numbering");
            dest.emplace(std::min(a, b), std::max(a, b));
        }
    };
    convert(prior.absent, false, out.absent);
    convert(prior.present, true, out.present);
    for (auto& e : out.present)
        if (out.absent.count(e))
            throw ValidationError("prior lists an edge as both present and absent");
    return out;
}

VertexSet full_conditioning(const GraphClass& cls, int p, int i, int j) {
    VertexSet C;
    switch (cls.kind) {
        case GraphKind::Undirected:
            for (int v = 1; v <= p; ++v)
                if (v != i && v != j) C.push_back(v);
            break;
        case GraphKind::Bidirected:
            break;
        case GraphKind::Directed:
            for (int v = 1; v < j; ++v)
                if (v != i) C.push_back(v);
            break;
    }
    return C;
}

// Upper graph in rank space: known-present plus uncertain edges.
Graph upper_graph(const GraphClass& cls, const HypothesisSet& hyps,
                  const RankPrior& prior) {
    Graph gup(hyps.p, cls.is_dag() ? GraphKind::Directed : GraphKind::Undirected);
    for (const auto& h : hyps.hypotheses) gup.add_edge(h.i, h.j);
    for (auto [i, j] : prior.present) gup.add_edge(i, j);
    return gup;
}

}  // namespace

HypothesisSet build_hypotheses(const GraphClass& cls, int p,
                               const PriorKnowledge& prior) {
    cls.validate(p);
    RankPrior rp = to_rank_space(cls, p, prior);
    HypothesisSet out{cls, p, {}};
    for (auto [i, j] : all_pairs(p)) {
        if (rp.absent.count({i, j}) || rp.present.count({i, j})) continue;
        out.hypotheses.push_back({i, j, full_conditioning(cls, p, i, j)});
    }
    return out;
}

HypothesisSet reduce_conditioning(const GraphClass& cls, const HypothesisSet& hyps,
                                  const PriorKnowledge& prior, ReduceMode mode) {
    if (mode == ReduceMode::None || cls.kind == GraphKind::Bidirected) return hyps;
    if (mode == ReduceMode::Parents && !cls.is_dag())
        throw ValidationError("parents reduction only applies to DAG selection");
    RankPrior rp = to_rank_space(cls, hyps.p, prior);
    Graph gup = upper_graph(cls, hyps, rp);
    HypothesisSet out = hyps;
    for (auto& h : out.hypotheses) {
        Graph cut = gup;
        cut.remove_edge(h.i, h.j);
        if (cls.kind == GraphKind::Undirected) {
            h.C = min_vertex_separator(cut, h.i, h.j);
        } else if (mode == ReduceMode::Parents) {
            h.C = parents(cut, h.j);
        } else {
            auto sep = min_d_separator(cut, h.i, h.j,
                                       full_conditioning(cls, hyps.p, h.i, h.j));
            if (!sep)
                throw NumericError("no admissible d-separator for pair (" +
                                   std::to_string(h.i) + "," + std::to_string(h.j) + ")");
            h.C = *sep;
        }
    }
    return out;
}

namespace detail {

CoreResult select_core(const CovarianceSummary& cs, const GraphClass& cls,
                       const HypothesisSet& hyps,
                       const std::vector<AdjustMethod>& methods,
                       const ErrorRateSpec& spec, const MonteCarlo& mc) {
    spec.validate();
    int p = hyps.p;
    CoreResult res;
    for (const auto& h : hyps.hypotheses) {
        CorrelationEntry e;
        e.i = h.i;
        e.j = h.j;
        e.C = h.C;
        e.r = partial_correlation(cs.S, h.i, h.j, h.C);
        e.z = fisher_z(e.r);
        e.n_C = effective_sample_size(cs.n, h.C);
        res.entries.push_back(e);
        res.p_unadjusted.push_back(z_pvalue(e.z, e.n_C));
    }

    // The max-T null covariance estimate, built lazily: closed form when every
    // conditioning set is saturated or empty, delta method otherwise.
    std::optional<AsymptoticCovariance> chat;
    auto null_cov = [&]() -> const AsymptoticCovariance& {
        if (chat) return *chat;
        bool all_empty = true, all_saturated = true;
        for (const auto& h : hyps.hypotheses) {
            all_empty = all_empty && h.C.empty();
            all_saturated =
                all_saturated && int(h.C.size()) == p - 2;
        }
        if (all_empty || all_saturated) {
            auto pairs = all_pairs(p);
            std::vector<double> rho;
            for (auto [i, j] : pairs)
                rho.push_back(all_empty
                                  ? correlation(cs.S, i, j)
                                  : partial_correlation(
                                        cs.S, i, j, full_conditioning(cls, p, i, j)));
            AsymptoticCovariance full = asym_cov_closed(
                rho, p, all_empty ? CorrelationMode::Marginal : CorrelationMode::Saturated);
            // restrict to the tested pairs
            int m = int(hyps.hypotheses.size());
            Eigen::MatrixXd sub(m, m);
            std::vector<int> pos;
            for (const auto& h : hyps.hypotheses) {
                int idx = (h.i - 1) * p - (h.i - 1) * h.i / 2 + (h.j - h.i - 1);
                pos.push_back(idx);
            }
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) sub(a, b) = full.omega(pos[a], pos[b]);
            chat = z_scale(AsymptoticCovariance{sub, full.provenance});
        } else {
            chat = z_scale(asym_cov_delta(cs.S, res.entries));
        }
        return *chat;
    };

    for (AdjustMethod method : methods) {
        AdjustedPValues adj;
        if (res.entries.empty()) {
            adj.method = method;
        } else {
            switch (method) {
                case AdjustMethod::Bonferroni: adj = bonferroni(res.p_unadjusted); break;
                case AdjustMethod::Holm: adj = holm(res.p_unadjusted); break;
                case AdjustMethod::Sidak: adj = sidak(res.p_unadjusted); break;
                case AdjustMethod::SidakStep: adj = sidak_step(res.p_unadjusted); break;
                case AdjustMethod::MaxT:
                    adj = maxt(res.entries, null_cov(), mc.draws, mc.seed);
                    break;
                case AdjustMethod::MaxTStep:
                    adj = maxt_step(res.entries, null_cov(), mc.draws, mc.seed);
                    break;
            }
        }
        std::set<int> rejected;
        if (!res.entries.empty()) {
            switch (spec.kind) {
                case ErrorRateKind::FWER:
                    rejected = reject_set(adj, spec.alpha);
                    break;
                case ErrorRateKind::GFWER:
                    rejected = augment_gfwer(reject_set(adj, spec.alpha), adj, spec.k);
                    break;
                case ErrorRateKind::TPPFP:
                    rejected =
                        augment_tppfp(reject_set(adj, spec.alpha), adj, spec.lambda);
                    break;
                case ErrorRateKind::FDR:
                    rejected = fdr_by(res.p_unadjusted, spec.alpha);
                    break;
            }
        }
        res.byMethod.push_back(std::move(adj));
        res.rejections.push_back(std::move(rejected));
    }
    return res;
}

}  // namespace detail

SelectionResult run_selection(const Dataset& data, const GraphClass& cls,
                              const PriorKnowledge& prior, AdjustMethod method,
                              const ErrorRateSpec& spec, const MonteCarlo& mc,
                              ReduceMode reduce) {
    int p = data.p();
    cls.validate(p);
    spec.validate();

    // Work in rank space: column a of the permuted data is the variable with
    // ordering rank a.
    Dataset ranked = data;
    if (cls.is_dag()) {
        for (int a = 0; a < p; ++a) {
            ranked.values.col(a) = data.values.col((*cls.order)[a] - 1);
            ranked.names[a] = data.names[(*cls.order)[a] - 1];
        }
    }

    CovarianceSummary cs = summarize(ranked);
    HypothesisSet hyps = build_hypotheses(cls, p, prior);
    hyps = reduce_conditioning(cls, hyps, prior, reduce);

    auto core = detail::select_core(cs, cls, hyps, {method}, spec, mc);
    const auto& rejected = core.rejections[0];

    SelectionResult out{Graph(p, cls.kind), spec.alpha, method, spec, {}, 0, 0};
    if (method == AdjustMethod::MaxT || method == AdjustMethod::MaxTStep) {
        out.mc_draws = mc.draws;
        out.mc_seed = mc.seed;
    }

    auto to_label = [&](int rank) { return label_of_rank(cls, rank); };
    for (int h = 0; h < int(hyps.hypotheses.size()); ++h) {
        const auto& e = core.entries[h];
        EdgeEvidence ev;
        ev.i = to_label(e.i);
        ev.j = to_label(e.j);
        for (int c : e.C) ev.C.push_back(to_label(c));
        std::sort(ev.C.begin(), ev.C.end());
        ev.r = e.r;
        ev.z = e.z;
        ev.n_C = e.n_C;
        ev.p_unadjusted = core.p_unadjusted[h];
        ev.p_adjusted = core.byMethod[0].values.empty() ? 1.0 : core.byMethod[0].values[h];
        ev.selected = rejected.count(h) > 0;
        if (ev.selected) out.graph.add_edge(to_label(e.i), to_label(e.j));
        out.table.push_back(std::move(ev));
    }
    for (auto [i, j] : prior.present) {
        out.graph.add_edge(i, j);
        EdgeEvidence ev;
        ev.i = i;
        ev.j = j;
        ev.selected = true;
        ev.from_prior = true;
        ev.p_adjusted = 0.0;
        ev.p_unadjusted = 0.0;
        out.table.push_back(ev);
    }
    return out;
}

Graph faithful_graph(const Eigen::MatrixXd& sigma, const GraphClass& cls, double tol) {
    int p = int(sigma.rows());
    cls.validate(p);
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");

    // Permute into rank space so the DAG conditioning sets are rank prefixes.
    auto rank = rank_of_label(cls, p);
    Eigen::MatrixXd s(p, p);
    for (int i = 1; i <= p; ++i)
        for (int j = 1; j <= p; ++j)
            s(rank[i] - 1, rank[j] - 1) = sigma(i - 1, j - 1);

    std::vector<double> mag;
    auto pairs = all_pairs(p);
    for (auto [i, j] : pairs)
        mag.push_back(std::abs(
            partial_correlation(s, i, j, full_conditioning(cls, p, i, j))));
    double top = *std::max_element(mag.begin(), mag.end());
    Graph g(p, cls.kind);
    if (top == 0.0) return g;
    for (std::size_t a = 0; a < pairs.size(); ++a)
        if (mag[a] > tol * top)
            g.add_edge(label_of_rank(cls, pairs[a].first),
                       label_of_rank(cls, pairs[a].second));
    return g;
}

std::string SelectionResult::to_json() const {
    nlohmann::ordered_json j;
    j["alpha"] = alpha;
    j["method"] = method_name(method);
    switch (error_spec.kind) {
        case ErrorRateKind::FWER: j["error_rate"] = "fwer"; break;
        case ErrorRateKind::GFWER:
            j["error_rate"] = "gfwer";
            j["k"] = error_spec.k;
            break;
        case ErrorRateKind::TPPFP:
            j["error_rate"] = "tppfp";
            j["lambda"] = error_spec.lambda;
            break;
        case ErrorRateKind::FDR: j["error_rate"] = "fdr"; break;
    }
    if (mc_draws > 0) {
        j["mc_draws"] = mc_draws;
        j["mc_seed"] = mc_seed;
    }
    j["p"] = graph.p();
    j["graph_kind"] = graph.kind() == GraphKind::Undirected  ? "undirected"
                      : graph.kind() == GraphKind::Bidirected ? "bidirected"
                                                              : "dag";
    j["edges"] = nlohmann::ordered_json::array();
    for (auto [a, b] : graph.edges()) j["edges"].push_back({a, b});
    j["table"] = nlohmann::ordered_json::array();
    for (const auto& ev : table) {
        nlohmann::ordered_json row;
        row["i"] = ev.i;
        row["j"] = ev.j;
        row["prior"] = ev.from_prior;
        if (!ev.from_prior) {
            row["C"] = ev.C;
            row["r"] = ev.r;
            row["z"] = ev.z;
            row["n_C"] = ev.n_C;
            row["p"] = ev.p_unadjusted;
            row["p_adjusted"] = ev.p_adjusted;
        }
        row["selected"] = ev.selected;
        j["table"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

std::string SelectionResult::to_dot() const {
    std::ostringstream out;
    bool directed = graph.kind() != GraphKind::Undirected;
    out << (directed ? "digraph" : "graph") << " selected {\n";
    if (graph.kind() == GraphKind::Bidirected) out << "  edge [dir=both];\n";
    for (int v = 1; v <= graph.p(); ++v) out << "  " << v << ";\n";
    for (auto [a, b] : graph.edges())
        out << "  " << a << (directed ? " -> " : " -- ") << b << ";\n";
    out << "}\n";
    return out.str();
}

}  // namespace ggm
