#include <doctest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "fixtures.hpp"
#include "ggm/selection.hpp"
#include "ggm/simulation.hpp"
#include "oracles.hpp"

using namespace ggm;

namespace {

Dataset synthetic(const Eigen::MatrixXd& sigma, int n, std::uint64_t seed) {
    Dataset d;
    d.values = sample_mvn(sigma, n, seed);
    d.names.resize(std::size_t(sigma.rows()));
    for (int k = 0; k < sigma.rows(); ++k)
        d.names[std::size_t(k)] = "v" + std::to_string(k + 1);
    return d;
}

GraphClass undirected_class() { return {GraphKind::Undirected, std::nullopt}; }

GraphClass identity_dag_class(int p) {
    GraphClass cls{GraphKind::Directed, std::nullopt};
    cls.order = Ordering(std::size_t(p));
    for (int v = 1; v <= p; ++v) (*cls.order)[std::size_t(v - 1)] = v;
    return cls;
}

// Prior that pins every pair except those listed as uncertain: present = the
// known graph's edges, absent = everything else.
PriorKnowledge pin_except(const Graph& known,
                          const std::vector<std::pair<int, int>>& uncertain) {
    PriorKnowledge prior;
    prior.present = known.edges();
    for (auto [i, j] : all_pairs(known.p())) {
        bool open = false;
        for (auto [a, b] : uncertain) open = open || (a == i && b == j);
        if (!open && !known.adjacent(i, j)) prior.absent.push_back({i, j});
    }
    return prior;
}

}  // namespace

TEST_CASE("graph class validation") {
    GraphClass cls{GraphKind::Directed, std::nullopt};
    CHECK_THROWS_AS(cls.validate(3), ValidationError);
    cls.order = Ordering{1, 2, 2};
    CHECK_THROWS_AS(cls.validate(3), ValidationError);
    cls.order = Ordering{3, 1, 2};
    cls.validate(3);
    GraphClass und{GraphKind::Undirected, Ordering{1, 2, 3}};
    CHECK_THROWS_AS(und.validate(3), ValidationError);
}

TEST_CASE("hypothesis construction per class") {
    HypothesisSet h = build_hypotheses(undirected_class(), 4, {});
    CHECK(h.hypotheses.size() == 6);
    for (const auto& hyp : h.hypotheses) {
        CHECK(hyp.C.size() == 2);
        CHECK_FALSE(contains(hyp.C, hyp.i));
        CHECK_FALSE(contains(hyp.C, hyp.j));
    }

    h = build_hypotheses({GraphKind::Bidirected, std::nullopt}, 4, {});
    CHECK(h.hypotheses.size() == 6);
    for (const auto& hyp : h.hypotheses) CHECK(hyp.C.empty());

    h = build_hypotheses(identity_dag_class(4), 4, {});
    CHECK(h.hypotheses.size() == 6);
    for (const auto& hyp : h.hypotheses)
        if (hyp.i == 1 && hyp.j == 4) CHECK(hyp.C == VertexSet{2, 3});

    PriorKnowledge prior;
    prior.absent = {{1, 2}};
    prior.present = {{3, 4}};
    h = build_hypotheses(undirected_class(), 4, prior);
    CHECK(h.hypotheses.size() == 4);

    prior.present = {{1, 2}};
    CHECK_THROWS_AS(build_hypotheses(undirected_class(), 4, prior), ValidationError);
}

TEST_CASE("conditioning-set reduction on the seven-vertex fixture") {
    PriorKnowledge prior = pin_except(fixtures::sep7_known(), {{3, 6}});
    HypothesisSet hyps = build_hypotheses(undirected_class(), 7, prior);
    REQUIRE(hyps.hypotheses.size() == 1);
    CHECK(hyps.hypotheses[0].C.size() == 5);

    HypothesisSet reduced = reduce_conditioning(undirected_class(), hyps, prior,
                                                ReduceMode::MinimalSeparator);
    CHECK(reduced.hypotheses[0].C == VertexSet{4, 5});

    // a complete upper graph cannot shrink anything
    Graph complete(4, GraphKind::Undirected);
    for (auto [i, j] : all_pairs(4)) complete.add_edge(i, j);
    PriorKnowledge empty_prior;
    HypothesisSet full = build_hypotheses(undirected_class(), 4, empty_prior);
    HypothesisSet same = reduce_conditioning(undirected_class(), full, empty_prior,
                                             ReduceMode::MinimalSeparator);
    for (std::size_t k = 0; k < full.hypotheses.size(); ++k)
        CHECK(same.hypotheses[k].C == full.hypotheses[k].C);
}

TEST_CASE("conditioning-set reduction on the five-vertex DAG fixture") {
    GraphClass cls = identity_dag_class(5);
    PriorKnowledge prior = pin_except(fixtures::dag5_known(), {{1, 5}});
    HypothesisSet hyps = build_hypotheses(cls, 5, prior);
    REQUIRE(hyps.hypotheses.size() == 1);
    CHECK(hyps.hypotheses[0].C == VertexSet{2, 3, 4});

    HypothesisSet via_parents =
        reduce_conditioning(cls, hyps, prior, ReduceMode::Parents);
    CHECK(via_parents.hypotheses[0].C == VertexSet{3, 4});

    HypothesisSet minimal =
        reduce_conditioning(cls, hyps, prior, ReduceMode::MinimalSeparator);
    CHECK(minimal.hypotheses[0].C == VertexSet{2});

    CHECK_THROWS_AS(
        reduce_conditioning(undirected_class(), hyps, prior, ReduceMode::Parents),
        ValidationError);
}

TEST_CASE("bidirected reduction is the identity") {
    GraphClass cls{GraphKind::Bidirected, std::nullopt};
    HypothesisSet hyps = build_hypotheses(cls, 5, {});
    HypothesisSet same = reduce_conditioning(cls, hyps, {}, ReduceMode::MinimalSeparator);
    for (std::size_t k = 0; k < hyps.hypotheses.size(); ++k)
        CHECK(same.hypotheses[k].C.empty());
}

TEST_CASE("faithful graphs of reference covariances") {
    Eigen::MatrixXd sigma = fixtures::sigma3();
    Graph und = faithful_graph(sigma, undirected_class());
    CHECK(und.edge_count() == 3);

    Graph bid = faithful_graph(sigma, {GraphKind::Bidirected, std::nullopt});
    CHECK(bid.edges() == std::vector<std::pair<int, int>>{{1, 2}, {2, 3}});

    Graph none = faithful_graph(Eigen::MatrixXd::Identity(4, 4), undirected_class());
    CHECK(none.edge_count() == 0);

    Graph chain = faithful_graph(fixtures::chain4_sigma(), undirected_class());
    CHECK(chain == fixtures::chain4_undirected());
}

TEST_CASE("selection on independent data returns the empty graph") {
    Dataset d = synthetic(Eigen::MatrixXd::Identity(5, 5), 200, 424242);
    for (AdjustMethod method : {AdjustMethod::Holm, AdjustMethod::SidakStep}) {
        SelectionResult res = run_selection(d, undirected_class(), {}, method,
                                            {ErrorRateKind::FWER, 0.05}, {2000, 3});
        CHECK(res.graph.edge_count() == 0);
        CHECK(res.table.size() == 10);
        for (const auto& row : res.table) CHECK_FALSE(row.selected);
    }
}

TEST_CASE("selection recovers the chain fixture") {
    Dataset d = synthetic(fixtures::chain4_sigma(), 2000, 7);
    SelectionResult res = run_selection(d, undirected_class(), {}, AdjustMethod::Holm,
                                        {ErrorRateKind::FWER, 0.1}, {2000, 7});
    CHECK(res.graph == fixtures::chain4_undirected());
    for (const auto& row : res.table) {
        bool truth = fixtures::chain4_undirected().adjacent(row.i, row.j);
        CHECK(row.selected == truth);
    }
}

TEST_CASE("prior edges dominate the data") {
    Dataset d = synthetic(Eigen::MatrixXd::Identity(4, 4), 300, 99);
    PriorKnowledge prior;
    prior.present = {{1, 2}};
    prior.absent = {{3, 4}};
    SelectionResult res = run_selection(d, undirected_class(), prior, AdjustMethod::Holm,
                                        {ErrorRateKind::FWER, 0.05}, {2000, 1});
    CHECK(res.graph.has_edge(1, 2));
    CHECK_FALSE(res.graph.has_edge(3, 4));
    bool prior_row = false;
    for (const auto& row : res.table)
        prior_row = prior_row || (row.from_prior && row.i == 1 && row.j == 2 &&
                                  row.selected);
    CHECK(prior_row);
}

TEST_CASE("selected DAG edges follow the ordering") {
    ModelSpec spec;
    spec.p = 5;
    spec.cls = identity_dag_class(5);
    spec.edge_count = 5;
    spec.lo = 0.3;
    spec.hi = 0.5;
    spec.seed = 2;
    GeneratedModel model = generate_model(spec);

    GraphClass cls{GraphKind::Directed, Ordering{2, 4, 1, 5, 3}};
    Dataset d = synthetic(model.sigma, 800, 31);
    SelectionResult res = run_selection(d, cls, {}, AdjustMethod::SidakStep,
                                        {ErrorRateKind::FWER, 0.1}, {2000, 5});
    std::vector<int> rank(6, 0);
    for (int a = 0; a < 5; ++a) rank[std::size_t((*cls.order)[std::size_t(a)])] = a + 1;
    for (auto [i, j] : res.graph.edges()) CHECK(rank[std::size_t(i)] < rank[std::size_t(j)]);
}

TEST_CASE("rejections are nested in alpha") {
    Dataset d = synthetic(fixtures::chain4_sigma(), 120, 5);
    SelectionResult small = run_selection(d, undirected_class(), {}, AdjustMethod::Sidak,
                                          {ErrorRateKind::FWER, 0.01}, {2000, 1});
    SelectionResult big = run_selection(d, undirected_class(), {}, AdjustMethod::Sidak,
                                        {ErrorRateKind::FWER, 0.2}, {2000, 1});
    for (auto e : small.graph.edges()) CHECK(big.graph.adjacent(e.first, e.second));
}

TEST_CASE("augmented error rates enlarge the rejection set deterministically") {
    Dataset d = synthetic(fixtures::chain4_sigma(), 2000, 7);
    ErrorRateSpec fwer{ErrorRateKind::FWER, 0.1};
    ErrorRateSpec gfwer{ErrorRateKind::GFWER, 0.1, 2};
    ErrorRateSpec tppfp{ErrorRateKind::TPPFP, 0.1, 0, 0.4};
    SelectionResult base = run_selection(d, undirected_class(), {}, AdjustMethod::Holm,
                                         fwer, {2000, 7});
    SelectionResult aug = run_selection(d, undirected_class(), {}, AdjustMethod::Holm,
                                        gfwer, {2000, 7});
    SelectionResult tp = run_selection(d, undirected_class(), {}, AdjustMethod::Holm,
                                       tppfp, {2000, 7});
    CHECK(aug.graph.edge_count() == base.graph.edge_count() + 2);
    // lambda = 0.4, r0 = 3: add floor(0.4 * 3 / 0.6) = 2
    CHECK(tp.graph.edge_count() == base.graph.edge_count() + 2);
    for (auto e : base.graph.edges()) {
        CHECK(aug.graph.adjacent(e.first, e.second));
        CHECK(tp.graph.adjacent(e.first, e.second));
    }
}

TEST_CASE("fdr selection uses unadjusted p-values") {
    Dataset d = synthetic(fixtures::chain4_sigma(), 2000, 7);
    SelectionResult res = run_selection(d, undirected_class(), {}, AdjustMethod::Holm,
                                        {ErrorRateKind::FDR, 0.1}, {2000, 7});
    CHECK(res.graph.adjacent(1, 2));
    CHECK(res.graph.adjacent(2, 4));
    CHECK(res.graph.adjacent(3, 4));
}

TEST_CASE("report serialization") {
    Dataset d = synthetic(fixtures::chain4_sigma(), 2000, 7);
    PriorKnowledge prior;
    prior.present = {{1, 2}};
    SelectionResult res = run_selection(d, undirected_class(), prior, AdjustMethod::Holm,
                                        {ErrorRateKind::FWER, 0.1}, {2000, 7});
    nlohmann::json j = nlohmann::json::parse(res.to_json());
    CHECK(j["alpha"] == 0.1);
    CHECK(j["method"] == "holm");
    CHECK(j["error_rate"] == "fwer");
    CHECK(j["graph_kind"] == "undirected");
    CHECK(j["p"] == 4);
    CHECK(j["table"].size() == 6);  // 5 tested pairs + 1 prior row
    CHECK(j["edges"].size() == res.graph.edges().size());

    std::string dot = res.to_dot();
    CHECK(dot.find("graph selected {") != std::string::npos);
    CHECK(dot.find("1 -- 2") != std::string::npos);

    SelectionResult dag = run_selection(d, identity_dag_class(4), {},
                                        AdjustMethod::SidakStep,
                                        {ErrorRateKind::FWER, 0.1}, {2000, 7});
    CHECK(dag.to_dot().find("digraph selected {") != std::string::npos);
}

TEST_CASE("population equivalence of reduced and full conditioning sets") {
    std::mt19937 rng(314);
    int undirected_checked = 0, dag_checked = 0;

    for (int rep = 0; rep < 10; ++rep) {
        // undirected instance
        ModelSpec spec;
        spec.p = 6;
        spec.cls = undirected_class();
        spec.edge_count = 6;
        spec.lo = 0.25;
        spec.hi = 0.5;
        spec.seed = 1000 + std::uint64_t(rep);
        GeneratedModel model = generate_model(spec);
        Graph gup = model.faithful;
        for (auto [i, j] : all_pairs(6))
            if (!gup.adjacent(i, j) && rng() % 3 == 0) gup.add_edge(i, j);

        PriorKnowledge prior = pin_except(gup, {});
        prior.present.clear();
        // everything in gup is uncertain, the rest is known absent
        HypothesisSet hyps = build_hypotheses(undirected_class(), 6, prior);
        HypothesisSet reduced = reduce_conditioning(undirected_class(), hyps, prior,
                                                    ReduceMode::MinimalSeparator);
        for (std::size_t k = 0; k < hyps.hypotheses.size(); ++k) {
            const auto& full = hyps.hypotheses[k];
            const auto& red = reduced.hypotheses[k];
            CHECK(red.C.size() <= full.C.size());
            double r_full = partial_correlation(model.sigma, full.i, full.j, full.C);
            double r_red = partial_correlation(model.sigma, red.i, red.j, red.C);
            CHECK((std::abs(r_full) <= 1e-8) == (std::abs(r_red) <= 1e-8));
            ++undirected_checked;
        }

        // DAG instance
        ModelSpec dspec;
        dspec.p = 6;
        dspec.cls = identity_dag_class(6);
        dspec.edge_count = 7;
        dspec.lo = 0.25;
        dspec.hi = 0.5;
        dspec.seed = 2000 + std::uint64_t(rep);
        GeneratedModel dmodel = generate_model(dspec);
        Graph dup = dmodel.faithful;
        for (auto [i, j] : all_pairs(6))
            if (!dup.adjacent(i, j) && rng() % 3 == 0) dup.add_edge(i, j);

        PriorKnowledge dprior = pin_except(dup, {});
        dprior.present.clear();
        HypothesisSet dhyps = build_hypotheses(dspec.cls, 6, dprior);
        HypothesisSet dreduced = reduce_conditioning(dspec.cls, dhyps, dprior,
                                                     ReduceMode::MinimalSeparator);
        for (std::size_t k = 0; k < dhyps.hypotheses.size(); ++k) {
            const auto& full = dhyps.hypotheses[k];
            const auto& red = dreduced.hypotheses[k];
            CHECK(red.C.size() <= full.C.size());
            double r_full = partial_correlation(dmodel.sigma, full.i, full.j, full.C);
            double r_red = partial_correlation(dmodel.sigma, red.i, red.j, red.C);
            CHECK((std::abs(r_full) <= 1e-8) == (std::abs(r_red) <= 1e-8));
            ++dag_checked;
        }
    }
    CHECK(undirected_checked > 50);
    CHECK(dag_checked > 50);
}
