// Command-line front end: graph selection from CSV data, p-value adjustment,
// and the simulation harness.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ggm/simulation.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

ggm::ErrorRateSpec parse_error_spec(const std::string& text, double alpha) {
    ggm::ErrorRateSpec spec;
    spec.alpha = alpha;
    if (text == "fwer") {
        spec.kind = ggm::ErrorRateKind::FWER;
    } else if (text.rfind("gfwer:", 0) == 0) {
        spec.kind = ggm::ErrorRateKind::GFWER;
        spec.k = std::stoi(text.substr(6));
    } else if (text.rfind("tppfp:", 0) == 0) {
        spec.kind = ggm::ErrorRateKind::TPPFP;
        spec.lambda = std::stod(text.substr(6));
    } else if (text == "fdr") {
        spec.kind = ggm::ErrorRateKind::FDR;
    } else {
        throw ggm::ValidationError("bad --error value: " + text +
                                   " (expected fwer, gfwer:K, tppfp:L or fdr)");
    }
    spec.validate();
    return spec;
}

ggm::GraphKind parse_kind(const std::string& text) {
    if (text == "undirected") return ggm::GraphKind::Undirected;
    if (text == "bidirected") return ggm::GraphKind::Bidirected;
    if (text == "dag") return ggm::GraphKind::Directed;
    throw ggm::ValidationError("bad --graph value: " + text);
}

// --order as comma-separated variable names; must be a permutation of the
// CSV header.
ggm::Ordering parse_order(const std::string& text,
                          const std::vector<std::string>& names) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) tokens.push_back(tok);
    if (tokens.size() != names.size())
        throw ggm::ValidationError("--order must list every variable exactly once");
    ggm::Ordering ord;
    std::vector<char> used(names.size(), 0);
    for (const auto& t : tokens) {
        auto it = std::find(names.begin(), names.end(), t);
        if (it == names.end())
            throw ggm::ValidationError("--order names unknown variable '" + t + "'");
        std::size_t idx = std::size_t(it - names.begin());
        if (used[idx])
            throw ggm::ValidationError("--order repeats variable '" + t + "'");
        used[idx] = 1;
        ord.push_back(int(idx) + 1);
    }
    return ord;
}

std::vector<std::pair<int, int>> read_prior_file(const std::string& path,
                                                 ggm::GraphKind expected) {
    std::ifstream in(path);
    if (!in) throw ggm::ValidationError("cannot open prior file: " + path);
    ggm::Graph g = ggm::parse_edge_list(in);
    if (g.edge_count() > 0 && g.kind() != expected)
        throw ggm::ValidationError("prior file " + path +
                                   " uses the wrong edge kind for this graph class");
    return g.edges();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ggm::ValidationError("cannot write file: " + path);
    out << text;
}

struct SelectArgs {
    std::string input, graph = "undirected", order, method = "holm", error = "fwer";
    double alpha = 0.05;
    bool reduce = false;
    int mc_draws = 10000;
    std::uint64_t seed = 0;
    std::string out_report = "report.json", out_dot = "selected.dot";
    std::string prior_present, prior_absent;
};

int run_select(const SelectArgs& a) {
    ggm::Dataset data = ggm::read_csv_file(a.input);
    ggm::GraphClass cls;
    cls.kind = parse_kind(a.graph);
    if (cls.is_dag()) {
        if (a.order.empty())
            throw ggm::ValidationError("--graph dag requires --order");
        cls.order = parse_order(a.order, data.names);
    } else if (!a.order.empty()) {
        throw ggm::ValidationError("--order only applies to --graph dag");
    }
    if (!(a.alpha > 0.0 && a.alpha < 1.0))
        throw ggm::ValidationError("--alpha must be in (0,1)");

    ggm::PriorKnowledge prior;
    if (!a.prior_present.empty()) prior.present = read_prior_file(a.prior_present, cls.kind);
    if (!a.prior_absent.empty()) prior.absent = read_prior_file(a.prior_absent, cls.kind);

    ggm::SelectionResult result = ggm::run_selection(
        data, cls, prior, ggm::parse_method(a.method), parse_error_spec(a.error, a.alpha),
        {a.mc_draws, a.seed},
        a.reduce ? ggm::ReduceMode::MinimalSeparator : ggm::ReduceMode::None);
    write_file(a.out_report, result.to_json());
    write_file(a.out_dot, result.to_dot());
    return 0;
}

struct AdjustArgs {
    std::string input, method = "holm", output;
};

int run_adjust(const AdjustArgs& a) {
    std::ifstream in(a.input);
    if (!in) throw ggm::ValidationError("cannot open CSV file: " + a.input);
    std::vector<std::string> labels;
    ggm::PValueVector p;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ggm::ValidationError("row " + std::to_string(lineno) +
                                       ": expected 'label,p'");
        labels.push_back(line.substr(0, comma));
        double v;
        try {
            v = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw ggm::ValidationError("row " + std::to_string(lineno) +
                                       ": bad p-value");
        }
        if (!(v >= 0.0 && v <= 1.0))
            throw ggm::ValidationError("row " + std::to_string(lineno) +
                                       ": p-value outside [0,1]");
        p.push_back(v);
    }
    if (p.empty()) throw ggm::ValidationError("no p-value rows in " + a.input);

    ggm::AdjustedPValues adj;
    switch (ggm::parse_method(a.method)) {
        case ggm::AdjustMethod::Bonferroni: adj = ggm::bonferroni(p); break;
        case ggm::AdjustMethod::Holm: adj = ggm::holm(p); break;
        case ggm::AdjustMethod::Sidak: adj = ggm::sidak(p); break;
        case ggm::AdjustMethod::SidakStep: adj = ggm::sidak_step(p); break;
        default:
            throw ggm::ValidationError(
                "max-T adjustment needs test statistics, not raw p-values");
    }
    std::ostringstream out;
    out.precision(17);
    for (std::size_t r = 0; r < p.size(); ++r)
        out << labels[r] << "," << p[r] << "," << adj.values[r] << "\n";
    if (a.output.empty())
        std::cout << out.str();
    else
        write_file(a.output, out.str());
    return 0;
}

struct SimArgs {
    bool fig2 = false;
    int p = 7, edges = 9, reps = 2000, mc_draws = 2000;
    double lo = 0.2, hi = 0.55, alpha = 0.1;
    std::string error = "fwer", methods, sizes, output = "error_rates.csv";
    std::uint64_t seed = 0;
};

int run_simulate(const SimArgs& a) {
    ggm::HarnessConfig cfg;
    cfg.model.p = a.p;
    cfg.model.edge_count = a.edges;
    cfg.model.lo = a.lo;
    cfg.model.hi = a.hi;
    cfg.model.seed = a.seed;
    cfg.model.cls.kind = ggm::GraphKind::Undirected;
    cfg.replicates = a.reps;
    cfg.mc_draws = a.mc_draws;
    cfg.master_seed = a.seed;
    cfg.error_spec = parse_error_spec(a.error, a.alpha);
    if (a.sizes.empty()) {
        cfg.sample_sizes = {25, 50, 100, 200, 300, 500};
    } else {
        std::istringstream in(a.sizes);
        std::string tok;
        while (std::getline(in, tok, ',')) cfg.sample_sizes.push_back(std::stoi(tok));
    }
    if (a.methods.empty()) {
        cfg.methods = {ggm::AdjustMethod::Bonferroni, ggm::AdjustMethod::Holm,
                       ggm::AdjustMethod::Sidak,      ggm::AdjustMethod::SidakStep,
                       ggm::AdjustMethod::MaxT,       ggm::AdjustMethod::MaxTStep};
    } else {
        std::istringstream in(a.methods);
        std::string tok;
        while (std::getline(in, tok, ','))
            cfg.methods.push_back(ggm::parse_method(tok));
    }
    ggm::ErrorRateTable table = ggm::estimate_error_rates(cfg);
    std::ostringstream out;
    ggm::write_error_rate_csv(out, table);
    write_file(a.output, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian graphical model selection by multiple testing"};
    app.require_subcommand(1);

    SelectArgs sel;
    auto* select = app.add_subcommand("select", "Select a graph from CSV data");
    select->add_option("input", sel.input, "CSV data file")->required();
    select->add_option("--graph", sel.graph, "undirected|bidirected|dag");
    select->add_option("--order", sel.order, "comma-separated variable names (dag)");
    select->add_option("--method", sel.method,
                       "bonferroni|holm|sidak|sidak-step|maxt|maxt-step");
    select->add_option("--error", sel.error, "fwer|gfwer:K|tppfp:L|fdr");
    select->add_option("--alpha", sel.alpha, "significance level");
    select->add_flag("--reduce", sel.reduce, "shrink conditioning sets via the prior");
    select->add_option("--mc-draws", sel.mc_draws, "Monte-Carlo draws for max-T");
    select->add_option("--seed", sel.seed, "Monte-Carlo seed");
    select->add_option("--out-report", sel.out_report, "JSON report path");
    select->add_option("--out-dot", sel.out_dot, "DOT graph path");
    select->add_option("--prior-present", sel.prior_present, "edge-list file");
    select->add_option("--prior-absent", sel.prior_absent, "edge-list file");

    AdjustArgs adj;
    auto* adjust = app.add_subcommand("adjust", "Adjust a CSV of (label,p) rows");
    adjust->add_option("input", adj.input, "CSV of label,p rows")->required();
    adjust->add_option("--method", adj.method, "bonferroni|holm|sidak|sidak-step");
    adjust->add_option("--out", adj.output, "output CSV path (default stdout)");

    SimArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Empirical error-rate harness");
    simulate->add_flag("--fig2", sim.fig2, "p=7, 9 edges, magnitudes in [0.2,0.55]");
    simulate->add_option("--p", sim.p, "variable count");
    simulate->add_option("--edges", sim.edges, "nonzero partial correlations");
    simulate->add_option("--lo", sim.lo, "smallest magnitude");
    simulate->add_option("--hi", sim.hi, "largest magnitude");
    simulate->add_option("--alpha", sim.alpha, "significance level");
    simulate->add_option("--error", sim.error, "fwer|gfwer:K|tppfp:L|fdr");
    simulate->add_option("--reps", sim.reps, "replicates per sample size");
    simulate->add_option("--n", sim.sizes, "comma-separated sample sizes");
    simulate->add_option("--methods", sim.methods, "comma-separated method names");
    simulate->add_option("--mc-draws", sim.mc_draws, "Monte-Carlo draws for max-T");
    simulate->add_option("--seed", sim.seed, "master seed");
    simulate->add_option("--out", sim.output, "output CSV path");

    try {
        app.parse(argc, argv);
        if (select->parsed()) return run_select(sel);
        if (adjust->parsed()) return run_adjust(adj);
        return run_simulate(sim);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "ggmselect: error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ggm::ValidationError& e) {
        std::cerr << "ggmselect: error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "ggmselect: error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
