#include "ggm/graph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <queue>
#include <sstream>

namespace ggm {

VertexSet make_vertex_set(std::vector<int> labels) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

bool contains(const VertexSet& s, int v) {
    return std::binary_search(s.begin(), s.end(), v);
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

VertexSet set_minus(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool disjoint(const VertexSet& a, const VertexSet& b) {
    VertexSet inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(inter));
    return inter.empty();
}

Graph::Graph(int p, GraphKind kind) : p_(p), kind_(kind), adj_(std::size_t(p) * p, 0) {
    if (p < 1) throw ValidationError("graph needs at least one vertex");
}

void Graph::check_vertex(int v) const {
    if (v < 1 || v > p_)
        throw ValidationError("vertex " + std::to_string(v) + " out of range 1.." +
                              std::to_string(p_));
}

void Graph::add_edge(int i, int j) {
    check_vertex(i);
    check_vertex(j);
    if (i == j) throw ValidationError("self-loops are not allowed");
    adj_[std::size_t(i - 1) * p_ + (j - 1)] = 1;
    if (kind_ != GraphKind::Directed) adj_[std::size_t(j - 1) * p_ + (i - 1)] = 1;
}

void Graph::remove_edge(int i, int j) {
    check_vertex(i);
    check_vertex(j);
    adj_[std::size_t(i - 1) * p_ + (j - 1)] = 0;
    if (kind_ != GraphKind::Directed) adj_[std::size_t(j - 1) * p_ + (i - 1)] = 0;
}

bool Graph::has_edge(int i, int j) const {
    check_vertex(i);
    check_vertex(j);
    return adj_[std::size_t(i - 1) * p_ + (j - 1)] != 0;
}

bool Graph::adjacent(int i, int j) const {
    check_vertex(i);
    check_vertex(j);
    return adj_[std::size_t(i - 1) * p_ + (j - 1)] || adj_[std::size_t(j - 1) * p_ + (i - 1)];
}

std::vector<std::pair<int, int>> Graph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 1; i <= p_; ++i)
        for (int j = 1; j <= p_; ++j) {
            if (kind_ != GraphKind::Directed && j <= i) continue;
            if (adj_[std::size_t(i - 1) * p_ + (j - 1)]) out.emplace_back(i, j);
        }
    return out;
}

int Graph::edge_count() const { return int(edges().size()); }

VertexSet Graph::neighbors(int v) const {
    VertexSet out;
    for (int u = 1; u <= p_; ++u)
        if (u != v && adjacent(v, u)) out.push_back(u);
    return out;
}

bool is_acyclic(const Graph& g) {
    if (g.kind() != GraphKind::Directed)
        throw ValidationError("is_acyclic expects a directed graph");
    // Kahn's algorithm; leftover vertices mean a cycle.
    int p = g.p();
    std::vector<int> indeg(p + 1, 0);
    for (auto [i, j] : g.edges()) ++indeg[j];
    std::deque<int> ready;
    for (int v = 1; v <= p; ++v)
        if (indeg[v] == 0) ready.push_back(v);
    int seen = 0;
    while (!ready.empty()) {
        int v = ready.front();
        ready.pop_front();
        ++seen;
        for (int u = 1; u <= p; ++u)
            if (g.has_edge(v, u) && --indeg[u] == 0) ready.push_back(u);
    }
    return seen == p;
}

static void require_dag(const Graph& g) {
    if (g.kind() != GraphKind::Directed)
        throw ValidationError("operation expects a directed graph");
    if (!is_acyclic(g)) throw ValidationError("directed graph contains a cycle");
}

bool is_well_numbering(const Graph& g, const Ordering& ord) {
    require_dag(g);
    int p = g.p();
    if (int(ord.size()) != p) throw ValidationError("ordering has wrong length");
    std::vector<int> rank(p + 1, 0);
    for (int a = 0; a < p; ++a) {
        int v = ord[a];
        if (v < 1 || v > p || rank[v] != 0)
            throw ValidationError("ordering is not a permutation of 1..p");
        rank[v] = a + 1;
    }
    for (auto [i, j] : g.edges())
        if (rank[i] > rank[j]) return false;
    return true;
}

Ordering topological_extension(const Graph& g) {
    require_dag(g);
    int p = g.p();
    std::vector<int> indeg(p + 1, 0);
    for (auto [i, j] : g.edges()) ++indeg[j];
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int v = 1; v <= p; ++v)
        if (indeg[v] == 0) ready.push(v);
    Ordering ord;
    while (!ready.empty()) {
        int v = ready.top();
        ready.pop();
        ord.push_back(v);
        for (int u = 1; u <= p; ++u)
            if (g.has_edge(v, u) && --indeg[u] == 0) ready.push(u);
    }
    return ord;
}

static void check_abc(const Graph& g, const VertexSet& A, const VertexSet& B,
                      const VertexSet& C) {
    for (const VertexSet* s : {&A, &B, &C})
        for (int v : *s)
            if (v < 1 || v > g.p()) throw ValidationError("vertex out of range");
    if (!disjoint(A, B) || !disjoint(A, C) || !disjoint(B, C))
        throw ValidationError("A, B, C must be pairwise disjoint");
}

bool separates_undirected(const Graph& g, const VertexSet& A, const VertexSet& B,
                          const VertexSet& C) {
    if (g.kind() != GraphKind::Undirected)
        throw ValidationError("separates_undirected expects an undirected graph");
    check_abc(g, A, B, C);
    // BFS from A avoiding C; separated iff B is unreachable.
    std::vector<char> visited(g.p() + 1, 0), blocked(g.p() + 1, 0);
    for (int c : C) blocked[c] = 1;
    std::deque<int> queue(A.begin(), A.end());
    for (int a : A) visited[a] = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        if (contains(B, v)) return false;
        for (int u : g.neighbors(v))
            if (!visited[u] && !blocked[u]) {
                visited[u] = 1;
                queue.push_back(u);
            }
    }
    return true;
}

bool separates_bidirected(const Graph& g, const VertexSet& A, const VertexSet& B,
                          const VertexSet& C) {
    if (g.kind() != GraphKind::Bidirected)
        throw ValidationError("separates_bidirected expects a bidirected graph");
    check_abc(g, A, B, C);
    // A connecting path may only use vertices of C as interior points.
    std::vector<char> visited(g.p() + 1, 0);
    std::deque<int> queue(A.begin(), A.end());
    for (int a : A) visited[a] = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int u : g.neighbors(v)) {
            if (contains(B, u)) return false;
            if (contains(C, u) && !visited[u]) {
                visited[u] = 1;
                queue.push_back(u);
            }
        }
    }
    return true;
}

bool d_separates(const Graph& g, const VertexSet& A, const VertexSet& B,
                 const VertexSet& C) {
    require_dag(g);
    check_abc(g, A, B, C);
    int p = g.p();
    std::vector<char> in_c(p + 1, 0), in_anc(p + 1, 0);
    for (int c : C) in_c[c] = 1;
    for (int v : ancestors(g, C)) in_anc[v] = 1;

    // Reachability with collider bookkeeping. State (v, dir): dir 0 = entered
    // from a child (or a start vertex), dir 1 = entered from a parent.
    std::vector<char> visited(2 * std::size_t(p + 1), 0);
    std::deque<std::pair<int, int>> queue;
    for (int a : A) queue.emplace_back(a, 0);
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        if (visited[2 * std::size_t(v) + dir]) continue;
        visited[2 * std::size_t(v) + dir] = 1;
        if (!in_c[v] && contains(B, v)) return false;
        if (dir == 0) {
            if (!in_c[v]) {
                for (int u : parents(g, v)) queue.emplace_back(u, 0);
                for (int u : children(g, v)) queue.emplace_back(u, 1);
            }
        } else {
            if (!in_c[v])
                for (int u : children(g, v)) queue.emplace_back(u, 1);
            if (in_anc[v])  // active collider
                for (int u : parents(g, v)) queue.emplace_back(u, 0);
        }
    }
    return true;
}

VertexSet parents(const Graph& g, int j) {
    if (g.kind() != GraphKind::Directed)
        throw ValidationError("parents expects a directed graph");
    VertexSet out;
    for (int k = 1; k <= g.p(); ++k)
        if (g.has_edge(k, j)) out.push_back(k);
    return out;
}

VertexSet children(const Graph& g, int j) {
    if (g.kind() != GraphKind::Directed)
        throw ValidationError("children expects a directed graph");
    VertexSet out;
    for (int k = 1; k <= g.p(); ++k)
        if (g.has_edge(j, k)) out.push_back(k);
    return out;
}

VertexSet ancestors(const Graph& g, const VertexSet& seeds) {
    if (g.kind() != GraphKind::Directed)
        throw ValidationError("ancestors expects a directed graph");
    std::vector<char> seen(g.p() + 1, 0);
    std::deque<int> queue(seeds.begin(), seeds.end());
    for (int s : seeds) seen[s] = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int u : parents(g, v))
            if (!seen[u]) {
                seen[u] = 1;
                queue.push_back(u);
            }
    }
    VertexSet out;
    for (int v = 1; v <= g.p(); ++v)
        if (seen[v]) out.push_back(v);
    return out;
}

Graph induced_subgraph(const Graph& g, const VertexSet& keep) {
    Graph out(g.p(), g.kind());
    for (auto [i, j] : g.edges())
        if (contains(keep, i) && contains(keep, j)) out.add_edge(i, j);
    return out;
}

Graph moralize(const Graph& g) {
    require_dag(g);
    Graph out(g.p(), GraphKind::Undirected);
    for (auto [i, j] : g.edges()) out.add_edge(i, j);
    for (int c = 1; c <= g.p(); ++c) {
        VertexSet pa = parents(g, c);
        for (std::size_t a = 0; a < pa.size(); ++a)
            for (std::size_t b = a + 1; b < pa.size(); ++b)
                if (!out.has_edge(pa[a], pa[b])) out.add_edge(pa[a], pa[b]);
    }
    return out;
}

namespace {

// Unit-capacity vertex cut via node splitting and BFS augmentation.
// capacity[v] == 0 marks a deleted vertex, kInf an uncuttable one.
constexpr int kInf = 1 << 28;

struct FlowNet {
    struct Edge {
        int to, cap;
    };
    std::vector<Edge> edges;
    std::vector<std::vector<int>> out;

    explicit FlowNet(int n) : out(n) {}

    void add(int from, int to, int cap) {
        out[from].push_back(int(edges.size()));
        edges.push_back({to, cap});
        out[to].push_back(int(edges.size()));
        edges.push_back({from, 0});
    }

    int max_flow(int s, int t, int limit) {
        int total = 0;
        while (total < limit) {
            std::vector<int> pred(out.size(), -1);
            std::deque<int> queue{s};
            pred[s] = -2;
            while (!queue.empty() && pred[t] == -1) {
                int v = queue.front();
                queue.pop_front();
                for (int e : out[v])
                    if (edges[e].cap > 0 && pred[edges[e].to] == -1) {
                        pred[edges[e].to] = e;
                        queue.push_back(edges[e].to);
                    }
            }
            if (pred[t] == -1) break;
            int bottleneck = kInf;
            for (int v = t; v != s;) {
                int e = pred[v];
                bottleneck = std::min(bottleneck, edges[e].cap);
                v = edges[e ^ 1].to;
            }
            for (int v = t; v != s;) {
                int e = pred[v];
                edges[e].cap -= bottleneck;
                edges[e ^ 1].cap += bottleneck;
                v = edges[e ^ 1].to;
            }
            total += bottleneck;
        }
        return total;
    }
};

// Size of the smallest vertex cut between i and j in an undirected graph with
// per-vertex capacities; kInf when even uncuttable vertices must be removed.
int vertex_cut_size(const Graph& g, int i, int j, const std::vector<int>& capacity) {
    int p = g.p();
    auto vin = [&](int v) { return 2 * (v - 1); };
    auto vout = [&](int v) { return 2 * (v - 1) + 1; };
    FlowNet net(2 * p);
    for (int v = 1; v <= p; ++v) {
        int cap = (v == i || v == j) ? kInf : capacity[v];
        if (cap > 0) net.add(vin(v), vout(v), cap);
    }
    for (auto [u, v] : g.edges()) {
        net.add(vout(u), vin(v), kInf);
        net.add(vout(v), vin(u), kInf);
    }
    int flow = net.max_flow(vout(i), vin(j), kInf);
    return flow >= kInf ? kInf : flow;
}

// Lexicographically smallest minimum vertex cut: scan candidates in ascending
// order and keep a vertex whenever some minimum cut still contains it.
VertexSet lex_min_cut(const Graph& g, int i, int j, std::vector<int> capacity) {
    int k = vertex_cut_size(g, i, j, capacity);
    if (k >= kInf) throw NumericError("no vertex cut exists");
    VertexSet chosen;
    for (int v = 1; v <= g.p() && int(chosen.size()) < k; ++v) {
        if (v == i || v == j || capacity[v] != 1) continue;
        capacity[v] = 0;
        int rest = vertex_cut_size(g, i, j, capacity);
        if (rest != kInf && int(chosen.size()) + 1 + rest == k)
            chosen.push_back(v);
        else
            capacity[v] = 1;
    }
    return chosen;
}

}  // namespace

VertexSet min_vertex_separator(const Graph& g, int i, int j) {
    if (g.kind() != GraphKind::Undirected)
        throw ValidationError("min_vertex_separator expects an undirected graph");
    if (i == j) throw ValidationError("vertices must differ");
    if (g.has_edge(i, j))
        throw ValidationError("edge i - j must be removed before separating");
    std::vector<int> capacity(g.p() + 1, 1);
    return lex_min_cut(g, i, j, capacity);
}

std::optional<VertexSet> min_d_separator(const Graph& g, int i, int j,
                                         const VertexSet& allowed) {
    require_dag(g);
    if (i == j) throw ValidationError("vertices must differ");
    if (g.has_edge(i, j) || g.has_edge(j, i))
        throw ValidationError("edge between i and j must be removed before separating");
    if (contains(allowed, i) || contains(allowed, j))
        throw ValidationError("allowed set may not contain i or j");

    // Any minimal d-separator lies in the ancestors of {i, j}; within that set,
    // d-separation reduces to separation in the moral ancestral graph.
    VertexSet anc = ancestors(g, make_vertex_set({i, j}));
    Graph moral = moralize(induced_subgraph(g, anc));
    if (moral.has_edge(i, j)) return std::nullopt;

    std::vector<int> capacity(g.p() + 1, kInf);
    for (int v : allowed)
        if (contains(anc, v)) capacity[v] = 1;
    if (vertex_cut_size(moral, i, j, capacity) >= kInf) return std::nullopt;
    return lex_min_cut(moral, i, j, capacity);
}

Graph parse_edge_list(std::istream& in) {
    std::string line;
    int p = -1;
    std::optional<GraphKind> kind;
    std::vector<std::tuple<int, std::string, int>> pending;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream row(line);
        std::string first;
        if (!(row >> first)) continue;  // blank line
        if (first.rfind("p=", 0) == 0) {
            try {
                p = std::stoi(first.substr(2));
            } catch (const std::exception&) {
                throw ValidationError("bad vertex count header at line " +
                                      std::to_string(lineno));
            }
            continue;
        }
        int i = 0, j = 0;
        std::string op;
        std::istringstream edge(line);
        if (!(edge >> i >> op >> j))
            throw ValidationError("bad edge at line " + std::to_string(lineno));
        GraphKind k;
        if (op == "--")
            k = GraphKind::Undirected;
        else if (op == "<->")
            k = GraphKind::Bidirected;
        else if (op == "->")
            k = GraphKind::Directed;
        else
            throw ValidationError("unknown edge operator '" + op + "' at line " +
                                  std::to_string(lineno));
        if (kind && *kind != k)
            throw ValidationError("mixed edge kinds at line " + std::to_string(lineno));
        kind = k;
        pending.emplace_back(i, op, j);
    }
    if (p < 1) throw ValidationError("missing 'p=<int>' header");
    Graph g(p, kind.value_or(GraphKind::Undirected));
    for (auto& [i, op, j] : pending) g.add_edge(i, j);
    return g;
}

Graph parse_edge_list_string(const std::string& text) {
    std::istringstream in(text);
    return parse_edge_list(in);
}

std::string format_edge_list(const Graph& g) {
    const char* op = g.kind() == GraphKind::Undirected  ? "--"
                     : g.kind() == GraphKind::Bidirected ? "<->"
                                                         : "->";
    std::ostringstream out;
    out << "p=" << g.p() << "\n";
    for (auto [i, j] : g.edges()) out << i << " " << op << " " << j << "\n";
    return out.str();
}

}  // namespace ggm
