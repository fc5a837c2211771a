#include "incomenet/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "incomenet/csv.hpp"

namespace incomenet {

CommGraph::CommGraph(std::vector<NodeInfo> nodes, int categories)
    : nodes_(std::move(nodes)), categories_(categories) {
    std::sort(nodes_.begin(), nodes_.end(),
              [](const NodeInfo& a, const NodeInfo& b) { return a.id < b.id; });
    index_.reserve(nodes_.size());
    for (NodeIndex i = 0; i < nodes_.size(); ++i) {
        if (!index_.emplace(nodes_[i].id, i).second) {
            throw InvalidInputError("duplicate node id: " + nodes_[i].id);
        }
    }
    out_.resize(nodes_.size());
    in_.resize(nodes_.size());
}

void CommGraph::add_edge(NodeIndex origin, NodeIndex dest, const EdgeWeight& w) {
    if (origin == dest) throw InvalidInputError("self-loop edges are not allowed");
    if (w.calls <= 0 && w.sms <= 0) {
        throw InvalidInputError("an edge needs at least one call or sms");
    }
    out_[origin].push_back({dest, w});
    in_[dest].push_back({origin, w});
    ++edge_count_;
}

void CommGraph::finalize() {
    for (auto& adj : out_) {
        std::sort(adj.begin(), adj.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
    }
    for (auto& adj : in_) {
        std::sort(adj.begin(), adj.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
    }
    finalized_ = true;
}

std::optional<NodeIndex> CommGraph::find(const UserId& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::int64_t CommGraph::total_calls() const {
    std::int64_t sum = 0;
    for (const auto& adj : out_)
        for (const auto& e : adj) sum += e.weight.calls;
    return sum;
}

std::int64_t CommGraph::total_sms() const {
    std::int64_t sum = 0;
    for (const auto& adj : out_)
        for (const auto& e : adj) sum += e.weight.sms;
    return sum;
}

std::int64_t NeighborCounts::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

CommGraph build_graph(const JoinedDataset& data, const CategorySchema& schema) {
    std::unordered_map<UserId, const BankClient*> by_phone;
    by_phone.reserve(data.clients.size());
    for (const auto& c : data.clients) by_phone.emplace(c.phone, &c);

    std::unordered_set<UserId> ids;
    ids.reserve(data.records.size() * 2);
    for (const auto& r : data.records) {
        ids.insert(r.origin);
        ids.insert(r.destination);
    }

    std::vector<NodeInfo> nodes;
    nodes.reserve(ids.size());
    for (const auto& id : ids) {
        NodeInfo info;
        info.id = id;
        const auto it = by_phone.find(id);
        if (it != by_phone.end()) {
            info.avg_income = it->second->avg_income;
            info.label = categorize(it->second->avg_income, schema);
        }
        nodes.push_back(std::move(info));
    }

    CommGraph g(std::move(nodes), schema.size());

    std::unordered_map<std::uint64_t, EdgeWeight> agg;
    agg.reserve(data.records.size());
    for (const auto& r : data.records) {
        const NodeIndex o = *g.find(r.origin);
        const NodeIndex d = *g.find(r.destination);
        auto& w = agg[(static_cast<std::uint64_t>(o) << 32) | d];
        if (r.kind == CdrKind::voice) {
            ++w.calls;
            w.duration += r.duration;
        } else {
            ++w.sms;
        }
    }
    for (const auto& [key, w] : agg) {
        g.add_edge(static_cast<NodeIndex>(key >> 32), static_cast<NodeIndex>(key & 0xffffffffu),
                   w);
    }
    g.finalize();
    return g;
}

namespace {

std::int64_t edge_events(const EdgeWeight& w, const CountingOptions& opts) {
    std::int64_t events = w.calls;
    if (opts.use_sms) events += w.sms;
    if (opts.distinct_contacts) return events > 0 ? 1 : 0;
    return events;
}

}  // namespace

NeighborCounts neighbor_counts(const CommGraph& g, NodeIndex user,
                               const std::unordered_set<NodeIndex>& exclude,
                               const CountingOptions& opts) {
    if (user >= g.node_count()) throw NotFoundError("unknown node index");
    NeighborCounts out;
    out.user = g.node(user).id;
    out.counts.assign(static_cast<std::size_t>(g.categories()), 0);

    auto accumulate = [&](std::span<const Edge> edges) {
        for (const auto& e : edges) {
            const auto& label = g.node(e.to).label;
            if (!label) continue;
            if (exclude.count(e.to) != 0) continue;
            out.counts[static_cast<std::size_t>(*label - 1)] += edge_events(e.weight, opts);
        }
    };
    accumulate(g.out_edges(user));
    if (opts.bidirectional) accumulate(g.in_edges(user));
    return out;
}

NeighborCounts neighbor_counts(const CommGraph& g, const UserId& user,
                               const std::unordered_set<UserId>& exclude,
                               const CountingOptions& opts) {
    const auto idx = g.find(user);
    if (!idx) throw NotFoundError("unknown user id: " + user);
    std::unordered_set<NodeIndex> mask;
    mask.reserve(exclude.size());
    for (const auto& id : exclude) {
        if (auto i = g.find(id)) mask.insert(*i);
    }
    return neighbor_counts(g, *idx, mask, opts);
}

std::vector<NodeIndex> inference_set(const CommGraph& g, const CountingOptions& opts) {
    std::vector<NodeIndex> q;
    for (NodeIndex u = 0; u < g.node_count(); ++u) {
        bool qualifies = false;
        auto scan = [&](std::span<const Edge> edges) {
            for (const auto& e : edges) {
                if (!g.node(e.to).label) continue;
                if (edge_events(e.weight, CountingOptions{opts.use_sms, false, false}) > 0) {
                    qualifies = true;
                    return;
                }
            }
        };
        scan(g.out_edges(u));
        if (!qualifies && opts.bidirectional) scan(g.in_edges(u));
        if (qualifies) q.push_back(u);
    }
    return q;
}

void save_snapshot(const CommGraph& g, const std::string& nodes_path,
                   const std::string& edges_path) {
    std::ofstream nf(nodes_path, std::ios::binary);
    if (!nf) throw FormatError("cannot open for writing: " + nodes_path);
    nf << "id,avg_income,label\n";
    for (NodeIndex i = 0; i < g.node_count(); ++i) {
        const auto& n = g.node(i);
        nf << n.id << ',';
        if (n.avg_income) nf << csv::format_double(*n.avg_income);
        nf << ',';
        if (n.label) nf << *n.label;
        nf << '\n';
    }

    std::ofstream ef(edges_path, std::ios::binary);
    if (!ef) throw FormatError("cannot open for writing: " + edges_path);
    ef << "origin,destination,calls,sms,duration\n";
    for (NodeIndex i = 0; i < g.node_count(); ++i) {
        for (const auto& e : g.out_edges(i)) {
            ef << g.node(i).id << ',' << g.node(e.to).id << ',' << e.weight.calls << ','
               << e.weight.sms << ',' << e.weight.duration << '\n';
        }
    }
}

CommGraph load_snapshot(const std::string& nodes_path, const std::string& edges_path,
                        const CategorySchema& schema) {
    std::ifstream nf(nodes_path, std::ios::binary);
    if (!nf) throw FormatError("cannot open node file: " + nodes_path);
    std::string line;
    if (!std::getline(nf, line) || csv::split(line) != csv::split("id,avg_income,label")) {
        throw FormatError("bad node file header in " + nodes_path);
    }
    std::vector<NodeInfo> nodes;
    while (std::getline(nf, line)) {
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 3 || f[0].empty()) {
            throw FormatError("bad node row in " + nodes_path + ": " + line);
        }
        NodeInfo info;
        info.id = UserId(f[0]);
        if (!f[1].empty()) {
            double income = 0.0;
            if (!csv::parse_double(f[1], income)) {
                throw FormatError("bad avg_income in " + nodes_path + ": " + line);
            }
            info.avg_income = income;
            info.label = categorize(income, schema);
        }
        nodes.push_back(std::move(info));
    }

    CommGraph g(std::move(nodes), schema.size());

    std::ifstream ef(edges_path, std::ios::binary);
    if (!ef) throw FormatError("cannot open edge file: " + edges_path);
    if (!std::getline(ef, line) ||
        csv::split(line) != csv::split("origin,destination,calls,sms,duration")) {
        throw FormatError("bad edge file header in " + edges_path);
    }
    while (std::getline(ef, line)) {
        if (line.empty()) continue;
        const auto f = csv::split(line);
        EdgeWeight w;
        if (f.size() != 5 || !csv::parse_int64(f[2], w.calls) || !csv::parse_int64(f[3], w.sms) ||
            !csv::parse_int64(f[4], w.duration)) {
            throw FormatError("bad edge row in " + edges_path + ": " + line);
        }
        const auto o = g.find(UserId(f[0]));
        const auto d = g.find(UserId(f[1]));
        if (!o || !d) throw FormatError("edge references unknown node: " + line);
        g.add_edge(*o, *d, w);
    }
    g.finalize();
    return g;
}

}  // namespace incomenet
