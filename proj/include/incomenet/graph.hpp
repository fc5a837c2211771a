#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "incomenet/ingest.hpp"
#include "incomenet/types.hpp"

namespace incomenet {

using NodeIndex = std::uint32_t;

struct NodeInfo {
    UserId id;
    std::optional<double> avg_income;
    std::optional<int> label;  // category 1..k; set iff avg_income categorizes
};

struct EdgeWeight {
    std::int64_t calls = 0;
    std::int64_t sms = 0;
    std::int64_t duration = 0;  // total seconds over aggregated voice events
};

struct Edge {
    NodeIndex to = 0;  // destination for out-edges, origin for in-edges
    EdgeWeight weight;
};

// Directed weighted communication graph. Nodes are sorted by id, making
// snapshots and every traversal order deterministic. Immutable after
// construction; all read paths are safe to share across threads.
class CommGraph {
  public:
    CommGraph(std::vector<NodeInfo> nodes, int categories);

    // One aggregated edge per ordered (origin, destination) pair.
    void add_edge(NodeIndex origin, NodeIndex dest, const EdgeWeight& w);
    void finalize();

    int categories() const { return categories_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    const std::vector<NodeInfo>& nodes() const { return nodes_; }
    const NodeInfo& node(NodeIndex i) const { return nodes_[i]; }
    std::optional<NodeIndex> find(const UserId& id) const;
    std::span<const Edge> out_edges(NodeIndex i) const { return out_[i]; }
    std::span<const Edge> in_edges(NodeIndex i) const { return in_[i]; }

    std::int64_t total_calls() const;
    std::int64_t total_sms() const;

  private:
    std::vector<NodeInfo> nodes_;
    std::unordered_map<UserId, NodeIndex> index_;
    std::vector<std::vector<Edge>> out_;
    std::vector<std::vector<Edge>> in_;
    std::size_t edge_count_ = 0;
    int categories_ = 2;
    bool finalized_ = false;
};

// Per-user outgoing-call counts into each labeled category; the sufficient
// statistic consumed by every classifier.
struct NeighborCounts {
    UserId user;
    std::vector<std::int64_t> counts;  // counts[i] = events toward category i+1

    std::int64_t total() const;
};

struct CountingOptions {
    bool use_sms = false;           // add SMS events to the counts
    bool bidirectional = false;     // also count events on incoming edges
    bool distinct_contacts = false; // count labeled contacts once, not per event
};

CommGraph build_graph(const JoinedDataset& data, const CategorySchema& schema);

// Events from `user` toward labeled neighbors outside `exclude`, split by
// the neighbor's category. Throws NotFoundError for an unknown user id.
NeighborCounts neighbor_counts(const CommGraph& g, NodeIndex user,
                               const std::unordered_set<NodeIndex>& exclude = {},
                               const CountingOptions& opts = {});
NeighborCounts neighbor_counts(const CommGraph& g, const UserId& user,
                               const std::unordered_set<UserId>& exclude = {},
                               const CountingOptions& opts = {});

// The inference set Q: users with at least one qualifying event toward a
// labeled node (voice-only by default; direction per opts). Sorted by node
// index, so iteration is deterministic. Labeled users are included — they
// are the validation population.
std::vector<NodeIndex> inference_set(const CommGraph& g, const CountingOptions& opts = {});

// Snapshot: nodes as id,avg_income,label and edges as
// origin,destination,calls,sms,duration. Labels in the node file are
// informational; loading recomputes them from avg_income and the schema.
void save_snapshot(const CommGraph& g, const std::string& nodes_path,
                   const std::string& edges_path);
CommGraph load_snapshot(const std::string& nodes_path, const std::string& edges_path,
                        const CategorySchema& schema);

}  // namespace incomenet
