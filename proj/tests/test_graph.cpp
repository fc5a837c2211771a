#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "incomenet/graph.hpp"
#include "incomenet/rng.hpp"
#include "oracles.hpp"

using namespace incomenet;

namespace {

CdrRecord voice(const std::string& o, const std::string& d) {
    CdrRecord r;
    r.origin = o;
    r.destination = d;
    r.kind = CdrKind::voice;
    r.duration = 60;
    r.timestamp = 1000;
    return r;
}

CdrRecord sms(const std::string& o, const std::string& d) {
    CdrRecord r = voice(o, d);
    r.kind = CdrKind::sms;
    r.duration = 0;
    return r;
}

BankClient client(const std::string& phone, double income) {
    BankClient c;
    c.phone = phone;
    c.monthly_incomes.fill(income);
    c.avg_income = income;
    return c;
}

JoinedDataset dataset(std::vector<CdrRecord> records, std::vector<BankClient> clients) {
    JoinedDataset d;
    d.records = std::move(records);
    for (auto& c : clients) {
        d.matched_ids.insert(c.phone);
        d.clients.push_back(std::move(c));
    }
    return d;
}

}  // namespace

TEST_CASE("build_graph aggregates events per ordered pair") {
    auto g = build_graph(dataset({voice("a", "b"), voice("a", "b"), voice("a", "b"),
                                  voice("b", "a"), sms("a", "c"), sms("a", "c")},
                                 {client("b", 500.0)}),
                         CategorySchema::binary());
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 3);

    const auto a = *g.find("a");
    const auto b = *g.find("b");
    REQUIRE(g.out_edges(a).size() == 2);
    for (const auto& e : g.out_edges(a)) {
        if (e.to == b) {
            CHECK(e.weight.calls == 3);
            CHECK(e.weight.sms == 0);
            CHECK(e.weight.duration == 180);
        } else {
            CHECK(e.weight.calls == 0);
            CHECK(e.weight.sms == 2);
        }
    }
    REQUIRE(g.out_edges(b).size() == 1);
    CHECK(g.out_edges(b)[0].weight.calls == 1);

    CHECK(g.node(b).label == 2);  // labeled node with income 500 under the binary schema
    CHECK_FALSE(g.node(a).label.has_value());
}

TEST_CASE("event conservation between records and edges") {
    auto eng = rng::make_engine(47, 0);
    std::vector<CdrRecord> records;
    std::int64_t calls = 0, texts = 0;
    for (int i = 0; i < 500; ++i) {
        const auto a = rng::uniform_below(eng, 20);
        auto b = rng::uniform_below(eng, 20);
        if (a == b) b = (b + 1) % 20;
        const auto o = "u" + std::to_string(a);
        const auto d = "u" + std::to_string(b);
        if (rng::uniform01(eng) < 0.3) {
            records.push_back(sms(o, d));
            ++texts;
        } else {
            records.push_back(voice(o, d));
            ++calls;
        }
    }
    const auto g = build_graph(dataset(std::move(records), {}), CategorySchema::binary());
    CHECK(g.total_calls() == calls);
    CHECK(g.total_sms() == texts);
}

TEST_CASE("neighbor_counts splits events by destination category") {
    // 4 calls to an H1 node, 2 calls to an H2 node.
    std::vector<CdrRecord> records;
    for (int i = 0; i < 4; ++i) records.push_back(voice("q", "low"));
    for (int i = 0; i < 2; ++i) records.push_back(voice("q", "high"));
    const auto g = build_graph(
        dataset(std::move(records), {client("low", 100.0), client("high", 900.0)}),
        CategorySchema::binary());

    const auto counts = neighbor_counts(g, UserId("q"));
    CHECK(counts.counts == std::vector<std::int64_t>{4, 2});
    CHECK(counts.total() == 6);
}

TEST_CASE("neighbor_counts with only unlabeled neighbors is zero") {
    const auto g = build_graph(dataset({voice("q", "x"), voice("q", "y")}, {}),
                               CategorySchema::binary());
    const auto counts = neighbor_counts(g, UserId("q"));
    CHECK(counts.counts == std::vector<std::int64_t>{0, 0});
    CHECK_THROWS_AS(neighbor_counts(g, UserId("nobody")), NotFoundError);
}

TEST_CASE("neighbor_counts honors exclude, sms and direction flags") {
    std::vector<CdrRecord> records{voice("q", "low"), voice("q", "low"), sms("q", "low"),
                                   voice("high", "q")};
    const auto g = build_graph(
        dataset(std::move(records), {client("low", 100.0), client("high", 900.0)}),
        CategorySchema::binary());

    CHECK(neighbor_counts(g, UserId("q")).counts == std::vector<std::int64_t>{2, 0});

    CountingOptions with_sms;
    with_sms.use_sms = true;
    CHECK(neighbor_counts(g, UserId("q"), {}, with_sms).counts ==
          std::vector<std::int64_t>{3, 0});

    CountingOptions both_ways;
    both_ways.bidirectional = true;
    CHECK(neighbor_counts(g, UserId("q"), {}, both_ways).counts ==
          std::vector<std::int64_t>{2, 1});

    CountingOptions distinct;
    distinct.distinct_contacts = true;
    CHECK(neighbor_counts(g, UserId("q"), {}, distinct).counts ==
          std::vector<std::int64_t>{1, 0});

    CHECK(neighbor_counts(g, UserId("q"), {UserId("low")}).counts ==
          std::vector<std::int64_t>{0, 0});
    // Excluding the user itself changes nothing: self-loops cannot exist.
    CHECK(neighbor_counts(g, UserId("q"), {UserId("q")}).counts ==
          std::vector<std::int64_t>{2, 0});
}

TEST_CASE("neighbor_counts matches a per-record oracle on random small graphs") {
    auto eng = rng::make_engine(53, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + static_cast<int>(rng::uniform_below(eng, 6));
        std::vector<CdrRecord> records;
        for (int i = 0; i < 40; ++i) {
            const auto a = rng::uniform_below(eng, static_cast<std::uint64_t>(n));
            auto b = rng::uniform_below(eng, static_cast<std::uint64_t>(n));
            if (a == b) b = (b + 1) % static_cast<std::uint64_t>(n);
            const auto o = "u" + std::to_string(a);
            const auto d = "u" + std::to_string(b);
            records.push_back(rng::uniform01(eng) < 0.25 ? sms(o, d) : voice(o, d));
        }
        std::vector<BankClient> clients;
        std::vector<std::pair<UserId, int>> labels;
        for (int i = 0; i < n; ++i) {
            if (rng::uniform01(eng) < 0.6) {
                const double income = 60.0 + 600.0 * rng::uniform01(eng);
                clients.push_back(client("u" + std::to_string(i), income));
                labels.emplace_back("u" + std::to_string(i), income >= 340.0 ? 2 : 1);
            }
        }
        const bool use_sms = rng::uniform01(eng) < 0.5;
        const auto g =
            build_graph(dataset(records, std::move(clients)), CategorySchema::binary());
        for (int i = 0; i < n; ++i) {
            const UserId id = "u" + std::to_string(i);
            if (!g.find(id)) continue;
            CountingOptions opts;
            opts.use_sms = use_sms;
            const auto fast = neighbor_counts(g, id, {}, opts);
            const auto slow = oracles::record_neighbor_counts(records, id, labels, 2, use_sms);
            CHECK(fast.counts == slow);
        }
    }
}

TEST_CASE("inference_set requires an outgoing call to a labeled node") {
    // q calls a labeled node; r only receives from one; s only texts one.
    std::vector<CdrRecord> records{voice("q", "low"), voice("low", "r"), sms("s", "low")};
    const auto g = build_graph(dataset(std::move(records), {client("low", 100.0)}),
                               CategorySchema::binary());
    const auto q_set = inference_set(g);
    std::vector<UserId> ids;
    for (const auto idx : q_set) ids.push_back(g.node(idx).id);
    // 'low' only calls the unlabeled r; 'r' only receives; 's' only texts.
    CHECK(ids == std::vector<UserId>{"q"});

    CountingOptions with_sms;
    with_sms.use_sms = true;
    const auto q_sms = inference_set(g, with_sms);
    std::vector<UserId> ids_sms;
    for (const auto idx : q_sms) ids_sms.push_back(g.node(idx).id);
    CHECK(ids_sms == std::vector<UserId>{"q", "s"});
}

TEST_CASE("inference_set on an empty graph is empty") {
    const auto g = build_graph(dataset({}, {}), CategorySchema::binary());
    CHECK(inference_set(g).empty());
}

TEST_CASE("every member of the inference set has positive counts") {
    auto eng = rng::make_engine(59, 0);
    std::vector<CdrRecord> records;
    std::vector<BankClient> clients;
    for (int i = 0; i < 200; ++i) {
        const auto a = rng::uniform_below(eng, 40);
        auto b = rng::uniform_below(eng, 40);
        if (a == b) b = (b + 1) % 40;
        records.push_back(voice("u" + std::to_string(a), "u" + std::to_string(b)));
    }
    for (int i = 0; i < 15; ++i) {
        clients.push_back(client("u" + std::to_string(i), 80.0 + 40.0 * i));
    }
    const auto g = build_graph(dataset(std::move(records), std::move(clients)),
                               CategorySchema::binary());
    for (const auto u : inference_set(g)) {
        CHECK(neighbor_counts(g, u).total() >= 1);
    }
}

TEST_CASE("snapshot round-trips through save and load") {
    std::vector<CdrRecord> records{voice("a", "b"), voice("a", "b"), sms("b", "c"),
                                   voice("c", "a")};
    const auto g = build_graph(
        dataset(std::move(records), {client("b", 123.456), client("c", 777.0)}),
        CategorySchema::binary());

    const auto dir = std::filesystem::temp_directory_path() / "incomenet_graph_test";
    std::filesystem::create_directories(dir);
    const auto nodes_path = (dir / "nodes.csv").string();
    const auto edges_path = (dir / "edges.csv").string();
    save_snapshot(g, nodes_path, edges_path);

    const auto loaded = load_snapshot(nodes_path, edges_path, CategorySchema::binary());
    CHECK(loaded.node_count() == g.node_count());
    CHECK(loaded.edge_count() == g.edge_count());
    CHECK(loaded.total_calls() == g.total_calls());
    CHECK(loaded.total_sms() == g.total_sms());
    const auto b = *loaded.find("b");
    CHECK(loaded.node(b).avg_income == doctest::Approx(123.456));
    CHECK(loaded.node(b).label == 1);
    const auto c = *loaded.find("c");
    CHECK(loaded.node(c).label == 2);

    // Loading under a different schema relabels from the stored incomes.
    const auto relabeled = load_snapshot(nodes_path, edges_path, CategorySchema::five_class());
    CHECK(relabeled.node(*relabeled.find("c")).label == 3);  // 777 lands in [405, 1080)
    std::filesystem::remove_all(dir);
}
