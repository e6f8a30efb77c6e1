#include "doctest.h"

#include "support/http_fixture.hpp"
#include "support/session_fixture.hpp"

using nlohmann::json;

namespace {

json parse(const httplib::Result& r)
{
    REQUIRE(r);
    return json::parse(r->body);
}

json post(httplib::Client& c, const std::string& path, const json& body, int expect)
{
    auto r = c.Post(path, body.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == expect);
    return json::parse(r->body);
}

} // namespace

TEST_SUITE("http") {

TEST_CASE("endpoint suite")
{
    fixtures::LiveServer live;
    REQUIRE(live.port > 0);
    auto c = live.client();

    const auto created = post(c, "/sessions", json::object(), 201);
    const std::string base = "/sessions/" + created["id"].get<std::string>();
    CHECK(created["revision"] == 0);

    CHECK(c.Get(base + "/overview")->status == 400);
    CHECK(c.Get("/sessions/nope/overview")->status == 404);

    const auto summary = post(c, base + "/data", fixtures::bikes_upload({{"hull", true}}), 200);
    CHECK(summary["p_c"] == 8);
    CHECK(summary["p_l"] == 6);
    CHECK(post(c, base + "/data", {{"csv", "a,b\n1\n2,3"}, {"roles", fixtures::bikes_roles()}}, 400)["row"] == 1);

    const auto cfg = parse(c.Get(base + "/config"));
    CHECK(cfg["clustering"]["k"] == 4);
    auto patched = c.Patch(base + "/config", json({{"clustering", {{"k", 3}}}}).dump(), "application/json");
    REQUIRE(patched);
    CHECK(patched->status == 200);
    CHECK(json::parse(patched->body)["plan"] == json({"solution", "comparison"}));
    auto bad = c.Patch(base + "/config", json({{"clustering", {{"k", 0}}}}).dump(), "application/json");
    CHECK(bad->status == 400);
    CHECK(json::parse(bad->body)["path"] == "/clustering/k");

    const auto ov = parse(c.Get(base + "/overview"));
    CHECK(ov["hulls"].size() == 3);
    CHECK(parse(c.Get(base + "/stats"))["rows"].size() == 7);
    CHECK(parse(c.Get(base + "/stats?k_max=3"))["rows"].size() == 2);
    CHECK(parse(c.Get(base + "/benchmarks"))["clusters"].size() == 3);
    const auto cv = parse(c.Get(base + "/coordinates?variable=A4&center=1&hide=2"));
    for (const auto& r : cv["pcp"]["rows"]) CHECK(r["cluster"] != 2);
    CHECK(c.Get(base + "/coordinates?variable=zz")->status == 404);
    CHECK(parse(c.Get(base + "/breakdown?cluster=2"))["cluster"] == 2);
    CHECK(parse(c.Get(base + "/comparison"))["table"].size() == 3);

    const auto emb = post(c, base + "/jobs/embedding", {{"panel", "clustering"}, {"method", "mds"}}, 202);
    const auto emb_done = parse(c.Get(base + "/jobs/" + emb["id"].get<std::string>() + "?wait_ms=60000"));
    CHECK(emb_done["state"] == "done");
    CHECK(emb_done["result"]["coords"].size() == 60);
    CHECK(post(c, base + "/jobs/embedding", {{"panel", "clustering"}, {"method", "nope"}}, 404)["error"]
              .get<std::string>()
              .find("tsne") != std::string::npos);
    post(c, base + "/jobs/embedding", {{"method", "mds"}}, 400);

    const auto tour = post(c, base + "/jobs/tour", {{"panel", "A"}, {"kind", "guided"}, {"seed", 1}, {"max_iter", 50}}, 202);
    const std::string tour_job = tour["id"];
    const auto tour_done = parse(c.Get(base + "/jobs/" + tour_job + "?wait_ms=60000"));
    CHECK(tour_done["state"] == "done");
    const auto frame = parse(c.Get(base + "/tours/A/frame?position=2&slice=1"));
    CHECK(frame["frame"].size() == 6);
    CHECK(frame["slice"]["in_slice"].size() == 60);
    CHECK(c.Get(base + "/tours/A/frame?position=0")->status == 400);
    CHECK(c.Get(base + "/tours/Q/frame")->status == 404);
    post(c, base + "/jobs/tour", {{"panel", "B"}, {"copy_from", "A"}, {"color_by", "bin"}}, 400);
    CHECK(post(c, base + "/jobs/tour", {{"panel", "B"}, {"copy_from", "A"}, {"color_by", "group"}}, 202)["state"] == "done");

    const auto cancelled = c.Delete(base + "/jobs/" + tour_job);
    CHECK(cancelled->status == 200);
    CHECK(json::parse(cancelled->body)["state"] == "done");
    CHECK(c.Get(base + "/jobs/nope")->status == 404);

    CHECK(post(c, base + "/selection", {{"ids", {4, 5}}, {"origin", "pcp"}}, 200)["revision"] == 1);
    CHECK(parse(c.Get(base + "/selection"))["ids"] == json({4, 5}));
    post(c, base + "/selection", {{"ids", {99}}, {"origin", "pcp"}}, 400);

    const auto events = parse(c.Get(base + "/events?after=0"))["events"];
    CHECK(events.size() >= 5);
    for (std::size_t i = 0; i < events.size(); ++i) CHECK(events[i]["seq"] == i + 1);

    const auto exported = parse(c.Get(base + "/export"));
    CHECK(exported["assignments_csv"].get<std::string>().rfind("id,cluster,group,score,bin", 0) == 0);
    const auto csv = c.Get(base + "/export?format=csv");
    CHECK(csv->get_header_value("Content-Type") == "text/csv");
    CHECK(csv->body == exported["assignments_csv"]);

    CHECK(c.Post(base + "/data", "{not json", "application/json")->status == 400);
    CHECK(c.Delete(base)->status == 204);
    CHECK(c.Get(base)->status == 404);
}

TEST_CASE("selection stream reaches concurrent subscribers in order")
{
    fixtures::LiveServer live;
    auto c = live.client();
    const std::string id = post(c, "/sessions", json::object(), 201)["id"];
    const std::string base = "/sessions/" + id;
    post(c, base + "/data", fixtures::bikes_upload(), 200);

    constexpr int kUpdates = 25;
    auto selections = [](const std::vector<json>& evs) {
        std::vector<int> out;
        for (const auto& e : evs) {
            if (e["type"] == "selection") out.push_back(e["data"]["revision"]);
        }
        return out;
    };
    fixtures::SseSubscriber s1, s2;
    auto done = [&](const std::vector<json>& evs) { return static_cast<int>(selections(evs).size()) >= kUpdates; };
    std::thread t1([&] { s1.run(live.port, base + "/events/stream", done); });
    std::thread t2([&] { s2.run(live.port, base + "/events/stream", done); });
    while (!s1.connected || !s2.connected) std::this_thread::sleep_for(std::chrono::milliseconds(5));

    std::thread writer([&] {
        auto w = live.client();
        for (int i = 0; i < kUpdates; ++i) {
            w.Post(base + "/selection", json({{"ids", {1 + i % 60}}, {"origin", "tour"}}).dump(), "application/json");
        }
    });
    writer.join();
    t1.join();
    t2.join();
    for (auto* s : {&s1, &s2}) {
        const auto revs = selections(s->events);
        REQUIRE(revs.size() == kUpdates);
        for (int i = 0; i < kUpdates; ++i) CHECK(revs[i] == i + 1);
        for (std::size_t i = 1; i < s->events.size(); ++i) CHECK(s->events[i]["seq"] == s->events[i - 1]["seq"].get<int>() + 1);
    }
}

} // TEST_SUITE
