#include <doctest.h>

#include "cachekit/bounds.hpp"
#include "cachekit/schemes.hpp"

using namespace cachekit;

TEST_CASE("chen placement stores exactly one K-th of a file per user")
{
    NetworkConfig cfg = make_config(2, 4);
    FileStore files = FileStore::random(2, 4, 16, 1);
    CacheContents caches = chen_place(cfg, files);
    for (int u = 1; u <= 4; ++u) {
        CHECK(caches.stored_files(u, 16) == rat(1, 4));
        REQUIRE(caches.per_user[u - 1].size() == 1);
        // label records the stored XOR W_{1,u} ^ W_{2,u}
        CHECK(caches.per_user[u - 1][0].label ==
              std::vector<SubfileId>{{1, u - 1}, {2, u - 1}});
    }
    // N=1 degenerates to storing the own subfile raw
    NetworkConfig single = make_config(1, 3);
    FileStore f1 = FileStore::random(1, 3, 9, 2);
    CacheContents c1 = chen_place(single, f1);
    CHECK(c1.per_user[1][0].bits == f1.subfile({1, 1}));
}

TEST_CASE("chen delivery rate and full family decode")
{
    for (auto [n, k] : std::vector<std::pair<int, int>>{{3, 4}, {2, 4}}) {
        NetworkConfig cfg = make_config(n, k);
        for (auto& d : demand_family(cfg, cfg.regime())) {
            SimReport report = simulate(cfg, SchemeKind::chen, {}, d, 0, 7);
            CHECK(report.decode_ok);
            CHECK(report.measured_rate == chen_rate(cfg));
        }
    }
    // (3,4): 9/4 matches the figure's marked point; (2,4): 3/2
    CHECK(chen_rate(make_config(3, 4)) == rat(9, 4));
    CHECK(chen_rate(make_config(2, 4)) == rat(3, 2));
    CHECK(chen_rate(make_config(4, 6)) == rat(10, 3));
}

TEST_CASE("chen decode is bit exact over every covering demand of (2,4)")
{
    NetworkConfig cfg = make_config(2, 4);
    auto demands = all_covering_demands(cfg);
    CHECK(demands.size() == 14);
    for (auto& d : demands) {
        SimReport report = simulate(cfg, SchemeKind::chen, {}, d, 8, 3);
        CHECK(report.decode_ok);
        CHECK(report.measured_rate == rat(3, 2));
    }
}

TEST_CASE("chen rejects non-covering demands")
{
    NetworkConfig cfg = make_config(3, 4);
    FileStore files = FileStore::random(3, 4, 4, 0);
    CHECK_THROWS_AS(chen_deliver(cfg, files, demand_from_string("1,1,1,2", cfg)),
                    DomainError);
}

TEST_CASE("corrupting a broadcast block breaks decoding")
{
    NetworkConfig cfg = make_config(3, 4);
    FileStore files = FileStore::random(3, 4, 4, 11);
    CacheContents caches = chen_place(cfg, files);
    Demand d = demand_from_string("1,2,3,1", cfg);
    Broadcast bc = chen_deliver(cfg, files, d);
    bc.packets[0].bits[0] ^= 1;
    bool all_ok = true;
    for (int u = 1; u <= 4; ++u) {
        DecodeResult res = decode_file(files, caches.per_user[u - 1], bc, d.at(u));
        all_ok = all_ok && res.ok && res.file == files.whole_file(d.at(u));
    }
    CHECK_FALSE(all_ok);
}

TEST_CASE("uncoded placement memory")
{
    NetworkConfig cfg = make_config(3, 4);
    CHECK(mn_memory(cfg, 0) == 0);
    CHECK(mn_memory(cfg, 4) == 3);
    CHECK(mn_memory(cfg, 1) == rat(3, 4));
    FileStore files = FileStore::random(3, 6, 12, 5); // C(4,2)=6
    CacheContents caches = mn_place(cfg, 2, files);
    for (int u = 1; u <= 4; ++u)
        CHECK(caches.stored_files(u, 12) == mn_memory(cfg, 2));
}

TEST_CASE("leader-based delivery rates match the closed form")
{
    CHECK(yu_rate(make_config(3, 4), 1) == rat(3, 2));
    CHECK(yu_rate(make_config(3, 4), 0) == 3);
    CHECK(yu_rate(make_config(2, 4), 2) == rat(2, 3));
    CHECK(yu_rate(make_config(2, 4), 1) == rat(5, 4));

    for (auto [n, k] : std::vector<std::pair<int, int>>{{2, 3}, {3, 4}, {2, 4}}) {
        NetworkConfig cfg = make_config(n, k);
        auto fam = demand_family(cfg, cfg.regime());
        for (int t = 0; t <= k; ++t)
            for (auto& d : fam) {
                SimReport report = simulate(cfg, SchemeKind::yu, t, d, 0, 13);
                CHECK(report.decode_ok);
                CHECK(report.measured_rate == yu_rate(cfg, t));
            }
    }
    // t=K: everything cached, nothing broadcast
    SimReport idle = simulate(make_config(2, 4), SchemeKind::yu, 4,
                              demand_from_string("1,2,1,1", make_config(2, 4)), 0, 1);
    CHECK(idle.measured_rate == 0);
    CHECK(idle.decode_ok);
}

TEST_CASE("leader-based delivery on non-covering demands")
{
    NetworkConfig cfg = make_config(3, 4);
    Demand d = demand_from_string("1,1,1,2", cfg); // file 3 unrequested
    SimReport report = simulate(cfg, SchemeKind::yu, 1, d, 0, 21);
    CHECK_FALSE(report.covering);
    CHECK(report.decode_ok);
    // two distinct files -> rate (C(4,2) - C(2,2)) / C(4,1)
    CHECK(report.measured_rate == rat(5, 4));
}

TEST_CASE("simulation is deterministic in the seed")
{
    NetworkConfig cfg = make_config(3, 4);
    Demand d = demand_from_string("1,2,3,1", cfg);
    SimReport a = simulate(cfg, SchemeKind::chen, {}, d, 20, 42);
    SimReport b = simulate(cfg, SchemeKind::chen, {}, d, 20, 42);
    CHECK(a.to_json() == b.to_json());
}

TEST_CASE("simulated rates never undercut any bound at the same memory")
{
    for (auto [n, k] : std::vector<std::pair<int, int>>{{2, 3}, {2, 4}, {3, 4}}) {
        NetworkConfig cfg = make_config(n, k);
        auto bounds = all_bounds(cfg);
        auto fam = demand_family(cfg, cfg.regime());
        for (auto& d : fam) {
            SimReport chen = simulate(cfg, SchemeKind::chen, {}, d, 0, 5);
            CHECK(chen.measured_rate >= lower_envelope(bounds, rat(1, k)));
            for (int t = 0; t <= k; ++t) {
                SimReport yu = simulate(cfg, SchemeKind::yu, t, d, 0, 5);
                CHECK(yu.measured_rate >= lower_envelope(bounds, mn_memory(cfg, t)));
            }
        }
    }
}

TEST_CASE("memory_share evaluates the lower convex envelope")
{
    using P = std::pair<Rational, Rational>;
    std::vector<P> chen_pts{{rat(0), rat(2)}, {rat(1, 4), rat(3, 2)}};
    CHECK(memory_share(chen_pts, rat(1, 8)) == rat(7, 4));
    CHECK(memory_share({{rat(1), rat(5)}}, rat(1)) == 5);
    CHECK_THROWS_AS(memory_share({{rat(1), rat(5)}}, rat(2)), DomainError);
    // (3,4) coded-placement segment at 5/16: the 11/4 - 2M line
    std::vector<P> seg{{rat(1, 4), rat(9, 4)}, {rat(3, 8), rat(2)}};
    CHECK(memory_share(seg, rat(5, 16)) == rat(17, 8));
    // points above the hull do not matter
    seg.push_back({rat(5, 16), rat(3)});
    CHECK(memory_share(seg, rat(5, 16)) == rat(17, 8));
}
