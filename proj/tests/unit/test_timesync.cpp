#include "doctest.h"

#include "mcsc/error.hpp"
#include "mcsc/timesync.hpp"

#include <cmath>

using namespace mcsc;
using namespace mcsc::timesync;

TEST_CASE("time offset")
{
    CHECK(timeOffset(110, 100) == 10);
    CHECK(timeOffset(100, 110) == 10);
    CHECK(timeOffset(42.5, 42.5) == 0);
}

TEST_CASE("max drift")
{
    CHECK(maxDrift(1000, 0.001) == doctest::Approx(1.0));
    CHECK(maxDrift(1000, -0.001) == doctest::Approx(1.0));
    CHECK(maxDrift(5000, 0.0) == 0.0);
    CHECK_THROWS_AS(maxDrift(0, 0.001), InvalidConfig);
    CHECK_THROWS_AS(maxDrift(-1, 0.001), InvalidConfig);
    CHECK(maxRelativeDrift(1000, 0.001, -0.0005) == doctest::Approx(1.5));
}

TEST_CASE("relative drift bound holds for two simulated clocks")
{
    for (double r1 : {-1e-3, -2e-4, 0.0, 5e-4, 1e-3}) {
        for (double r2 : {-1e-3, 0.0, 3e-4, 1e-3}) {
            ClockModel a(r1), b(r2);
            double worst = 0.0;
            for (int step = 0; step < 100; ++step) {
                a = advanceClock(a, 10);
                b = advanceClock(b, 10);
                worst = std::max(worst, timeOffset(a.localTimeMs(), b.localTimeMs()));
            }
            CHECK(worst <= maxRelativeDrift(1000, r1, r2) + 1e-9);
            CHECK(worst == doctest::Approx(1000 * std::abs(r1 - r2)).epsilon(1e-9));
        }
    }
}

TEST_CASE("in sync is boundary inclusive")
{
    CHECK(inSync(1, 1));
    CHECK_FALSE(inSync(2, 1));
    CHECK(inSync(0, 0));
}

TEST_CASE("resynchronize")
{
    CHECK(resynchronize(100, 110, 100) == 105);
    CHECK(resynchronize(100, 100, 100) == 100);
    CHECK(resynchronize(100, 103, 100) == 102);  // 1.5 rounds away from zero
    CHECK(resynchronize(100, 97, 100) == 98);    // -1.5 rounds away from zero
    CHECK(resynchronize(100, 100.8, 100) == 100); // 0.4 rounds to 0

    SUBCASE("a two-node loop halves the offset every round")
    {
        const double master = 1000.0;
        double local = 1000.0 + 640.0;
        for (int k = 1; k <= 8; ++k) {
            local = resynchronize(master, local, master);
            CHECK(std::abs(local - master) <= 640.0 / std::pow(2.0, k) + 0.5 * k);
        }
    }
}

TEST_CASE("advance clock")
{
    CHECK(advanceClock(ClockModel(0.0), 1000).localTimeMs() == 1000);
    CHECK(advanceClock(ClockModel(0.001), 1000).localTimeMs() == 1001);
    CHECK(advanceClock(ClockModel(-0.001), 1000).localTimeMs() == 999);
    CHECK(advanceClock(ClockModel(0.001), 1000).trueTimeMs() == 1000);
    CHECK_THROWS_AS(advanceClock(ClockModel(0.0), -1), RangeError);
    CHECK_THROWS_AS(ClockModel(-1.0), InvalidConfig);

    SUBCASE("many small steps do not accumulate error")
    {
        ClockModel c(1e-5, 3.0);
        for (int i = 0; i < 100000; ++i)
            c = advanceClock(c, 10);
        CHECK(c.localTimeNs() == 3'000'000 + 1'000'000'000'000 + 10'000'000);
    }
    SUBCASE("withLocalTime re-anchors at the current instant")
    {
        ClockModel c = advanceClock(ClockModel(0.001), 500);
        ClockModel d = c.withLocalTime(400);
        CHECK(d.localTimeMs() == 400);
        CHECK(d.trueTimeMs() == 500);
        CHECK(advanceClock(d, 1000).localTimeMs() == 1401);
    }
    SUBCASE("local time never decreases")
    {
        ClockModel c(-0.5);
        double last = c.localTimeMs();
        for (int i = 0; i < 1000; ++i) {
            c = advanceClock(c, 0.37);
            CHECK(c.localTimeMs() >= last);
            last = c.localTimeMs();
        }
    }
}

TEST_CASE("process sync signal")
{
    SyncState s;
    const ClockModel clock = advanceClock(ClockModel(0.0, 0.0), 1000);

    SUBCASE("offset zero leaves the clock alone")
    {
        const auto out = processSyncSignal(s, clock, SyncSignal{1000, 0, 100});
        CHECK(out.accepted);
        CHECK_FALSE(out.corrected);
        CHECK(out.clock == clock);
        CHECK(out.state.lastBeaconSlot == 100u);
        SyncState expected = s;
        expected.lastBeaconSlot = 100;
        CHECK(out.state == expected);
    }
    SUBCASE("offset at the bound is in sync")
    {
        const auto out = processSyncSignal(s, clock, SyncSignal{998, 0, 100});
        CHECK_FALSE(out.corrected);
    }
    SUBCASE("larger offset moves the clock halfway to the master")
    {
        const auto out = processSyncSignal(s, clock, SyncSignal{990, 0, 100});
        CHECK(out.corrected);
        CHECK(out.clock.localTimeMs() == 995);
        CHECK(out.clock.trueTimeMs() == 1000);
    }
    SUBCASE("desynced node rejoins")
    {
        SyncState d = desynchronize(s, 17);
        CHECK(d.status == SyncStatus::Desynced);
        CHECK(d.campedChannel == 17u);
        const auto out = processSyncSignal(d, clock, SyncSignal{1000, 2, 200});
        CHECK(out.state.status == SyncStatus::Synced);
        CHECK_FALSE(out.state.campedChannel.has_value());
        CHECK(out.state.missedBeacons == 0);
    }
    SUBCASE("stale and repeated signals are ignored")
    {
        const auto first = processSyncSignal(s, clock, SyncSignal{990, 0, 100});
        const auto again = processSyncSignal(first.state, first.clock, SyncSignal{990, 0, 100});
        CHECK_FALSE(again.accepted);
        CHECK(again.state == first.state);
        CHECK(again.clock == first.clock);
        const auto older = processSyncSignal(first.state, first.clock, SyncSignal{500, 0, 50});
        CHECK_FALSE(older.accepted);
        CHECK(older.clock == first.clock);
    }
}
