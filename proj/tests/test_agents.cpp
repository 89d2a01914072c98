/*
 * Copyright 2026 The OASYS Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "oasys/mug.hpp"
#include "oasys/navigation.hpp"
#include "oasys/uav.hpp"
#include "oasys/usv.hpp"
#include "support.hpp"

using namespace oasys;
using oasys::testing::case_seed;
using oasys::testing::Gen;

namespace {

template <class Table, class Mode, class Event>
bool declared(const Table& table, Mode from, Event ev, Mode to) {
    for (const auto& t : table)
        if (t.from == from && t.event == ev && t.to == to) return true;
    return false;
}

struct MugRun {
    MugAgent agent;
    std::vector<MugModeChange> changes;
    std::vector<VehicleReport> reports;
    double now = 0.0;
    double vbs_wh = 0.0;
    bool overdepth = false;
};

// Steps a MUG on its own with no radio traffic.
void run_mug(MugRun& run, const Environment& env, std::mt19937_64& rng, double seconds, double dt = 1.0) {
    const double end = run.now + seconds;
    while (run.now < end - 1e-9) {
        MugContext ctx{env, run.now, dt, 0, 0.0, &rng};
        MugTickResult r = mug_tick(run.agent, ctx);
        run.agent = std::move(r.agent);
        run.changes.insert(run.changes.end(), r.changes.begin(), r.changes.end());
        run.reports.insert(run.reports.end(), r.reports.begin(), r.reports.end());
        run.vbs_wh += r.vbs_wh;
        run.overdepth = run.overdepth || r.overdepth;
        run.now += dt;
    }
}

MugRun deployed_mug(const Environment& env, MugParams params = {}) {
    MugRun run;
    run.agent = make_mug("mug1", params, env);
    deploy_mug(run.agent, {0.0, 0.0}, 0.0, &run.changes);
    return run;
}

OperatorCommand mug_command(CommandVerb verb, double value = 0.0) {
    OperatorCommand c;
    c.command_id = "c1";
    c.target = "mug1";
    c.verb = verb;
    c.value = value;
    return c;
}

}  // namespace

// ---- MUG state machine ----

TEST(MugFsm, EveryModeChangeIsDeclared) {
    for (int i = 0; i < 500; ++i) {
        Gen g(case_seed(21, i));
        const Environment env;
        MugAgent a = make_mug("m", MugParams{}, env);
        std::vector<MugModeChange> changes;
        for (int k = 0; k < 60; ++k) {
            const MugMode before = a.mode;
            const MugEvent ev = g.pick(kAllMugEvents);
            fire(a, ev, k, &changes);
            const MugMode expected = mug_transition(before, ev);
            ASSERT_EQ(a.mode, expected) << "case " << i;
            if (a.mode != before) {
                ASSERT_TRUE(declared(mug_transition_table(), before, ev, a.mode)) << "case " << i;
                ASSERT_FALSE(changes.empty());
                EXPECT_EQ(changes.back().from, before);
                EXPECT_EQ(changes.back().to, a.mode);
            }
        }
    }
}

TEST(MugFsm, TableHasNoDuplicatePairs) {
    std::set<std::pair<int, int>> seen;
    for (const MugTransition& t : mug_transition_table())
        EXPECT_TRUE(seen.insert({static_cast<int>(t.from), static_cast<int>(t.event)}).second)
            << to_string(t.from) << " / " << to_string(t.event);
}

TEST(MugFsm, RecoveredIsTerminal) {
    for (MugEvent ev : kAllMugEvents)
        if (ev != MugEvent::Deploy) {
            EXPECT_EQ(mug_transition(MugMode::Recovered, ev), MugMode::Recovered);
        }
}

TEST(MugFsm, EveryModeReachableFromPreDeploy) {
    std::set<MugMode> reached{MugMode::PreDeploy};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const MugTransition& t : mug_transition_table())
            if (reached.count(t.from) && reached.insert(t.to).second) grew = true;
    }
    for (MugMode m : kAllMugModes) EXPECT_TRUE(reached.count(m)) << to_string(m);
}

TEST(Mug, YoCycleVisitsModesInOrder) {
    const Environment env;
    std::mt19937_64 rng(1);
    MugRun run = deployed_mug(env);
    run_mug(run, env, rng, 3 * 3600.0);
    ASSERT_GE(run.changes.size(), 5u);
    const MugMode expect[] = {MugMode::Descend, MugMode::Ascend, MugMode::SurfaceFix, MugMode::Transmit,
                              MugMode::Descend};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(run.changes[i].to, expect[i]) << i;
    EXPECT_GE(run.agent.yo_count, 3);
    EXPECT_FALSE(run.overdepth);
    EXPECT_LE(run.agent.max_depth_reached, run.agent.params.crush_depth);
    EXPECT_GT(run.agent.max_depth_reached, 190.0);
}

TEST(Mug, SetTargetDepthShallowsTheNextDive) {
    const Environment env;
    std::mt19937_64 rng(2);
    MugRun run = deployed_mug(env);
    ASSERT_TRUE(apply_mug_command(run.agent, mug_command(CommandVerb::SetTargetDepth, 150.0), 0.0, &run.changes));
    run_mug(run, env, rng, 1800.0);
    EXPECT_GE(run.agent.yo_count, 1);
    EXPECT_NEAR(run.agent.max_depth_reached, 150.0, 5.0);
}

TEST(Mug, SetTargetDepthOutsideRangeIsRefused) {
    const Environment env;
    MugRun run = deployed_mug(env);
    EXPECT_FALSE(apply_mug_command(run.agent, mug_command(CommandVerb::SetTargetDepth, 0.0), 0.0, nullptr));
    EXPECT_FALSE(apply_mug_command(run.agent, mug_command(CommandVerb::SetTargetDepth, 250.0), 0.0, nullptr));
    EXPECT_DOUBLE_EQ(run.agent.target_depth, 200.0);
}

TEST(Mug, RecoveryRequestMidDiveEndsInWaitRecovery) {
    const Environment env;
    std::mt19937_64 rng(3);
    MugRun run = deployed_mug(env);
    run_mug(run, env, rng, 120.0);
    ASSERT_EQ(run.agent.mode, MugMode::Descend);
    ASSERT_TRUE(apply_mug_command(run.agent, mug_command(CommandVerb::RequestRecovery), run.now, &run.changes));
    EXPECT_EQ(run.agent.mode, MugMode::Ascend);
    run_mug(run, env, rng, 1800.0);
    EXPECT_EQ(run.agent.mode, MugMode::WaitRecovery);
    ASSERT_TRUE(run.agent.mission_end_at.has_value());
    EXPECT_DOUBLE_EQ(run.agent.kin.depth, 0.0);
}

TEST(Mug, WaitRecoveryNeverActuatesTheVbs) {
    const Environment env;
    std::mt19937_64 rng(4);
    MugRun run = deployed_mug(env);
    fire(run.agent, MugEvent::RecoveryRequested, 0.0, &run.changes);
    run_mug(run, env, rng, 1800.0);
    ASSERT_EQ(run.agent.mode, MugMode::WaitRecovery);

    const double piston = run.agent.vbs.piston_fraction;
    const double charge = run.agent.battery.charge;
    for (int i = 0; i < 7200; ++i) {
        MugContext ctx{env, run.now, 1.0, 0, 0.0, &rng};
        MugTickResult r = mug_tick(run.agent, ctx);
        ASSERT_EQ(r.vbs_wh, 0.0) << "t=" << run.now;
        ASSERT_EQ(r.agent.vbs.piston_fraction, piston);
        ASSERT_EQ(r.agent.kin.depth, 0.0);
        run.agent = std::move(r.agent);
        run.now += 1.0;
    }
    // Hotel load only: 0.5 W for two hours.
    EXPECT_NEAR(charge - run.agent.battery.charge, 1.0, 1e-9);
    EXPECT_EQ(run.agent.mode, MugMode::WaitRecovery);
}

TEST(Mug, WaitRecoveryRefixesOncePerInterval) {
    const Environment env;
    std::mt19937_64 rng(5);
    MugRun run = deployed_mug(env);
    fire(run.agent, MugEvent::RecoveryRequested, 0.0, &run.changes);
    run_mug(run, env, rng, 1800.0);
    ASSERT_EQ(run.agent.mode, MugMode::WaitRecovery);
    run_mug(run, env, rng, 600.0);
    EXPECT_DOUBLE_EQ(run.agent.nav.sigma, run.agent.params.gps_noise);
    EXPECT_LE(distance(run.agent.nav.position, run.agent.kin.position), 6.0 * run.agent.params.gps_noise);
}

TEST(Mug, LowBatteryLatchesRecovery) {
    const Environment env;
    std::mt19937_64 rng(6);
    MugParams p;
    p.battery.charge = p.battery.reserve_floor + 0.05;
    p.battery.initial = p.battery.charge;
    MugRun run = deployed_mug(env, p);
    run_mug(run, env, rng, 3600.0);
    EXPECT_TRUE(run.agent.recovery_latched);
    EXPECT_EQ(run.agent.mode, MugMode::WaitRecovery);
}

TEST(Mug, DepletedStopsDrawing) {
    const Environment env;
    std::mt19937_64 rng(7);
    MugParams p;
    p.battery = EnergyStore::make(1.0, 0.01, 25.2, 0.0);
    MugRun run = deployed_mug(env, p);
    run_mug(run, env, rng, 600.0);
    EXPECT_EQ(run.agent.mode, MugMode::FaultLowBattery);
    EXPECT_GE(run.agent.battery.charge, 0.0);
    const MugAgent before = run.agent;
    run_mug(run, env, rng, 600.0);
    EXPECT_EQ(run.agent.battery.charge, before.battery.charge);
    EXPECT_EQ(run.agent.vbs.piston_fraction, before.vbs.piston_fraction);
}

TEST(Mug, StowedMugDoesNothing) {
    const Environment env;
    std::mt19937_64 rng(8);
    MugRun run;
    run.agent = make_mug("mug1", MugParams{}, env);
    run_mug(run, env, rng, 100.0);
    EXPECT_EQ(run.agent.mode, MugMode::PreDeploy);
    EXPECT_EQ(run.agent.battery.charge, MugParams{}.battery.charge);
    EXPECT_TRUE(run.reports.empty());
}

TEST(Mug, SamplesOnlyWhileSubmerged) {
    const Environment env;
    std::mt19937_64 rng(9);
    MugRun run = deployed_mug(env);
    run_mug(run, env, rng, 3 * 3600.0);
    std::size_t with_samples = 0;
    for (const VehicleReport& r : run.reports) {
        if (r.ctd_samples > 0) ++with_samples;
        EXPECT_LE(r.ctd_samples, static_cast<std::size_t>(run.agent.params.telemetry_interval /
                                                          run.agent.params.sample_interval) + 1);
    }
    EXPECT_GT(with_samples, 0u);
    EXPECT_GT(run.agent.total_samples, 0u);
}

// ---- navigation ----

TEST(Nav, TwoHoursSubmergedGivesHundredMetres) {
    const NavEstimate start{{10.0, 20.0}, 0.0};
    const NavEstimate out = dead_reckon_update(start, 50.0 / 3600.0, 7200.0);
    EXPECT_NEAR(out.sigma, 100.0, 1e-9);
    EXPECT_EQ(out.position, start.position);
}

TEST(Nav, ZeroDtLeavesEstimateAlone) {
    const NavEstimate start{{1.0, 2.0}, 17.0};
    const NavEstimate out = dead_reckon_update(start, 50.0 / 3600.0, 0.0);
    EXPECT_EQ(out.sigma, 17.0);
    EXPECT_EQ(out.position, start.position);
}

TEST(Nav, NegativeDtThrows) {
    EXPECT_THROW(dead_reckon_update(NavEstimate{}, 1.0, -1.0), std::invalid_argument);
}

TEST(Nav, FixResetsSigma) {
    std::mt19937_64 rng(10);
    const NavEstimate out = gps_fix({100.0, -50.0}, 5.0, rng);
    EXPECT_EQ(out.sigma, 5.0);
}

TEST(Nav, FixNoiseMatchesItsSpread) {
    std::mt19937_64 rng(11);
    const int n = 20000;
    double se = 0.0, sn = 0.0, se2 = 0.0, sn2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const NavEstimate f = gps_fix({0.0, 0.0}, 5.0, rng);
        se += f.position.east;
        sn += f.position.north;
        se2 += f.position.east * f.position.east;
        sn2 += f.position.north * f.position.north;
    }
    EXPECT_NEAR(se / n, 0.0, 0.15);
    EXPECT_NEAR(sn / n, 0.0, 0.15);
    EXPECT_NEAR(std::sqrt(se2 / n), 5.0, 0.1);
    EXPECT_NEAR(std::sqrt(sn2 / n), 5.0, 0.1);
}

TEST(Nav, FixDrawsExactlyTwoNormals) {
    std::mt19937_64 a(12), b(12);
    gps_fix({0.0, 0.0}, 5.0, a);
    std::normal_distribution<double> n(0.0, 5.0);
    n(b);
    n(b);
    EXPECT_EQ(a(), b());
}

TEST(Nav, SigmaGrowsMonotonically) {
    Gen g(13);
    NavEstimate nav{};
    for (int i = 0; i < 1000; ++i) {
        const double before = nav.sigma;
        nav = dead_reckon_update(nav, g.uniform(0.0, 0.1), g.uniform(0.0, 100.0));
        ASSERT_GE(nav.sigma, before);
    }
}

// ---- UAV ----

TEST(UavFsm, EveryModeChangeIsDeclared) {
    for (int i = 0; i < 500; ++i) {
        Gen g(case_seed(31, i));
        UavAgent a = make_uav("uav1", UavParams{}, {0.0, 0.0});
        std::vector<UavModeChange> changes;
        for (int k = 0; k < 60; ++k) {
            const UavMode before = a.mode;
            const UavEvent ev = g.pick(kAllUavEvents);
            fire(a, ev, k, &changes);
            ASSERT_EQ(a.mode, uav_transition(before, ev));
            if (a.mode != before) {
                ASSERT_TRUE(declared(uav_transition_table(), before, ev, a.mode)) << "case " << i;
            }
        }
    }
}

TEST(UavFsm, EmergencyLandIsAbsorbing) {
    for (UavEvent ev : kAllUavEvents) EXPECT_EQ(uav_transition(UavMode::EmergencyLand, ev), UavMode::EmergencyLand);
}

TEST(UavFsm, OnlyDockingReturnsToTheDeck) {
    for (const UavTransition& t : uav_transition_table())
        if (t.to == UavMode::DockedCharging) {
            EXPECT_EQ(t.event, UavEvent::Docked);
        }
}

TEST(Uav, LaunchRequiresDock) {
    UavAgent a = make_uav("uav1", UavParams{}, {0.0, 0.0});
    SortiePlan plan;
    plan.station = {1000.0, 0.0};
    launch(a, plan, 0.0, nullptr);
    EXPECT_EQ(a.mode, UavMode::TransitOut);
    EXPECT_THROW(launch(a, plan, 0.0, nullptr), std::logic_error);
}

TEST(Uav, ExpandingSquareLegs) {
    const Vec2 c{100.0, 200.0};
    const double L = 30.0;
    // Hand-worked corners: N L, E L, S 2L, W 2L, N 3L.
    const Vec2 expect[] = {{100, 200}, {100, 230}, {130, 230}, {130, 170}, {70, 170}, {70, 260}};
    for (int k = 0; k < 6; ++k) {
        const Vec2 p = expanding_square_point(c, L, k);
        EXPECT_NEAR(p.east, expect[k].east, 1e-9) << k;
        EXPECT_NEAR(p.north, expect[k].north, 1e-9) << k;
    }
}

TEST(Uav, DockedChargingFollowsTheUsv) {
    const Environment env;
    UavAgent a = make_uav("uav1", UavParams{}, {0.0, 0.0});
    a.battery.charge = 50.0;
    UavContext ctx{env, 0.0, 1.0, {123.0, 456.0}, 1.0, std::nullopt};
    const UavTickResult r = uav_tick(a, ctx);
    EXPECT_EQ(r.agent.position, (Vec2{123.0, 456.0}));
    EXPECT_EQ(r.requested_charge_power, 60.0);
    EXPECT_EQ(r.consumed_wh, 0.0);
}

namespace {

struct SortieOutcome {
    UavAgent uav;
    bool emergency = false;
    bool docked = false;
    bool picked_up = false;
    double min_charge = 1e9;
};

// Flies one recovery sortie against a stationary MUG and a stationary USV.
SortieOutcome fly_recovery(UavAgent uav, const Vec2& mug, bool mug_waiting, double sigma, double max_time) {
    const Environment env;
    SortiePlan plan;
    plan.uav_id = uav.id;
    plan.objective = SortieObjective::Recover;
    plan.mug_id = "mug1";
    plan.station = mug;
    plan.search_sigma = sigma;
    plan.energy_estimate = uav_leg_energy(mug.norm(), 0.0, false, uav.params.power) +
                           uav_leg_energy(mug.norm(), 0.0, true, uav.params.power);
    launch(uav, plan, 0.0, nullptr);
    SortieOutcome out;
    double now = 0.0;
    double hover_done = -1.0;
    while (now < max_time) {
        if (hover_done >= 0.0 && now >= hover_done) {
            if (complete_hover(uav, now, nullptr)) out.picked_up = true;
            hover_done = -1.0;
        }
        MugSighting s{"mug1", mug, mug_waiting, std::nullopt};
        UavContext ctx{env, now, 1.0, {0.0, 0.0}, 0.0, s};
        UavTickResult r = uav_tick(uav, ctx);
        uav = std::move(r.agent);
        if (r.schedule_hover_completion) hover_done = *r.schedule_hover_completion;
        out.min_charge = std::min(out.min_charge, uav.battery.charge);
        if (r.emergency_landed) out.emergency = true;
        if (r.docked_now) out.docked = true;
        now += 1.0;
        if (uav.mode == UavMode::DockedCharging || uav.mode == UavMode::EmergencyLand) break;
    }
    out.uav = uav;
    return out;
}

}  // namespace

TEST(Uav, RecoverySortieBringsTheMugHome) {
    const SortieOutcome o = fly_recovery(make_uav("uav1", UavParams{}, {0.0, 0.0}), {3000.0, 0.0}, true, 5.0, 3600.0);
    EXPECT_TRUE(o.docked);
    EXPECT_TRUE(o.picked_up);
    EXPECT_FALSE(o.emergency);
    EXPECT_EQ(o.uav.mode, UavMode::DockedCharging);
    // Out unloaded, one minute hovering while hooking on, back loaded: hand arithmetic at 10 m/s.
    const double expect = 250.0 * 300.0 / 3600.0 + 350.0 * 60.0 / 3600.0 + 250.0 * 1.3 * 300.0 / 3600.0;
    EXPECT_NEAR(100.0 - o.uav.battery.charge, expect, 0.5);
}

TEST(Uav, MissingMugMeansPickupFailed) {
    const SortieOutcome o = fly_recovery(make_uav("uav1", UavParams{}, {0.0, 0.0}), {2000.0, 0.0}, false, 5.0, 3600.0);
    EXPECT_TRUE(o.docked);
    EXPECT_FALSE(o.picked_up);
}

TEST(Uav, SearchFindsAnOffsetMug) {
    UavAgent uav = make_uav("uav1", UavParams{}, {0.0, 0.0});
    const Environment env;
    SortiePlan plan;
    plan.objective = SortieObjective::Recover;
    plan.mug_id = "mug1";
    plan.station = {2000.0, 0.0};
    plan.search_sigma = 50.0;
    plan.energy_estimate = 40.0;
    launch(uav, plan, 0.0, nullptr);
    const Vec2 truth{2060.0, 70.0};
    double now = 0.0;
    bool hovering_at_mug = false;
    for (; now < 3600.0 && !hovering_at_mug; now += 1.0) {
        UavContext ctx{env, now, 1.0, {0.0, 0.0}, 0.0, MugSighting{"mug1", truth, true, std::nullopt}};
        UavTickResult r = uav_tick(uav, ctx);
        uav = std::move(r.agent);
        if (r.schedule_hover_completion) hovering_at_mug = true;
        ASSERT_NE(uav.mode, UavMode::TransitBack) << "gave up at t=" << now;
    }
    EXPECT_TRUE(hovering_at_mug);
    EXPECT_LE(distance(uav.position, truth), uav.params.capture_radius);
    EXPECT_GT(uav.search_distance, 0.0);
}

TEST(Uav, ReserveGuardPreventsEmergencyLandings) {
    for (int i = 0; i < 1000; ++i) {
        Gen g(case_seed(41, i));
        UavAgent uav = make_uav("uav1", UavParams{}, {0.0, 0.0});
        uav.battery.charge = g.uniform(20.0, 100.0);
        const double range = g.uniform(200.0, 15000.0);
        const double bearing = g.uniform(0.0, 2.0 * std::numbers::pi);
        const Vec2 mug{range * std::cos(bearing), range * std::sin(bearing)};
        const SortieOutcome o = fly_recovery(uav, mug, g.coin(0.8), g.uniform(5.0, 100.0), 20000.0);
        ASSERT_FALSE(o.emergency) << "case " << i;
        ASSERT_TRUE(o.docked) << "case " << i;
        ASSERT_GE(o.min_charge, uav.params.emergency_floor()) << "case " << i;
    }
}

TEST(Uav, AbortCommandTurnsHome) {
    UavAgent uav = make_uav("uav1", UavParams{}, {0.0, 0.0});
    SortiePlan plan;
    plan.station = {5000.0, 0.0};
    plan.energy_estimate = 50.0;
    launch(uav, plan, 0.0, nullptr);
    OperatorCommand c;
    c.verb = CommandVerb::AbortSortie;
    EXPECT_TRUE(apply_uav_command(uav, c, 10.0, nullptr));
    EXPECT_EQ(uav.mode, UavMode::TransitBack);
    EXPECT_FALSE(apply_uav_command(uav, c, 11.0, nullptr));
}

TEST(Uav, EmergencyFloorLandsInPlace) {
    const Environment env;
    UavAgent uav = make_uav("uav1", UavParams{}, {0.0, 0.0});
    SortiePlan plan;
    plan.station = {50000.0, 0.0};
    plan.enforce_reserve = false;
    launch(uav, plan, 0.0, nullptr);
    bool landed = false;
    for (double now = 0.0; now < 5000.0 && !landed; now += 1.0) {
        UavTickResult r = uav_tick(uav, UavContext{env, now, 1.0, {0.0, 0.0}, 0.0, std::nullopt});
        uav = std::move(r.agent);
        landed = r.emergency_landed;
        ASSERT_GE(uav.battery.charge, 0.0);
    }
    EXPECT_TRUE(landed);
    EXPECT_EQ(uav.mode, UavMode::EmergencyLand);
    const UavAgent before = uav;
    const UavTickResult r = uav_tick(uav, UavContext{env, 6000.0, 1.0, {0.0, 0.0}, 0.0, std::nullopt});
    EXPECT_EQ(r.agent.battery.charge, before.battery.charge);
    EXPECT_EQ(r.agent.position, before.position);
}

// ---- USV and dock ----

TEST(Usv, TenKilometreLegTakesTenThousandSeconds) {
    const Environment env;
    UsvParams p;
    p.speed = 1.0;
    UsvAgent a = make_usv("usv", p, {0.0, 0.0}, {{10000.0, 0.0}, {0.0, 0.0}});
    int ticks = 0;
    while (a.waypoint == 0 && ticks < 20000) {
        a = usv_tick(a, env, ticks, 1.0).agent;
        ++ticks;
    }
    EXPECT_EQ(ticks, 10000);
    EXPECT_EQ(a.position, (Vec2{10000.0, 0.0}));
}

TEST(Usv, EmptyTrackHoldsStation) {
    const Environment env;
    UsvAgent a = make_usv("usv", UsvParams{}, {5.0, 6.0}, {});
    for (int t = 0; t < 100; ++t) a = usv_tick(a, env, t, 1.0).agent;
    EXPECT_EQ(a.position, (Vec2{5.0, 6.0}));
    EXPECT_EQ(make_report(a, 0.0).mode, "STATION_KEEPING");
}

TEST(Usv, PredictMatchesStepping) {
    const Environment env;
    UsvAgent a = make_usv("usv", UsvParams{}, {0.0, 0.0}, {{0, 0}, {1500, 0}, {1500, 1500}, {0, 1500}});
    const Vec2 predicted = predict_usv_position(a, 4321.0);
    for (int t = 0; t < 4321; ++t) a = usv_tick(a, env, t, 1.0).agent;
    EXPECT_NEAR(predicted.east, a.position.east, 1e-6);
    EXPECT_NEAR(predicted.north, a.position.north, 1e-6);
}

TEST(Usv, SolarDayNetOfHotel) {
    const Environment env;
    UsvParams p;
    p.hotel_power = 5.0;
    p.battery = EnergyStore::make(5000.0, 1000.0, 24.0, 0.0);
    UsvAgent a = make_usv("usv", p, {0.0, 0.0}, {});
    double harvested = 0.0, consumed = 0.0;
    for (int t = 0; t < 86400; t += 10) {
        const UsvTickResult r = usv_tick(a, env, t, 10.0);
        harvested += r.harvested_wh;
        consumed += r.consumed_wh;
        a = r.agent;
    }
    // Half-sine of 50 W peak over 12 h: 50 * 12 * 2 / pi Wh.
    EXPECT_NEAR(harvested, 50.0 * 12.0 * 2.0 / std::numbers::pi, 0.01 * 382.0);
    EXPECT_NEAR(consumed, 120.0, 1e-6);
    EXPECT_NEAR(a.battery.charge, 1000.0 + harvested - consumed, 1e-6);
    EXPECT_NEAR(a.battery.ledger_residual(), 0.0, 1e-9);
}

TEST(Dock, SixtyWhPerHour) {
    EnergyStore usv = EnergyStore::make(2000.0, 1000.0, 24.0, 0.0);
    EnergyStore uav = EnergyStore::make(100.0, 20.0, 22.2, 0.0);
    double moved = 0.0;
    for (int t = 0; t < 3600; ++t) {
        const DockTransfer d = dock_transfer(usv, uav, 60.0, 1.0, 200.0);
        usv = d.usv;
        uav = d.uav;
        moved += d.transferred_wh;
    }
    EXPECT_NEAR(moved, 60.0, 1e-9);
    EXPECT_NEAR(uav.charge, 80.0, 1e-9);
    EXPECT_NEAR(usv.charge, 940.0, 1e-9);
}

TEST(Dock, StopsAtHeadroomAndFloor) {
    const EnergyStore usv = EnergyStore::make(2000.0, 1000.0, 24.0, 0.0);
    const EnergyStore nearly_full = EnergyStore::make(100.0, 99.99, 22.2, 0.0);
    EXPECT_NEAR(dock_transfer(usv, nearly_full, 60.0, 60.0, 0.0).transferred_wh, 0.01, 1e-12);
    const EnergyStore empty_uav = EnergyStore::make(100.0, 0.0, 22.2, 0.0);
    EXPECT_NEAR(dock_transfer(usv, empty_uav, 60.0, 60.0, 999.5).transferred_wh, 0.5, 1e-12);
    EXPECT_EQ(dock_transfer(usv, empty_uav, 60.0, 60.0, 1000.0).transferred_wh, 0.0);
}

TEST(Dock, TransferConservesEnergy) {
    for (int i = 0; i < 1000; ++i) {
        Gen g(case_seed(51, i));
        const EnergyStore usv = EnergyStore::make(2000.0, g.uniform(0.0, 2000.0), 24.0, 0.0);
        const EnergyStore uav = EnergyStore::make(100.0, g.uniform(0.0, 100.0), 22.2, 0.0);
        const DockTransfer d = dock_transfer(usv, uav, g.uniform(0.0, 200.0), g.uniform(0.1, 60.0), g.uniform(0.0, 500.0));
        ASSERT_NEAR(usv.charge + uav.charge, d.usv.charge + d.uav.charge, 1e-9) << "case " << i;
        ASSERT_GE(d.transferred_wh, 0.0);
        ASSERT_LE(d.uav.charge, d.uav.capacity + 1e-12);
    }
}
