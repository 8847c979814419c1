#include <doctest.h>

#include <cmath>

#include "mvns/metric_inner.hpp"
#include "mvns/rereference.hpp"
#include "test_support.hpp"

using namespace mvns;
using namespace mvns::testing;

namespace {

SolverState state_at(const Grid& g, double t, double t0) {
    SolverState s;
    s.t = t;
    s.t0 = t0;
    s.v = vortex(g, 2.0);
    return s;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / (n - 1));
    return out;
}

}  // namespace

TEST_CASE("no trigger at the reference time") {
    const Grid g = Grid::make(16);
    const auto m = DomainMotion::shear(0.3, 2.0, 1.0);
    const ReferencePolicy p;
    const RereferenceDecision d =
        evaluate_rereference(p, m, 0.2, 0.2, g, OperatorBundle::build(m, 0.2, 0.2, g), default_probes(g));
    CHECK_FALSE(d.trigger);
    CHECK(d.deviation == 0.0);
    CHECK_THROWS_AS(
        evaluate_rereference(p, m, 0.3, 0.2, g, OperatorBundle::build(m, 0.3, 0.0, g), default_probes(g)),
        std::invalid_argument);
}

TEST_CASE("identity motion triggers only on the interval bound") {
    const Grid g = Grid::make(16);
    const auto m = DomainMotion::identity(2.0);
    ReferencePolicy p;
    p.max_interval = 0.25;
    for (double t : {0.05, 0.1, 0.2}) {
        const auto d = evaluate_rereference(p, m, 0.0, t, g, OperatorBundle::build(m, t, 0.0, g), default_probes(g));
        CHECK_FALSE(d.trigger);
        CHECK(d.deviation == 0.0);
    }
    const auto d = evaluate_rereference(p, m, 0.0, 0.25, g, OperatorBundle::build(m, 0.25, 0.0, g), default_probes(g));
    CHECK(d.trigger);
    CHECK(d.by_interval);
    const DeltaEstimate est = estimate_delta(p, m, g, {0.0, 0.5}, 16);
    CHECK(est.delta == 0.25);
}

TEST_CASE("first trigger is monotone in the safety factor") {
    const Grid g = Grid::make(16);
    const auto m = DomainMotion::shear(0.3, 2.0, 1.0);
    double prev = 0.0;
    for (double safety : {0.05, 0.1, 0.2, 0.4}) {
        ReferencePolicy p;
        p.safety = safety;
        const double delta = estimate_delta(p, m, g, {0.0, 0.3}, 32).delta;
        CHECK(delta >= prev);
        prev = delta;
    }
}

TEST_CASE("re-referencing at the current reference is a no-op") {
    const Grid g = Grid::make(16);
    const SolverState s = state_at(g, 0.3, 0.3);
    CHECK(bitwise_equal(rereference(s, DomainMotion::shear(0.3, 2.0, 1.0), 0.3).v, s.v));
    CHECK_THROWS_AS(rereference(s, DomainMotion::shear(0.3, 2.0, 1.0), 0.4), std::invalid_argument);
}

TEST_CASE("identity and rotation hand-offs keep the lattice field") {
    const Grid g = Grid::make(16);
    const SolverState s = state_at(g, 0.4, 0.1);
    CHECK(bitwise_equal(rereference(s, DomainMotion::identity(1.0), 0.4).v, s.v));
    const SolverState r = rereference(s, DomainMotion::rotation(1.0, 1.0), 0.4);
    CHECK(rel_diff(r.v, s.v) < 1e-14);
    CHECK(r.t0 == 0.4);
}

TEST_CASE("shear rebasing matches the hand-composed Jacobian") {
    const auto m = DomainMotion::shear(0.3, 2.0, 1.0);
    const double t0 = 0.2, t = 0.5;
    const double ds = 0.3 * (std::sin(2.0 * t) - std::sin(2.0 * t0));
    const PointGeom p = m.rebased(t0).eval(t, 0.4, 0.6);
    CHECK(p.J[0][0] == doctest::Approx(1.0));
    CHECK(p.J[0][1] == doctest::Approx(ds).epsilon(1e-14));
    CHECK(p.J[1][0] == doctest::Approx(0.0));
    CHECK(p.J[1][1] == doctest::Approx(1.0));
}

TEST_CASE("hand-off preserves the physical field and its moving norms") {
    const Grid g = Grid::make(16);
    for (const auto& m : builtin_motions(1.0)) {
        const SolverState s = state_at(g, 0.5, 0.2);
        const SolverState r = rereference(s, m, 0.5);
        const MetricData before = metric_tensors(evaluate_composite(m, 0.5, 0.2, g));
        const MetricData after = metric_tensors(evaluate_composite(m, 0.5, 0.5, g));
        CHECK(norm_0t(r.v, after) == doctest::Approx(norm_0t(s.v, before)).epsilon(1e-12));
        CHECK(norm_1t(r.v, after) == doctest::Approx(norm_1t(s.v, before)).epsilon(1e-12));
        CHECK(r.v.walls_zero());
    }
}

TEST_CASE("faster motions re-reference no later") {
    const Grid g = Grid::make(16);
    const ReferencePolicy p;
    const auto times = linspace(0.0, 0.5, 6);
    const double slow = estimate_delta(p, DomainMotion::shear(0.3, 1.0, 1.0), g, times, 32).delta;
    const double fast = estimate_delta(p, DomainMotion::shear(0.3, 2.0, 1.0), g, times, 32).delta;
    CHECK(fast <= slow);
    const double r1 = estimate_delta(p, DomainMotion::rotation(1.0, 1.0), g, times, 32).delta;
    const double r2 = estimate_delta(p, DomainMotion::rotation(2.0, 1.0), g, times, 32).delta;
    CHECK(r2 <= r1);
}

TEST_CASE("delta estimate is stable under scan refinement") {
    const Grid g = Grid::make(16);
    const ReferencePolicy p;
    const auto times = linspace(0.0, 0.5, 6);
    for (const auto& m : builtin_motions(1.0)) {
        const DeltaEstimate a = estimate_delta(p, m, g, times, 16), b = estimate_delta(p, m, g, times, 32);
        CHECK(std::abs(a.delta - b.delta) <= a.resolution + 1e-15);
        CHECK(b.delta > 0.0);
        CHECK(b.delta <= p.max_interval);
        CHECK(b.first_trigger.size() == times.size());
    }
}

TEST_CASE("a trigger at the first scan step is reported") {
    const Grid g = Grid::make(16);
    ReferencePolicy p;
    p.safety = 1e-6;
    CHECK_THROWS_AS(estimate_delta(p, DomainMotion::wavy(0.1, 2.0, 1.0), g, {0.0}, 8), std::runtime_error);
}

TEST_CASE("policy validation") {
    ReferencePolicy p;
    CHECK_NOTHROW(p.validate());
    p.safety = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ReferencePolicy{};
    p.C0 = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ReferencePolicy{};
    p.max_interval = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ReferencePolicy{};
    CHECK(p.proxy_threshold() == doctest::Approx(40.0 * p.deviation_threshold()));
    p.drift_threshold = 0.7;
    CHECK(p.proxy_threshold() == 0.7);
}
