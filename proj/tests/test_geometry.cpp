#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "npclab/geometry.hpp"

using namespace npclab;

namespace {

std::vector<ModelPtr> npc_catalog() {
    return {
        make_euclidean(2),
        make_half_space(2, 1.0),
        make_half_space(3, 1.0),
        make_product(make_half_space(2, 1.0), make_euclidean(1)),
        make_product(make_half_space(2, 1.0), make_half_space(2, 1.0)),
        make_revolution("cosh"),
        make_revolution("poly", {1.0}),
    };
}

std::vector<double> linspace(double a, double b, int m) {
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) out[i] = a + (b - a) * i / (m - 1);
    return out;
}

}  // namespace

TEST_CASE("geodesic initial value problems against closed forms") {
    auto e2 = make_euclidean(2);
    Vec x0(2), v0(2);
    x0 << 0, 0;
    v0 << 1, 0;
    GeodesicPath line = geodesic_ivp(*e2, x0, v0, 0, 3);
    CHECK((line.point_at(3.0) - (Vec(2) << 3, 0).finished()).norm() <= 1e-10);

    auto h2 = make_half_space(2, 1.0);
    Vec p0(2), u0(2);
    p0 << 0, 1;
    u0 << 0, 1;
    GeodesicPath vert = geodesic_ivp(*h2, p0, u0, 0, 1);
    CHECK(vert.point_at(1.0)[1] == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
    CHECK(std::abs(vert.point_at(1.0)[0]) <= 1e-12);

    auto prod = make_product(make_half_space(2, 1.0), make_euclidean(1));
    Vec q0(3), w0(3);
    q0 << 0, 1, 0;
    w0 << 0, 1, 0;
    GeodesicPath pv = geodesic_ivp(*prod, q0, w0, 0, 1);
    CHECK(pv.point_at(1.0)[1] == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
    CHECK(std::abs(pv.point_at(1.0)[2]) <= 1e-12);

    CHECK_THROWS_AS(geodesic_ivp(*e2, x0, Vec::Zero(2), 0, 1), UsageError);
}

TEST_CASE("speed conservation across the catalog") {
    Rng rng(101);
    for (const auto& m : npc_catalog()) {
        Vec x0 = m->base_point();
        Vec v0 = random_unit_tangent(*m, x0, rng);
        GeodesicPath g = geodesic_ivp(*m, x0, v0, 0, 20);
        double worst = 0;
        for (double t : linspace(g.t_begin(), g.t_end(), 101)) {
            double s = m->norm(g.point_at(t), g.velocity_at(t));
            worst = std::max(worst, std::abs(s - g.speed()) / g.speed());
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("dense interpolation is consistent with re-integration") {
    auto h2 = make_half_space(2, 1.0);
    Vec x0(2), v0(2);
    x0 << 0.3, 1.0;
    v0 << 0.8, -0.6;
    GeodesicPath g = geodesic_ivp(*h2, x0, v0, 0, 4);
    GeodesicPath g2 = geodesic_ivp(*h2, x0, v0, 0, 2.77);
    CHECK((g.point_at(2.77) - g2.points().back()).norm() <= 1e-7);
}

TEST_CASE("extend_geodesic covers both directions") {
    auto h2 = make_half_space(2, 1.0);
    Vec x0(2), v0(2);
    x0 << 0, 1;
    v0 << 0, 1;
    GeodesicPath g = geodesic_ivp(*h2, x0, v0, 0, 1);
    GeodesicPath big = extend_geodesic(*h2, g, -2, 2);
    CHECK(big.point_at(-2.0)[1] == doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
    CHECK(big.point_at(2.0)[1] == doctest::Approx(std::exp(2.0)).epsilon(1e-9));
    CHECK(big.velocity_at(-1.5)[1] == doctest::Approx(std::exp(-1.5)).epsilon(1e-7));
}

TEST_CASE("parallel transport oracles") {
    auto e2 = make_euclidean(2);
    Vec x0(2), v0(2), w(2);
    x0 << 0, 0;
    v0 << 1, 0;
    w << 0.3, 0.7;
    GeodesicPath line = geodesic_ivp(*e2, x0, v0, 0, 5);
    for (const Vec& wt : parallel_transport(*e2, line, w)) CHECK((wt - w).norm() <= 1e-10);

    // conformal-scaling oracle on the vertical geodesic: components (e^t, 0)
    auto h2 = make_half_space(2, 1.0);
    Vec p0(2), u0(2), e1(2);
    p0 << 0, 1;
    u0 << 0, 1;
    e1 << 1, 0;
    GeodesicPath vert = geodesic_ivp(*h2, p0, u0, 0, 2);
    std::vector<double> ts = linspace(0, 2, 9);
    auto wt = parallel_transport(*h2, vert, e1, 0, ts);
    for (size_t i = 0; i < ts.size(); ++i) {
        CHECK(wt[i][0] == doctest::Approx(std::exp(ts[i])).epsilon(1e-8));
        CHECK(std::abs(wt[i][1]) <= 1e-8 * std::exp(ts[i]));
        Vec x = vert.point_at(ts[i]);
        CHECK(h2->norm(x, wt[i]) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::abs(h2->inner(x, wt[i], vert.velocity_at(ts[i]))) <= 1e-6);
    }

    // product transport is blockwise
    auto prod = make_product(make_half_space(2, 1.0), make_euclidean(1));
    Vec q0(3), qv(3), qw(3);
    q0 << 0, 1, 0;
    qv << 0, 1, 0;
    qw << 1, 0, 2;
    GeodesicPath pv = geodesic_ivp(*prod, q0, qv, 0, 2);
    auto pwt = parallel_transport(*prod, pv, qw, 0, ts);
    for (size_t i = 0; i < ts.size(); ++i) {
        CHECK(pwt[i][0] == doctest::Approx(std::exp(ts[i])).epsilon(1e-8));
        CHECK(pwt[i][2] == doctest::Approx(2.0).epsilon(1e-10));
    }
}

TEST_CASE("parallel frames stay g-orthonormal") {
    Rng rng(103);
    for (const auto& m : npc_catalog()) {
        Vec x0 = m->base_point();
        Vec v0 = random_unit_tangent(*m, x0, rng);
        GeodesicPath g = geodesic_ivp(*m, x0, v0, 0, 10);
        FramePath fp = parallel_frame(*m, g, linspace(0, 10, 21));
        for (size_t i = 0; i < fp.t.size(); ++i) {
            Mat gram = fp.frames[i].transpose() * m->metric(g.point_at(fp.t[i])) * fp.frames[i];
            CHECK((gram - Mat::Identity(m->dim(), m->dim())).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }
}

TEST_CASE("jacobi field oracles") {
    auto e2 = make_euclidean(2);
    Vec x0(2), v0(2), J0(2), J0p(2);
    x0 << 0, 0;
    v0 << 1, 0;
    J0 << 0, 0.5;
    J0p << 0, 0.25;
    GeodesicPath line = geodesic_ivp(*e2, x0, v0, 0, 4);
    JacobiField jf = jacobi_ivp(*e2, line, J0, J0p, linspace(0, 4, 9));
    for (size_t i = 0; i < jf.t.size(); ++i)
        CHECK((jf.J[i] - (J0 + jf.t[i] * J0p)).norm() <= 1e-9);

    // |J(t)| = sinh t in curvature -1 for J0 = 0, J0p a unit normal
    auto h2 = make_half_space(2, 1.0);
    Vec p0(2), u0(2), n0(2);
    p0 << 0, 1;
    u0 << 0, 1;
    n0 << 1, 0;
    GeodesicPath vert = geodesic_ivp(*h2, p0, u0, 0, 10);
    JacobiField hj = jacobi_ivp(*h2, vert, Vec::Zero(2), n0, linspace(0, 10, 41));
    for (size_t i = 1; i < hj.t.size(); ++i) {
        double t = hj.t[i];
        double got = h2->norm(vert.point_at(t), hj.J[i]);
        double tol = t <= 5.0 ? 1e-6 : 1e-4;
        CHECK(std::abs(got - std::sinh(t)) <= tol * std::sinh(t));
    }

    // the tangent field is a parallel Jacobi field on any model
    for (const auto& m : npc_catalog()) {
        Rng rng(7);
        Vec b = m->base_point();
        Vec dir = random_unit_tangent(*m, b, rng);
        GeodesicPath g = geodesic_ivp(*m, b, dir, 0, 5);
        JacobiField tf = jacobi_ivp(*m, g, dir, Vec::Zero(m->dim()), linspace(0, 5, 11));
        for (size_t i = 0; i < tf.t.size(); ++i) {
            CHECK((tf.J[i] - g.velocity_at(tf.t[i])).norm() <=
                  1e-7 * std::max(1.0, g.velocity_at(tf.t[i]).norm()));
            CHECK(m->norm(g.point_at(tf.t[i]), tf.Jp[i]) <= 1e-7);
        }
    }
}

TEST_CASE("jacobi ODE residual stays small at interior samples") {
    auto h3 = make_half_space(3, 1.0);
    Rng rng(107);
    Vec b = h3->base_point();
    Vec dir = random_unit_tangent(*h3, b, rng);
    GeodesicPath g = geodesic_ivp(*h3, b, dir, 0, 5);
    JacobiField jf =
        jacobi_ivp(*h3, g, random_unit_tangent(*h3, b, rng), random_unit_tangent(*h3, b, rng),
                   linspace(0, 5, 201));
    auto [r1, r2] = jacobi_residual(*h3, g, jf);
    // central differences limit the check to O(h^2)
    CHECK(r1 <= 1e-2);
    CHECK(r2 <= 1e-2);
}

TEST_CASE("jacobi square-norm is convex on npc models") {
    Rng rng(109);
    for (const auto& m : npc_catalog()) {
        Vec b = m->base_point();
        Vec dir = random_unit_tangent(*m, b, rng);
        GeodesicPath g = geodesic_ivp(*m, b, dir, 0, 8);
        auto ts = linspace(0, 8, 81);
        JacobiField jf = jacobi_ivp(*m, g, random_unit_tangent(*m, b, rng),
                                    random_unit_tangent(*m, b, rng), ts);
        std::vector<double> sq(ts.size());
        for (size_t i = 0; i < ts.size(); ++i)
            sq[i] = std::pow(m->norm(g.point_at(ts[i]), jf.J[i]), 2);
        for (size_t i = 1; i + 1 < ts.size(); ++i) {
            double dd = sq[i + 1] - 2 * sq[i] + sq[i - 1];
            CHECK(dd >= -1e-8 * std::max(1.0, std::abs(sq[i])));
        }
    }
}

TEST_CASE("boundary value problems against closed forms") {
    auto e3 = make_euclidean(3);
    Vec a(3), b(3);
    a << 1, 2, 3;
    b << 4, 6, 3;
    BvpResult r = geodesic_bvp(*e3, a, b);
    CHECK(r.converged);
    CHECK((r.v - (b - a)).norm() <= 1e-8);
    CHECK(distance(*e3, a, b) == doctest::Approx(5.0).epsilon(1e-9));

    auto h2 = make_half_space(2, 1.0);
    Vec p(2), q(2);
    p << 0, 1;
    q << 0, std::exp(2.0);
    BvpResult hv = geodesic_bvp(*h2, p, q);
    CHECK(hv.converged);
    CHECK(hv.v[0] == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(hv.v[1] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(distance(*h2, p, q) == doctest::Approx(2.0).epsilon(1e-8));

    Vec s(2);
    s << 3, 1;
    CHECK(distance(*h2, p, s) == doctest::Approx(std::acosh(5.5)).epsilon(1e-8));

    // closed-form oracle agreement on random pairs, plus symmetry
    Rng rng(113);
    for (const auto& m : npc_catalog()) {
        Vec base = m->base_point();
        for (int trial = 0; trial < 5; ++trial) {
            Vec x = random_ball_point(*m, base, 3.0, rng);
            Vec y = random_ball_point(*m, base, 3.0, rng);
            double dxy = distance(*m, x, y);
            double dyx = distance(*m, y, x);
            CHECK(std::abs(dxy - dyx) <= 1e-8 * std::max(1.0, dxy));
            if (auto oracle = m->closed_form_distance(x, y))
                CHECK(dxy == doctest::Approx(*oracle).epsilon(1e-8));
        }
    }
}

TEST_CASE("exp/log inversion on random velocities") {
    Rng rng(127);
    for (const auto& m : npc_catalog()) {
        Vec x = m->base_point();
        for (double len : {0.5, 3.0, 10.0}) {
            Vec v = len * random_unit_tangent(*m, x, rng);
            Vec y = exp_map(*m, x, v);
            BvpResult r = geodesic_bvp(*m, x, y);
            CHECK((r.v - v).norm() <= 1e-6 * v.norm());
        }
    }
}

TEST_CASE("triangle inequality on random triples") {
    Rng rng(131);
    for (const auto& m : npc_catalog()) {
        Vec base = m->base_point();
        for (int trial = 0; trial < 10; ++trial) {
            Vec x = random_ball_point(*m, base, 3.0, rng);
            Vec y = random_ball_point(*m, base, 3.0, rng);
            Vec z = random_ball_point(*m, base, 3.0, rng);
            CHECK(distance(*m, x, z) <= distance(*m, x, y) + distance(*m, y, z) + 1e-8);
        }
    }
}

TEST_CASE("bvp failure reporting") {
    // far-apart points on the sphere chart: shooting through the antipode is
    // outside the solver's contract and must fail loudly, not silently
    auto s2 = make_sphere(2, 1.0);
    Vec a = Vec::Zero(2);
    Vec b(2);
    b << 1e8, 0;  // essentially the missing chart point
    CHECK_THROWS_AS(geodesic_bvp(*s2, a, b), SolverError);
}

TEST_CASE("domain exit reporting") {
    auto s2 = make_sphere(2, 1.0);
    Vec x0 = Vec::Zero(2), v0(2);
    v0 << 0.5, 0;  // g-unit: the chart metric at the origin has scale 2
    // the north pole sits at arclength pi from the chart origin; coordinates
    // blow up there and the integrator must report the exit time
    try {
        geodesic_ivp(*s2, x0, v0, 0, 10.0);
        CHECK(false);
    } catch (const DomainExitError& e) {
        CHECK(e.last_valid_t > 2.0);
        CHECK(e.last_valid_t < 10.0);
    }
}

TEST_CASE("projection onto geodesics") {
    auto e2 = make_euclidean(2);
    Vec x0(2), v0(2), p(2);
    x0 << 0, 0;
    v0 << 1, 0;
    p << 2, 5;
    GeodesicPath axis = geodesic_ivp(*e2, x0, v0, 0, 6);
    ProjectionResult pr = project_to_geodesic(*e2, axis, p);
    CHECK(!pr.boundary);
    CHECK(pr.t == doctest::Approx(2.0).epsilon(1e-7));
    CHECK((pr.foot - (Vec(2) << 2, 0).finished()).norm() <= 1e-6);
    CHECK(pr.optimality <= 1e-6);

    // half-plane oracle: the perpendicular from (1,1) to the y-axis geodesic
    // meets it at (0, sqrt 2)
    auto h2 = make_half_space(2, 1.0);
    Vec b0(2), u0(2), q(2);
    b0 << 0, 1;
    u0 << 0, 1;
    q << 1, 1;
    GeodesicPath vert = extend_geodesic(*h2, geodesic_ivp(*h2, b0, u0, 0, 2), -2, 2);
    ProjectionResult hr = project_to_geodesic(*h2, vert, q);
    CHECK(!hr.boundary);
    CHECK(hr.foot[0] == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(hr.foot[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
    CHECK(hr.t == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-6));
    CHECK(hr.dist == doctest::Approx(std::acosh(std::sqrt(2.0))).epsilon(1e-7));
    CHECK(hr.optimality <= 1e-6);

    // product splitting: projection acts factorwise
    auto prod = make_product(make_half_space(2, 1.0), make_euclidean(1));
    Vec g0(3), gv(3), gp(3);
    g0 << 0, 1, 0;
    gv << 0, 1, 0;
    gp << 1, 1, 0.7;
    GeodesicPath pvert = extend_geodesic(*prod, geodesic_ivp(*prod, g0, gv, 0, 2), -2, 2);
    ProjectionResult prr = project_to_geodesic(*prod, pvert, gp);
    CHECK(prr.foot[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(prr.foot[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(std::abs(prr.foot[2]) <= 1e-6);

    // boundary warning when the minimizer is outside the window
    ProjectOptions narrow;
    narrow.window = {{1.0, 2.0}};
    ProjectionResult br = project_to_geodesic(*e2, axis, p, narrow);
    CHECK(br.boundary);
    CHECK(br.t == doctest::Approx(2.0));

    // expansion helper finds the interior minimizer from a too-small window
    GeodesicPath axis2 = geodesic_ivp(*e2, x0, v0, 0, 0.5);
    ProjectionResult er = project_with_expansion(*e2, axis2, p, 0.25, 0.25);
    CHECK(!er.boundary);
    CHECK(er.t == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("projection is distance non-increasing on npc models") {
    Rng rng(137);
    for (const auto& m : npc_catalog()) {
        Vec base = m->base_point();
        Vec dir = random_unit_tangent(*m, base, rng);
        GeodesicPath g = extend_geodesic(*m, geodesic_ivp(*m, base, dir, 0, 1), -8, 8);
        for (int trial = 0; trial < 5; ++trial) {
            Vec x = random_ball_point(*m, base, 3.0, rng);
            Vec y = random_ball_point(*m, base, 3.0, rng);
            ProjectionResult px = project_to_geodesic(*m, g, x);
            ProjectionResult py = project_to_geodesic(*m, g, y);
            double dproj = std::abs(px.t - py.t) * g.speed();
            CHECK(dproj <= distance(*m, x, y) + 1e-6);
        }
    }
}
