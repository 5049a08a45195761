#pragma once

#include <optional>
#include <utility>

#include "npclab/models.hpp"
#include "npclab/ode.hpp"

namespace npclab {

// A constant-speed geodesic sampled on [t_begin, t_end]; dense values come
// from cubic Hermite interpolation between accepted integrator steps.
class GeodesicPath {
public:
    GeodesicPath(std::vector<double> t, std::vector<Vec> x, std::vector<Vec> v, std::vector<Vec> a,
                 double speed);

    double t_begin() const { return t_.front(); }
    double t_end() const { return t_.back(); }
    double speed() const { return speed_; }
    int dim() const { return static_cast<int>(x_.front().size()); }
    const std::vector<double>& times() const { return t_; }
    const std::vector<Vec>& points() const { return x_; }
    const std::vector<Vec>& velocities() const { return v_; }
    const std::vector<Vec>& accelerations() const { return a_; }

    Vec point_at(double t) const;
    Vec velocity_at(double t) const;
    // unit tangent in the metric
    Vec unit_tangent_at(const Model& model, double t) const;

private:
    int segment(double t) const;
    std::vector<double> t_;
    std::vector<Vec> x_, v_, a_;
    double speed_;
};

// exp_x(s * v0) for s in [t0, t1]; throws DomainExitError (with last valid t)
// if the solution leaves the chart.
GeodesicPath geodesic_ivp(const Model& model, const Vec& x0, const Vec& v0, double t0, double t1,
                          const StepControl& ctl = {});

// endpoint of the unit-time geodesic with initial velocity v
Vec exp_map(const Model& model, const Vec& x, const Vec& v, const StepControl& ctl = {});

// extend an existing geodesic to a larger window (re-integrates as needed)
GeodesicPath extend_geodesic(const Model& model, const GeodesicPath& path, double t0, double t1,
                             const StepControl& ctl = {});

// Parallel transport of w from path parameter t_from to t_to; returns the
// transported vector at every requested time (sorted, within the window).
std::vector<Vec> parallel_transport(const Model& model, const GeodesicPath& path, const Vec& w,
                                    double t_from, const std::vector<double>& at_times,
                                    const StepControl& ctl = {});

// convenience: transport along the whole path, values at path.times()
std::vector<Vec> parallel_transport(const Model& model, const GeodesicPath& path, const Vec& w,
                                    const StepControl& ctl = {});

// Parallel orthonormal frame along a geodesic: frames[k] is an n x n matrix,
// column 0 the unit tangent, columns 1..n-1 the transported normals.
struct FramePath {
    std::vector<double> t;
    std::vector<Mat> frames;
};

FramePath parallel_frame(const Model& model, const GeodesicPath& path,
                         const std::vector<double>& at_times, const StepControl& ctl = {});

// Jacobi field along a geodesic; J and its covariant derivative Jp are stored
// at the requested times.
struct JacobiField {
    std::vector<double> t;
    std::vector<Vec> J;
    std::vector<Vec> Jp;
};

JacobiField jacobi_ivp(const Model& model, const GeodesicPath& path, const Vec& J0, const Vec& J0p,
                       const std::vector<double>& at_times, const StepControl& ctl = {});

JacobiField jacobi_ivp(const Model& model, const GeodesicPath& path, const Vec& J0, const Vec& J0p,
                       const StepControl& ctl = {});

// max over interior samples of |D_t J - Jp| and |D_t Jp + R(J,v)v| by central
// differences; a cheap a-posteriori check of the ODE residual
std::pair<double, double> jacobi_residual(const Model& model, const GeodesicPath& path,
                                          const JacobiField& field);

struct BvpOptions {
    double tol = 1e-9;        // scaled residual for "converged" (chart and metric units)
    double accept_tol = 1e-5; // stalled results below this are returned with `warned`
    int max_iter = 60;
    StepControl step;
    BvpOptions() {
        step.abs_tol = 1e-11;
        step.rel_tol = 1e-11;
        step.h_max = 0.05;
    }
};

struct BvpResult {
    Vec v;            // initial velocity at x with exp_x(v) = y, |v|_g = d(x,y)
    double residual;  // scaled chart residual actually achieved
    int iterations;
    bool converged;
    bool warned;  // stalled above tol but below accept_tol
};

// Shooting solve of exp_x(v) = y by damped Newton with finite-difference
// Jacobian (Broyden-refreshed), seeded by the chart straight line rescaled to
// the chart segment's arclength. Residuals are scaled by the coordinate size
// of the endpoints. Throws SolverError on non-convergence.
BvpResult geodesic_bvp(const Model& model, const Vec& x, const Vec& y, const BvpOptions& opts = {});

double distance(const Model& model, const Vec& x, const Vec& y, const BvpOptions& opts = {});

// log map: the initial velocity returned by the BVP
Vec log_map(const Model& model, const Vec& x, const Vec& y, const BvpOptions& opts = {});

struct ProjectionResult {
    double t;          // parameter of the foot on the geodesic
    Vec foot;
    double dist;       // d(x, foot)
    bool boundary;     // minimizer pinned at the window edge
    double optimality; // |<log_foot(x), unit tangent>| / d(x, foot)
};

struct ProjectOptions {
    std::optional<std::pair<double, double>> window;  // defaults to the path window
    double t_tol = 1e-9;
    BvpOptions bvp;
};

// Nearest-point projection onto the geodesic window. Golden-section bracketing
// of the (convex, in NPC) distance objective, then local quadratic refinement
// driven by the first-variation derivative.
ProjectionResult project_to_geodesic(const Model& model, const GeodesicPath& path, const Vec& x,
                                     const ProjectOptions& opts = {});

// projection that doubles the window (re-extending the geodesic) until the
// minimizer is interior; gives up after max_doublings
ProjectionResult project_with_expansion(const Model& model, GeodesicPath& path, const Vec& x,
                                        double t_center, double half_window,
                                        const ProjectOptions& opts = {}, int max_doublings = 10);

// deterministic point in the g-ball of the given radius around center
Vec random_ball_point(const Model& model, const Vec& center, double radius, Rng& rng);

// deterministic g-unit tangent vector at x
Vec random_unit_tangent(const Model& model, const Vec& x, Rng& rng);

}  // namespace npclab
