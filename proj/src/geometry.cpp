#include "npclab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace npclab {

namespace {

// state layout helpers for the joint geodesic systems
OdeRhs geodesic_rhs(const Model& model) {
    const int n = model.dim();
    return [&model, n](double, const Vec& y) {
        Vec x = y.head(n), v = y.tail(n);
        if (!model.in_domain(x)) throw DomainError("left chart domain");
        Tensor3 G = model.christoffel(x);
        Vec out(2 * n);
        out.head(n) = v;
        out.tail(n) = -G.contract(v, v);
        return out;
    };
}

}  // namespace

GeodesicPath::GeodesicPath(std::vector<double> t, std::vector<Vec> x, std::vector<Vec> v,
                           std::vector<Vec> a, double speed)
    : t_(std::move(t)), x_(std::move(x)), v_(std::move(v)), a_(std::move(a)), speed_(speed) {
    if (t_.size() < 2 || t_.size() != x_.size() || t_.size() != v_.size() ||
        t_.size() != a_.size())
        throw UsageError("GeodesicPath: inconsistent sample arrays");
}

int GeodesicPath::segment(double t) const {
    double span = t_.back() - t_.front();
    if (t < t_.front() - 1e-9 * span || t > t_.back() + 1e-9 * span)
        throw UsageError("GeodesicPath: parameter " + format_num(t) + " outside window [" +
                         format_num(t_.front()) + "," + format_num(t_.back()) + "]");
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    int i = static_cast<int>(it - t_.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(t_.size()) - 2);
}

Vec GeodesicPath::point_at(double t) const {
    int i = segment(t);
    if (t == t_[i]) return x_[i];
    return hermite5_value(t, t_[i], t_[i + 1], x_[i], v_[i], a_[i], x_[i + 1], v_[i + 1],
                          a_[i + 1]);
}

Vec GeodesicPath::velocity_at(double t) const {
    int i = segment(t);
    if (t == t_[i]) return v_[i];
    return hermite5_derivative(t, t_[i], t_[i + 1], x_[i], v_[i], a_[i], x_[i + 1], v_[i + 1],
                               a_[i + 1]);
}

Vec GeodesicPath::unit_tangent_at(const Model& model, double t) const {
    Vec v = velocity_at(t);
    return v / model.norm(point_at(t), v);
}

GeodesicPath geodesic_ivp(const Model& model, const Vec& x0, const Vec& v0, double t0, double t1,
                          const StepControl& ctl) {
    const int n = model.dim();
    double speed = model.norm(x0, v0);
    if (!(speed > 0)) throw UsageError("geodesic_ivp: zero initial speed");
    if (!(t1 > t0)) throw UsageError("geodesic_ivp: need t1 > t0");
    Vec y0(2 * n);
    y0.head(n) = x0;
    y0.tail(n) = v0;
    OdeSolution sol = integrate_dp45(geodesic_rhs(model), y0, t0, t1, ctl);
    std::vector<Vec> xs(sol.y.size()), vs(sol.y.size()), as(sol.y.size());
    for (size_t i = 0; i < sol.y.size(); ++i) {
        xs[i] = sol.y[i].head(n);
        vs[i] = sol.y[i].tail(n);
        as[i] = sol.f[i].tail(n);
    }
    return GeodesicPath(std::move(sol.t), std::move(xs), std::move(vs), std::move(as), speed);
}

Vec exp_map(const Model& model, const Vec& x, const Vec& v, const StepControl& ctl) {
    if (model.norm(x, v) == 0.0) return x;
    return geodesic_ivp(model, x, v, 0.0, 1.0, ctl).points().back();
}

GeodesicPath extend_geodesic(const Model& model, const GeodesicPath& path, double t0, double t1,
                             const StepControl& ctl) {
    if (t0 >= path.t_begin() && t1 <= path.t_end()) return path;
    std::vector<double> ts;
    std::vector<Vec> xs, vs, as;
    if (t0 < path.t_begin()) {
        // integrate backwards: flow from the left end with reversed velocity;
        // accelerations are even under time reversal
        Vec xb = path.points().front(), vb = path.velocities().front();
        GeodesicPath back = geodesic_ivp(model, xb, -vb, 0.0, path.t_begin() - t0, ctl);
        const auto& bt = back.times();
        for (size_t i = bt.size(); i-- > 1;) {
            ts.push_back(path.t_begin() - bt[i]);
            xs.push_back(back.points()[i]);
            vs.push_back(-back.velocities()[i]);
            as.push_back(back.accelerations()[i]);
        }
    }
    for (size_t i = 0; i < path.times().size(); ++i) {
        ts.push_back(path.times()[i]);
        xs.push_back(path.points()[i]);
        vs.push_back(path.velocities()[i]);
        as.push_back(path.accelerations()[i]);
    }
    if (t1 > path.t_end()) {
        Vec xe = path.points().back(), ve = path.velocities().back();
        GeodesicPath fwd = geodesic_ivp(model, xe, ve, path.t_end(), t1, ctl);
        for (size_t i = 1; i < fwd.times().size(); ++i) {
            ts.push_back(fwd.times()[i]);
            xs.push_back(fwd.points()[i]);
            vs.push_back(fwd.velocities()[i]);
            as.push_back(fwd.accelerations()[i]);
        }
    }
    return GeodesicPath(std::move(ts), std::move(xs), std::move(vs), std::move(as), path.speed());
}

// joint transport of m columns along the geodesic restarted at (x(t_from), v(t_from))
static std::vector<Mat> transport_columns(const Model& model, const GeodesicPath& path,
                                          const Mat& W0, double t_from,
                                          const std::vector<double>& at_times,
                                          const StepControl& ctl) {
    const int n = model.dim();
    const int m = static_cast<int>(W0.cols());
    for (double t : at_times)
        if (t < t_from - 1e-12) throw UsageError("parallel transport: requested time before start");

    Vec y0(2 * n + n * m);
    y0.head(n) = path.point_at(t_from);
    y0.segment(n, n) = path.velocity_at(t_from);
    for (int c = 0; c < m; ++c) y0.segment(2 * n + c * n, n) = W0.col(c);

    OdeRhs rhs = [&model, n, m](double, const Vec& y) {
        Vec x = y.head(n), v = y.segment(n, n);
        if (!model.in_domain(x)) throw DomainError("left chart domain");
        Tensor3 G = model.christoffel(x);
        Vec out(y.size());
        out.head(n) = v;
        out.segment(n, n) = -G.contract(v, v);
        for (int c = 0; c < m; ++c)
            out.segment(2 * n + c * n, n) = -G.contract(v, y.segment(2 * n + c * n, n));
        return out;
    };

    double t_last = std::max(at_times.empty() ? t_from : at_times.back(), t_from + 1e-12);
    OdeSolution sol = integrate_dp45(rhs, y0, t_from, t_last, ctl, &at_times);

    std::vector<Mat> out;
    out.reserve(at_times.size());
    size_t k = 0;
    for (double t : at_times) {
        while (k + 1 < sol.t.size() && sol.t[k] < t - 1e-12) ++k;
        Mat W(n, m);
        for (int c = 0; c < m; ++c) W.col(c) = sol.y[k].segment(2 * n + c * n, n);
        out.push_back(std::move(W));
    }
    return out;
}

std::vector<Vec> parallel_transport(const Model& model, const GeodesicPath& path, const Vec& w,
                                    double t_from, const std::vector<double>& at_times,
                                    const StepControl& ctl) {
    Mat W0(model.dim(), 1);
    W0.col(0) = w;
    auto mats = transport_columns(model, path, W0, t_from, at_times, ctl);
    std::vector<Vec> out(mats.size());
    for (size_t i = 0; i < mats.size(); ++i) out[i] = mats[i].col(0);
    return out;
}

std::vector<Vec> parallel_transport(const Model& model, const GeodesicPath& path, const Vec& w,
                                    const StepControl& ctl) {
    return parallel_transport(model, path, w, path.t_begin(), path.times(), ctl);
}

FramePath parallel_frame(const Model& model, const GeodesicPath& path,
                         const std::vector<double>& at_times, const StepControl& ctl) {
    const int n = model.dim();
    Vec x0 = path.point_at(at_times.empty() ? path.t_begin() : at_times.front());
    double t0 = at_times.empty() ? path.t_begin() : at_times.front();
    Mat E0 = orthonormal_basis(model, x0, path.velocity_at(t0));
    // transport the normal columns; the tangent column is v/speed along the way
    Mat N0 = E0.rightCols(n - 1);
    auto mats = n > 1 ? transport_columns(model, path, N0, t0, at_times, ctl) : std::vector<Mat>{};
    FramePath fp;
    fp.t = at_times;
    fp.frames.reserve(at_times.size());
    for (size_t i = 0; i < at_times.size(); ++i) {
        Mat E(n, n);
        E.col(0) = path.velocity_at(at_times[i]) / path.speed();
        if (n > 1) E.rightCols(n - 1) = mats[i];
        fp.frames.push_back(std::move(E));
    }
    return fp;
}

JacobiField jacobi_ivp(const Model& model, const GeodesicPath& path, const Vec& J0, const Vec& J0p,
                       const std::vector<double>& at_times, const StepControl& ctl) {
    const int n = model.dim();
    Vec y0(4 * n);
    double t0 = at_times.empty() ? path.t_begin() : at_times.front();
    y0.head(n) = path.point_at(t0);
    y0.segment(n, n) = path.velocity_at(t0);
    y0.segment(2 * n, n) = J0;
    y0.segment(3 * n, n) = J0p;

    OdeRhs rhs = [&model, n](double, const Vec& y) {
        Vec x = y.head(n), v = y.segment(n, n), J = y.segment(2 * n, n), W = y.segment(3 * n, n);
        if (!model.in_domain(x)) throw DomainError("left chart domain");
        Tensor3 G = model.christoffel(x);
        Vec out(4 * n);
        out.head(n) = v;
        out.segment(n, n) = -G.contract(v, v);
        // dJ/dt = W - Gamma(v, J); DW/dt = -R(J, v)v  =>  dW/dt = -R - Gamma(v, W)
        out.segment(2 * n, n) = W - G.contract(v, J);
        out.segment(3 * n, n) = -model.curvature(x, J, v, v) - G.contract(v, W);
        return out;
    };

    double t_last = at_times.empty() ? path.t_end() : at_times.back();
    OdeSolution sol = integrate_dp45(rhs, y0, t0, std::max(t_last, t0 + 1e-12), ctl, &at_times);

    JacobiField f;
    f.t = at_times;
    size_t k = 0;
    for (double t : at_times) {
        while (k + 1 < sol.t.size() && sol.t[k] < t - 1e-12) ++k;
        f.J.push_back(sol.y[k].segment(2 * n, n));
        f.Jp.push_back(sol.y[k].segment(3 * n, n));
    }
    return f;
}

JacobiField jacobi_ivp(const Model& model, const GeodesicPath& path, const Vec& J0, const Vec& J0p,
                       const StepControl& ctl) {
    return jacobi_ivp(model, path, J0, J0p, path.times(), ctl);
}

std::pair<double, double> jacobi_residual(const Model& model, const GeodesicPath& path,
                                          const JacobiField& f) {
    double r1 = 0, r2 = 0;
    for (size_t i = 1; i + 1 < f.t.size(); ++i) {
        double hm = f.t[i] - f.t[i - 1], hp = f.t[i + 1] - f.t[i];
        if (std::abs(hp - hm) > 1e-9 * (hp + hm)) continue;  // only uniform interior nodes
        Vec x = path.point_at(f.t[i]);
        Vec v = path.velocity_at(f.t[i]);
        Tensor3 G = model.christoffel(x);
        Vec dJ = (f.J[i + 1] - f.J[i - 1]) / (hp + hm);
        Vec covJ = dJ + G.contract(v, f.J[i]);
        Vec dW = (f.Jp[i + 1] - f.Jp[i - 1]) / (hp + hm);
        Vec covW = dW + G.contract(v, f.Jp[i]);
        Vec rhs = -model.curvature(x, f.J[i], v, v);
        r1 = std::max(r1, model.norm(x, Vec(covJ - f.Jp[i])));
        r2 = std::max(r2, model.norm(x, Vec(covW - rhs)));
    }
    return {r1, r2};
}

// ------------------------------------------------------------------- BVP

namespace {

// arclength of the straight chart segment from x to y (16-point Gauss-Legendre)
double chart_segment_length(const Model& model, const Vec& x, const Vec& y) {
    static const double gl_x[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                   0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                   0.9445750230732326, 0.9894009349916499};
    static const double gl_w[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                   0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                   0.0622535239386479, 0.0271524594117541};
    Vec d = y - x;
    double acc = 0;
    for (int i = 0; i < 8; ++i) {
        for (double s : {0.5 - 0.5 * gl_x[i], 0.5 + 0.5 * gl_x[i]}) {
            Vec p = x + s * d;
            if (!model.in_domain(p)) return model.norm(x, d);  // fallback seed
            acc += 0.5 * gl_w[i] * model.norm(p, d);
        }
    }
    return acc;
}

double scaled_residual(const Vec& g, double scale) { return g.cwiseAbs().maxCoeff() / scale; }

}  // namespace

namespace {

// one shooting direction; never throws on stalls, reports what it reached
BvpResult bvp_shoot_newton(const Model& model, const Vec& x, const Vec& y,
                           const BvpOptions& opts) {
    const int n = model.dim();
    const double chart_scale = std::max({1.0, x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff()});
    const Mat gy = model.metric(y);

    Vec d = y - x;
    if (d.cwiseAbs().maxCoeff() <= 1e-15 * chart_scale) return {Vec::Zero(n), 0.0, 0, true, false};

    const double inf = std::numeric_limits<double>::infinity();
    auto shoot = [&](const Vec& v) -> Vec {
        try {
            return exp_map(model, x, v, opts.step) - y;
        } catch (const DomainExitError&) {
            return Vec::Constant(n, inf);
        }
    };
    // merit: residual in the metric at the target, which bounds the distance error
    auto merit = [&](const Vec& g) {
        return g.allFinite() ? std::sqrt(std::max(0.0, g.dot(gy * g))) : inf;
    };
    auto accepted_res = [&](const Vec& v, const Vec& g, double res_g) {
        return scaled_residual(g, chart_scale) <= opts.tol &&
               res_g <= opts.tol * std::max(1.0, model.norm(x, v));
    };

    // the chart straight line seeds the direction; its g-arclength bounds
    // d(x,y) from above, so probe magnitudes down the ray for the best start
    double seed_len = chart_segment_length(model, x, y);
    Vec dir = d / model.norm(x, d);
    Vec v = seed_len * dir, g = shoot(v);
    double res = merit(g);
    for (int k = 1; k <= 10; ++k) {
        Vec vk = (seed_len / std::pow(2.0, k)) * dir;
        Vec gk = shoot(vk);
        if (merit(gk) < res) {
            v = vk;
            g = gk;
            res = merit(gk);
        }
    }
    if (!g.allFinite()) return {Vec::Zero(n), inf, 0, false, false};

    Mat J(n, n);
    bool jac_fresh = false;
    auto fd_jacobian = [&](const Vec& vv, const Vec& gg) {
        double vmag = std::max(1e-3, vv.cwiseAbs().maxCoeff());
        for (int k = 0; k < n; ++k) {
            double h = 1.5e-8 * vmag;
            Vec vp = vv;
            vp[k] += h;
            Vec gp = shoot(vp);
            if (!gp.allFinite()) {
                vp[k] = vv[k] - h;
                gp = shoot(vp);
                J.col(k) = (gg - gp) / h;
            } else {
                J.col(k) = (gp - gg) / h;
            }
        }
        jac_fresh = true;
    };
    fd_jacobian(v, g);

    int it = 0;
    while (it < opts.max_iter) {
        if (accepted_res(v, g, res)) return {v, scaled_residual(g, chart_scale), it, true, false};
        Vec delta = J.fullPivLu().solve(-g);
        if (!delta.allFinite()) {
            if (!jac_fresh) {
                fd_jacobian(v, g);
                continue;
            }
            break;
        }
        double alpha = 1.0;
        Vec v_new, g_new;
        double res_new = inf;
        bool step_taken = false;
        for (int half = 0; half < 25; ++half) {
            v_new = v + alpha * delta;
            g_new = shoot(v_new);
            res_new = merit(g_new);
            if (res_new < res * (1.0 - 1e-4 * alpha)) {
                step_taken = true;
                break;
            }
            alpha *= 0.5;
        }
        ++it;
        if (!step_taken) {
            if (!jac_fresh) {
                fd_jacobian(v, g);  // the Broyden approximation went bad; retry
                continue;
            }
            break;  // fresh Jacobian cannot decrease: numerical floor reached
        }
        Vec dv = v_new - v, dg = g_new - g;
        double res_old = res;
        v = v_new;
        g = g_new;
        res = res_new;
        if (alpha == 1.0 && res_new < 0.25 * res_old) {
            // quadratic phase: a Broyden update is enough for the next step
            J += (dg - J * dv) * dv.transpose() / dv.squaredNorm();
            jac_fresh = false;
        } else {
            fd_jacobian(v, g);
        }
    }

    bool conv = accepted_res(v, g, res);
    bool warned = !conv && res <= opts.accept_tol * std::max(1.0, model.norm(x, v));
    return {v, scaled_residual(g, chart_scale), it, conv, warned};
}

}  // namespace

BvpResult geodesic_bvp(const Model& model, const Vec& x, const Vec& y, const BvpOptions& opts) {
    model.metric(x);  // domain checks
    model.metric(y);

    // product geodesics split into factor geodesics; solve blockwise
    if (auto* prod = dynamic_cast<const ProductModel*>(&model)) {
        int n1 = prod->first_dim();
        int n2 = model.dim() - n1;
        BvpResult r1 = geodesic_bvp(prod->first(), x.head(n1), y.head(n1), opts);
        BvpResult r2 = geodesic_bvp(prod->second(), x.tail(n2), y.tail(n2), opts);
        Vec v(model.dim());
        v.head(n1) = r1.v;
        v.tail(n2) = r2.v;
        return {v, std::max(r1.residual, r2.residual), r1.iterations + r2.iterations,
                r1.converged && r2.converged, r1.warned || r2.warned};
    }

    BvpResult fwd = bvp_shoot_newton(model, x, y, opts);
    if (fwd.converged) return fwd;

    // Shooting from a chart region where the endpoint map degenerates (deep
    // near the half-space boundary) can stall; the reversed problem is often
    // well conditioned, and reversing its geodesic recovers v at x.
    BvpResult rev = bvp_shoot_newton(model, y, x, opts);
    if (rev.converged || (rev.warned && rev.residual < fwd.residual)) {
        try {
            GeodesicPath back = geodesic_ivp(model, y, rev.v, 0, 1, opts.step);
            Vec v = -back.velocities().back();
            Vec g = exp_map(model, x, v, opts.step) - y;
            double chart_scale =
                std::max({1.0, x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff()});
            double res_chart = g.cwiseAbs().maxCoeff() / chart_scale;
            double res_g = std::sqrt(std::max(0.0, g.dot(model.metric(y) * g)));
            bool conv = res_chart <= opts.tol && res_g <= opts.tol * std::max(1.0, model.norm(x, v));
            bool warned = !conv && res_g <= opts.accept_tol * std::max(1.0, model.norm(x, v));
            if (conv || (warned && res_chart < fwd.residual))
                return {v, res_chart, fwd.iterations + rev.iterations, conv, warned};
        } catch (const DomainExitError&) {
            // fall through to the forward result
        }
    }

    if (fwd.warned || fwd.converged) return fwd;
    throw SolverError("geodesic_bvp: no convergence after " + std::to_string(fwd.iterations) +
                          " iterations (scaled residual " + format_num(fwd.residual) + ")",
                      fwd.residual);
}

double distance(const Model& model, const Vec& x, const Vec& y, const BvpOptions& opts) {
    BvpResult r = geodesic_bvp(model, x, y, opts);
    return model.norm(x, r.v);
}

Vec log_map(const Model& model, const Vec& x, const Vec& y, const BvpOptions& opts) {
    return geodesic_bvp(model, x, y, opts).v;
}

// ------------------------------------------------------------- projection

ProjectionResult project_to_geodesic(const Model& model, const GeodesicPath& path, const Vec& x,
                                     const ProjectOptions& opts) {
    double ta = opts.window ? opts.window->first : path.t_begin();
    double tb = opts.window ? opts.window->second : path.t_end();
    if (!(tb > ta)) throw UsageError("project_to_geodesic: empty window");

    auto dist_at = [&](double t) { return distance(model, path.point_at(t), x, opts.bvp); };
    // derivative of the distance objective, up to the factor -d(x,gamma(t)):
    // g(t) = <log_{gamma(t)}(x), gamma'(t)>; positive while the foot is ahead
    auto slope_at = [&](double t) {
        Vec p = path.point_at(t);
        Vec lg = log_map(model, p, x, opts.bvp);
        return model.inner(p, lg, path.velocity_at(t));
    };

    // golden-section bracketing of the convex objective
    const double gr = 0.6180339887498949;
    double a = ta, b = tb;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = dist_at(c), fd = dist_at(d);
    for (int i = 0; i < 40 && (b - a) > 1e-3 * (tb - ta); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = dist_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = dist_at(d);
        }
    }

    ProjectionResult out;
    out.boundary = false;
    double ga = slope_at(a), gb = slope_at(b);
    if (ga <= 0 && a <= ta + 1e-9 * (tb - ta)) {
        out.boundary = true;
        out.t = ta;
    } else if (gb >= 0 && b >= tb - 1e-9 * (tb - ta)) {
        out.boundary = true;
        out.t = tb;
    } else {
        // local quadratic refinement: secant/bisection root of the slope
        double lo = a, hi = b, glo = ga, ghi = gb;
        if (glo < 0 || ghi > 0) {
            // bracket failure from noise at the window edge: fall back to edges
            out.boundary = true;
            out.t = (glo < 0) ? ta : tb;
        } else {
            double t_root = 0.5 * (lo + hi);
            for (int i = 0; i < 80 && (hi - lo) > opts.t_tol * std::max(1.0, std::abs(hi)); ++i) {
                double denom = glo - ghi;
                double t =
                    (std::abs(denom) > 1e-300) ? (lo + (hi - lo) * glo / denom) : 0.5 * (lo + hi);
                double margin = 1e-3 * (hi - lo);
                t = std::clamp(t, lo + margin, hi - margin);
                double gt = slope_at(t);
                if (gt > 0) {
                    lo = t;
                    glo = gt;
                } else {
                    hi = t;
                    ghi = gt;
                }
                t_root = t;
                if (std::abs(gt) < 1e-14 * std::max(1.0, path.speed())) break;
            }
            out.t = t_root;
        }
    }
    out.foot = path.point_at(out.t);
    out.dist = dist_at(out.t);
    if (out.dist > 1e-12) {
        Vec lg = log_map(model, out.foot, x, opts.bvp);
        out.optimality =
            std::abs(model.inner(out.foot, lg, path.unit_tangent_at(model, out.t))) / out.dist;
    } else {
        out.optimality = 0.0;
    }
    return out;
}

ProjectionResult project_with_expansion(const Model& model, GeodesicPath& path, const Vec& x,
                                        double t_center, double half_window,
                                        const ProjectOptions& opts, int max_doublings) {
    double hw = half_window;
    for (int i = 0; i <= max_doublings; ++i) {
        double ta = t_center - hw, tb = t_center + hw;
        path = extend_geodesic(model, path, ta, tb);
        ProjectOptions o = opts;
        o.window = {std::max(ta, path.t_begin()), std::min(tb, path.t_end())};
        ProjectionResult r = project_to_geodesic(model, path, x, o);
        if (!r.boundary) return r;
        hw *= 2;
    }
    throw SolverError("project_with_expansion: minimizer still at window boundary", 0);
}

// ----------------------------------------------------------------- random

Vec random_unit_tangent(const Model& model, const Vec& x, Rng& rng) {
    std::normal_distribution<double> nd;
    const int n = model.dim();
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = nd(rng);
    double vn = model.norm(x, v);
    if (vn < 1e-12) return random_unit_tangent(model, x, rng);
    return v / vn;
}

Vec random_ball_point(const Model& model, const Vec& center, double radius, Rng& rng) {
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    Vec dir = random_unit_tangent(model, center, rng);
    double r = radius * std::pow(ud(rng), 1.0 / model.dim());
    if (r < 1e-12) return center;
    return exp_map(model, center, r * dir);
}

}  // namespace npclab
