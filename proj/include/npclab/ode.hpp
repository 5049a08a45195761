#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "npclab/common.hpp"

namespace npclab {

struct StepControl {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double h_max = 0.1;
    double h_init = 1e-3;
    double h_min_factor = 1e-14;  // h_min = h_min_factor * span
};

// Accepted-step trajectory; f holds the RHS at each node so callers can
// build Hermite interpolants.
struct OdeSolution {
    std::vector<double> t;
    std::vector<Vec> y;
    std::vector<Vec> f;
};

using OdeRhs = std::function<Vec(double, const Vec&)>;

// Dormand-Prince 5(4) with PI-free step control and FSAL.
//
// Integrates forward only (t1 > t0). If `mandatory` is non-null the steps are
// clipped so every listed time (assumed sorted, inside [t0,t1]) lands exactly
// on a node. The RHS may throw DomainError to signal that the state left the
// chart; after repeated step-halving this surfaces as DomainExitError carrying
// the last valid time.
inline OdeSolution integrate_dp45(const OdeRhs& rhs, const Vec& y0, double t0, double t1,
                                  const StepControl& ctl = {},
                                  const std::vector<double>* mandatory = nullptr) {
    static const double A[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double C[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    // 5th order weights equal A[6]; error weights = b5 - b4
    static const double E[7] = {71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                                -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

    if (!(t1 > t0)) throw UsageError("integrate_dp45: need t1 > t0");
    const double span = t1 - t0;
    const double h_min = ctl.h_min_factor * span;

    OdeSolution sol;
    sol.t.push_back(t0);
    sol.y.push_back(y0);

    Vec k[7];
    double t = t0;
    Vec y = y0;
    try {
        k[0] = rhs(t, y);
    } catch (const DomainError& e) {
        throw DomainExitError(std::string("initial state outside chart: ") + e.what(), t0);
    }
    sol.f.push_back(k[0]);

    size_t next_mand = 0;
    auto next_mandatory_after = [&](double tt) {
        if (!mandatory) return t1;
        while (next_mand < mandatory->size() && (*mandatory)[next_mand] <= tt + 1e-15 * span)
            ++next_mand;
        return next_mand < mandatory->size() ? std::min((*mandatory)[next_mand], t1) : t1;
    };

    double h = std::min({ctl.h_init, ctl.h_max, span});
    const int n = static_cast<int>(y0.size());
    Vec y_new(n), err(n);

    while (t < t1 - 1e-14 * span) {
        double t_target = next_mandatory_after(t);
        if (t_target <= t + 1e-15 * span) t_target = t1;
        h = std::min({h, ctl.h_max, t_target - t});
        bool step_ok = false;
        try {
            for (int i = 1; i < 7; ++i) {
                Vec yi = y;
                for (int j = 0; j < i; ++j) yi += (h * A[i][j]) * k[j];
                k[i] = rhs(t + C[i] * h, yi);
            }
            y_new = y;
            for (int j = 0; j < 6; ++j) y_new += (h * A[6][j]) * k[j];
            err.setZero();
            for (int j = 0; j < 7; ++j) err += (h * E[j]) * k[j];
            if (!y_new.allFinite() || !err.allFinite()) throw DomainError("non-finite state");
            step_ok = true;
        } catch (const DomainError&) {
            step_ok = false;
        }

        double err_norm = std::numeric_limits<double>::infinity();
        if (step_ok) {
            double acc = 0;
            for (int i = 0; i < n; ++i) {
                double sc = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
                double e = err[i] / sc;
                acc += e * e;
            }
            err_norm = std::sqrt(acc / n);
        }

        if (err_norm <= 1.0) {
            t += h;
            y = y_new;
            k[0] = k[6];  // FSAL
            sol.t.push_back(t);
            sol.y.push_back(y);
            sol.f.push_back(k[0]);
            double grow = err_norm > 0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
        } else {
            double shrink = std::isfinite(err_norm) ? std::max(0.9 * std::pow(err_norm, -0.2), 0.1) : 0.1;
            h *= shrink;
            if (h < h_min)
                throw DomainExitError("integration step underflow (left chart domain or singular)", t);
        }
    }
    return sol;
}

// Quintic Hermite evaluation on [ta,tb] from endpoint values, first and
// second derivatives (the geodesic systems hand us accelerations for free).
inline Vec hermite5_value(double t, double ta, double tb, const Vec& ya, const Vec& va,
                          const Vec& aa, const Vec& yb, const Vec& vb, const Vec& ab) {
    double h = tb - ta;
    double s = (t - ta) / h;
    double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    double H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    double H2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    double H3 = 10 * s3 - 15 * s4 + 6 * s5;
    double H4 = -4 * s3 + 7 * s4 - 3 * s5;
    double H5 = 0.5 * (s3 - 2 * s4 + s5);
    return H0 * ya + (H1 * h) * va + (H2 * h * h) * aa + H3 * yb + (H4 * h) * vb +
           (H5 * h * h) * ab;
}

inline Vec hermite5_derivative(double t, double ta, double tb, const Vec& ya, const Vec& va,
                               const Vec& aa, const Vec& yb, const Vec& vb, const Vec& ab) {
    double h = tb - ta;
    double s = (t - ta) / h;
    double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    double d0 = (-30 * s2 + 60 * s3 - 30 * s4) / h;
    double d1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
    double d2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4) * h;
    double d3 = (30 * s2 - 60 * s3 + 30 * s4) / h;
    double d4 = -12 * s2 + 28 * s3 - 15 * s4;
    double d5 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4) * h;
    return d0 * ya + d1 * va + d2 * aa + d3 * yb + d4 * vb + d5 * ab;
}

// Cubic Hermite evaluation on [ta,tb] from endpoint values and derivatives.
inline Vec hermite_value(double t, double ta, double tb, const Vec& ya, const Vec& fa,
                         const Vec& yb, const Vec& fb) {
    double h = tb - ta;
    double s = (t - ta) / h;
    double s2 = s * s, s3 = s2 * s;
    double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * ya + (h10 * h) * fa + h01 * yb + (h11 * h) * fb;
}

inline Vec hermite_derivative(double t, double ta, double tb, const Vec& ya, const Vec& fa,
                              const Vec& yb, const Vec& fb) {
    double h = tb - ta;
    double s = (t - ta) / h;
    double s2 = s * s;
    double d00 = (6 * s2 - 6 * s) / h, d10 = 3 * s2 - 4 * s + 1;
    double d01 = (-6 * s2 + 6 * s) / h, d11 = 3 * s2 - 2 * s;
    return d00 * ya + d10 * fa + d01 * yb + d11 * fb;
}

}  // namespace npclab
