#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "npclab/common.hpp"

namespace npclab {

// A chart-based Riemannian model. A model is a single chart: an open subset of
// R^n with a smooth SPD metric field. Closed-form Christoffels/curvature are
// supplied where the catalog has them; the finite-difference fallbacks stay
// publicly exposed so tests can cross-check the two routes.
class Model {
public:
    virtual ~Model() = default;

    virtual std::string name() const = 0;
    virtual int dim() const = 0;
    // true iff sectional curvature <= 0 everywhere on the chart
    virtual bool npc() const = 0;
    virtual bool in_domain(const Vec& x) const;

    // symmetric positive-definite metric matrix at x
    Mat metric(const Vec& x) const;
    // Levi-Civita connection coefficients at x
    Tensor3 christoffel(const Vec& x) const;
    // R(u,v)w with the sign fixed by <R(u,v)v,u> = K(u^v) * gram(u,v)
    Vec curvature(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const;

    double inner(const Vec& x, const Vec& u, const Vec& v) const;
    double norm(const Vec& x, const Vec& v) const;
    // K(u^v); throws UsageError on a degenerate plane
    double sectional(const Vec& x, const Vec& u, const Vec& v) const;

    // generic routes, public so the closed forms can be tested against them
    Tensor3 christoffel_fd(const Vec& x, double h = 1e-5) const;
    Vec curvature_from_christoffel_fd(const Vec& x, const Vec& u, const Vec& v, const Vec& w,
                                      double h = 1e-5) const;

    // exact distance where the chart has one; used as a test oracle only
    virtual std::optional<double> closed_form_distance(const Vec& x, const Vec& y) const;

    // a chart point suitable as a generic base point
    virtual Vec base_point() const;

protected:
    void check_point(const Vec& x) const;
    virtual Mat metric_impl(const Vec& x) const = 0;
    virtual Tensor3 christoffel_impl(const Vec& x) const;
    virtual Vec curvature_impl(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const;
};

using ModelPtr = std::shared_ptr<const Model>;

// Flat R^n.
class EuclideanModel final : public Model {
public:
    explicit EuclideanModel(int n);
    std::string name() const override;
    int dim() const override { return n_; }
    bool npc() const override { return true; }
    std::optional<double> closed_form_distance(const Vec& x, const Vec& y) const override;

protected:
    Mat metric_impl(const Vec& x) const override;
    Tensor3 christoffel_impl(const Vec& x) const override;
    Vec curvature_impl(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const override;

private:
    int n_;
};

// Upper half-space chart {x_n > 0}, g = (1/(a x_n))^2 * I, curvature -a^2.
class HalfSpaceModel final : public Model {
public:
    HalfSpaceModel(int n, double a = 1.0);
    std::string name() const override;
    int dim() const override { return n_; }
    bool npc() const override { return true; }
    bool in_domain(const Vec& x) const override;
    std::optional<double> closed_form_distance(const Vec& x, const Vec& y) const override;
    Vec base_point() const override;
    double curvature_scale() const { return a_; }

protected:
    Mat metric_impl(const Vec& x) const override;
    Tensor3 christoffel_impl(const Vec& x) const override;
    Vec curvature_impl(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const override;

private:
    int n_;
    double a_;
};

// Round sphere of the given radius in the stereographic chart (misses one
// point). Positively curved; kept in the catalog as the guaranteed-failing
// fixture for the CAT(0) checkers.
class SphereModel final : public Model {
public:
    SphereModel(int n, double radius = 1.0);
    std::string name() const override;
    int dim() const override { return n_; }
    bool npc() const override { return false; }
    std::optional<double> closed_form_distance(const Vec& x, const Vec& y) const override;
    double radius() const { return radius_; }
    // inverse stereographic lift to the embedded sphere in R^{n+1}
    Vec lift(const Vec& x) const;
    // chart coordinates of a point given spherical "colatitude from chart
    // origin" along a unit chart direction (helper for fixtures)
    Vec chart_from_angle(const Vec& unit_dir, double angle) const;

protected:
    Mat metric_impl(const Vec& x) const override;
    Tensor3 christoffel_impl(const Vec& x) const override;
    Vec curvature_impl(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const override;

private:
    int n_;
    double radius_;
};

// Convex warping profile f for a surface of revolution: f > 0, f'' >= 0, so
// K = -f''/f <= 0.
struct RevolutionProfile {
    std::string name;
    std::vector<double> coeffs;  // for "poly": f = 1 + sum c_j r^{2(j+1)}, c_j >= 0
    std::function<double(double)> f, df, d2f;
};

RevolutionProfile make_profile(const std::string& name, const std::vector<double>& coeffs = {});

// Chart (r, theta) on R^2 with g = dr^2 + f(r)^2 dtheta^2.
class RevolutionModel final : public Model {
public:
    explicit RevolutionModel(RevolutionProfile profile);
    std::string name() const override;
    int dim() const override { return 2; }
    bool npc() const override { return true; }
    const RevolutionProfile& profile() const { return profile_; }
    double gauss_curvature(double r) const;

protected:
    Mat metric_impl(const Vec& x) const override;
    Tensor3 christoffel_impl(const Vec& x) const override;
    Vec curvature_impl(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const override;

private:
    RevolutionProfile profile_;
};

// Metric product of two models over the concatenated chart.
class ProductModel final : public Model {
public:
    ProductModel(ModelPtr first, ModelPtr second);
    std::string name() const override;
    int dim() const override { return n1_ + n2_; }
    bool npc() const override;
    bool in_domain(const Vec& x) const override;
    std::optional<double> closed_form_distance(const Vec& x, const Vec& y) const override;
    Vec base_point() const override;

    const Model& first() const { return *m1_; }
    const Model& second() const { return *m2_; }
    int first_dim() const { return n1_; }

protected:
    Mat metric_impl(const Vec& x) const override;
    Tensor3 christoffel_impl(const Vec& x) const override;
    Vec curvature_impl(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const override;

private:
    ModelPtr m1_, m2_;
    int n1_, n2_;
};

// Gram-Schmidt in the metric at x: returns an n x n matrix whose first column
// is v/|v|_g and whose remaining columns complete a g-orthonormal basis.
Mat orthonormal_basis(const Model& model, const Vec& x, const Vec& v);

// factory helpers
ModelPtr make_euclidean(int n);
ModelPtr make_half_space(int n, double a = 1.0);
ModelPtr make_sphere(int n, double radius = 1.0);
ModelPtr make_revolution(const std::string& profile, const std::vector<double>& coeffs = {});
ModelPtr make_product(ModelPtr a, ModelPtr b);

}  // namespace npclab
