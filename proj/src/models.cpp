#include "npclab/models.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace npclab {

std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

bool Model::in_domain(const Vec& x) const { return x.size() == dim() && x.allFinite(); }

void Model::check_point(const Vec& x) const {
    if (x.size() != dim())
        throw UsageError(name() + ": point has dimension " + std::to_string(x.size()) +
                         ", expected " + std::to_string(dim()));
    if (!in_domain(x)) throw DomainError(name() + ": point outside chart domain");
}

Mat Model::metric(const Vec& x) const {
    check_point(x);
    return metric_impl(x);
}

Tensor3 Model::christoffel(const Vec& x) const {
    check_point(x);
    return christoffel_impl(x);
}

Vec Model::curvature(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const {
    check_point(x);
    if (u.size() != dim() || v.size() != dim() || w.size() != dim())
        throw UsageError(name() + ": curvature arguments must match the model dimension");
    return curvature_impl(x, u, v, w);
}

double Model::inner(const Vec& x, const Vec& u, const Vec& v) const {
    return u.dot(metric(x) * v);
}

double Model::norm(const Vec& x, const Vec& v) const {
    return std::sqrt(std::max(0.0, inner(x, v, v)));
}

double Model::sectional(const Vec& x, const Vec& u, const Vec& v) const {
    Mat g = metric(x);
    double uu = u.dot(g * u), vv = v.dot(g * v), uv = u.dot(g * v);
    double gram = uu * vv - uv * uv;
    if (gram <= 1e-14 * uu * vv)
        throw UsageError(name() + ": degenerate plane in sectional curvature");
    return curvature(x, u, v, v).dot(g * u) / gram;
}

Tensor3 Model::christoffel_impl(const Vec& x) const { return christoffel_fd(x); }

Tensor3 Model::christoffel_fd(const Vec& x, double h) const {
    const int n = dim();
    // dg[l] = partial_l g
    std::vector<Mat> dg(n);
    for (int l = 0; l < n; ++l) {
        Vec xp = x, xm = x;
        xp[l] += h;
        xm[l] -= h;
        dg[l] = (metric(xp) - metric(xm)) / (2 * h);
    }
    Mat ginv = metric(x).inverse();
    Tensor3 gamma(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0;
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                gamma[k](i, j) = gamma[k](j, i) = 0.5 * s;
            }
    return gamma;
}

Vec Model::curvature_impl(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const {
    return curvature_from_christoffel_fd(x, u, v, w);
}

Vec Model::curvature_from_christoffel_fd(const Vec& x, const Vec& u, const Vec& v, const Vec& w,
                                         double h) const {
    const int n = dim();
    // R^l_{kij} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}
    std::vector<Tensor3> dG(n, Tensor3(n));
    for (int i = 0; i < n; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        Tensor3 gp = christoffel(xp), gm = christoffel(xm);
        for (int l = 0; l < n; ++l) dG[i][l] = (gp[l] - gm[l]) / (2 * h);
    }
    Tensor3 G = christoffel(x);
    Vec out = Vec::Zero(n);
    for (int l = 0; l < n; ++l) {
        double acc = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (u[i] == 0.0 || v[j] == 0.0) continue;
                double uivj = u[i] * v[j];
                for (int k = 0; k < n; ++k) {
                    if (w[k] == 0.0) continue;
                    double r = dG[i][l](j, k) - dG[j][l](i, k);
                    for (int m = 0; m < n; ++m)
                        r += G[l](i, m) * G[m](j, k) - G[l](j, m) * G[m](i, k);
                    acc += r * uivj * w[k];
                }
            }
        out[l] = acc;
    }
    return out;
}

std::optional<double> Model::closed_form_distance(const Vec&, const Vec&) const { return {}; }

Vec Model::base_point() const { return Vec::Zero(dim()); }

namespace {
// constant-curvature tensor: R(u,v)w = K (<v,w> u - <u,w> v), inner products in g
Vec constant_curvature_op(const Mat& g, double K, const Vec& u, const Vec& v, const Vec& w) {
    return K * (v.dot(g * w) * u - u.dot(g * w) * v);
}

// conformal metric g = e^{2 phi} I: Gamma^k_{ij} = d_j phi d^k_i + d_i phi d^k_j - d_k phi d_ij
Tensor3 conformal_christoffel(int n, const Vec& grad_phi) {
    Tensor3 gamma(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0;
                if (k == i) s += grad_phi[j];
                if (k == j) s += grad_phi[i];
                if (i == j) s -= grad_phi[k];
                gamma[k](i, j) = s;
            }
    return gamma;
}
}  // namespace

// ---------------------------------------------------------------- Euclidean

EuclideanModel::EuclideanModel(int n) : n_(n) {
    if (n < 1) throw UsageError("euclidean: dimension must be >= 1");
}

std::string EuclideanModel::name() const { return "euclidean(" + std::to_string(n_) + ")"; }

Mat EuclideanModel::metric_impl(const Vec&) const { return Mat::Identity(n_, n_); }

Tensor3 EuclideanModel::christoffel_impl(const Vec&) const { return Tensor3(n_); }

Vec EuclideanModel::curvature_impl(const Vec&, const Vec&, const Vec&, const Vec&) const {
    return Vec::Zero(n_);
}

std::optional<double> EuclideanModel::closed_form_distance(const Vec& x, const Vec& y) const {
    return (x - y).norm();
}

// ---------------------------------------------------------------- HalfSpace

HalfSpaceModel::HalfSpaceModel(int n, double a) : n_(n), a_(a) {
    if (n < 2) throw UsageError("half_space_hyperbolic: dimension must be >= 2");
    if (!(a > 0)) throw UsageError("half_space_hyperbolic: curvature scale must be > 0");
}

std::string HalfSpaceModel::name() const {
    return "half_space_hyperbolic(" + std::to_string(n_) + "," + format_num(a_) + ")";
}

bool HalfSpaceModel::in_domain(const Vec& x) const {
    return x.size() == n_ && x.allFinite() && x[n_ - 1] > 0;
}

Vec HalfSpaceModel::base_point() const {
    Vec x = Vec::Zero(n_);
    x[n_ - 1] = 1.0;
    return x;
}

Mat HalfSpaceModel::metric_impl(const Vec& x) const {
    double s = 1.0 / (a_ * x[n_ - 1]);
    return s * s * Mat::Identity(n_, n_);
}

Tensor3 HalfSpaceModel::christoffel_impl(const Vec& x) const {
    Vec grad_phi = Vec::Zero(n_);
    grad_phi[n_ - 1] = -1.0 / x[n_ - 1];
    return conformal_christoffel(n_, grad_phi);
}

Vec HalfSpaceModel::curvature_impl(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const {
    return constant_curvature_op(metric_impl(x), -a_ * a_, u, v, w);
}

std::optional<double> HalfSpaceModel::closed_form_distance(const Vec& x, const Vec& y) const {
    double q = 1.0 + (x - y).squaredNorm() / (2.0 * x[n_ - 1] * y[n_ - 1]);
    return std::acosh(std::max(1.0, q)) / a_;
}

// ------------------------------------------------------------------- Sphere

SphereModel::SphereModel(int n, double radius) : n_(n), radius_(radius) {
    if (n < 2) throw UsageError("sphere: dimension must be >= 2");
    if (!(radius > 0)) throw UsageError("sphere: radius must be > 0");
}

std::string SphereModel::name() const {
    return "sphere(" + std::to_string(n_) + "," + format_num(radius_) + ")";
}

Mat SphereModel::metric_impl(const Vec& x) const {
    double R2 = radius_ * radius_;
    double s = 2.0 * R2 / (R2 + x.squaredNorm());
    return s * s * Mat::Identity(n_, n_);
}

Tensor3 SphereModel::christoffel_impl(const Vec& x) const {
    double R2 = radius_ * radius_;
    Vec grad_phi = -2.0 / (R2 + x.squaredNorm()) * x;
    return conformal_christoffel(n_, grad_phi);
}

Vec SphereModel::curvature_impl(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const {
    return constant_curvature_op(metric_impl(x), 1.0 / (radius_ * radius_), u, v, w);
}

Vec SphereModel::lift(const Vec& x) const {
    double R2 = radius_ * radius_;
    double denom = x.squaredNorm() + R2;
    Vec s(n_ + 1);
    s.head(n_) = 2.0 * R2 / denom * x;
    s[n_] = radius_ * (x.squaredNorm() - R2) / denom;
    return s;
}

std::optional<double> SphereModel::closed_form_distance(const Vec& x, const Vec& y) const {
    double c = lift(x).dot(lift(y)) / (radius_ * radius_);
    return radius_ * std::acos(std::clamp(c, -1.0, 1.0));
}

Vec SphereModel::chart_from_angle(const Vec& unit_dir, double angle) const {
    // geodesics through the chart origin (the south pole) are straight chart
    // rays; colatitude angle maps to chart radius R tan(angle/2)
    return radius_ * std::tan(angle / 2.0) * unit_dir;
}

// --------------------------------------------------------------- Revolution

RevolutionProfile make_profile(const std::string& name, const std::vector<double>& coeffs) {
    RevolutionProfile p;
    p.name = name;
    p.coeffs = coeffs;
    if (name == "cosh") {
        p.f = [](double r) { return std::cosh(r); };
        p.df = [](double r) { return std::sinh(r); };
        p.d2f = [](double r) { return std::cosh(r); };
    } else if (name == "exp") {
        p.f = [](double r) { return std::exp(r); };
        p.df = [](double r) { return std::exp(r); };
        p.d2f = [](double r) { return std::exp(r); };
    } else if (name == "poly") {
        if (coeffs.empty()) throw UsageError("revolution poly profile needs coefficients");
        for (double c : coeffs)
            if (c < 0) throw UsageError("revolution poly profile needs nonnegative coefficients");
        auto c = coeffs;
        p.f = [c](double r) {
            double s = 1.0, rp = r * r;
            for (double cj : c) {
                s += cj * rp;
                rp *= r * r;
            }
            return s;
        };
        p.df = [c](double r) {
            double s = 0.0, rp = r;
            for (size_t j = 0; j < c.size(); ++j) {
                double e = 2.0 * (j + 1);
                s += c[j] * e * rp;
                rp *= r * r;
            }
            return s;
        };
        p.d2f = [c](double r) {
            double s = 0.0, rp = 1.0;
            for (size_t j = 0; j < c.size(); ++j) {
                double e = 2.0 * (j + 1);
                s += c[j] * e * (e - 1) * rp;
                rp *= r * r;
            }
            return s;
        };
    } else {
        throw UsageError("unknown revolution profile '" + name + "' (have: cosh, exp, poly)");
    }
    return p;
}

RevolutionModel::RevolutionModel(RevolutionProfile profile) : profile_(std::move(profile)) {}

std::string RevolutionModel::name() const {
    std::ostringstream os;
    os << "revolution_npc(" << profile_.name;
    for (double c : profile_.coeffs) os << "," << format_num(c);
    os << ")";
    return os.str();
}

double RevolutionModel::gauss_curvature(double r) const {
    return -profile_.d2f(r) / profile_.f(r);
}

Mat RevolutionModel::metric_impl(const Vec& x) const {
    Mat g = Mat::Identity(2, 2);
    double f = profile_.f(x[0]);
    g(1, 1) = f * f;
    return g;
}

Tensor3 RevolutionModel::christoffel_impl(const Vec& x) const {
    Tensor3 gamma(2);
    double f = profile_.f(x[0]), fp = profile_.df(x[0]);
    gamma[0](1, 1) = -f * fp;
    gamma[1](0, 1) = gamma[1](1, 0) = fp / f;
    return gamma;
}

Vec RevolutionModel::curvature_impl(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const {
    return constant_curvature_op(metric_impl(x), gauss_curvature(x[0]), u, v, w);
}

// ------------------------------------------------------------------ Product

ProductModel::ProductModel(ModelPtr first, ModelPtr second)
    : m1_(std::move(first)), m2_(std::move(second)) {
    if (!m1_ || !m2_) throw UsageError("product: null factor");
    n1_ = m1_->dim();
    n2_ = m2_->dim();
}

std::string ProductModel::name() const { return "product(" + m1_->name() + "," + m2_->name() + ")"; }

bool ProductModel::npc() const { return m1_->npc() && m2_->npc(); }

bool ProductModel::in_domain(const Vec& x) const {
    return x.size() == dim() && m1_->in_domain(x.head(n1_)) && m2_->in_domain(x.tail(n2_));
}

Vec ProductModel::base_point() const {
    Vec x(dim());
    x.head(n1_) = m1_->base_point();
    x.tail(n2_) = m2_->base_point();
    return x;
}

Mat ProductModel::metric_impl(const Vec& x) const {
    Mat g = Mat::Zero(dim(), dim());
    g.topLeftCorner(n1_, n1_) = m1_->metric(x.head(n1_));
    g.bottomRightCorner(n2_, n2_) = m2_->metric(x.tail(n2_));
    return g;
}

Tensor3 ProductModel::christoffel_impl(const Vec& x) const {
    Tensor3 g1 = m1_->christoffel(x.head(n1_));
    Tensor3 g2 = m2_->christoffel(x.tail(n2_));
    Tensor3 gamma(dim());
    for (int k = 0; k < n1_; ++k) gamma[k].topLeftCorner(n1_, n1_) = g1[k];
    for (int k = 0; k < n2_; ++k) gamma[n1_ + k].bottomRightCorner(n2_, n2_) = g2[k];
    return gamma;
}

Vec ProductModel::curvature_impl(const Vec& x, const Vec& u, const Vec& v, const Vec& w) const {
    Vec out(dim());
    out.head(n1_) = m1_->curvature(x.head(n1_), u.head(n1_), v.head(n1_), w.head(n1_));
    out.tail(n2_) = m2_->curvature(x.tail(n2_), u.tail(n2_), v.tail(n2_), w.tail(n2_));
    return out;
}

std::optional<double> ProductModel::closed_form_distance(const Vec& x, const Vec& y) const {
    auto d1 = m1_->closed_form_distance(x.head(n1_), y.head(n1_));
    auto d2 = m2_->closed_form_distance(x.tail(n2_), y.tail(n2_));
    if (d1 && d2) return std::hypot(*d1, *d2);
    return {};
}

// ---------------------------------------------------------------- utilities

Mat orthonormal_basis(const Model& model, const Vec& x, const Vec& v) {
    const int n = model.dim();
    Mat g = model.metric(x);
    double vn = std::sqrt(v.dot(g * v));
    if (!(vn > 0)) throw UsageError("orthonormal_basis: zero vector");
    Mat E(n, n);
    E.col(0) = v / vn;
    int filled = 1;
    for (int i = 0; i < n && filled < n; ++i) {
        Vec c = Vec::Unit(n, i);
        for (int j = 0; j < filled; ++j) c -= c.dot(g * E.col(j)) * E.col(j);
        double cn = std::sqrt(c.dot(g * c));
        if (cn > 1e-6) E.col(filled++) = c / cn;
    }
    if (filled < n) throw SolverError("orthonormal_basis: Gram-Schmidt breakdown", 0);
    return E;
}

ModelPtr make_euclidean(int n) { return std::make_shared<EuclideanModel>(n); }
ModelPtr make_half_space(int n, double a) { return std::make_shared<HalfSpaceModel>(n, a); }
ModelPtr make_sphere(int n, double radius) { return std::make_shared<SphereModel>(n, radius); }
ModelPtr make_revolution(const std::string& profile, const std::vector<double>& coeffs) {
    return std::make_shared<RevolutionModel>(make_profile(profile, coeffs));
}
ModelPtr make_product(ModelPtr a, ModelPtr b) {
    return std::make_shared<ProductModel>(std::move(a), std::move(b));
}

}  // namespace npclab
