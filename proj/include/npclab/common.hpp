#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace npclab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Caller passed arguments that violate an operation's contract.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A chart point lies outside the model's chart domain.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// An integration left the chart domain (or blew up); carries the last valid time.
class DomainExitError : public std::runtime_error {
public:
    DomainExitError(const std::string& msg, double last_valid_t)
        : std::runtime_error(msg), last_valid_t(last_valid_t) {}
    double last_valid_t;
};

// A numerical solver failed to converge; carries the residual it got stuck at.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, double residual)
        : std::runtime_error(msg), residual(residual) {}
    double residual;
};

// Two independent computation routes disagree.
class ConsistencyError : public std::runtime_error {
public:
    explicit ConsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

using Rng = std::mt19937_64;

// Christoffel symbols at a point: gamma(k)(i,j) = Gamma^k_{ij}.
struct Tensor3 {
    int n = 0;
    std::vector<Mat> g;  // g[k] is the n x n matrix over lower indices

    explicit Tensor3(int n = 0) : n(n), g(n, Mat::Zero(n, n)) {}
    Mat& operator[](int k) { return g[k]; }
    const Mat& operator[](int k) const { return g[k]; }

    // contraction Gamma^k_{ij} a^i b^j
    Vec contract(const Vec& a, const Vec& b) const {
        Vec out(n);
        for (int k = 0; k < n; ++k) out[k] = a.dot(g[k] * b);
        return out;
    }
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

// %.12g formatting used for every numeric value the tool prints or persists;
// fixed digits make reruns byte-comparable.
std::string format_num(double v);

}  // namespace npclab
