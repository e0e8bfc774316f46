#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "disc/bodies.hpp"
#include "disc/errors.hpp"
#include "disc/gaussian.hpp"
#include "disc/projection.hpp"

namespace disc {

struct AlgorithmConfig {
    double epsilon = 1.0 / 9000.0;  // guarantee bookkeeping constant
    double eta = 1e-9;              // rounding / oracle accuracy target
    double tau = 1e-7;              // integrality threshold (|y_i| >= 1 - tau)
    double radius_c = 10.0;         // Gaussian cutoff R = C sqrt(n)
    double dykstra_tol = 1e-8;
    long dykstra_max_sweeps = 0;    // 0 => 10 * n * (#cells)
    double membership_tol = 1e-7;   // audit tolerance for y in K
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    SeededRng make_rng() const { return SeededRng(seed, stream); }
};

/// A point of K n [-1,1]^n with the set of cube-tight coordinates, plus the
/// Gaussian draw it came from for audit.
struct PartialColoring {
    Vector y;
    std::vector<int> integral_indices;  // {i : |y_i| >= 1 - tau}
    double tau = 0.0;
    Vector x_star;
    double distance = 0.0;  // ||x_star - y||
    bool in_body = false;   // K membership audit at cfg.membership_tol
    bool failure = false;   // Gaussian cutoff triggered twice

    // Diagnostics
    bool guarantee_applicable = false;  // eps * n >= 1
    bool guarantee_met = false;         // |I*| >= eps * n
    double projection_violation = 0.0;
    long projection_sweeps = 0;
    long oracle_cuts = 0;
    double subspace_distance = 0.0;  // ||x* - proj_H(x*)|| for the subspace variant

    int integral_count() const { return static_cast<int>(integral_indices.size()); }
};

/// Rounding rule for near-cube coordinates: snap to +-1 anything within eta.
inline Vector round_point(const Vector& y_tilde, double eta) {
    if (!(eta < 1.0)) throw std::invalid_argument("round_point: eta must be < 1");
    Vector y = y_tilde;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (std::abs(y(i) - 1.0) <= eta)
            y(i) = 1.0;
        else if (std::abs(y(i) + 1.0) <= eta)
            y(i) = -1.0;
    }
    return y;
}

/// K' = (1 + (n+1) eta / r)^{-1} K, sized so that rounded outputs for K'
/// land inside K despite the accumulated Minkowski-norm error budget.
inline BodyPtr shrink_body(BodyPtr K, double eta, double r, int n) {
    if (!(r > 0.0)) throw std::invalid_argument("shrink_body: inner radius must be > 0");
    if (!(eta > 0.0)) throw std::invalid_argument("shrink_body: eta must be > 0");
    const double alpha = 1.0 / (1.0 + (n + 1) * eta / r);
    return std::make_shared<ScaledBody>(alpha, std::move(K));
}

namespace detail {

inline void validate_epsilon(double eps, double cap, const char* what) {
    if (!(eps > 0.0 && eps <= cap + 1e-15))
        throw std::domain_error(std::string(what) + ": epsilon must lie in (0, " +
                                std::to_string(cap) + "]");
}

/// Projection of x onto body n cube through whichever engine the body
/// supports; fills the diagnostics of `out`.
inline Vector project_onto_body_cap_cube(const BodyPtr& body, const Vector& x,
                                         const AlgorithmConfig& cfg, PartialColoring& out) {
    const int n = body->dim();
    std::vector<BodyPtr> cells;
    const bool exact = collect_projection_cells(body, cells);
    if (exact) {
        cells.push_back(Box::cube(n));
        auto res = project_intersection(cells, x,
                                        ProjectionOptions{cfg.dykstra_tol, cfg.dykstra_max_sweeps});
        if (res.status == ProjectionStatus::empty_suspected)
            throw ProjectionFailed("projection diverged; empty intersection suspected");
        if (!res.converged())
            throw ProjectionFailed("alternating projection hit the sweep cap (violation " +
                                   std::to_string(res.max_violation) + ")");
        out.projection_violation = res.max_violation;
        out.projection_sweeps = res.sweeps;
        return res.point;
    }
    std::vector<BodyPtr> members{body, Box::cube(n)};
    auto feasible = std::make_shared<Intersection>(n, std::move(members));
    const double cap = std::max(x.norm() * 2.0, cfg.radius_c * std::sqrt(double(n)));
    auto res = project_via_oracle(*feasible, x, std::max(cfg.eta, 1e-9), cap);
    out.projection_violation = res.membership_tol;
    out.oracle_cuts = res.cuts;
    return res.point;
}

}  // namespace detail

/// Core step on a fixed draw: project x* onto K n [-1,1]^n, round, and
/// collect the cube-tight index set. Exposed separately so tests can drive
/// the sign-antisymmetry and regression paths with chosen draws.
inline PartialColoring partial_color_from_point(const BodyPtr& K, const Vector& x_star,
                                                const AlgorithmConfig& cfg) {
    if (!K) throw std::invalid_argument("partial_color: null body");
    if (!K->symmetric())
        throw std::invalid_argument("partial_color: body must be centrally symmetric");
    detail::validate_epsilon(cfg.epsilon, 1.0 / 9000.0, "partial_color");
    if (!(cfg.tau > cfg.eta))
        throw std::invalid_argument("partial_color: tau must exceed eta");
    const int n = K->dim();

    PartialColoring out;
    out.tau = cfg.tau;
    out.x_star = x_star;

    const Vector projected = detail::project_onto_body_cap_cube(K, x_star, cfg, out);
    out.y = round_point(projected, cfg.eta);
    for (int i = 0; i < n; ++i)
        if (std::abs(out.y(i)) >= 1.0 - cfg.tau) out.integral_indices.push_back(i);
    out.distance = (x_star - out.y).norm();
    out.in_body = K->contains(out.y, cfg.membership_tol);
    out.guarantee_applicable = cfg.epsilon * n >= 1.0;
    out.guarantee_met = out.integral_count() >= cfg.epsilon * n;
    return out;
}

/// The main algorithm: draw x* ~ N(0,1)^n, fail past the R = C sqrt(n)
/// cutoff (one resample), and return the projection onto K n [-1,1]^n.
inline PartialColoring partial_color(const BodyPtr& K, const AlgorithmConfig& cfg) {
    if (!K) throw std::invalid_argument("partial_color: null body");
    const int n = K->dim();
    const double radius = cfg.radius_c * std::sqrt(static_cast<double>(n));
    SeededRng rng = cfg.make_rng();
    for (int attempt = 0; attempt < 2; ++attempt) {
        Vector x_star = sample_gaussian(n, rng);
        if (x_star.norm() > radius) continue;
        return partial_color_from_point(K, x_star, cfg);
    }
    PartialColoring out;
    out.tau = cfg.tau;
    out.failure = true;
    out.y = Vector::Zero(n);
    out.x_star = Vector::Zero(n);
    return out;
}

/// Re-centered variant: find y in (c + K) n [-1,1]^n by stretching the
/// problem onto the cube, running the core algorithm, and mapping back with
/// y_i = c_i + (1 - c_i) y'_i on sign-normalized coordinates. Coordinates
/// with y'_i = +1 (after flipping y' to favor the majority side) land
/// exactly on the cube boundary.
inline PartialColoring partial_color_translated(const BodyPtr& K, const Vector& c,
                                                const AlgorithmConfig& cfg) {
    if (!K) throw std::invalid_argument("partial_color_translated: null body");
    if (c.size() != K->dim())
        throw std::invalid_argument("partial_color_translated: center dimension mismatch");
    if (!K->symmetric())
        throw std::invalid_argument("partial_color_translated: body must be symmetric");
    const StretchMap f = stretch_transform(c);  // throws CenterOnBoundary
    const BodyPtr working = stretched_image(K, f.scale);

    PartialColoring inner = partial_color(working, cfg);
    if (inner.failure) return inner;

    // Favor the +1 side; valid because the working body and cube are symmetric.
    int plus = 0, minus = 0;
    for (int i : inner.integral_indices) (inner.y(i) > 0.0 ? plus : minus)++;
    if (minus > plus) {
        inner.y = -inner.y;
        inner.x_star = -inner.x_star;
    }

    PartialColoring out;
    out.tau = cfg.tau;
    out.y = c + f.invert(inner.y);
    out.x_star = c + f.invert(inner.x_star);
    for (int i = 0; i < out.y.size(); ++i)
        if (std::abs(out.y(i)) >= 1.0 - cfg.tau) out.integral_indices.push_back(i);
    out.distance = (out.x_star - out.y).norm();
    out.in_body = K->contains(out.y - c, cfg.membership_tol);
    out.projection_violation = inner.projection_violation;
    out.projection_sweeps = inner.projection_sweeps;
    out.oracle_cuts = inner.oracle_cuts;
    return out;
}

/// Subspace variant (K inside a subspace H): the projection lands in H on
/// its own; this wrapper verifies K is inside H on sampled members, records
/// the m <= 2 delta n bookkeeping, and reports ||x* - proj_H(x*)||.
struct SubspacePartialResult {
    PartialColoring coloring;
    int equations = 0;          // constraints defining H
    double two_delta_n = 0.0;   // the regime bound on m
    bool dim_condition_met = false;
};

inline SubspacePartialResult partial_color_subspace(const BodyPtr& K, const Subspace& H,
                                                    const AlgorithmConfig& cfg) {
    if (!K) throw std::invalid_argument("partial_color_subspace: null body");
    detail::validate_epsilon(cfg.epsilon, 1.0 / 60000.0, "partial_color_subspace");
    const int n = K->dim();
    if (H.ambient_dim() != n)
        throw std::invalid_argument("partial_color_subspace: subspace dimension mismatch");

    // K inside H, checked statistically on sampled members.
    SeededRng member_rng = cfg.make_rng().child(0xC0FFEEull);
    for (int trial = 0; trial < 16; ++trial) {
        const Vector z = random_member(*K, member_rng);
        if ((z - H.project(z)).norm() > 1e-6 * (1.0 + z.norm()))
            throw PreconditionUnmet("partial_color_subspace: sampled member of K leaves H");
    }

    SubspacePartialResult out;
    out.equations = n - H.dim();
    out.two_delta_n = 2.0 * entropy_params(cfg.epsilon).delta * n;
    out.dim_condition_met = out.equations <= out.two_delta_n;

    AlgorithmConfig core_cfg = cfg;
    core_cfg.epsilon = std::min(cfg.epsilon, 1.0 / 9000.0);
    SeededRng rng = cfg.make_rng();
    const double radius = cfg.radius_c * std::sqrt(static_cast<double>(n));
    for (int attempt = 0; attempt < 2; ++attempt) {
        Vector x_star = sample_gaussian(n, rng);
        if (x_star.norm() > radius) continue;
        out.coloring = partial_color_from_point(K, x_star, core_cfg);
        out.coloring.subspace_distance = (x_star - H.project(x_star)).norm();
        return out;
    }
    out.coloring.tau = cfg.tau;
    out.coloring.failure = true;
    out.coloring.y = Vector::Zero(n);
    out.coloring.x_star = Vector::Zero(n);
    return out;
}

/// Comparison baseline: maximize <c, x> over K n [-1,1]^n for a uniform
/// random direction c. Implemented as the projection of a far point T c,
/// which lands within gap <= ||p|| (sqrt(n) + ||p||) / T of the optimum.
struct EldanSinghResult {
    PartialColoring partial;
    Vector direction;
    double objective = 0.0;
    double gap_bound = 0.0;
};

inline EldanSinghResult eldan_singh_partial(const BodyPtr& K, const AlgorithmConfig& cfg) {
    if (!K) throw std::invalid_argument("eldan_singh_partial: null body");
    if (!K->symmetric())
        throw std::invalid_argument("eldan_singh_partial: body must be symmetric");
    const int n = K->dim();
    SeededRng rng = cfg.make_rng();
    Vector c = sample_gaussian(n, rng);
    c.normalize();
    const double far = 1e6 * std::sqrt(static_cast<double>(n));
    const Vector target = far * c;

    EldanSinghResult out;
    out.direction = c;
    PartialColoring& p = out.partial;
    p.tau = cfg.tau;
    p.x_star = c;

    std::vector<BodyPtr> cells;
    Vector solution;
    if (collect_projection_cells(K, cells)) {
        cells.push_back(Box::cube(n));
        auto res = project_intersection(cells, target,
                                        ProjectionOptions{cfg.dykstra_tol, cfg.dykstra_max_sweeps});
        if (!res.converged())
            throw ProjectionFailed("eldan_singh_partial: projection failed with violation " +
                                   std::to_string(res.max_violation));
        solution = res.point;
        p.projection_violation = res.max_violation;
        p.projection_sweeps = res.sweeps;
    } else {
        std::vector<BodyPtr> members{K, Box::cube(n)};
        auto feasible = std::make_shared<Intersection>(n, std::move(members));
        auto res = project_via_oracle(*feasible, target, 1e-6 * far, 2.0 * far);
        solution = res.point;
        p.projection_violation = res.membership_tol;
        p.oracle_cuts = res.cuts;
    }
    p.y = round_point(solution, cfg.eta);
    for (int i = 0; i < n; ++i)
        if (std::abs(p.y(i)) >= 1.0 - cfg.tau) p.integral_indices.push_back(i);
    p.distance = (p.x_star - p.y).norm();
    p.in_body = K->contains(p.y, cfg.membership_tol);
    out.objective = c.dot(p.y);
    out.gap_bound = p.y.norm() * (std::sqrt(static_cast<double>(n)) + p.y.norm()) / far;
    return out;
}

}  // namespace disc
