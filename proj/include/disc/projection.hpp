#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "disc/bodies.hpp"
#include "disc/errors.hpp"
#include "disc/linalg.hpp"

namespace disc {

struct ProjectionOptions {
    double tol = 1e-8;
    long max_sweeps = 0;  // 0 => 10 * n * (#cells)
};

enum class ProjectionStatus { converged, max_sweeps, empty_suspected };

struct ProjectionResult {
    Vector point;
    ProjectionStatus status = ProjectionStatus::converged;
    long sweeps = 0;
    double max_violation = 0.0;  // worst per-cell distance at the returned point
    double last_move = 0.0;      // iterate movement over the final sweep

    bool converged() const { return status == ProjectionStatus::converged; }
};

namespace detail {

/// Exact projection onto the polyhedron the cells describe, attempted from
/// the tight set at the current iterate. Returns the projection when the
/// KKT conditions verify (feasible primal, nonnegative multipliers), which
/// is sufficient for optimality; nullopt otherwise. Rescues alternating
/// projections from the slow crawl on acute polyhedral corners.
inline std::optional<Vector> polyhedral_polish(const std::vector<BodyPtr>& cells, const Vector& x,
                                               const Vector& y, double feas_tol) {
    const int n = static_cast<int>(x.size());
    std::vector<Vector> rows;
    std::vector<double> offs;
    std::vector<bool> is_equality;
    std::vector<bool> active;

    const double near_tol = std::max(1e-7, 10.0 * feas_tol);
    for (const auto& cell : cells) {
        switch (cell->kind()) {
            case BodyKind::strip: {
                const auto& s = static_cast<const Strip&>(*cell);
                const double t = s.normal().dot(y);
                rows.push_back(s.normal());
                offs.push_back(s.half_width());
                is_equality.push_back(false);
                active.push_back(t >= s.half_width() - near_tol);
                rows.push_back(-s.normal());
                offs.push_back(s.half_width());
                is_equality.push_back(false);
                active.push_back(t <= -s.half_width() + near_tol);
                break;
            }
            case BodyKind::box: {
                const auto& b = static_cast<const Box&>(*cell);
                for (int i = 0; i < n; ++i) {
                    if (std::isfinite(b.upper()(i))) {
                        Vector e = Vector::Zero(n);
                        e(i) = 1.0;
                        rows.push_back(e);
                        offs.push_back(b.upper()(i));
                        is_equality.push_back(false);
                        active.push_back(y(i) >= b.upper()(i) - near_tol);
                    }
                    if (std::isfinite(b.lower()(i))) {
                        Vector e = Vector::Zero(n);
                        e(i) = -1.0;
                        rows.push_back(e);
                        offs.push_back(-b.lower()(i));
                        is_equality.push_back(false);
                        active.push_back(y(i) <= b.lower()(i) + near_tol);
                    }
                }
                break;
            }
            case BodyKind::subspace: {
                const auto& sb = static_cast<const SubspaceBody&>(*cell);
                const auto& normals = sb.subspace().constraint_normals();
                if (normals.empty() && sb.subspace().dim() < n) return std::nullopt;
                for (const auto& v : normals) {
                    rows.push_back(v.normalized());
                    offs.push_back(0.0);
                    is_equality.push_back(true);
                    active.push_back(true);
                }
                break;
            }
            default:
                return std::nullopt;  // not a polyhedral cell; polish unavailable
        }
    }

    const int total = static_cast<int>(rows.size());
    auto solve_working = [&](Vector& z, Vector& mu, std::vector<int>& w) {
        const int k = static_cast<int>(w.size());
        if (k == 0) {
            z = x;
            mu.resize(0);
            return;
        }
        Matrix a(k, n);
        Vector b(k);
        for (int i = 0; i < k; ++i) {
            a.row(i) = rows[w[i]];
            b(i) = offs[w[i]];
        }
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a * a.transpose());
        mu = cod.solve(a * x - b);
        z = x - a.transpose() * mu;
    };

    std::vector<int> working;
    for (int i = 0; i < total; ++i)
        if (active[i]) working.push_back(i);

    Vector z, mu;
    for (int pass = 0; pass < 3 * n + 50; ++pass) {
        solve_working(z, mu, working);
        // Drop the most negative inequality multiplier, if any.
        int drop = -1;
        double most_negative = -1e-9;
        for (std::size_t i = 0; i < working.size(); ++i) {
            if (!is_equality[working[i]] && mu(static_cast<Eigen::Index>(i)) < most_negative) {
                most_negative = mu(static_cast<Eigen::Index>(i));
                drop = static_cast<int>(i);
            }
        }
        if (drop >= 0) {
            working.erase(working.begin() + drop);
            continue;
        }
        // Add the most violated constraint, if any.
        int add = -1;
        double worst = 1e-11;
        for (int i = 0; i < total; ++i) {
            const double v = rows[i].dot(z) - offs[i];
            if (v > worst && std::find(working.begin(), working.end(), i) == working.end()) {
                worst = v;
                add = i;
            }
        }
        if (add >= 0) {
            working.push_back(add);
            continue;
        }
        return z;  // primal feasible + dual feasible: the exact projection
    }
    return std::nullopt;
}

inline double cell_distance(const ConvexBody& cell, const Vector& x) {
    switch (cell.kind()) {
        case BodyKind::strip: {
            const auto& s = static_cast<const Strip&>(cell);
            return std::max(0.0, std::abs(s.normal().dot(x)) - s.half_width());
        }
        case BodyKind::box: {
            const auto& b = static_cast<const Box&>(cell);
            double d2 = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const double e = std::max({0.0, b.lower()(i) - x(i), x(i) - b.upper()(i)});
                d2 += e * e;
            }
            return std::sqrt(d2);
        }
        default:
            return (x - cell.project(x)).norm();
    }
}

}  // namespace detail

/// Dykstra's alternating projections onto the intersection of bodies that
/// all provide exact projections (directly or as intersections of such).
/// Converges to the exact Euclidean projection of x; increments for strip
/// cells are stored as scalars along the strip normal.
inline ProjectionResult project_intersection(std::span<const BodyPtr> bodies, const Vector& x,
                                             const ProjectionOptions& opts = {}) {
    std::vector<BodyPtr> cells;
    for (const auto& b : bodies)
        if (!collect_projection_cells(b, cells))
            throw std::invalid_argument(
                "project_intersection: a body does not decompose into exact projections");

    const int n = static_cast<int>(x.size());
    ProjectionResult res;
    if (cells.empty()) {
        res.point = x;
        return res;
    }
    const long max_sweeps =
        opts.max_sweeps > 0 ? opts.max_sweeps : 10L * std::max(1, n) * static_cast<long>(cells.size());

    // Increment state: scalar along the normal for strips, dense otherwise.
    std::vector<double> strip_inc(cells.size(), 0.0);
    std::vector<Vector> dense_inc(cells.size());
    std::vector<bool> is_strip(cells.size(), false);
    std::vector<bool> is_affine(cells.size(), false);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i]->kind() == BodyKind::strip) {
            is_strip[i] = true;
        } else {
            if (cells[i]->kind() == BodyKind::subspace) is_affine[i] = true;
            dense_inc[i] = Vector::Zero(n);
        }
    }

    Vector y = x;
    const double diverge_cap = 1e7 * (1.0 + x.norm());
    Vector prev = y;
    for (long sweep = 1; sweep <= max_sweeps; ++sweep) {
        prev = y;
        double inc_mass = 0.0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (is_strip[i]) {
                const auto& s = static_cast<const Strip&>(*cells[i]);
                const double t = s.normal().dot(y) + strip_inc[i];
                const double clipped = std::clamp(t, -s.half_width(), s.half_width());
                const double c = t - clipped;  // new increment scalar
                y += (strip_inc[i] - c) * s.normal();
                strip_inc[i] = c;
                inc_mass += std::abs(c);
            } else if (is_affine[i]) {
                // Corrections are unnecessary for affine cells.
                y = cells[i]->project(y);
            } else {
                const Vector u = y + dense_inc[i];
                y = cells[i]->project(u);
                dense_inc[i] = u - y;
                inc_mass += dense_inc[i].norm();
            }
        }
        res.sweeps = sweep;
        res.last_move = (y - prev).norm();

        double viol = 0.0;
        for (const auto& c : cells) viol = std::max(viol, detail::cell_distance(*c, y));
        res.max_violation = viol;
        if (viol <= opts.tol && res.last_move <= opts.tol) {
            res.point = y;
            res.status = ProjectionStatus::converged;
            return res;
        }
        if (inc_mass > diverge_cap || !y.allFinite()) {
            res.point = y;
            res.status = ProjectionStatus::empty_suspected;
            return res;
        }
        // Near-feasible but still moving: on polyhedral instances the sweeps
        // can crawl along acute corners, where a KKT solve on the tight set
        // finishes the job exactly.
        if (viol <= 10.0 * opts.tol && (sweep % 256 == 0 || sweep == max_sweeps)) {
            if (auto z = detail::polyhedral_polish(cells, x, y, opts.tol)) {
                double zviol = 0.0;
                for (const auto& c : cells) zviol = std::max(zviol, detail::cell_distance(*c, *z));
                if (zviol <= opts.tol) {
                    res.point = *z;
                    res.max_violation = zviol;
                    res.last_move = (*z - y).norm();
                    res.status = ProjectionStatus::converged;
                    return res;
                }
            }
        }
    }
    res.point = y;
    res.status = ProjectionStatus::max_sweeps;
    return res;
}

inline ProjectionResult project_intersection(const std::vector<BodyPtr>& bodies, const Vector& x,
                                             const ProjectionOptions& opts = {}) {
    return project_intersection(std::span<const BodyPtr>(bodies), x, opts);
}

/// Exact projection onto one (possibly composite) body via its cell
/// decomposition. Throws ProjectionFailed when Dykstra does not certify.
inline Vector project_exact(const BodyPtr& body, const Vector& x, const ProjectionOptions& opts = {}) {
    std::vector<BodyPtr> one{body};
    auto res = project_intersection(one, x, opts);
    if (!res.converged())
        throw ProjectionFailed("projection did not converge (status " +
                               std::to_string(static_cast<int>(res.status)) + ", violation " +
                               std::to_string(res.max_violation) + ")");
    return res.point;
}

namespace detail {

/// Warm-startable dual sweep (Hildreth / Dykstra on halfspaces) projecting a
/// fixed anchor x onto the intersection of accumulated cuts.
class CutProjector {
public:
    explicit CutProjector(Vector anchor) : x_(std::move(anchor)), y_(x_) {}

    void add_cut(Hyperplane h) {
        cuts_.push_back(std::move(h));
        inc_.push_back(0.0);
    }

    std::size_t cut_count() const { return cuts_.size(); }
    const Vector& point() const { return y_; }

    /// Sweeps until the worst cut violation and dual movement drop below tol
    /// or the budget runs out; returns the achieved violation.
    double resweep(double tol, long max_sweeps) {
        if (cuts_.empty()) {
            y_ = x_;
            return 0.0;
        }
        // Rebuild the primal point from the dual scalars, then sweep.
        y_ = x_;
        for (std::size_t i = 0; i < cuts_.size(); ++i)
            if (inc_[i] != 0.0) y_ -= inc_[i] * cuts_[i].normal;
        double viol = 0.0;
        for (long sweep = 0; sweep < max_sweeps; ++sweep) {
            double move = 0.0;
            for (std::size_t i = 0; i < cuts_.size(); ++i) {
                const double t = cuts_[i].normal.dot(y_) + inc_[i];
                const double c = std::max(0.0, t - cuts_[i].offset);
                const double delta = inc_[i] - c;
                if (delta != 0.0) {
                    y_ += delta * cuts_[i].normal;
                    move += std::abs(delta);
                }
                inc_[i] = c;
            }
            viol = 0.0;
            for (const auto& h : cuts_) viol = std::max(viol, h.normal.dot(y_) - h.offset);
            if (viol <= tol && move <= tol) break;
        }
        return viol;
    }

private:
    Vector x_;
    Vector y_;
    std::vector<Hyperplane> cuts_;
    std::vector<double> inc_;
};

}  // namespace detail

struct OracleProjectionResult {
    Vector point;
    long cuts = 0;
    double membership_tol = 0.0;  // tolerance at which the body accepted the point
    double certified_error = 0.0; // bound on ||point - true projection||
};

/// Projection through a separation oracle: outer-approximate the body by the
/// accumulated cutting planes, project onto that polyhedron, and query the
/// oracle at the result. At acceptance the outer point is feasible within a
/// tolerance chosen so the distance-to-optimum bound below is <= eta. The
/// bound uses that the body contains an origin-centered ball of radius r: a
/// point with per-cut violation v can be pulled inside by scaling with
/// r/(r+v), and strong convexity of the squared distance turns that into
///   ||y - y*|| <= w + sqrt(2 D w),   w = v ||y|| / r,  D = ||x|| + ||y||.
inline OracleProjectionResult project_via_oracle(const ConvexBody& body, const Vector& x,
                                                 double eta, double radius_cap,
                                                 long max_cuts = 0) {
    if (!(eta > 0.0)) throw std::invalid_argument("project_via_oracle: eta must be > 0");
    if (x.norm() > radius_cap) throw RadiusExceeded(x.norm(), radius_cap);
    const auto r_opt = body.inner_radius();
    if (!r_opt || !(*r_opt > 0.0)) throw NoInnerRadius();
    const double r = *r_opt;

    const int n = static_cast<int>(x.size());
    if (max_cuts <= 0) max_cuts = 400 + 40L * n;
    double member_tol = std::clamp(0.01 * eta, 1e-13, kMembershipTol);

    auto certify = [&](const Vector& y, double tol) {
        const double w = tol * y.norm() / r;
        return w + std::sqrt(2.0 * (x.norm() + y.norm()) * w);
    };

    detail::CutProjector proj(x);
    Vector y = x;
    long cuts_added = 0;
    while (true) {
        double accepted_tol = member_tol;
        if (!body.contains(y, member_tol)) {
            auto h = body.separate(y);
            if (h) {
                if (cuts_added++ >= max_cuts)
                    throw ProjectionFailed("project_via_oracle: cut budget exhausted (" +
                                           std::to_string(max_cuts) + " cuts)");
                proj.add_cut(*h);
                proj.resweep(std::max(1e-14, 0.001 * member_tol),
                             200 + 20L * static_cast<long>(proj.cut_count()));
                y = proj.point();
                continue;
            }
            // contains() is stricter than the oracle threshold here; the point
            // is inside as far as the oracle can tell.
            accepted_tol = kMembershipTol;
        }
        const double err = certify(y, accepted_tol);
        if (err <= eta || member_tol <= 1e-13 || accepted_tol > member_tol) {
            OracleProjectionResult out;
            out.point = y;
            out.cuts = static_cast<long>(proj.cut_count());
            out.membership_tol = accepted_tol;
            out.certified_error = err;
            return out;
        }
        member_tol *= 0.1;  // feasible but not yet certified to eta
    }
}

/// Minkowski norm ||x||_K = min{ lambda >= 0 : x in lambda K } by bisection
/// on membership. Returns 0 when membership persists down to `tol`
/// (lineality direction of the body) and +infinity when no bracket exists.
inline double minkowski_norm(const ConvexBody& body, const Vector& x, double tol = 1e-10) {
    const double len = x.norm();
    if (len == 0.0) return 0.0;
    auto inside = [&](double lambda) { return body.contains(x / lambda, kMembershipTol); };
    if (inside(tol)) return 0.0;
    double lo = tol, hi = 1.0;
    int doublings = 0;
    while (!inside(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 120) return std::numeric_limits<double>::infinity();
    }
    while (hi - lo > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (inside(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

/// Largest <x - y, z - y> over sampled members z of the body; a projection
/// certificate (the variational inequality) when it is <= tol.
inline double vi_violation(const ConvexBody& body, const Vector& x, const Vector& y,
                           SeededRng& rng, int n_samples) {
    double worst = -std::numeric_limits<double>::infinity();
    const Vector g = x - y;
    for (int s = 0; s < n_samples; ++s) {
        const Vector z = random_member(body, rng);
        worst = std::max(worst, g.dot(z - y));
    }
    return worst;
}

}  // namespace disc
