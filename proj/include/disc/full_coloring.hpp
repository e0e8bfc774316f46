#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "disc/partial_coloring.hpp"

namespace disc {

struct SetSystem {
    int n_elements = 0;
    std::vector<std::vector<int>> sets;
    std::string name;

    int m() const { return static_cast<int>(sets.size()); }

    void validate() const {
        for (const auto& s : sets)
            for (int j : s)
                if (j < 0 || j >= n_elements)
                    throw std::invalid_argument("SetSystem: element index out of range");
    }
};

/// Uniformly random system: each element joins each set with probability p.
inline SetSystem random_set_system(int n, int m, double density, SeededRng& rng) {
    SetSystem sys;
    sys.n_elements = n;
    sys.sets.resize(m);
    for (auto& s : sys.sets)
        for (int j = 0; j < n; ++j)
            if (rng.uniform() < density) s.push_back(j);
    return sys;
}

/// max_i |sum_{j in S_i} y_j|; exact integer arithmetic for +-1 colorings.
inline double discrepancy(const SetSystem& sys, const Vector& y) {
    bool integral = true;
    for (Eigen::Index i = 0; i < y.size() && integral; ++i)
        if (y(i) != 1.0 && y(i) != -1.0) integral = false;
    double worst = 0.0;
    for (const auto& s : sys.sets) {
        if (integral) {
            long long acc = 0;
            for (int j : s) acc += (y(j) > 0.0) ? 1 : -1;
            worst = std::max(worst, static_cast<double>(std::llabs(acc)));
        } else {
            double acc = 0.0;
            for (int j : s) acc += y(j);
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

struct BaselineStats {
    int trials = 0;
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

/// Discrepancy of uniform random colorings; the comparison floor the
/// partial-coloring method is supposed to beat.
inline BaselineStats random_coloring_baseline(const SetSystem& sys, int trials, SeededRng& rng) {
    if (trials < 1) throw std::invalid_argument("random_coloring_baseline: trials must be >= 1");
    std::vector<double> values;
    values.reserve(trials);
    Vector y(sys.n_elements);
    for (int t = 0; t < trials; ++t) {
        for (int j = 0; j < sys.n_elements; ++j) y(j) = rng.uniform() < 0.5 ? -1.0 : 1.0;
        values.push_back(discrepancy(sys, y));
    }
    std::sort(values.begin(), values.end());
    BaselineStats st;
    st.trials = trials;
    st.min = values.front();
    st.max = values.back();
    const std::size_t k = values.size() / 2;
    st.median = (values.size() % 2 == 1) ? values[k] : 0.5 * (values[k - 1] + values[k]);
    return st;
}

// ---------------------------------------------------------------------------
// Iterated coloring
// ---------------------------------------------------------------------------

/// Body for one round, living on the active coordinates.
struct RoundBody {
    BodyPtr body;
    double rhs = 0.0;    // per-round additive discrepancy budget (0 if n/a)
    double scale = 1.0;  // body scale relative to the full-dimension body
};

struct BodySchedule {
    enum class Mode { fixed, shrinking, spencer };
    Mode mode = Mode::fixed;
    std::function<RoundBody(const std::vector<int>& active, int n, int iteration)> make;
    std::function<double(const Vector& y)> snapshot;  // optional audit metric
};

/// Restriction of a structurally known body to the given coordinates
/// (the section {x : x_i = 0 outside active} viewed in R^{|active|}).
inline BodyPtr restrict_to_coords(const BodyPtr& body, const std::vector<int>& active) {
    const int m = static_cast<int>(active.size());
    switch (body->kind()) {
        case BodyKind::ball: {
            const auto& b = static_cast<const Ball&>(*body);
            return std::make_shared<Ball>(m, b.radius());
        }
        case BodyKind::box: {
            const auto& b = static_cast<const Box&>(*body);
            Vector lo(m), hi(m);
            for (int k = 0; k < m; ++k) {
                lo(k) = b.lower()(active[k]);
                hi(k) = b.upper()(active[k]);
            }
            return std::make_shared<Box>(std::move(lo), std::move(hi));
        }
        case BodyKind::strip:
        case BodyKind::polytope: {
            std::vector<Strip> in;
            if (body->kind() == BodyKind::strip)
                in.push_back(static_cast<const Strip&>(*body));
            else
                in = static_cast<const PolytopeBody&>(*body).strips();
            std::vector<Strip> out;
            for (const auto& s : in) {
                Vector v(m);
                for (int k = 0; k < m; ++k) v(k) = s.normal()(active[k]);
                const double len = v.norm();
                if (len <= 1e-14) continue;  // constraint vacuous on the section
                out.emplace_back(v / len, s.half_width() / len);
            }
            return std::make_shared<PolytopeBody>(m, std::move(out));
        }
        case BodyKind::scaled: {
            const auto& sc = static_cast<const ScaledBody&>(*body);
            return std::make_shared<ScaledBody>(sc.scale(), restrict_to_coords(sc.inner(), active));
        }
        case BodyKind::intersection: {
            const auto& ix = static_cast<const Intersection&>(*body);
            std::vector<BodyPtr> members;
            for (const auto& mem : ix.members()) members.push_back(restrict_to_coords(mem, active));
            return std::make_shared<Intersection>(m, std::move(members));
        }
        default:
            throw std::invalid_argument("restrict_to_coords: unsupported body kind");
    }
}

inline BodySchedule fixed_schedule(BodyPtr K) {
    BodySchedule s;
    s.mode = BodySchedule::Mode::fixed;
    s.make = [K = std::move(K)](const std::vector<int>& active, int, int) {
        return RoundBody{restrict_to_coords(K, active), 0.0, 1.0};
    };
    return s;
}

/// Lemma-9 style schedule: the body shrinks as (dim(U)/n)^exponent.
inline BodySchedule shrinking_schedule(BodyPtr K, double exponent) {
    BodySchedule s;
    s.mode = BodySchedule::Mode::shrinking;
    s.make = [K = std::move(K), exponent](const std::vector<int>& active, int n, int) {
        const double scale =
            std::pow(static_cast<double>(active.size()) / static_cast<double>(n), exponent);
        return RoundBody{std::make_shared<ScaledBody>(scale, restrict_to_coords(K, active)),
                         0.0, scale};
    };
    return s;
}

/// One strip per set with nonempty restriction to the active coordinates:
/// the unnormalized constraint reads |sum_{j in S_i n active} x_j| <= RHS
/// with RHS = C sqrt(m log(2n/m)), m = |active|. Duplicate restrictions are
/// merged. log base is configurable; natural log by default.
inline BodyPtr spencer_build_body(const SetSystem& sys, const std::vector<int>& active, double c,
                                  double log_base = 0.0) {
    const int m = static_cast<int>(active.size());
    if (m < 1) throw std::invalid_argument("spencer_build_body: active set must be nonempty");
    if (!(c > 0.0)) throw std::invalid_argument("spencer_build_body: constant must be > 0");
    const int n = sys.n_elements;
    double log_ratio = std::log(2.0 * n / static_cast<double>(m));
    if (log_base > 0.0) log_ratio /= std::log(log_base);
    const double rhs = c * std::sqrt(m * log_ratio);

    std::vector<int> position(n, -1);
    for (int k = 0; k < m; ++k) position[active[k]] = k;

    std::set<std::vector<int>> seen;
    std::vector<Strip> strips;
    for (const auto& s : sys.sets) {
        std::vector<int> restricted;
        for (int j : s)
            if (position[j] >= 0) restricted.push_back(position[j]);
        if (restricted.empty()) continue;
        std::sort(restricted.begin(), restricted.end());
        if (!seen.insert(restricted).second) continue;
        Vector v = Vector::Zero(m);
        for (int k : restricted) v(k) = 1.0;
        const double len = std::sqrt(static_cast<double>(restricted.size()));
        strips.emplace_back(v / len, rhs / len);
    }
    return std::make_shared<PolytopeBody>(m, std::move(strips));
}

inline double spencer_round_rhs(const SetSystem& sys, int active_count, double c,
                                double log_base = 0.0) {
    double log_ratio = std::log(2.0 * sys.n_elements / static_cast<double>(active_count));
    if (log_base > 0.0) log_ratio /= std::log(log_base);
    return c * std::sqrt(active_count * log_ratio);
}

inline BodySchedule spencer_schedule(SetSystem sys, double c, double log_base = 0.0) {
    auto shared = std::make_shared<const SetSystem>(std::move(sys));
    BodySchedule s;
    s.mode = BodySchedule::Mode::spencer;
    s.make = [shared, c, log_base](const std::vector<int>& active, int, int) {
        return RoundBody{spencer_build_body(*shared, active, c, log_base),
                         spencer_round_rhs(*shared, static_cast<int>(active.size()), c, log_base),
                         1.0};
    };
    s.snapshot = [shared](const Vector& y) { return discrepancy(*shared, y); };
    return s;
}

struct RoundTrace {
    int iteration = 0;
    int active_dim = 0;
    int gained = 0;
    int retries = 0;
    double rhs = 0.0;
    double body_scale = 1.0;
    double increment_norm = 0.0;  // ||y_t - y_{t-1}||_{K_t}
    double snapshot = 0.0;        // schedule audit metric after the round
};

struct ColoringRun {
    Vector y_final;
    std::vector<RoundTrace> trace;
    int rounds = 0;
    bool completed = false;
    double certified_bound = 0.0;   // sum of realized per-round RHS
    double minkowski_budget = 0.0;  // sum of realized ||increment||_{K_t}
};

namespace detail {

inline int round_retry_budget(int active_dim) {
    // At tiny dimensions a single Gaussian draw reaches a cube face with
    // probability bounded away from 1 (can drop to ~0.16 when only one face
    // is reachable), so the retry budget scales up sharply to keep the
    // per-round stall probability negligible. Retries at these sizes are
    // close to free.
    if (active_dim <= 4) return 150;
    return std::max(5, static_cast<int>(std::ceil(60.0 / active_dim)));
}

}  // namespace detail

/// Iterate translated partial colorings until every coordinate is fixed at
/// +-1. Each accepted round must fix at least one new coordinate; rounds are
/// retried with fresh streams otherwise, and the run is returned incomplete
/// (with its partial trace) if a round exhausts its retry budget.
inline ColoringRun full_color(const BodySchedule& schedule, int n, const AlgorithmConfig& cfg) {
    if (n < 1) throw std::invalid_argument("full_color: n must be >= 1");
    ColoringRun run;
    run.y_final = Vector::Zero(n);
    std::vector<int> active(n);
    for (int i = 0; i < n; ++i) active[i] = i;

    const SeededRng stream_root = cfg.make_rng();
    int iteration = 0;
    while (!active.empty()) {
        ++iteration;
        const RoundBody rb = schedule.make(active, n, iteration);
        Vector center(active.size());
        for (std::size_t k = 0; k < active.size(); ++k) center(k) = run.y_final(active[k]);

        const int budget = detail::round_retry_budget(static_cast<int>(active.size()));
        PartialColoring pc;
        bool accepted = false;
        int retries = 0;
        for (int attempt = 0; attempt < budget; ++attempt) {
            AlgorithmConfig round_cfg = cfg;
            round_cfg.stream =
                stream_root.child(static_cast<std::uint64_t>(iteration))
                    .child(static_cast<std::uint64_t>(attempt))
                    .stream_id();
            pc = partial_color_translated(rb.body, center, round_cfg);
            retries = attempt;
            if (!pc.failure && pc.integral_count() >= 1) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            run.rounds = iteration - 1;
            return run;  // stalled; partial trace kept
        }

        const Vector increment = pc.y - center;
        RoundTrace tr;
        tr.iteration = iteration;
        tr.active_dim = static_cast<int>(active.size());
        tr.gained = pc.integral_count();
        tr.retries = retries;
        tr.rhs = rb.rhs;
        tr.body_scale = rb.scale;
        tr.increment_norm = minkowski_norm(*rb.body, increment);

        std::vector<int> next_active;
        for (std::size_t k = 0; k < active.size(); ++k) {
            const double v = pc.y(static_cast<Eigen::Index>(k));
            if (std::abs(v) >= 1.0 - cfg.tau) {
                run.y_final(active[k]) = (v > 0.0) ? 1.0 : -1.0;
            } else {
                run.y_final(active[k]) = v;
                next_active.push_back(active[k]);
            }
        }
        active = std::move(next_active);
        if (schedule.snapshot) tr.snapshot = schedule.snapshot(run.y_final);
        run.trace.push_back(tr);
        run.certified_bound += rb.rhs;
        run.minkowski_budget += tr.increment_norm;
    }
    run.rounds = iteration;
    run.completed = true;
    return run;
}

struct SpencerResult {
    ColoringRun run;
    double final_discrepancy = 0.0;
    double certified_bound = 0.0;
    bool bound_respected = false;
    bool aspect_warning = false;  // m != n (outside the classic regime)
};

/// End-to-end Spencer coloring with the shrinking right-hand-side schedule.
/// The certified bound is the sum of realized per-round RHS values (triangle
/// inequality over the rounds) and is re-checked against the exact
/// discrepancy of the returned coloring.
inline SpencerResult spencer_solve(const SetSystem& sys, double c, const AlgorithmConfig& cfg,
                                   double log_base = 0.0) {
    sys.validate();
    SpencerResult out;
    out.aspect_warning = sys.m() != sys.n_elements;
    const BodySchedule schedule = spencer_schedule(sys, c, log_base);
    out.run = full_color(schedule, sys.n_elements, cfg);
    out.certified_bound = out.run.certified_bound;
    out.final_discrepancy = discrepancy(sys, out.run.y_final);
    out.bound_respected = out.run.completed &&
                          out.final_discrepancy <= out.certified_bound + 1e-6;
    return out;
}

}  // namespace disc
