#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmc/dataset.hpp"
#include "mmc/errors.hpp"
#include "mmc/geometry.hpp"
#include "mmc/oracles.hpp"

namespace mmc {

/// The current witness pair (b, w), one point in each class's convex hull,
/// together with convex-combination certificates over dataset indices.
/// Seed mass covers seeds that are not dataset points.
struct TrainerState {
    Vector b;
    Vector w;
    std::vector<double> b_weights;  // dense over indices, grown on demand
    std::vector<double> w_weights;
    Vector seed_b;
    Vector seed_w;
    double seed_b_weight = 0.0;
    double seed_w_weight = 0.0;
    double ell = 0.0;  // |b - w|
    std::int64_t iteration = 0;
};

enum class StepCase { SlabPoint, Counterexample, Terminal };

inline const char* to_string(StepCase c) {
    switch (c) {
        case StepCase::SlabPoint: return "slab_point";
        case StepCase::Counterexample: return "counterexample";
        default: return "terminal";
    }
}

struct StepRecord {
    std::int64_t iteration = 0;  // 1-based
    StepCase kind = StepCase::Terminal;
    std::optional<std::size_t> chosen_index;
    std::optional<Label> label;
    double ell_before = 0.0;
    double ell_after = 0.0;
    std::optional<StepGeometry> geometry;  // absent on terminal records
};

struct TrainReport {
    bool converged = false;
    Slab final_slab;        // the shrunk slab of the final witness pair
    double final_ell = 0.0;
    double width = 0.0;     // (1 - epsilon) * final_ell
    std::int64_t iterations = 0;
    std::int64_t case_a_count = 0;  // counterexample checks, incl. the terminal one
    std::int64_t case_b_count = 0;  // slab-point steps
    std::int64_t labeling_calls = 0;
    std::int64_t counterexample_calls = 0;
    std::vector<StepRecord> trace;
    double epsilon = 0.0;
    std::int64_t iteration_cap = 0;
    std::vector<std::string> warnings;

    // Hull-membership certificate diagnostics, maxima over every visited
    // state. A valid run keeps min_weight >= -1e-9, sum_error <= 1e-9 and
    // reconstruction_error <= 1e-9.
    double cert_min_weight = 0.0;
    double cert_max_sum_error = 0.0;
    double cert_max_reconstruction_error = 0.0;
};

struct EngineConfig {
    double epsilon = 0.1;
    double tol = 1e-12;
    double cap_constant = 256.0;
    std::optional<std::int64_t> explicit_cap;
    std::optional<std::uint64_t> rng_seed;
    bool record_trace = true;
};

/// Result of one candidate-selection pass over a labeled dataset.
struct Candidate {
    enum class Kind { InSlab, Misclassified, Converged };
    Kind kind = Kind::Converged;
    std::optional<std::size_t> index;

    friend bool operator==(const Candidate& a, const Candidate& b) {
        return a.kind == b.kind && a.index == b.index;
    }
};

inline TrainerState init_state(const Vector& b1, const Vector& w1,
                               std::optional<std::size_t> b1_index = std::nullopt,
                               std::optional<std::size_t> w1_index = std::nullopt) {
    check_same_dim(b1, w1);
    if (!all_finite(b1) || !all_finite(w1)) {
        throw CoincidentSeeds("seed points must have finite coordinates");
    }
    TrainerState s;
    s.b = b1;
    s.w = w1;
    s.seed_b = b1;
    s.seed_w = w1;
    s.ell = distance(b1, w1);
    if (!(s.ell > 0.0)) {
        throw CoincidentSeeds("seed points coincide; a slab needs positive length");
    }
    if (b1_index) {
        s.b_weights.resize(*b1_index + 1, 0.0);
        s.b_weights[*b1_index] = 1.0;
    } else {
        s.seed_b_weight = 1.0;
    }
    if (w1_index) {
        s.w_weights.resize(*w1_index + 1, 0.0);
        s.w_weights[*w1_index] = 1.0;
    } else {
        s.seed_w_weight = 1.0;
    }
    return s;
}

/// Safety bound on total iterations: ceil(C * (diam / (eps * ell))^2).
inline std::int64_t iteration_cap(double diam_ub, double ell_lower, double eps,
                                  double cap_constant) {
    if (!(diam_ub > 0.0) || !(ell_lower > 0.0) || !(cap_constant > 0.0) ||
        !(eps > 0.0 && eps < 1.0)) {
        throw NonPositiveInput("iteration_cap requires diam_ub > 0, ell_lower > 0, "
                               "cap_constant > 0 and eps in (0,1)");
    }
    const double ratio = diam_ub / (eps * ell_lower);
    const double v = std::ceil(cap_constant * ratio * ratio);
    constexpr double kMaxCap = 4.0e18;  // fits in int64
    if (!std::isfinite(v) || v >= kMaxCap) return static_cast<std::int64_t>(kMaxCap);
    return static_cast<std::int64_t>(v);
}

/// Lowest index of the shrunk-slab point closest to the middle hyperplane,
/// if any point lies inside. The scan is a deterministic global minimum:
/// strict improvement keeps the lowest index on ties.
inline std::optional<std::size_t> closest_in_slab(const Slab& shrunk,
                                                  const std::vector<Vector>& points,
                                                  double tol) {
    std::optional<std::size_t> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!slab_contains(shrunk, points[i], tol)) continue;
        const double d = mid_distance(shrunk, points[i]);
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

/// Candidate selection over a labeled dataset: the offline realization of the
/// two oracle calls. In-slab points win (closest to the middle hyperplane,
/// lowest index on ties); otherwise the lowest wrongly-sided index is the
/// counterexample; otherwise the slab separates.
inline Candidate select_candidate(const TrainerState& state, const Dataset& data, double eps,
                                  double tol) {
    require_labels(data);
    const Slab shrunk = shrink_slab(Slab{state.b, state.w}, eps);
    if (auto in_slab = closest_in_slab(shrunk, data.points, tol)) {
        return Candidate{Candidate::Kind::InSlab, in_slab};
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Side side = side_of(shrunk, data.points[i], tol);
        if (side == Side::Interior) continue;
        if ((side == Side::Black) != ((*data.labels)[i] == Label::Black)) {
            return Candidate{Candidate::Kind::Misclassified, i};
        }
    }
    return Candidate{Candidate::Kind::Converged, std::nullopt};
}

/// One witness update. A white point pulls w to the projection of b onto the
/// segment [w, p]; a black point acts symmetrically. Weight certificates are
/// updated with the same convex coefficient, so hull membership is preserved.
inline std::pair<TrainerState, StepRecord> apply_update(const TrainerState& state,
                                                        const Vector& p, std::size_t p_index,
                                                        Label label,
                                                        StepCase kind = StepCase::SlabPoint) {
    TrainerState next = state;
    StepRecord rec;
    rec.kind = kind;
    rec.chosen_index = p_index;
    rec.label = label;
    rec.ell_before = state.ell;

    const bool white = (label == Label::White);
    const Vector& fixed = white ? state.b : state.w;
    const Vector& moving = white ? state.w : state.b;
    StepGeometry geom = project_onto_segment(fixed, moving, p);

    std::vector<double>& weights = white ? next.w_weights : next.b_weights;
    double& seed_weight = white ? next.seed_w_weight : next.seed_b_weight;
    const double t = geom.t_clamped;
    for (double& wgt : weights) wgt *= (1.0 - t);
    seed_weight *= (1.0 - t);
    if (p_index >= weights.size()) weights.resize(p_index + 1, 0.0);
    weights[p_index] += t;

    if (white) {
        next.w = geom.foot;
    } else {
        next.b = geom.foot;
    }
    next.ell = distance(next.b, next.w);
    next.iteration = state.iteration + 1;

    rec.iteration = next.iteration;
    rec.ell_after = next.ell;
    rec.geometry = std::move(geom);
    return {std::move(next), std::move(rec)};
}

struct VerifyReport {
    std::int64_t misclassified_count = 0;
    std::int64_t interior_count = 0;
    double width = 0.0;

    bool certified() const { return misclassified_count == 0 && interior_count == 0; }
};

/// Checks a slab against a labeled dataset: counts wrongly-sided points and
/// strictly interior points. Separation is certified iff both counts are 0.
inline VerifyReport verify_separation(const Dataset& data, const Slab& slab, double tol) {
    require_labels(data);
    VerifyReport rep;
    rep.width = slab_length(slab);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Side side = side_of(slab, data.points[i], tol);
        if (side == Side::Interior) {
            ++rep.interior_count;
        } else if ((side == Side::Black) != ((*data.labels)[i] == Label::Black)) {
            ++rep.misclassified_count;
        }
    }
    return rep;
}

namespace detail {

struct LoopHooks {
    // Label of the in-slab point selected in case (B).
    std::function<Label(std::size_t)> slab_label;
    // Case (A) check: a violating index, or nothing when the slab separates.
    std::function<std::optional<std::size_t>(const Slab&)> counterexample;
};

inline void note_certificate(const std::vector<double>& weights, double seed_weight,
                             const Vector& seed, const std::vector<Vector>& points,
                             const Vector& witness, TrainReport& rep) {
    double sum = seed_weight;
    double min_w = seed_weight;
    Vector recon(witness.size(), 0.0);
    if (seed_weight != 0.0) {
        for (std::size_t k = 0; k < recon.size(); ++k) recon[k] = seed_weight * seed[k];
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double wgt = weights[i];
        min_w = std::min(min_w, wgt);
        if (wgt == 0.0) continue;
        sum += wgt;
        const Vector& p = points[i];
        for (std::size_t k = 0; k < recon.size(); ++k) recon[k] += wgt * p[k];
    }
    const double rel = distance(recon, witness) / std::max(1.0, norm(witness));
    rep.cert_min_weight = std::min(rep.cert_min_weight, min_w);
    rep.cert_max_sum_error = std::max(rep.cert_max_sum_error, std::abs(sum - 1.0));
    rep.cert_max_reconstruction_error = std::max(rep.cert_max_reconstruction_error, rel);
}

/// The iterative loop shared by the offline and active modes. Per iteration:
/// if the shrunk slab contains pool points, the closest to the middle
/// hyperplane is labeled and projected in (case B); otherwise a
/// counterexample check either finds a wrongly-sided point to project in
/// (case A) or certifies separation and terminates. The iteration cap is
/// recomputed from the current witness distance whenever it crosses a
/// halving boundary diam/2^j.
inline TrainReport run_loop(const std::vector<Vector>& points, TrainerState state,
                            double diam_ub, const EngineConfig& config, const LoopHooks& hooks,
                            std::vector<std::string> warnings) {
    if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) {
        throw EpsOutOfRange("epsilon must lie in (0,1), got " + std::to_string(config.epsilon));
    }
    if (config.tol < 0.0) {
        throw NonPositiveInput("tol must be >= 0");
    }
    const double eps = config.epsilon;

    TrainReport rep;
    rep.epsilon = eps;
    rep.warnings = std::move(warnings);
    rep.cert_min_weight = 1.0;

    std::int64_t cap = config.explicit_cap
                           ? *config.explicit_cap
                           : iteration_cap(diam_ub, state.ell, eps, config.cap_constant);
    double epoch_boundary = diam_ub / 2.0;
    while (state.ell < epoch_boundary) epoch_boundary /= 2.0;

    auto note_state = [&](const TrainerState& s) {
        note_certificate(s.b_weights, s.seed_b_weight, s.seed_b, points, s.b, rep);
        note_certificate(s.w_weights, s.seed_w_weight, s.seed_w, points, s.w, rep);
    };
    note_state(state);

    while (true) {
        if (rep.iterations >= cap) {
            rep.converged = false;
            break;
        }
        const Slab shrunk = shrink_slab(Slab{state.b, state.w}, eps);
        StepRecord rec;
        if (auto in_slab = closest_in_slab(shrunk, points, config.tol)) {
            ++rep.case_b_count;
            const Label label = hooks.slab_label(*in_slab);
            auto [next, r] = apply_update(state, points[*in_slab], *in_slab, label,
                                          StepCase::SlabPoint);
            state = std::move(next);
            rec = std::move(r);
        } else {
            ++rep.case_a_count;
            const auto cex = hooks.counterexample(shrunk);
            if (!cex) {
                ++rep.iterations;
                rec.iteration = rep.iterations;
                rec.kind = StepCase::Terminal;
                rec.ell_before = state.ell;
                rec.ell_after = state.ell;
                if (config.record_trace) rep.trace.push_back(std::move(rec));
                rep.converged = true;
                break;
            }
            const Side side = side_of(shrunk, points[*cex], config.tol);
            // A genuine counterexample sits on the wrong side, which names its
            // true label. The interior fallback is reachable only if the
            // oracle judges with a different tolerance than the loop.
            const Label label = side == Side::Interior
                                    ? hooks.slab_label(*cex)
                                    : (side == Side::Black ? Label::White : Label::Black);
            auto [next, r] = apply_update(state, points[*cex], *cex, label,
                                          StepCase::Counterexample);
            state = std::move(next);
            rec = std::move(r);
        }
        ++rep.iterations;
        rec.iteration = rep.iterations;
        const bool stalled = rec.geometry && rec.geometry->t_clamped == 0.0;
        if (config.record_trace) rep.trace.push_back(std::move(rec));
        note_state(state);

        if (!(state.ell > 0.0) || !std::isfinite(state.ell)) {
            rep.warnings.push_back("witness distance underflowed; instance has no positive "
                                   "margin or is numerically degenerate");
            rep.converged = false;
            break;
        }
        if (stalled) {
            // The projection clamped onto the unchanged witness: the state is
            // an exact floating-point fixed point and the loop would repeat
            // it until the cap. Stop here and report non-convergence.
            rep.warnings.push_back("update stalled at a floating-point fixed point");
            rep.converged = false;
            break;
        }
        if (!config.explicit_cap && state.ell < epoch_boundary) {
            while (state.ell < epoch_boundary) epoch_boundary /= 2.0;
            cap = iteration_cap(diam_ub, state.ell, eps, config.cap_constant);
        }
    }

    rep.final_slab = shrink_slab(Slab{state.b, state.w}, eps);
    rep.final_ell = state.ell;
    rep.width = (1.0 - eps) * state.ell;
    rep.iteration_cap = cap;
    rep.labeling_calls = rep.case_b_count;
    rep.counterexample_calls = rep.case_a_count;
    return rep;
}

}  // namespace detail

/// Trains on a fully labeled dataset. Default seeds are the lowest-index
/// point of each class. Returns a full report either way: converged = false
/// means the iteration cap (or a numerical stall) was hit first.
inline TrainReport train_offline(
    const Dataset& data, const EngineConfig& config,
    std::optional<std::pair<std::size_t, std::size_t>> seeds = std::nullopt) {
    require_labels(data);

    std::size_t b_idx, w_idx;
    if (seeds) {
        b_idx = seeds->first;
        w_idx = seeds->second;
        if (b_idx >= data.size() || w_idx >= data.size()) {
            throw IndexOutOfRange("seed index outside dataset");
        }
        if ((*data.labels)[b_idx] != Label::Black || (*data.labels)[w_idx] != Label::White) {
            throw Error("seed indices must name a black and a white point, in that order");
        }
    } else {
        const auto b = first_index_of(data, Label::Black);
        const auto w = first_index_of(data, Label::White);
        if (!b || !w) {
            throw SingleClass("offline training needs both classes non-empty");
        }
        b_idx = *b;
        w_idx = *w;
    }

    std::vector<std::string> warnings;
    if (has_conflicting_duplicates(data)) {
        warnings.push_back("coordinate-duplicate points with conflicting labels: the instance "
                           "is inseparable and the run can only end at the iteration cap");
    }

    TrainerState state = init_state(data.points[b_idx], data.points[w_idx], b_idx, w_idx);
    const double diam_ub = diameter_upper_bound(data.points);

    detail::LoopHooks hooks;
    hooks.slab_label = [&data](std::size_t i) { return (*data.labels)[i]; };
    hooks.counterexample = [&data, &config](const Slab& shrunk) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < data.size(); ++i) {
            const Side side = side_of(shrunk, data.points[i], config.tol);
            if (side == Side::Interior) continue;
            if ((side == Side::Black) != ((*data.labels)[i] == Label::Black)) return i;
        }
        return std::nullopt;
    };
    return detail::run_loop(data.points, std::move(state), diam_ub, config, hooks, warnings);
}

/// Trains against a labeling and a counterexample oracle over an unlabeled
/// pool. Case (B) acquires labels through the labeling oracle, each pool
/// point at most once (cached); case (A) hands the current shrunk slab to
/// the counterexample oracle and terminates when it certifies separation.
inline TrainReport train_active(LabelingOracle& label_oracle, CounterexampleOracle& cex_oracle,
                                const std::vector<Vector>& pool, const Vector& b1,
                                const Vector& w1, const EngineConfig& config) {
    auto index_in_pool = [&pool](const Vector& v) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (pool[i] == v) return i;
        }
        return std::nullopt;
    };
    TrainerState state = init_state(b1, w1, index_in_pool(b1), index_in_pool(w1));

    std::vector<Vector> extent = pool;
    extent.push_back(b1);
    extent.push_back(w1);
    const double diam_ub = diameter_upper_bound(extent);

    std::map<std::size_t, Label> cache;
    detail::LoopHooks hooks;
    hooks.slab_label = [&label_oracle, &cache](std::size_t i) {
        auto it = cache.find(i);
        if (it != cache.end()) return it->second;
        const Label l = label_oracle.query(i);
        cache.emplace(i, l);
        return l;
    };
    hooks.counterexample = [&cex_oracle](const Slab& shrunk) { return cex_oracle.query(shrunk); };
    return detail::run_loop(pool, std::move(state), diam_ub, config, hooks, {});
}

}  // namespace mmc
