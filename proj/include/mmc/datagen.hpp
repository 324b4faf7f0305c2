#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "mmc/dataset.hpp"
#include "mmc/errors.hpp"
#include "mmc/geometry.hpp"
#include "mmc/rng.hpp"

namespace mmc {

/// Parameters for a synthetic instance with a planted margin.
struct GenSpec {
    std::size_t dim = 2;
    std::size_t n = 2;
    double margin = 1.0;  // planted gamma
    double diam = 10.0;   // all points fit in a ball of this diameter
    std::uint64_t seed = 0;
};

struct PlantedInstance {
    Dataset data;
    Vector planted_normal;  // unit vector; classes are separated by margin along it
    std::size_t anchor_black_index = 0;  // the point at -(margin/2) * normal
    std::size_t anchor_white_index = 0;  // the point at +(margin/2) * normal
};

namespace detail_gen {

inline Vector random_unit(Rng& rng, std::size_t dim) {
    Vector u(dim);
    while (true) {
        for (double& x : u) x = rng.normal();
        const double n = norm(u);
        if (n > 1e-12) {
            for (double& x : u) x /= n;
            return u;
        }
    }
}

inline Vector random_in_ball(Rng& rng, std::size_t dim, double radius) {
    Vector x = random_unit(rng, dim);
    const double r = radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
    for (double& c : x) c *= r;
    return x;
}

/// Draws a point of the ball of radius `radius` with sign*(u.x) >= offset.
/// Rejection first; after too many misses the last draw is projected onto
/// the feasible region, which keeps generation total and deterministic.
inline Vector sample_halfspace_cap(Rng& rng, const Vector& u, double sign, double offset,
                                   double radius, std::size_t dim) {
    constexpr int kMaxAttempts = 1000000;
    Vector x;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        x = random_in_ball(rng, dim, radius);
        if (sign * dot(u, x) >= offset) return x;
    }
    // Clamp the coordinate along u to the feasible band, then pull the
    // orthogonal part back inside the ball if needed.
    double along = dot(u, x);
    Vector perp(dim);
    for (std::size_t k = 0; k < dim; ++k) perp[k] = x[k] - along * u[k];
    double clamped = sign * std::max(sign * along, offset);
    double perp2 = dot(perp, perp);
    const double max_perp2 = radius * radius - clamped * clamped;
    if (perp2 > max_perp2) {
        const double scale = max_perp2 > 0.0 ? std::sqrt(max_perp2 / perp2) : 0.0;
        for (double& c : perp) c *= scale;
    }
    for (std::size_t k = 0; k < dim; ++k) x[k] = perp[k] + clamped * u[k];
    return x;
}

}  // namespace detail_gen

/// Generates a labeled instance with an exact planted gap: a seeded unit
/// normal u, generic points drawn in the ball of diameter `diam` on the
/// correct side of the slab, and the two anchors at +-(margin/2)*u as the
/// last two points (black, then white). Keeping the anchors at the tail
/// leaves the lowest-index point of each class generic, so default-seeded
/// training starts away from the optimum. Deterministic per seed.
inline PlantedInstance gen_planted(const GenSpec& spec) {
    if (spec.dim < 1 || spec.n < 2) {
        throw InfeasibleSpec("gen_planted needs dim >= 1 and n >= 2");
    }
    if (!(spec.margin > 0.0) || !(spec.margin < spec.diam)) {
        throw InfeasibleSpec("gen_planted needs 0 < margin < diam");
    }

    Rng rng(spec.seed);
    const Vector u = detail_gen::random_unit(rng, spec.dim);
    const double half_gap = spec.margin / 2.0;
    const double radius = spec.diam / 2.0;

    const std::size_t n_white = (spec.n + 1) / 2;
    const std::size_t n_black = spec.n / 2;

    std::vector<Vector> points;
    std::vector<Label> labels;
    points.reserve(spec.n);
    labels.reserve(spec.n);

    for (std::size_t i = 1; i < n_white; ++i) {
        points.push_back(detail_gen::sample_halfspace_cap(rng, u, +1.0, half_gap, radius,
                                                          spec.dim));
        labels.push_back(Label::White);
    }
    for (std::size_t i = 1; i < n_black; ++i) {
        points.push_back(detail_gen::sample_halfspace_cap(rng, u, -1.0, half_gap, radius,
                                                          spec.dim));
        labels.push_back(Label::Black);
    }

    Vector black_anchor(spec.dim), white_anchor(spec.dim);
    for (std::size_t k = 0; k < spec.dim; ++k) {
        black_anchor[k] = -half_gap * u[k];
        white_anchor[k] = half_gap * u[k];
    }
    points.push_back(black_anchor);
    labels.push_back(Label::Black);
    points.push_back(white_anchor);
    labels.push_back(Label::White);

    PlantedInstance inst;
    inst.data = make_dataset(std::move(points), std::move(labels));
    inst.planted_normal = u;
    inst.anchor_black_index = spec.n - 2;
    inst.anchor_white_index = spec.n - 1;
    return inst;
}

/// Flips the labels of ceil(rho * n) distinct seeded-uniform indices. The
/// flipped index set is recorded in the returned dataset's metadata.
inline Dataset inject_mislabels(const Dataset& data, double rho, std::uint64_t seed) {
    require_labels(data);
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw NonPositiveInput("rho must lie in [0,1]");
    }
    const std::size_t n = data.size();
    // Guarded ceil: 0.05 * 100 must mean exactly 5 flips.
    const double raw = rho * static_cast<double>(n);
    std::size_t k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    k = std::min(k, n);

    Dataset out = data;
    out.flipped.clear();
    if (k == 0) return out;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.uniform_index(n - i);
        std::swap(order[i], order[j]);
    }
    out.flipped.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.flipped.begin(), out.flipped.end());
    for (const std::size_t i : out.flipped) {
        (*out.labels)[i] = opposite((*out.labels)[i]);
    }
    return out;
}

}  // namespace mmc
