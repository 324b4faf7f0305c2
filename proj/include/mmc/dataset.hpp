#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mmc/errors.hpp"
#include "mmc/geometry.hpp"

namespace mmc {

enum class Label { Black, White };

inline Label opposite(Label l) {
    return l == Label::Black ? Label::White : Label::Black;
}

inline const char* to_string(Label l) {
    return l == Label::Black ? "black" : "white";
}

/// Indexed point set, optionally labeled. Labels are all-or-none: an
/// unlabeled dataset is a pool whose labels live behind an oracle.
struct Dataset {
    std::vector<Vector> points;
    std::optional<std::vector<Label>> labels;
    std::size_t dim = 0;

    /// Indices whose labels were flipped by inject_mislabels (generator
    /// metadata; ignored by training).
    std::vector<std::size_t> flipped;

    std::size_t size() const { return points.size(); }
    bool labeled() const { return labels.has_value(); }
};

inline Dataset make_dataset(std::vector<Vector> points,
                            std::optional<std::vector<Label>> labels = std::nullopt) {
    Dataset d;
    if (points.empty()) throw EmptyInput("dataset has no points");
    d.dim = points[0].size();
    if (d.dim == 0) throw EmptyInput("points must have dimension >= 1");
    for (const Vector& p : points) {
        check_same_dim(p, points[0]);
        if (!all_finite(p)) throw ParseError("non-finite coordinate in dataset");
    }
    if (labels && labels->size() != points.size()) {
        throw ParseError("label count does not match point count");
    }
    d.points = std::move(points);
    d.labels = std::move(labels);
    return d;
}

inline void require_labels(const Dataset& d) {
    if (!d.labeled()) throw MissingLabels("operation requires a labeled dataset");
}

/// Lowest index carrying the given label, if any.
inline std::optional<std::size_t> first_index_of(const Dataset& d, Label l) {
    require_labels(d);
    for (std::size_t i = 0; i < d.size(); ++i) {
        if ((*d.labels)[i] == l) return i;
    }
    return std::nullopt;
}

/// True iff some coordinate-identical pair of points carries conflicting
/// labels, which makes the instance inseparable.
inline bool has_conflicting_duplicates(const Dataset& d) {
    require_labels(d);
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            if ((*d.labels)[i] != (*d.labels)[j] && d.points[i] == d.points[j]) return true;
        }
    }
    return false;
}

}  // namespace mmc
