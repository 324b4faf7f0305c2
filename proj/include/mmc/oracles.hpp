#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmc/dataset.hpp"
#include "mmc/errors.hpp"
#include "mmc/geometry.hpp"
#include "mmc/rng.hpp"

namespace mmc {

/// Answers the label of one query point. The call counter increments by
/// exactly one per query and answers are stable.
class LabelingOracle {
public:
    virtual ~LabelingOracle() = default;

    Label query(std::size_t index) {
        ++calls_;
        return do_query(index);
    }

    std::int64_t calls() const { return calls_; }

private:
    virtual Label do_query(std::size_t index) = 0;

    std::int64_t calls_ = 0;
};

/// Given a candidate separating slab, returns the index of a violating point
/// (interior or wrongly sided w.r.t. the oracle's ground truth), or nothing.
class CounterexampleOracle {
public:
    virtual ~CounterexampleOracle() = default;

    std::optional<std::size_t> query(const Slab& slab) {
        ++calls_;
        return do_query(slab);
    }

    std::int64_t calls() const { return calls_; }

private:
    virtual std::optional<std::size_t> do_query(const Slab& slab) = 0;

    std::int64_t calls_ = 0;
};

/// Labeling oracle backed by a fully labeled dataset.
class PoolLabelingOracle final : public LabelingOracle {
public:
    explicit PoolLabelingOracle(const Dataset& data) : data_(data) {
        require_labels(data);
    }

private:
    Label do_query(std::size_t index) override {
        if (index >= data_.size()) {
            throw IndexOutOfRange("label query for index " + std::to_string(index) +
                                  " on a pool of " + std::to_string(data_.size()));
        }
        return (*data_.labels)[index];
    }

    const Dataset& data_;
};

/// True iff the point violates the slab-as-classifier: it is interior, or it
/// sits on the side opposite to its label.
inline bool violates_slab(const Slab& slab, const Vector& p, Label label, double tol) {
    const Side side = side_of(slab, p, tol);
    if (side == Side::Interior) return true;
    return (side == Side::Black) != (label == Label::Black);
}

/// Exact counterexample oracle: full scan of a labeled dataset, lowest
/// violating index wins.
class ExactCounterexampleOracle final : public CounterexampleOracle {
public:
    explicit ExactCounterexampleOracle(const Dataset& data, double tol = 1e-12)
        : data_(data), tol_(tol) {
        require_labels(data);
    }

private:
    std::optional<std::size_t> do_query(const Slab& slab) override {
        for (std::size_t i = 0; i < data_.size(); ++i) {
            if (violates_slab(slab, data_.points[i], (*data_.labels)[i], tol_)) return i;
        }
        return std::nullopt;
    }

    const Dataset& data_;
    double tol_;
};

/// Counterexample oracle that draws m pool indices uniformly with replacement
/// per query and checks only those, acquiring labels through a labeling
/// oracle (answers cached across queries). Sound but one-sidedly incomplete:
/// "none" is wrong with probability at most (1-rho)^m when a fraction rho of
/// the pool violates. The sample for query k depends only on (rng_seed, k).
class SampledCounterexampleOracle final : public CounterexampleOracle {
public:
    SampledCounterexampleOracle(LabelingOracle& label_oracle, const std::vector<Vector>& pool,
                                std::size_t m, std::uint64_t rng_seed, double tol = 1e-12)
        : label_oracle_(label_oracle), pool_(pool), m_(m), rng_seed_(rng_seed), tol_(tol) {
        if (m_ > 0 && pool_.empty()) {
            throw EmptyPool("sampled counterexample oracle over an empty pool");
        }
    }

private:
    std::optional<std::size_t> do_query(const Slab& slab) override {
        Rng rng(mix_seed(rng_seed_, ordinal_++));
        for (std::size_t k = 0; k < m_; ++k) {
            const std::size_t i = rng.uniform_index(pool_.size());
            if (violates_slab(slab, pool_[i], label_of(i), tol_)) return i;
        }
        return std::nullopt;
    }

    Label label_of(std::size_t i) {
        auto it = cache_.find(i);
        if (it != cache_.end()) return it->second;
        const Label l = label_oracle_.query(i);
        cache_.emplace(i, l);
        return l;
    }

    LabelingOracle& label_oracle_;
    const std::vector<Vector>& pool_;
    std::size_t m_;
    std::uint64_t rng_seed_;
    double tol_;
    std::uint64_t ordinal_ = 0;
    std::map<std::size_t, Label> cache_;
};

}  // namespace mmc
