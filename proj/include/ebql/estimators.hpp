#pragma once

#include <cstddef>
#include <span>

#include "ebql/stats.hpp"

namespace ebql {

// Output of any max-mean estimator. For the single estimator the two phases
// coincide (index_phase_count == N, mean_phase_count == 0); for the split
// estimators the two counts sum to N.
struct MaxMeanEstimate {
    std::size_t chosen_index = 0;
    double estimate = 0.0;
    std::size_t index_phase_count = 0;
    std::size_t mean_phase_count = 0;
};

// Max over arms of the full-sample empirical means. Positively biased.
MaxMeanEstimate single_estimator(const SampleSet& samples);

// Two-phase estimator over a K=2 partition: one subset picks the arm, the
// other estimates its mean. Negatively biased.
MaxMeanEstimate double_estimator(const SampleSet& samples, const Partition& partition,
                                 std::size_t index_subset);

// Generalized split: index_indices pick the arm, mean_indices estimate its
// mean. The two index lists must be disjoint and nonempty.
MaxMeanEstimate weighted_double_estimator(const SampleSet& samples,
                                          std::span<const std::size_t> index_indices,
                                          std::span<const std::size_t> mean_indices);

// K-way ensemble estimator: subset k_tilde picks the arm, the other K-1
// subset means are averaged. Equal to the matched weighted double estimator
// (the proxy identity).
MaxMeanEstimate ensemble_estimator(const SampleSet& samples, const Partition& partition,
                                   std::size_t k_tilde);

}  // namespace ebql
