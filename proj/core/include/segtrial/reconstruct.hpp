#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "segtrial/likelihood.hpp"
#include "segtrial/trial_data.hpp"

namespace segtrial {

enum class reconstruct_strategy { midpoint, model_conditional };

/// Expand aggregate bins back into subject records: each bin yields exactly
/// `total` records, `events` of them flagged with the outcome.
///
/// midpoint places every record at the geometric middle sqrt(lo*hi) of its
/// bin; model_conditional draws ln values from the outcome-conditional
/// Gaussian truncated to the bin (seeded, deterministic). The bin list order
/// is preserved, outcome records first within each bin.
std::vector<SubjectRecord> reconstruct_records_from_bins(std::span<const AggregateBin> bins,
                                                         reconstruct_strategy strategy,
                                                         const OutcomeModel* model = nullptr,
                                                         std::uint64_t seed = 0);

/// Convenience: reconstruct a dataset's bins and return a copy whose records
/// are the reconstruction (existing records are kept first).
TrialDataset reconstruct_dataset(const TrialDataset& data, reconstruct_strategy strategy,
                                 const OutcomeModel* model = nullptr, std::uint64_t seed = 0);

}  // namespace segtrial
