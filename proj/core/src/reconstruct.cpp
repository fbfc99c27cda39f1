#include "segtrial/reconstruct.hpp"

#include <cmath>

#include "segtrial/errors.hpp"
#include "segtrial/rng.hpp"
#include "segtrial/stats.hpp"

namespace segtrial {

std::vector<SubjectRecord> reconstruct_records_from_bins(std::span<const AggregateBin> bins,
                                                         reconstruct_strategy strategy,
                                                         const OutcomeModel* model,
                                                         std::uint64_t seed) {
  if (strategy == reconstruct_strategy::model_conditional && model == nullptr)
    raise(errc::config, "reconstruct: model_conditional strategy needs an outcome model");

  std::vector<SubjectRecord> out;
  RngStream rng(seed);
  for (const auto& bin : bins) {
    const double mid = std::sqrt(bin.range.lo * bin.range.hi);
    for (std::int64_t i = 0; i < bin.total; ++i) {
      const bool outcome = i < bin.events;
      double value = mid;
      if (strategy == reconstruct_strategy::model_conditional) {
        const GaussianParams& g = outcome ? model->with_outcome : model->without_outcome;
        const TruncatedGaussian tg{g.mu, g.sigma, std::log(bin.range.lo), std::log(bin.range.hi)};
        value = std::exp(rng.truncated_normal(tg));
        if (!(value > bin.range.lo)) value = std::nextafter(bin.range.lo, bin.range.hi);
        if (value > bin.range.hi) value = bin.range.hi;
      }
      out.push_back(SubjectRecord{value, bin.arm, outcome, std::nullopt});
    }
  }
  return out;
}

TrialDataset reconstruct_dataset(const TrialDataset& data, reconstruct_strategy strategy,
                                 const OutcomeModel* model, std::uint64_t seed) {
  TrialDataset out = data;
  auto rebuilt = reconstruct_records_from_bins(data.bins, strategy, model, seed);
  out.records.insert(out.records.end(), rebuilt.begin(), rebuilt.end());
  out.bins.clear();
  return out;
}

}  // namespace segtrial
