#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace segtrial {

/// A trial arm, identified by label. Exactly one arm per dataset is the
/// control arm; dose-specific labels ("irbesartan-150") act as sub-arms of
/// the treatment side and can be pooled through an ArmSet.
struct Arm {
  std::string label;

  friend bool operator==(const Arm&, const Arm&) = default;
  friend auto operator<=>(const Arm&, const Arm&) = default;
};

using ArmSet = std::vector<Arm>;

bool arm_in_set(const Arm& arm, const ArmSet& set);

/// Half-open interval (lo, hi]: a value v belongs iff lo < v <= hi.
/// The lower-open convention keeps a value exactly on a band edge (e.g. 80)
/// in the lower band, so "up to 80" segments count it.
struct Range {
  double lo;
  double hi;

  bool contains(double v) const { return v > lo && v <= hi; }
  bool covers(const Range& other) const { return other.lo >= lo && other.hi <= hi; }

  friend bool operator==(const Range&, const Range&) = default;
};

/// One trial participant.
struct SubjectRecord {
  double baseline_value;  // baseline test value, > 0 (log must exist)
  Arm arm;
  bool outcome;
  std::optional<double> outcome_value;  // continuous end-of-study value, if recorded
};

/// One binned count row: `events` of `total` subjects whose baseline value
/// lies in (lo, hi] reached the outcome.
struct AggregateBin {
  Range range;
  Arm arm;
  std::int64_t events;
  std::int64_t total;
};

struct TrialDataset {
  std::string name;
  std::vector<SubjectRecord> records;
  std::vector<AggregateBin> bins;
  Range eligibility;
  std::optional<double> outcome_threshold;
  Arm control;

  /// Distinct arm labels, control first, then first-appearance order.
  ArmSet arms() const;
  ArmSet treatment_arms() const;

  bool has_records() const { return !records.empty(); }

  /// Throws errc::parse / errc::domain when a type invariant is violated:
  /// non-positive baselines, records outside eligibility, overlapping bins
  /// within an arm, event counts exceeding totals, or an empty dataset.
  void validate() const;
};

/// Keep only records of `arms` (bins likewise). Metadata is preserved.
TrialDataset subset_arms(const TrialDataset& data, const ArmSet& arms);

/// Allocation rule of a segmental trial: each range of baseline values is
/// served by one arm set. Ranges must be pairwise disjoint.
struct Segment {
  Range range;
  ArmSet arms;
};

struct SegmentRule {
  std::vector<Segment> segments;

  void validate(const TrialDataset& data) const;
};

enum class csv_format { subject_csv, bin_csv };

/// Dataset metadata that CSV files do not carry; supplied by the caller
/// (CLI flags or a JSON sidecar). When `eligibility` is absent it is widened
/// to the observed value range.
struct DatasetMeta {
  std::string name = "dataset";
  std::optional<Range> eligibility;
  std::optional<double> outcome_threshold;
  Arm control{"placebo"};
};

/// Parse a dataset from CSV.
///
/// subject_csv header: aer,arm,outcome[,outcome_value]   outcome in {0,1}
/// bin_csv header:     lo,hi,arm,events,total
///
/// Malformed rows raise errc::parse with the offending line number; an empty
/// body raises errc::parse as an empty-dataset error.
TrialDataset parse_dataset(std::istream& in, csv_format format, const DatasetMeta& meta);

/// Emit the dataset in the given CSV format. Subject emission requires
/// records, bin emission requires bins.
void emit_dataset(const TrialDataset& data, std::ostream& out, csv_format format);

/// Restrict to the data a segmental trial would have produced: records and
/// bins are kept when their baseline range falls inside a segment and their
/// arm belongs to that segment's arm set. Counts are never created: output
/// bins carry exactly their input counts. A bin that straddles a segment
/// boundary raises errc::boundary (bins cannot be split).
TrialDataset apply_segment_filter(const TrialDataset& data, const SegmentRule& rule);

/// Count an arm's subject records into bins over consecutive edge pairs
/// (edges[i], edges[i+1]]. Records outside (edges.front(), edges.back()]
/// raise errc::out_of_range.
std::vector<AggregateBin> bin_counts(const TrialDataset& data, std::span<const double> edges,
                                     const Arm& arm);

}  // namespace segtrial
