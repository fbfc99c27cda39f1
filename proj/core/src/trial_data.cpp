#include "segtrial/trial_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "segtrial/errors.hpp"

namespace segtrial {

bool arm_in_set(const Arm& arm, const ArmSet& set) {
  return std::find(set.begin(), set.end(), arm) != set.end();
}

ArmSet TrialDataset::arms() const {
  ArmSet out{control};
  auto add = [&out](const Arm& a) {
    if (!arm_in_set(a, out)) out.push_back(a);
  };
  for (const auto& r : records) add(r.arm);
  for (const auto& b : bins) add(b.arm);
  return out;
}

ArmSet TrialDataset::treatment_arms() const {
  ArmSet all = arms();
  ArmSet out;
  for (const auto& a : all)
    if (a != control) out.push_back(a);
  return out;
}

void TrialDataset::validate() const {
  if (records.empty() && bins.empty())
    raise(errc::parse, "dataset '" + name + "' has neither records nor bins");
  if (!(eligibility.lo > 0.0) || !(eligibility.hi > eligibility.lo))
    raise(errc::domain, "dataset '" + name + "' eligibility range must satisfy 0 < lo < hi");
  for (const auto& r : records) {
    if (!(r.baseline_value > 0.0))
      raise(errc::domain, "record with non-positive baseline value in '" + name + "'");
    if (!eligibility.contains(r.baseline_value))
      raise(errc::domain, "record baseline " + std::to_string(r.baseline_value) +
                              " outside eligibility range in '" + name + "'");
    if (r.outcome_value && !(*r.outcome_value > 0.0))
      raise(errc::domain, "record with non-positive outcome value in '" + name + "'");
    if (r.outcome_value && outcome_threshold &&
        r.outcome != (*r.outcome_value > *outcome_threshold))
      raise(errc::domain, "record outcome flag inconsistent with outcome value in '" + name + "'");
  }
  for (const auto& b : bins) {
    if (!(b.range.lo > 0.0) || !(b.range.lo <= b.range.hi))
      raise(errc::domain, "bin with invalid range in '" + name + "'");
    if (b.events < 0 || b.total <= 0 || b.events > b.total)
      raise(errc::domain, "bin with invalid counts in '" + name + "'");
  }
  // bins of one arm must not overlap
  for (std::size_t i = 0; i < bins.size(); ++i)
    for (std::size_t j = i + 1; j < bins.size(); ++j) {
      if (bins[i].arm != bins[j].arm) continue;
      const Range& a = bins[i].range;
      const Range& b = bins[j].range;
      if (a.lo < b.hi && b.lo < a.hi)
        raise(errc::domain, "overlapping bins for arm '" + bins[i].arm.label + "' in '" + name + "'");
    }
}

TrialDataset subset_arms(const TrialDataset& data, const ArmSet& arms) {
  TrialDataset out;
  out.name = data.name;
  out.eligibility = data.eligibility;
  out.outcome_threshold = data.outcome_threshold;
  out.control = data.control;
  for (const auto& r : data.records)
    if (arm_in_set(r.arm, arms)) out.records.push_back(r);
  for (const auto& b : data.bins)
    if (arm_in_set(b.arm, arms)) out.bins.push_back(b);
  return out;
}

void SegmentRule::validate(const TrialDataset& data) const {
  if (segments.empty()) raise(errc::config, "segment rule has no segments");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!(segments[i].range.lo < segments[i].range.hi))
      raise(errc::config, "segment with empty range");
    if (segments[i].arms.empty()) raise(errc::config, "segment with no arms");
    for (std::size_t j = i + 1; j < segments.size(); ++j) {
      const Range& a = segments[i].range;
      const Range& b = segments[j].range;
      if (a.lo < b.hi && b.lo < a.hi) raise(errc::config, "segment ranges overlap");
    }
  }
  const ArmSet known = data.arms();
  for (const auto& seg : segments)
    for (const auto& arm : seg.arms)
      if (!arm_in_set(arm, known))
        raise(errc::config, "segment references unknown arm '" + arm.label + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
  }
  return fields;
}

double parse_number(const std::string& s, int line_no, const char* what) {
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    raise(errc::parse, std::string("line ") + std::to_string(line_no) + ": expected numeric " +
                           what + ", got '" + s + "'");
  return value;
}

std::int64_t parse_count(const std::string& s, int line_no, const char* what) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    raise(errc::parse, std::string("line ") + std::to_string(line_no) + ": expected integer " +
                           what + ", got '" + s + "'");
  return value;
}

Range widen_to_data(const TrialDataset& d) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& r : d.records) {
    lo = std::min(lo, r.baseline_value);
    hi = std::max(hi, r.baseline_value);
  }
  for (const auto& b : d.bins) {
    lo = std::min(lo, b.range.lo);
    hi = std::max(hi, b.range.hi);
  }
  // nudge below the minimum so the strict lower bound still admits it
  return Range{std::nextafter(lo, 0.0), hi};
}

}  // namespace

TrialDataset parse_dataset(std::istream& in, csv_format format, const DatasetMeta& meta) {
  TrialDataset out;
  out.name = meta.name;
  out.outcome_threshold = meta.outcome_threshold;
  out.control = meta.control;

  std::string line;
  if (!std::getline(in, line)) raise(errc::parse, "empty input: missing header row");
  const auto header = split_csv_line(line);
  const bool subject = format == csv_format::subject_csv;
  if (subject) {
    if (header.size() < 3 || header[0] != "aer" || header[1] != "arm" || header[2] != "outcome")
      raise(errc::parse, "line 1: expected header 'aer,arm,outcome[,outcome_value]'");
  } else {
    const std::vector<std::string> want{"lo", "hi", "arm", "events", "total"};
    if (header.size() != 5 || !std::equal(header.begin(), header.end(), want.begin()))
      raise(errc::parse, "line 1: expected header 'lo,hi,arm,events,total'");
  }

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (subject) {
      if (fields.size() != 3 && fields.size() != 4)
        raise(errc::parse, "line " + std::to_string(line_no) + ": expected 3 or 4 columns, got " +
                               std::to_string(fields.size()));
      SubjectRecord rec;
      rec.baseline_value = parse_number(fields[0], line_no, "aer");
      if (!(rec.baseline_value > 0.0))
        raise(errc::parse, "line " + std::to_string(line_no) + ": baseline value must be > 0");
      if (fields[1].empty())
        raise(errc::parse, "line " + std::to_string(line_no) + ": empty arm label");
      rec.arm = Arm{fields[1]};
      if (fields[2] == "0")
        rec.outcome = false;
      else if (fields[2] == "1")
        rec.outcome = true;
      else
        raise(errc::parse, "line " + std::to_string(line_no) + ": outcome must be 0 or 1");
      if (fields.size() == 4 && !fields[3].empty()) {
        rec.outcome_value = parse_number(fields[3], line_no, "outcome_value");
        if (!(*rec.outcome_value > 0.0))
          raise(errc::parse, "line " + std::to_string(line_no) + ": outcome value must be > 0");
      }
      out.records.push_back(std::move(rec));
    } else {
      if (fields.size() != 5)
        raise(errc::parse, "line " + std::to_string(line_no) + ": expected 5 columns, got " +
                               std::to_string(fields.size()));
      AggregateBin bin;
      bin.range.lo = parse_number(fields[0], line_no, "lo");
      bin.range.hi = parse_number(fields[1], line_no, "hi");
      if (!(bin.range.lo > 0.0) || !(bin.range.lo <= bin.range.hi))
        raise(errc::parse, "line " + std::to_string(line_no) + ": need 0 < lo <= hi");
      if (fields[2].empty())
        raise(errc::parse, "line " + std::to_string(line_no) + ": empty arm label");
      bin.arm = Arm{fields[2]};
      bin.events = parse_count(fields[3], line_no, "events");
      bin.total = parse_count(fields[4], line_no, "total");
      if (bin.events < 0 || bin.total <= 0 || bin.events > bin.total)
        raise(errc::parse, "line " + std::to_string(line_no) + ": need 0 <= events <= total, total > 0");
      out.bins.push_back(std::move(bin));
    }
  }
  if (out.records.empty() && out.bins.empty()) raise(errc::parse, "empty dataset: no data rows");

  out.eligibility = meta.eligibility ? *meta.eligibility : widen_to_data(out);
  out.validate();
  return out;
}

void emit_dataset(const TrialDataset& data, std::ostream& out, csv_format format) {
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  if (format == csv_format::subject_csv) {
    if (data.records.empty()) raise(errc::domain, "emit: dataset has no subject records");
    const bool any_ov =
        std::any_of(data.records.begin(), data.records.end(),
                    [](const SubjectRecord& r) { return r.outcome_value.has_value(); });
    out << (any_ov ? "aer,arm,outcome,outcome_value\n" : "aer,arm,outcome\n");
    for (const auto& r : data.records) {
      out << num(r.baseline_value) << ',' << r.arm.label << ',' << (r.outcome ? '1' : '0');
      if (any_ov) {
        out << ',';
        if (r.outcome_value) out << num(*r.outcome_value);
      }
      out << '\n';
    }
  } else {
    if (data.bins.empty()) raise(errc::domain, "emit: dataset has no bins");
    out << "lo,hi,arm,events,total\n";
    for (const auto& b : data.bins)
      out << num(b.range.lo) << ',' << num(b.range.hi) << ',' << b.arm.label << ',' << b.events
          << ',' << b.total << '\n';
  }
}

TrialDataset apply_segment_filter(const TrialDataset& data, const SegmentRule& rule) {
  rule.validate(data);
  TrialDataset out;
  out.name = data.name + "/segmental";
  out.eligibility = data.eligibility;
  out.outcome_threshold = data.outcome_threshold;
  out.control = data.control;

  for (const auto& r : data.records)
    for (const auto& seg : rule.segments)
      if (seg.range.contains(r.baseline_value) && arm_in_set(r.arm, seg.arms)) {
        out.records.push_back(r);
        break;
      }

  for (const auto& b : data.bins) {
    for (const auto& seg : rule.segments) {
      const bool overlaps = b.range.lo < seg.range.hi && seg.range.lo < b.range.hi;
      if (!overlaps) continue;
      if (!seg.range.covers(b.range))
        raise(errc::boundary, "bin (" + std::to_string(b.range.lo) + ", " +
                                  std::to_string(b.range.hi) +
                                  "] straddles a segment boundary; bins cannot be split");
      if (arm_in_set(b.arm, seg.arms)) out.bins.push_back(b);
      break;
    }
  }

  if (out.records.empty() && out.bins.empty())
    raise(errc::insufficient_data, "segment rule matched no data");
  return out;
}

std::vector<AggregateBin> bin_counts(const TrialDataset& data, std::span<const double> edges,
                                     const Arm& arm) {
  if (edges.size() < 2) raise(errc::config, "bin_counts: need at least two edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (!(edges[i] < edges[i + 1])) raise(errc::config, "bin_counts: edges must be ascending");

  std::vector<AggregateBin> bins;
  bins.reserve(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    bins.push_back(AggregateBin{Range{edges[i], edges[i + 1]}, arm, 0, 0});

  for (const auto& r : data.records) {
    if (r.arm != arm) continue;
    if (!(r.baseline_value > edges.front() && r.baseline_value <= edges.back()))
      raise(errc::out_of_range, "record value " + std::to_string(r.baseline_value) +
                                    " outside binning range");
    // (lo, hi] bins: the first edge >= value closes the bin the value falls in
    const auto it = std::lower_bound(edges.begin(), edges.end(), r.baseline_value);
    const std::size_t idx = static_cast<std::size_t>(it - edges.begin());
    AggregateBin& bin = bins[idx - 1];
    bin.total += 1;
    if (r.outcome) bin.events += 1;
  }
  return bins;
}

}  // namespace segtrial
