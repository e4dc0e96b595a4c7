#pragma once

// Timing and storage benchmarks. Every timing point is the mean and sample
// standard deviation over `runs` repetitions (10 by default).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bferl::bench {

inline constexpr std::size_t kRuns = 10;

struct Stats {
  double mean = 0;
  double stddev = 0;  // sample (n - 1) standard deviation; 0 for a single sample
};

Stats summarize(std::span<const double> samples);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

/// Ordinary least squares. r2 is 1 for a perfect fit and for constant y.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct Options {
  std::size_t runs = kRuns;
  std::size_t threads = 1;  // > 1 shards repetitions across threads
  std::uint64_t seed = 1;
};

struct SeriesPoint {
  double x = 0;
  double mean_ms = 0;
  double stddev_ms = 0;
  std::size_t runs = 0;
};

struct TimingSeries {
  std::string name;     // create | challenge | merkle
  std::string x_label;  // CSV column of x: vehicles | ecus
  std::vector<SeriesPoint> points;

  LinearFit fit() const;
};

struct StoragePoint {
  std::uint64_t blocks = 0;
  std::uint64_t bytes = 0;
  bool extrapolated = false;
};

struct StorageSeries {
  std::vector<StoragePoint> points;
  LinearFit fit;  // bytes against blocks over the measured points

  double bytes_per_block() const { return fit.slope; }
  std::uint64_t project(std::uint64_t blocks) const;
};

std::vector<std::size_t> default_vehicle_counts();  // 10..200
std::vector<std::size_t> default_ecu_counts();      // 10..1000
std::vector<std::uint64_t> default_storage_counts();  // 10,000..100,000 materialised
std::vector<std::uint64_t> default_storage_projection();  // up to 5,600,000

/// Time for the upper-tier validators to verify `count` genesis
/// transactions and create the vehicles' blocks.
TimingSeries bench_create(std::span<const std::size_t> vehicle_counts, const Options& opts = {});

/// Time for an RSU to verify and record one response from each of `count`
/// registered vehicles.
TimingSeries bench_challenge(std::span<const std::size_t> vehicle_counts, const Options& opts = {});

/// Time for one SS_ID computation over `count` ECUs.
TimingSeries bench_merkle(std::span<const std::size_t> ecu_counts, const Options& opts = {});

/// Serialized ledger size after registering `count` eight-ECU vehicles,
/// measured at each materialised count and projected linearly to the rest.
StorageSeries bench_storage(std::span<const std::uint64_t> materialized, std::span<const std::uint64_t> projected,
                            const Options& opts = {});

// Output. CSV has a header row; JSON is an array with one object per point.
std::string to_csv(const TimingSeries& s);
std::string to_json(const TimingSeries& s);
std::string to_csv(const StorageSeries& s);
std::string to_json(const StorageSeries& s);

}  // namespace bferl::bench
