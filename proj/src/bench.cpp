#include "bferl/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "bferl/protocol.hpp"

namespace bferl::bench {

Stats summarize(std::span<const double> samples) {
  Stats s;
  if (samples.empty()) return s;
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double var = 0;
    for (double v : samples) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(samples.size() - 1));
  }
  return s;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  LinearFit f;
  const std::size_t n = std::min(x.size(), y.size());
  if (n == 0) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

LinearFit TimingSeries::fit() const {
  std::vector<double> xs, ys;
  for (const auto& p : points) xs.push_back(p.x), ys.push_back(p.mean_ms);
  return fit_line(xs, ys);
}

std::uint64_t StorageSeries::project(std::uint64_t blocks) const {
  double v = fit.intercept + fit.slope * static_cast<double>(blocks);
  return v < 0 ? 0 : static_cast<std::uint64_t>(std::llround(v));
}

std::vector<std::size_t> default_vehicle_counts() { return {10, 25, 50, 75, 100, 125, 150, 175, 200}; }
std::vector<std::size_t> default_ecu_counts() { return {10, 50, 100, 250, 500, 750, 1000}; }
std::vector<std::uint64_t> default_storage_counts() { return {10'000, 25'000, 50'000, 100'000}; }
std::vector<std::uint64_t> default_storage_projection() {
  return {100'000, 1'000'000, 2'000'000, 3'000'000, 4'000'000, 5'600'000};
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Runs `one(run_index)` opts.runs times and returns the per-run samples in
// run order. Each call builds its own state, so runs can go to threads.
template <typename F>
std::vector<double> repeat(const Options& opts, F&& one) {
  std::vector<double> samples(opts.runs);
  const std::size_t threads = std::max<std::size_t>(1, std::min(opts.threads, opts.runs));
  if (threads == 1) {
    for (std::size_t r = 0; r < opts.runs; ++r) samples[r] = one(r);
    return samples;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t r = t; r < opts.runs; r += threads) samples[r] = one(r);
    });
  for (auto& th : pool) th.join();
  return samples;
}

constexpr std::size_t kBenchEcus = 8;

EcuState bench_state(Rng& rng, std::size_t ecus) {
  std::vector<Digest> digests;
  for (std::size_t i = 0; i < ecus; ++i) digests.push_back(rng.digest());
  return EcuState::from_digests(digests, 0);
}

struct Registry {
  KeyPair maker;
  UpperTier upper;

  explicit Registry(std::uint64_t seed)
      : maker(generate_keypair(derive_seed(seed, "bench-maker", 0))),
        upper({generate_keypair(derive_seed(seed, "bench-authority", 0)),
               generate_keypair(derive_seed(seed, "bench-authority", 1))},
              0) {
    upper.authorize_maker(maker.public_key);
  }
};

struct Fleet {
  std::vector<KeyPair> keys;
  std::vector<EcuState> states;
  std::vector<Genesis> genesis;
};

Fleet make_fleet(const KeyPair& maker, std::uint64_t seed, std::size_t run, std::size_t count) {
  Fleet f;
  Rng rng = Rng::derive(seed, "bench-fleet", run);
  for (std::size_t i = 0; i < count; ++i) {
    f.keys.push_back(generate_keypair(derive_seed(seed, "bench-vehicle", run * 1'000'000 + i)));
    f.states.push_back(bench_state(rng, kBenchEcus));
    f.genesis.push_back(make_genesis(maker, f.keys.back().public_key, f.states.back(), 1));
  }
  return f;
}

template <typename Measure>
TimingSeries timing_series(std::string name, std::string x_label, std::span<const std::size_t> xs,
                           const Options& opts, Measure&& measure) {
  TimingSeries s{std::move(name), std::move(x_label), {}};
  for (std::size_t x : xs) {
    auto samples = repeat(opts, [&](std::size_t run) { return measure(x, run); });
    Stats st = summarize(samples);
    s.points.push_back({static_cast<double>(x), st.mean, st.stddev, samples.size()});
  }
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

TimingSeries bench_create(std::span<const std::size_t> vehicle_counts, const Options& opts) {
  return timing_series("create", "vehicles", vehicle_counts, opts, [&](std::size_t count, std::size_t run) {
    Registry reg(opts.seed);
    Fleet fleet = make_fleet(reg.maker, opts.seed, run, count);
    Ledger lower;
    auto t0 = Clock::now();
    for (const auto& g : fleet.genesis) initialize_vehicle(reg.upper, lower, g, 1);
    return elapsed_ms(t0);
  });
}

TimingSeries bench_challenge(std::span<const std::size_t> vehicle_counts, const Options& opts) {
  return timing_series("challenge", "vehicles", vehicle_counts, opts, [&](std::size_t count, std::size_t run) {
    Registry reg(opts.seed);
    Fleet fleet = make_fleet(reg.maker, opts.seed, run, count);
    Ledger lower;
    MemoryArchive archive;
    for (const auto& g : fleet.genesis) initialize_vehicle(reg.upper, lower, g, 1);

    KeyPair rsu = generate_keypair(derive_seed(opts.seed, "bench-rsu", 0));
    Rng rng = Rng::derive(opts.seed, "bench-challenge", run);
    std::vector<Challenge> challenges;
    std::vector<ChallengeResponse> responses;
    for (std::size_t i = 0; i < count; ++i) {
      challenges.push_back(issue_challenge(rsu.public_key, fleet.keys[i].public_key, kBenchEcus, rng, 1000));
      responses.push_back(build_response(fleet.keys[i], fleet.states[i], challenges.back(), 1000));
    }

    auto t0 = Clock::now();
    for (std::size_t i = 0; i < count; ++i) {
      if (verify_response(lower, challenges[i], responses[i]) != Verdict::Valid)
        throw std::logic_error("benchmark response failed verification");
      record_response(rsu, lower, responses[i], archive);
    }
    return elapsed_ms(t0);
  });
}

TimingSeries bench_merkle(std::span<const std::size_t> ecu_counts, const Options& opts) {
  return timing_series("merkle", "ecus", ecu_counts, opts, [&](std::size_t count, std::size_t run) {
    Rng rng = Rng::derive(opts.seed, "bench-merkle", run);
    EcuState state = bench_state(rng, count);
    // Repeat small trees so every sample spans a measurable interval.
    const std::size_t reps = std::max<std::size_t>(1, 20'000 / count);
    SsId sink{};
    auto t0 = Clock::now();
    for (std::size_t i = 0; i < reps; ++i) sink = compute_ssid(state);
    double ms = elapsed_ms(t0) / static_cast<double>(reps);
    if (sink.root.is_zero()) throw std::logic_error("unexpected zero root");
    return ms;
  });
}

StorageSeries bench_storage(std::span<const std::uint64_t> materialized, std::span<const std::uint64_t> projected,
                            const Options& opts) {
  StorageSeries out;
  std::vector<std::uint64_t> checkpoints(materialized.begin(), materialized.end());
  std::sort(checkpoints.begin(), checkpoints.end());

  KeyPair maker = generate_keypair(derive_seed(opts.seed, "bench-maker", 0));
  Rng rng = Rng::derive(opts.seed, "bench-storage", 0);
  EcuState state = bench_state(rng, kBenchEcus);
  Ledger ledger;

  std::uint64_t built = 0;
  for (std::uint64_t target : checkpoints) {
    for (; built < target; ++built) {
      KeyPair vehicle = generate_keypair(derive_seed(opts.seed, "bench-storage-vehicle", built));
      Genesis g = make_genesis(maker, vehicle.public_key, state, 1);
      ledger.create_block(vehicle.public_key, g, 1, default_archive_address(vehicle.public_key));
    }
    out.points.push_back({target, ledger.serialized_size(), false});
  }

  std::vector<double> xs, ys;
  for (const auto& p : out.points) xs.push_back(static_cast<double>(p.blocks)), ys.push_back(static_cast<double>(p.bytes));
  out.fit = fit_line(xs, ys);

  for (std::uint64_t blocks : projected) {
    bool measured = std::any_of(out.points.begin(), out.points.end(),
                                [&](const StoragePoint& p) { return p.blocks == blocks && !p.extrapolated; });
    if (!measured) out.points.push_back({blocks, out.project(blocks), true});
  }
  return out;
}

std::string to_csv(const TimingSeries& s) {
  std::string out = s.x_label + ",mean_ms,stddev_ms\n";
  for (const auto& p : s.points)
    out += std::to_string(static_cast<std::uint64_t>(p.x)) + "," + fmt(p.mean_ms) + "," + fmt(p.stddev_ms) + "\n";
  return out;
}

std::string to_json(const TimingSeries& s) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : s.points)
    arr.push_back({{"benchmark", s.name},
                   {s.x_label, static_cast<std::uint64_t>(p.x)},
                   {"mean_ms", p.mean_ms},
                   {"stddev_ms", p.stddev_ms},
                   {"runs", p.runs}});
  return arr.dump(2) + "\n";
}

std::string to_csv(const StorageSeries& s) {
  std::string out = "blocks,bytes,extrapolated\n";
  for (const auto& p : s.points)
    out += std::to_string(p.blocks) + "," + std::to_string(p.bytes) + "," + (p.extrapolated ? "1" : "0") + "\n";
  return out;
}

std::string to_json(const StorageSeries& s) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : s.points)
    arr.push_back({{"benchmark", "storage"}, {"blocks", p.blocks}, {"bytes", p.bytes}, {"extrapolated", p.extrapolated}});
  return arr.dump(2) + "\n";
}

}  // namespace bferl::bench
