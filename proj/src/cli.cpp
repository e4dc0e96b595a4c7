#include "bferl/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bferl/bench.hpp"
#include "bferl/netsim.hpp"

namespace bferl {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& data, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << data;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << data;
  if (!f) throw std::runtime_error("write failed for " + path);
}

template <typename T>
std::vector<T> parse_counts(const std::string& text, std::vector<T> fallback) {
  if (text.empty()) return fallback;
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(item, &used);
      if (used != item.size() || v == 0) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw UsageError("invalid count '" + item + "' in --counts");
    }
  }
  if (out.empty()) throw UsageError("--counts is empty");
  return out;
}

std::string event_log_json(const EventLog& log) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : log)
    arr.push_back({{"ts", e.ts}, {"kind", log_kind_name(e.kind)}, {"subject", e.subject}, {"verdict", e.detail}});
  return arr.dump(2) + "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-tier vehicle attestation ledger: scenarios and benchmarks", "bferl"};
  app.require_subcommand(1, 1);

  std::string config_path, out_path, format = "csv", counts;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t runs = bench::kRuns;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Output file ('-' for stdout)");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "Seed override");
  };

  auto* init = app.add_subcommand("init", "Build the scenario world and write the initial lower-tier ledger");
  init->add_option("--config", config_path, "Scenario config file")->required();
  add_common(init);

  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its event log");
  run_cmd->add_option("--config", config_path, "Scenario config file")->required();
  add_common(run_cmd);

  std::vector<CLI::App*> benches;
  for (const char* name : {"bench-create", "bench-challenge", "bench-merkle", "bench-storage"}) {
    auto* b = app.add_subcommand(name, std::string("Run the ") + (name + 6) + " benchmark");
    add_common(b);
    b->add_option("--runs", runs, "Repetitions per point")->check(CLI::Range(1, 1000));
    b->add_option("--threads", threads, "Shard repetitions across threads")->check(CLI::Range(1, 256));
    b->add_option("--counts", counts, "Comma-separated x values (materialised block counts for storage)");
    benches.push_back(b);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (init->parsed() || run_cmd->parsed()) {
      SimConfig config = load_config(config_path);
      if (seed != 0) config.seed = seed;
      World world = build_world(config);

      if (init->parsed()) {
        Bytes bytes = world.lower.serialize();
        write_output(out_path.empty() ? "ledger.bin" : out_path, std::string(bytes.begin(), bytes.end()), out);
        err << "initialised " << world.lower.block_count() << " vehicles, ledger " << bytes.size() << " bytes\n";
        return 0;
      }

      RunResult result = run(world);
      std::string text = format == "json" ? event_log_json(result.log) : format_event_log(result.log);
      write_output(out_path.empty() ? "events.tsv" : out_path, text, out);
      const RunSummary& s = result.summary;
      err << "encounters=" << s.encounters << " valid=" << s.count(Verdict::Valid) << " refused=" << s.refused
          << " reports=" << s.reports << " revoked=" << s.revoked << " archived=" << s.archived_entries
          << " ledger_bytes=" << s.lower_ledger_bytes << " ledgers_valid=" << (s.ledgers_valid ? "yes" : "no")
          << "\n";
      return 0;
    }

    bench::Options opts;
    opts.threads = threads;
    opts.runs = runs;
    if (seed != 0) opts.seed = seed;
    std::string text;
    if (benches[0]->parsed() || benches[1]->parsed()) {
      auto xs = parse_counts<std::size_t>(counts, bench::default_vehicle_counts());
      auto series = benches[0]->parsed() ? bench::bench_create(xs, opts) : bench::bench_challenge(xs, opts);
      text = format == "json" ? bench::to_json(series) : bench::to_csv(series);
    } else if (benches[2]->parsed()) {
      auto xs = parse_counts<std::size_t>(counts, bench::default_ecu_counts());
      auto series = bench::bench_merkle(xs, opts);
      text = format == "json" ? bench::to_json(series) : bench::to_csv(series);
    } else {
      auto xs = parse_counts<std::uint64_t>(counts, bench::default_storage_counts());
      auto series = bench::bench_storage(xs, bench::default_storage_projection(), opts);
      text = format == "json" ? bench::to_json(series) : bench::to_csv(series);
    }
    write_output(out_path, text, out);
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace bferl
