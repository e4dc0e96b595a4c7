#include "bferl/netsim.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "bferl/adversary.hpp"

namespace bferl {

// ---------------------------------------------------------------------------
// Config

void SimConfig::validate() const {
  if (n_vehicles < 1) throw ConfigError("n_vehicles must be >= 1");
  if (n_rsus < 1) throw ConfigError("n_rsus must be >= 1");
  if (ecus_per_vehicle < 1) throw ConfigError("ecus_per_vehicle must be >= 1");
  if (n_rounds < 1) throw ConfigError("n_rounds must be >= 1");
  if (subset_size < 1) throw ConfigError("subset_size must be >= 1");
  if (link_latency_ms > kMaxLatency) throw ConfigError("link_latency_ms must be <= 100");
  for (const auto& a : attacks) {
    if (a.target >= n_vehicles) throw ConfigError("attack target out of range");
    if (a.round >= n_rounds) throw ConfigError("attack round out of range");
    if (a.kind == AttackKind::Replay && a.round == 0)
      throw ConfigError("Replay needs an earlier encounter to capture (round >= 1)");
  }
  for (const auto& m : maintenance) {
    if (m.vehicle >= n_vehicles) throw ConfigError("maintenance vehicle out of range");
    if (m.round >= n_rounds) throw ConfigError("maintenance round out of range");
    if (m.ecu >= ecus_per_vehicle) throw ConfigError("maintenance ECU out of range");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_uint(std::string_view s, std::string_view key) {
  s = trim(s);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(s) + "'");
  return v;
}

bool parse_bool(std::string_view s, std::string_view key) {
  s = trim(s);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("invalid boolean for '" + std::string(key) + "'");
}

std::vector<std::string_view> split3(std::string_view s, std::string_view key) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    auto comma = s.find(',', start);
    parts.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3) throw ConfigError("'" + std::string(key) + "' expects three comma-separated values");
  return parts;
}

}  // namespace

SimConfig parse_config(std::string_view text) {
  SimConfig c;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (auto hash_pos = line.find('#'); hash_pos != std::string_view::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));

    if (key == "n_vehicles") c.n_vehicles = parse_uint(value, key);
    else if (key == "n_rsus") c.n_rsus = parse_uint(value, key);
    else if (key == "ecus_per_vehicle") c.ecus_per_vehicle = parse_uint(value, key);
    else if (key == "n_rounds") c.n_rounds = parse_uint(value, key);
    else if (key == "seed") c.seed = parse_uint(value, key);
    else if (key == "link_latency_ms") c.link_latency_ms = parse_uint(value, key);
    else if (key == "subset_size") c.subset_size = parse_uint(value, key);
    else if (key == "force_attacked_ecu") c.force_attacked_ecu = parse_bool(value, key);
    else if (key == "attack") {
      auto parts = split3(value, key);
      AttackPlan a;
      try {
        a.kind = parse_attack(parts[0]);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
      }
      a.target = parse_uint(parts[1], key);
      a.round = parse_uint(parts[2], key);
      c.attacks.push_back(a);
    } else if (key == "maintenance") {
      auto parts = split3(value, key);
      c.maintenance.push_back({parse_uint(parts[0], key), parse_uint(parts[1], key), parse_uint(parts[2], key)});
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  c.validate();
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const SimConfig& c) {
  std::ostringstream out;
  out << "n_vehicles = " << c.n_vehicles << '\n'
      << "n_rsus = " << c.n_rsus << '\n'
      << "ecus_per_vehicle = " << c.ecus_per_vehicle << '\n'
      << "n_rounds = " << c.n_rounds << '\n'
      << "seed = " << c.seed << '\n'
      << "link_latency_ms = " << c.link_latency_ms << '\n'
      << "subset_size = " << c.subset_size << '\n'
      << "force_attacked_ecu = " << (c.force_attacked_ecu ? "true" : "false") << '\n';
  for (const auto& a : c.attacks) out << "attack = " << attack_name(a.kind) << ',' << a.target << ',' << a.round << '\n';
  for (const auto& m : c.maintenance) out << "maintenance = " << m.vehicle << ',' << m.round << ',' << m.ecu << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Event queue

bool EventQueue::Later::operator()(const Slot& a, const Slot& b) const {
  auto key = [](const Slot& s) { return std::tuple(s.ev.fire_ts, s.ev.kind, s.ev.subject, s.ev.index, s.seq); };
  return key(a) > key(b);
}

void EventQueue::schedule(const SimEvent& ev) {
  if (ev.fire_ts < now_) throw std::logic_error("cannot schedule an event in the past");
  heap_.push({ev, seq_++});
}

std::optional<SimEvent> EventQueue::pop() {
  if (heap_.empty()) return std::nullopt;
  SimEvent ev = heap_.top().ev;
  heap_.pop();
  now_ = ev.fire_ts;
  return ev;
}

// ---------------------------------------------------------------------------
// World

namespace {

KeyPair keys_for(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  return generate_keypair(derive_seed(seed, label, index));
}

}  // namespace

World::World(SimConfig cfg)
    : config(std::move(cfg)),
      transport{keys_for(config.seed, "authority", 0), AuthorityRole::Transport, {}, {}},
      legal{keys_for(config.seed, "authority", 1), AuthorityRole::Legal, {}, {}},
      upper({transport.keys, legal.keys}, 0),
      manufacturer{keys_for(config.seed, "maintainer", 0), MaintainerRole::Manufacturer, true},
      technician{keys_for(config.seed, "maintainer", 1), MaintainerRole::Technician, true},
      insurer{keys_for(config.seed, "insurer", 0), true} {
  upper.authorize_maker(manufacturer.keys.public_key);
  upper.authorize_maintainer(technician.keys.public_key);
  upper.authorize_insurer(insurer.keys.public_key);

  for (std::size_t r = 0; r < config.n_rsus; ++r) {
    rsus.push_back({r, keys_for(config.seed, "rsu", r), static_cast<std::int64_t>(r)});
    transport.known_rsus.insert(rsus.back().keys.public_key);
    legal.known_rsus.insert(rsus.back().keys.public_key);
  }
}

World build_world(const SimConfig& config) {
  config.validate();
  World w(config);

  for (std::size_t v = 0; v < config.n_vehicles; ++v) {
    Rng rng = Rng::derive(config.seed, "firmware", v);
    std::vector<Bytes> images;
    std::vector<Digest> digests;
    for (std::size_t e = 0; e < config.ecus_per_vehicle; ++e) {
      images.push_back(rng.bytes(64));
      digests.push_back(hash(images.back()));
    }
    std::vector<std::size_t> route;
    for (std::size_t i = 0; i < config.n_rounds; ++i) route.push_back((v + i) % config.n_rsus);

    VehicleNode vehicle{.id = v,
                        .keys = keys_for(config.seed, "vehicle", v),
                        .ecu_state = EcuState::from_digests(digests, 0),
                        .firmware = std::move(images),
                        .route = std::move(route)};
    Genesis genesis = make_genesis(w.manufacturer.keys, vehicle.keys.public_key, vehicle.ecu_state, kRegistrationTs);
    initialize_vehicle(w.upper, w.lower, genesis, kRegistrationTs);
    w.vehicles.push_back(std::move(vehicle));
  }
  w.registered = w.vehicles.size();
  return w;
}

// ---------------------------------------------------------------------------
// Event log

const char* log_kind_name(LogKind kind) {
  switch (kind) {
    case LogKind::Arrival: return "arrival";
    case LogKind::Refused: return "refused";
    case LogKind::Maintenance: return "maintenance";
    case LogKind::Attack: return "attack";
    case LogKind::Report: return "report";
  }
  return "?";
}

std::string format_event_log(const EventLog& log) {
  std::string out;
  for (const auto& e : log) {
    out += std::to_string(e.ts);
    out += '\t';
    out += log_kind_name(e.kind);
    out += '\t';
    out += std::to_string(e.subject);
    out += '\t';
    out += e.detail;
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run loop

namespace {

class Simulation {
 public:
  explicit Simulation(World& w) : w_(w) {}

  RunResult run() {
    const SimConfig& c = w_.config;
    for (std::size_t v = 0; v < w_.registered; ++v) queue_.schedule({encounter_ts(0), EventKind::Arrival, v, 0});
    for (std::size_t i = 0; i < c.attacks.size(); ++i)
      queue_.schedule({encounter_ts(c.attacks[i].round) - 250, EventKind::AttackTrigger, c.attacks[i].target, i});
    for (std::size_t i = 0; i < c.maintenance.size(); ++i)
      queue_.schedule(
          {encounter_ts(c.maintenance[i].round) - 500, EventKind::MaintenanceVisit, c.maintenance[i].vehicle, i});

    while (auto ev = queue_.pop()) {
      switch (ev->kind) {
        case EventKind::Arrival: arrival(*ev); break;
        case EventKind::MaintenanceVisit: maintenance(*ev); break;
        case EventKind::AttackTrigger: attack(*ev); break;
        case EventKind::Report: report(*ev); break;
      }
    }

    result_.summary.revoked = w_.transport.revoked.size();
    result_.summary.archived_entries = w_.archive.total_entries();
    result_.summary.lower_ledger_bytes = w_.lower.serialized_size();
    result_.summary.ledgers_valid = w_.lower.validate() && w_.upper.ledger().validate();
    return std::move(result_);
  }

 private:
  void log(Millis ts, LogKind kind, std::size_t subject, std::string detail) {
    result_.log.push_back({ts, kind, subject, std::move(detail)});
  }

  void arrival(const SimEvent& ev) {
    VehicleNode& vehicle = w_.vehicles.at(ev.subject);
    const std::size_t round = ev.index;
    const Millis now = ev.fire_ts;
    const Millis latency = w_.config.link_latency_ms;

    if (round + 1 < vehicle.route.size())
      queue_.schedule({encounter_ts(round + 1), EventKind::Arrival, vehicle.id, round + 1});

    if (w_.transport.revoked.contains(vehicle.presented_pk())) {
      ++result_.summary.refused;
      log(now, LogKind::Refused, vehicle.id, "-");
      return;
    }

    const RsuNode& rsu = w_.rsus.at(vehicle.route.at(round));
    const AttestationView* view = w_.lower.view(vehicle.presented_pk());
    const std::size_t ecu_count = view ? view->registry.size() : w_.config.ecus_per_vehicle;

    Rng rng = Rng::derive(w_.config.seed, "challenge/" + std::to_string(vehicle.id), round);
    Challenge challenge =
        issue_challenge(rsu.keys.public_key, vehicle.presented_pk(), ecu_count, rng, now, w_.config.subset_size);
    if (w_.config.force_attacked_ecu) force_include(challenge, vehicle.id);

    ChallengeResponse response = vehicle.respond(challenge, now + latency);
    Verdict verdict = verify_response(w_.lower, challenge, response, &w_.transport.revoked);

    ++result_.summary.encounters;
    ++result_.summary.verdicts[static_cast<std::size_t>(verdict)];
    log(now, LogKind::Arrival, vehicle.id, verdict_name(verdict));

    if (verdict == Verdict::Valid) {
      record_response(rsu.keys, w_.lower, response, w_.archive);
    } else {
      reports_.push_back({vehicle.id, report_malicious(rsu.keys, vehicle.presented_pk(), verdict, now + 2 * latency)});
      queue_.schedule({now + 2 * latency, EventKind::Report, vehicle.id, reports_.size() - 1});
    }
  }

  void force_include(Challenge& challenge, std::size_t vehicle) const {
    auto it = w_.attacked_ecu.find(vehicle);
    if (it == w_.attacked_ecu.end() || challenge.subset_indices.empty()) return;
    auto& idx = challenge.subset_indices;
    if (std::find(idx.begin(), idx.end(), it->second) == idx.end()) idx.front() = it->second;
  }

  void maintenance(const SimEvent& ev) {
    const MaintenancePlan& plan = w_.config.maintenance.at(ev.index);
    VehicleNode& vehicle = w_.vehicles.at(plan.vehicle);
    Rng rng = Rng::derive(w_.config.seed, "maintenance", ev.index);
    Update update = perform_maintenance(w_.technician, vehicle, plan.ecu, rng.bytes(64), ev.fire_ts);
    apply_upper_update(w_.upper, w_.lower, update, w_.archive);
    log(ev.fire_ts, LogKind::Maintenance, vehicle.id, "ecu=" + std::to_string(plan.ecu));
  }

  void attack(const SimEvent& ev) {
    const AttackPlan& plan = w_.config.attacks.at(ev.index);
    Injection inj = inject(w_, plan.kind, plan.target, ev.fire_ts, plan.round);
    log(ev.fire_ts, LogKind::Attack, inj.subject, attack_name(plan.kind));
    if (inj.spawned_vehicle)
      queue_.schedule({encounter_ts(plan.round), EventKind::Arrival, *inj.spawned_vehicle, plan.round});
  }

  void report(const SimEvent& ev) {
    const auto& [subject, rep] = reports_.at(ev.index);
    bool delivered = w_.transport.receive_report(rep);
    delivered = w_.legal.receive_report(rep) && delivered;
    if (delivered) ++result_.summary.reports;
    log(ev.fire_ts, LogKind::Report, subject, verdict_name(rep.verdict));
  }

  World& w_;
  EventQueue queue_;
  RunResult result_;
  std::vector<std::pair<std::size_t, ReportEvent>> reports_;
};

}  // namespace

RunResult run(World& world) { return Simulation(world).run(); }

}  // namespace bferl
