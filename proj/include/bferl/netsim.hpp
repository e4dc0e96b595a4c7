#pragma once

// Deterministic discrete-event simulation of vehicles driving past a line of
// RSUs. Every coverage entry runs one challenge-response round.
//
// Timeline (simulated milliseconds):
//   t = 1                       all vehicles registered
//   t = 1000 * (i + 1)          encounter i of every vehicle
//   t = 1000 * (i + 1) - 500    maintenance visits planned for round i
//   t = 1000 * (i + 1) - 250    attacks planned for round i

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "bferl/attack.hpp"
#include "bferl/entities.hpp"

namespace bferl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AttackPlan {
  AttackKind kind = AttackKind::FakeData;
  std::size_t target = 0;
  std::size_t round = 0;  // encounter index the attack precedes
};

struct MaintenancePlan {
  std::size_t vehicle = 0;
  std::size_t round = 0;
  EcuId ecu = 0;
};

struct SimConfig {
  std::size_t n_vehicles = 10;
  std::size_t n_rsus = 5;
  std::size_t ecus_per_vehicle = 8;
  std::size_t n_rounds = 3;  // RSU encounters per vehicle
  std::uint64_t seed = 1;
  std::vector<AttackPlan> attacks;
  std::vector<MaintenancePlan> maintenance;
  Millis link_latency_ms = 0;
  std::size_t subset_size = kDefaultSubsetSize;
  // Test knob: challenges to an attacked vehicle always include the attacked ECU.
  bool force_attacked_ecu = false;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// `key = value` lines; `#` starts a comment. Repeated keys:
///   attack = <Kind>,<vehicle>,<round>
///   maintenance = <vehicle>,<round>,<ecu>
/// Throws ConfigError on syntax errors, unknown keys or invalid values.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);
std::string format_config(const SimConfig& config);

inline constexpr Millis kEncounterInterval = 1000;
inline constexpr Millis kRegistrationTs = 1;
inline constexpr Millis kMaxLatency = 100;

inline Millis encounter_ts(std::size_t round) { return kEncounterInterval * (round + 1); }

enum class EventKind { Arrival, MaintenanceVisit, AttackTrigger, Report };

struct SimEvent {
  Millis fire_ts = 0;
  EventKind kind = EventKind::Arrival;
  std::size_t subject = 0;
  std::size_t index = 0;  // encounter index, or plan/report index
};

/// Min-queue ordered by (fire_ts, kind, subject, index, insertion order).
class EventQueue {
 public:
  /// Throws std::logic_error when fire_ts is earlier than now().
  void schedule(const SimEvent& ev);
  /// Pops the next event and advances now() to its fire time.
  std::optional<SimEvent> pop();

  Millis now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Slot {
    SimEvent ev;
    std::uint64_t seq;
  };
  struct Later {
    bool operator()(const Slot& a, const Slot& b) const;
  };
  std::priority_queue<Slot, std::vector<Slot>, Later> heap_;
  Millis now_ = 0;
  std::uint64_t seq_ = 0;
};

struct World {
  explicit World(SimConfig cfg);

  SimConfig config;
  AuthorityNode transport;
  AuthorityNode legal;
  UpperTier upper;
  Ledger lower;
  MemoryArchive archive;
  std::vector<RsuNode> rsus;
  MaintainerNode manufacturer;
  MaintainerNode technician;
  InsurerNode insurer;
  std::vector<VehicleNode> vehicles;  // registered vehicles first, then spawned fakes
  std::size_t registered = 0;
  std::map<std::size_t, EcuId> attacked_ecu;  // vehicle -> ECU hit by an attack
};

/// Builds all nodes and registers every vehicle through the upper tier.
/// Throws ConfigError on an invalid config.
World build_world(const SimConfig& config);

enum class LogKind { Arrival, Refused, Maintenance, Attack, Report };

const char* log_kind_name(LogKind kind);

struct LogEvent {
  Millis ts = 0;
  LogKind kind = LogKind::Arrival;
  std::size_t subject = 0;
  std::string detail;  // verdict for arrivals and reports, attack kind for attacks, "-" otherwise
  friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

using EventLog = std::vector<LogEvent>;

/// One tab-separated `ts kind subject verdict` line per event.
std::string format_event_log(const EventLog& log);

struct RunSummary {
  std::size_t encounters = 0;
  std::size_t refused = 0;
  std::array<std::size_t, 6> verdicts{};  // indexed by Verdict
  std::size_t reports = 0;
  std::size_t revoked = 0;
  std::size_t archived_entries = 0;
  std::size_t lower_ledger_bytes = 0;
  bool ledgers_valid = false;

  std::size_t count(Verdict v) const { return verdicts[static_cast<std::size_t>(v)]; }
};

struct RunResult {
  EventLog log;
  RunSummary summary;
};

/// Executes every scheduled encounter, maintenance visit and attack in time order.
RunResult run(World& world);

}  // namespace bferl
