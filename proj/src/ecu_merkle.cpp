#include "bferl/ecu_merkle.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace bferl {

EcuState::EcuState(std::vector<EcuRecord> records) : records_(std::move(records)) {
  if (records_.empty()) throw EcuStateError("empty ECU state");
  for (std::size_t i = 0; i < records_.size(); ++i)
    if (records_[i].ecu_id != i)
      throw EcuStateError("ECU ids must be 0..N-1 in order (position " + std::to_string(i) + ")");
}

EcuState EcuState::from_digests(std::span<const Digest> digests, Millis ts) {
  std::vector<EcuRecord> records;
  records.reserve(digests.size());
  for (std::size_t i = 0; i < digests.size(); ++i) records.push_back({i, digests[i], ts});
  return EcuState(std::move(records));
}

const EcuRecord& EcuState::at(EcuId id) const {
  if (id >= records_.size()) throw EcuStateError("unknown ECU id " + std::to_string(id));
  return records_[id];
}

Digest merkle_leaf(EcuId id, const Digest& firmware_digest) {
  std::array<std::uint8_t, 9> prefix{};
  prefix[0] = 0x00;
  for (int i = 0; i < 8; ++i) prefix[1 + i] = static_cast<std::uint8_t>(id >> (56 - 8 * i));
  return Hasher().update(prefix).update(firmware_digest.view()).finish();
}

Digest merkle_node(const Digest& left, const Digest& right) {
  return Hasher().update(std::uint8_t{0x01}).update(left.view()).update(right.view()).finish();
}

SsId compute_ssid(std::span<const EcuRecord> records) {
  if (records.empty()) throw EcuStateError("empty ECU state");

  std::vector<Digest> level;
  level.reserve(records.size() + 1);
  for (const auto& r : records) level.push_back(merkle_leaf(r.ecu_id, r.firmware_digest));

  while (level.size() > 1) {
    if (level.size() % 2 == 1) level.push_back(level.back());
    const std::size_t half = level.size() / 2;
    for (std::size_t i = 0; i < half; ++i) level[i] = merkle_node(level[2 * i], level[2 * i + 1]);
    level.resize(half);
  }
  return SsId{level.front()};
}

SsId compute_ssid(const EcuState& state) { return compute_ssid(state.records()); }

EcuState update_ecu(const EcuState& state, EcuId ecu_id, const Digest& new_digest, Millis ts) {
  const EcuRecord& current = state.at(ecu_id);
  if (ts < current.last_write_ts) throw EcuStateError("timestamp regression");
  std::vector<EcuRecord> records = state.records();
  records[ecu_id].firmware_digest = new_digest;
  records[ecu_id].last_write_ts = ts;
  return EcuState(std::move(records));
}

std::vector<EcuRecord> subset_report(const EcuState& state, std::span<const EcuId> indices) {
  std::unordered_set<EcuId> seen;
  std::vector<EcuRecord> out;
  out.reserve(indices.size());
  for (EcuId id : indices) {
    if (!seen.insert(id).second) throw EcuStateError("duplicate ECU index " + std::to_string(id));
    out.push_back(state.at(id));
  }
  return out;
}

}  // namespace bferl
