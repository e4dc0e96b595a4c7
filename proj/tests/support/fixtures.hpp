#pragma once

#include <string>
#include <vector>

#include "bferl/protocol.hpp"
#include "bferl/rng.hpp"

namespace fixtures {

inline bferl::KeyPair keys(std::string_view label, std::uint64_t i = 0) {
  return bferl::generate_keypair(bferl::derive_seed(99, label, i));
}

inline bferl::EcuState random_state(bferl::Rng& rng, std::size_t n, bferl::Millis ts = 0) {
  std::vector<bferl::Digest> digests;
  for (std::size_t i = 0; i < n; ++i) digests.push_back(rng.digest());
  return bferl::EcuState::from_digests(digests, ts);
}

/// Upper tier with two validators, one authorised maker, maintainer and insurer.
struct Tiers {
  bferl::KeyPair transport = keys("transport");
  bferl::KeyPair legal = keys("legal");
  bferl::KeyPair maker = keys("maker");
  bferl::KeyPair technician = keys("technician");
  bferl::KeyPair insurer = keys("insurer");
  bferl::KeyPair rsu = keys("rsu");
  bferl::UpperTier upper{{transport, legal}, 0};
  bferl::Ledger lower;
  bferl::MemoryArchive archive;

  Tiers() {
    upper.authorize_maker(maker.public_key);
    upper.authorize_maintainer(technician.public_key);
    upper.authorize_insurer(insurer.public_key);
  }

  bferl::Genesis register_vehicle(const bferl::KeyPair& vehicle, const bferl::EcuState& state, bferl::Millis ts = 1) {
    bferl::Genesis g = bferl::make_genesis(maker, vehicle.public_key, state, ts);
    bferl::initialize_vehicle(upper, lower, g, ts);
    return g;
  }
};

}  // namespace fixtures
