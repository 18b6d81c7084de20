#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bhs/engine.hpp"

namespace bhs {

// Empty result means the decision is legal for this footprint and budget.
std::vector<std::string> validate_decision(const Footprint& fp, int f,
                                           const std::vector<EdgeId>& removed);

std::unique_ptr<Adversary> make_empty_adversary();
// JSONL script, one {"round": r, "removed": [[u, v], ...]} per line; fully
// validated against the footprint when the run starts.
std::unique_ptr<Adversary> make_replay_adversary(const std::string& script_text);
// Uniform size in [0, f], then a seeded shuffle filtered to keep connectivity.
std::unique_ptr<Adversary> make_random_adversary();
// Removes the edge the lowest-id moving agent wants, unless it is a bridge.
std::unique_ptr<Adversary> make_block_min_id_adversary();
// Never removes anything; the impossibility gadget's bridges do the work.
std::unique_ptr<Adversary> make_bridge_protect_adversary();
// The five-rule clique adversary used by the f-BHS impossibility demo.
std::unique_ptr<Adversary> make_rules_adversary();

// By CLI name; script_text only used by "replay". Throws ConfigError.
std::unique_ptr<Adversary> make_adversary(const std::string& name,
                                          const std::string& script_text = "");

} // namespace bhs
