#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "acorn/interp.hpp"
#include "acorn/parse.hpp"
#include "acorn/serialize.hpp"

// A small blockchain: accounts with balances, deployed contracts whose code
// runs through the interpreter, and blocks of actions executed atomically.
//
// A contract module provides
//   wrapped_init    : SimpleChain -> SimpleContractCallContext -> Setup -> Maybe State
//   wrapped_receive : SimpleChain -> SimpleContractCallContext -> Maybe Msg -> State
//                       -> Maybe (Prod State (List SimpleActionBody))

namespace acorn::chain {

using Address = std::uint64_t;
using Money = Integer;

// User accounts live below this address, contracts from it upwards.
inline constexpr Address kFirstContractAddress = 1000;

struct DeployedContract {
    std::string name;
    std::shared_ptr<const Module> module;
    Val state;

    friend bool operator==(const DeployedContract& a, const DeployedContract& b);
};

struct ChainState {
    std::uint64_t slot = 0;
    std::map<Address, Money> balances;
    std::map<Address, DeployedContract> contracts;
    Address next_address = kFirstContractAddress;

    Money balance(Address a) const;
    Money total_money() const;

    friend bool operator==(const ChainState&, const ChainState&) = default;
};

namespace action {
// A plain payment; paying a contract calls it without a message.
struct Transfer {
    Address from = 0;
    Address to = 0;
    Money amount;
};
struct Deploy {
    Address from = 0;
    std::string contract;
    Val setup;
    Money amount;
};
struct Call {
    Address from = 0;
    Address to = 0;
    std::optional<Val> msg;
    Money amount;
};
}  // namespace action

using Action = std::variant<action::Transfer, action::Deploy, action::Call>;

std::string describe(const Action& a, const ChainState* st = nullptr);

struct BlockHeader {
    std::uint64_t slot = 0;
    std::optional<Address> reward_to;
};

struct ChainConfig {
    std::size_t depth_limit = 10;
    std::size_t fuel = 100000;
    // Minted for `reward_to` when a header names one. Zero keeps money
    // conserved.
    Money block_reward = 0;
};

struct BlockOutcome {
    std::optional<ChainState> state;
    // Why the block was rejected, when it was.
    std::string log;
};

// Contract code by name, loaded once and shared.
std::shared_ptr<const Module> contract_module(const std::string& name);

// Executes `acts` depth-first at slot `hd.slot`. The result is absent when
// any action fails; `prev` is never modified.
BlockOutcome add_block(const ChainState& prev, const BlockHeader& hd, std::span<const Action> acts,
                       const ChainConfig& cfg = {});

struct CallOutcome {
    std::optional<Val> state;
    std::vector<action::Transfer> emitted;
    std::string error;
};

// Runs the receive entry point of a deployed contract. Does not move money.
CallOutcome call_contract(const ChainState& st, Address caller, Address to, const std::optional<Val>& msg,
                          const Money& amount, const ChainConfig& cfg = {});

// ---------------------------------------------------------------------------
// Traces

struct Step {
    BlockHeader header;
    std::vector<Action> actions;
};

struct Trace {
    ChainState genesis;
    std::vector<Step> steps;
};

// Every state along the trace, starting with the genesis. Throws
// std::runtime_error when a step does not apply.
std::vector<ChainState> reachable_states(const Trace& tr, const ChainConfig& cfg = {});
ChainState replay(const Trace& tr, const ChainConfig& cfg = {});

using StatePredicate = std::function<bool(const ChainState&)>;

struct Counterexample {
    // Number of steps applied when the predicate first failed (0 = genesis).
    std::size_t steps = 0;
    ChainState state;
};

std::optional<Counterexample> check_invariant(const Trace& tr, const StatePredicate& inv,
                                              const ChainConfig& cfg = {});

// Crowdfunding invariants over every deployed crowdfunding contract.
bool cf_balance_consistent(const ChainState& st);
bool cf_backed(const ChainState& st);

// ---------------------------------------------------------------------------
// Scenarios

struct Actor {
    Address address = 0;
    Money balance;
};

struct Deployment {
    Address from = 0;
    std::string contract;
    // Concrete syntax, elaborated in the contract's scope.
    std::string setup;
    Money amount;
};

struct ActionWeights {
    unsigned transfer = 1;
    unsigned donate = 4;
    unsigned claim = 2;
    unsigned get_funds = 2;
    unsigned counter = 2;
    unsigned invalid = 1;
};

struct ScriptedAction {
    std::string kind;  // "transfer" or "call"
    Address from = 0;
    Address to = 0;
    std::optional<std::string> msg;
    Money amount;
};

struct ScriptedBlock {
    std::uint64_t slot = 0;
    std::vector<ScriptedAction> actions;
    // Whether the block is expected to be accepted.
    std::optional<bool> expect_accepted;
};

struct Scenario {
    std::string name;
    std::vector<Actor> actors;
    std::vector<Deployment> deployments;
    std::vector<ScriptedBlock> blocks;
    std::vector<std::uint64_t> seeds;
    std::size_t max_blocks = 20;
    ActionWeights weights;
    std::vector<std::string> invariants;
};

Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);

// The chain after the actors are funded and the deployments ran (in a block
// at slot 1). Throws std::runtime_error when a deployment fails.
ChainState genesis(const Scenario& s, const ChainConfig& cfg = {});

struct GenStats {
    std::size_t blocks = 0;
    std::size_t rejected_blocks = 0;
    std::size_t dropped_actions = 0;
    std::size_t funded = 0;    // successful GetFunds
    std::size_t refunded = 0;  // successful Claim
};

// Random blocks with strictly increasing slots. Blocks that fail are retried
// greedily without the failing actions.
Trace gen_trace(std::uint64_t seed, std::size_t max_blocks, const Scenario& s, const ChainConfig& cfg = {},
                GenStats* stats = nullptr);

// The scripted blocks as a trace. Rejected blocks are left out and reported.
struct ScriptRun {
    Trace trace;
    std::vector<std::string> failures;  // unmet expectations
};
ScriptRun run_script(const Scenario& s, const ChainConfig& cfg = {});

Json trace_to_json(const Trace& tr, const ChainConfig& cfg = {});

// "cf_balance_consistent", "cf_backed" or "money_conserved" (relative to
// `genesis`).
std::optional<StatePredicate> invariant_by_name(const std::string& name, const ChainState& genesis);

struct InvariantViolation {
    std::string invariant;
    std::string where;  // "seed 4, after 3 blocks" or "script"
    std::size_t steps = 0;
};

struct ScenarioReport {
    std::string name;
    std::size_t traces = 0;
    std::size_t states_checked = 0;
    GenStats stats;
    std::vector<InvariantViolation> violations;
    // Replays that did not reproduce the recorded final state, failed
    // expectations of scripted blocks, rejected blocks that changed state.
    std::vector<std::string> problems;

    bool ok() const { return violations.empty() && problems.empty(); }
};

// Runs the scripted blocks and one generated trace per seed, checking the
// scenario's invariants at every reachable state and replay determinism.
ScenarioReport run_scenario(const Scenario& s, const ChainConfig& cfg = {});

std::string report_text(const ScenarioReport& r);
Json report_json(const ScenarioReport& r);

}  // namespace acorn::chain
