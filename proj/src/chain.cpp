#include "acorn/chain.hpp"

#include <algorithm>
#include <mutex>
#include <random>
#include <sstream>

#include "acorn/pretty.hpp"
#include "acorn/programs.hpp"

namespace acorn::chain {

bool operator==(const DeployedContract& a, const DeployedContract& b)
{
    return a.name == b.name && a.module == b.module && a.state == b.state;
}

Money ChainState::balance(Address a) const
{
    auto it = balances.find(a);
    return it == balances.end() ? Money(0) : it->second;
}

Money ChainState::total_money() const
{
    Money total = 0;
    for (const auto& [_, m] : balances)
        total += m;
    return total;
}

std::shared_ptr<const Module> contract_module(const std::string& name)
{
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const Module>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[name];
    if (!slot)
        slot = std::make_shared<const Module>(programs::load_embedded(name));
    return slot;
}

namespace {

std::string show(const Val& v, const Module* m)
{
    return print(v, m ? &m->env : nullptr);
}

std::string module_note(const ChainState* st, Address to)
{
    if (!st)
        return "";
    auto it = st->contracts.find(to);
    return it == st->contracts.end() ? "" : " (" + it->second.name + ")";
}

}  // namespace

std::string describe(const Action& a, const ChainState* st)
{
    std::ostringstream out;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, action::Transfer>) {
                out << "transfer " << x.amount << " from " << x.from << " to " << x.to << module_note(st, x.to);
            } else if constexpr (std::is_same_v<T, action::Deploy>) {
                out << "deploy " << x.contract << " from " << x.from << " with " << x.amount << ", setup "
                    << show(x.setup, contract_module(x.contract).get());
            } else {
                const Module* m = nullptr;
                if (st)
                    if (auto it = st->contracts.find(x.to); it != st->contracts.end())
                        m = it->second.module.get();
                out << "call " << x.to << module_note(st, x.to) << " from " << x.from << " with " << x.amount
                    << ", message " << (x.msg ? show(*x.msg, m) : std::string("none"));
            }
        },
        a);
    return out.str();
}

namespace {

Val chain_view(std::uint64_t slot)
{
    return make_constr("SimpleChain", "MkChain", {programs::nat_val(slot)});
}

Val call_context(Address from, Address self, const Money& amount)
{
    return make_constr("SimpleContractCallContext", "MkCtx",
                       {programs::nat_val(from), programs::nat_val(self), programs::int_val(amount)});
}

// The domain of the `n`-th lambda of a constant's body.
std::optional<Ty> parameter_type(const Module& m, const char* entry, std::size_t n)
{
    const auto* body = m.env.find_constant(entry);
    if (!body || !std::holds_alternative<Expr>(*body))
        return std::nullopt;
    Expr cur = std::get<Expr>(*body);
    for (std::size_t k = 0;; ++k) {
        const auto* lam = cur.as<expr::Lam>();
        if (!lam)
            return std::nullopt;
        if (k == n)
            return lam->dom;
        cur = lam->body;
    }
}

struct EntryResult {
    std::optional<Val> value;
    std::string error;
};

EntryResult run_entry(const Module& m, const char* entry, std::span<const Val> args, std::size_t fuel)
{
    auto fn = interp::eval(m.env, fuel, Env{}, Expr::constant(entry));
    if (!fn.ok())
        return {std::nullopt, std::string(entry) + ": " + (fn.out_of_fuel() ? "out of fuel" : fn.error())};
    auto r = interp::apply(m.env, fuel, fn.value(), args);
    if (r.out_of_fuel())
        return {std::nullopt, std::string(entry) + " ran out of fuel"};
    if (r.stuck())
        return {std::nullopt, std::string(entry) + " failed: " + r.error()};
    return {r.value(), {}};
}

// Unwraps `Just x`; nullopt for `Nothing` or anything else.
std::optional<Val> from_just(const Val& v)
{
    const auto* c = v.as<val::Constr>();
    if (!c || c->ind != "Maybe" || c->ctor != "Just" || c->args.size() != 2)
        return std::nullopt;
    return c->args[1];
}

}  // namespace

CallOutcome call_contract(const ChainState& st, Address caller, Address to, const std::optional<Val>& msg,
                          const Money& amount, const ChainConfig& cfg)
{
    CallOutcome out;
    auto it = st.contracts.find(to);
    if (it == st.contracts.end()) {
        out.error = "no contract at address " + std::to_string(to);
        return out;
    }
    const auto& contract = it->second;
    const Module& m = *contract.module;

    auto maybe_msg = parameter_type(m, "wrapped_receive", 2);
    const auto* app = maybe_msg ? maybe_msg->as<ty::App>() : nullptr;
    if (!app) {
        out.error = contract.name + ": wrapped_receive does not take a Maybe message";
        return out;
    }
    Val wrapped = msg ? make_constr("Maybe", "Just", {make_type(app->arg), *msg})
                      : make_constr("Maybe", "Nothing", {make_type(app->arg)});

    const Val args[] = {chain_view(st.slot), call_context(caller, to, amount), wrapped, contract.state};
    auto r = run_entry(m, "wrapped_receive", args, cfg.fuel);
    if (!r.value) {
        out.error = contract.name + ": " + r.error;
        return out;
    }
    auto result = from_just(*r.value);
    if (!result) {
        out.error = contract.name + " rejected the call";
        return out;
    }
    const auto* pair = result->as<val::Constr>();
    if (!pair || pair->ctor != "Pair" || pair->args.size() != 4) {
        out.error = contract.name + ": malformed result " + show(*result, &m);
        return out;
    }
    if (!interp::wf_val(m.env, pair->args[2])) {
        out.error = contract.name + ": new state is not well formed";
        return out;
    }
    try {
        for (const auto& act : programs::from_acorn_list(pair->args[3])) {
            const auto* t = act.as<val::Constr>();
            if (!t || t->ctor != "Transfer" || t->args.size() != 2)
                throw programs::ConversionError("unexpected action " + show(act, &m));
            const auto target = programs::prim_value(t->args[1]);
            out.emitted.push_back({to, target.convert_to<Address>(), programs::prim_value(t->args[0])});
        }
    } catch (const programs::ConversionError& e) {
        out.error = contract.name + ": " + e.what();
        return out;
    }
    out.state = pair->args[2];
    return out;
}

namespace {

class Executor {
public:
    Executor(ChainState st, const ChainConfig& cfg) : st_(std::move(st)), cfg_(cfg) {}

    bool run(const Action& a, std::size_t depth)
    {
        if (depth > cfg_.depth_limit)
            return fail("call depth limit exceeded at " + describe(a, &st_));
        return std::visit(
            [&](const auto& x) -> bool {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, action::Transfer>) {
                    return invoke(x.from, x.to, std::nullopt, x.amount, depth, false);
                } else if constexpr (std::is_same_v<T, action::Call>) {
                    return invoke(x.from, x.to, x.msg, x.amount, depth, true);
                } else {
                    return deploy(x);
                }
            },
            a);
    }

    ChainState take() { return std::move(st_); }
    const std::string& log() const { return log_; }
    ChainState& state() { return st_; }

private:
    bool fail(std::string why)
    {
        if (log_.empty())
            log_ = std::move(why);
        return false;
    }

    bool pay(Address from, Address to, const Money& amount)
    {
        if (amount < 0)
            return fail("negative amount " + amount.str() + " from " + std::to_string(from));
        if (st_.balance(from) < amount)
            return fail("insufficient balance: " + std::to_string(from) + " has " + st_.balance(from).str() +
                        ", needs " + amount.str());
        if (amount == 0)
            return true;
        st_.balances[from] -= amount;
        st_.balances[to] += amount;
        return true;
    }

    bool invoke(Address from, Address to, const std::optional<Val>& msg, const Money& amount, std::size_t depth,
                bool must_be_contract)
    {
        const bool is_contract = st_.contracts.count(to) > 0;
        if (must_be_contract && !is_contract)
            return fail("call to " + std::to_string(to) + ", which is not a contract");
        if (!pay(from, to, amount))
            return false;
        if (!is_contract)
            return true;
        auto r = call_contract(st_, from, to, msg, amount, cfg_);
        if (!r.state)
            return fail(r.error);
        st_.contracts.at(to).state = *r.state;
        // Emitted actions run before the caller's remaining actions.
        for (const auto& t : r.emitted)
            if (!run(t, depth + 1))
                return false;
        return true;
    }

    bool deploy(const action::Deploy& d)
    {
        std::shared_ptr<const Module> m;
        try {
            m = contract_module(d.contract);
        } catch (const std::exception& e) {
            return fail("cannot load contract " + d.contract + ": " + e.what());
        }
        const Address addr = st_.next_address++;
        // The endowment is in place before init runs.
        if (!pay(d.from, addr, d.amount))
            return false;
        const Val args[] = {chain_view(st_.slot), call_context(d.from, addr, d.amount), d.setup};
        auto r = run_entry(*m, "wrapped_init", args, cfg_.fuel);
        if (!r.value)
            return fail(d.contract + ": " + r.error);
        auto state = from_just(*r.value);
        if (!state)
            return fail(d.contract + " rejected its setup");
        if (!interp::wf_val(m->env, *state))
            return fail(d.contract + ": initial state is not well formed");
        st_.contracts.emplace(addr, DeployedContract{d.contract, m, *state});
        st_.balances.try_emplace(addr, 0);
        return true;
    }

    ChainState st_;
    const ChainConfig& cfg_;
    std::string log_;
};

}  // namespace

BlockOutcome add_block(const ChainState& prev, const BlockHeader& hd, std::span<const Action> acts,
                       const ChainConfig& cfg)
{
    if (hd.slot <= prev.slot)
        return {std::nullopt, "slot " + std::to_string(hd.slot) + " does not advance past " +
                                  std::to_string(prev.slot)};
    Executor ex(prev, cfg);
    ex.state().slot = hd.slot;
    if (hd.reward_to && cfg.block_reward > 0)
        ex.state().balances[*hd.reward_to] += cfg.block_reward;
    for (const auto& a : acts)
        if (!ex.run(a, 0))
            return {std::nullopt, ex.log()};
    return {ex.take(), {}};
}

// ---------------------------------------------------------------------------

std::vector<ChainState> reachable_states(const Trace& tr, const ChainConfig& cfg)
{
    std::vector<ChainState> out{tr.genesis};
    for (std::size_t k = 0; k < tr.steps.size(); ++k) {
        auto r = add_block(out.back(), tr.steps[k].header, tr.steps[k].actions, cfg);
        if (!r.state)
            throw std::runtime_error("step " + std::to_string(k + 1) + " does not apply: " + r.log);
        out.push_back(std::move(*r.state));
    }
    return out;
}

ChainState replay(const Trace& tr, const ChainConfig& cfg)
{
    ChainState st = tr.genesis;
    for (std::size_t k = 0; k < tr.steps.size(); ++k) {
        auto r = add_block(st, tr.steps[k].header, tr.steps[k].actions, cfg);
        if (!r.state)
            throw std::runtime_error("step " + std::to_string(k + 1) + " does not apply: " + r.log);
        st = std::move(*r.state);
    }
    return st;
}

std::optional<Counterexample> check_invariant(const Trace& tr, const StatePredicate& inv, const ChainConfig& cfg)
{
    ChainState st = tr.genesis;
    if (!inv(st))
        return Counterexample{0, st};
    for (std::size_t k = 0; k < tr.steps.size(); ++k) {
        auto r = add_block(st, tr.steps[k].header, tr.steps[k].actions, cfg);
        if (!r.state)
            throw std::runtime_error("step " + std::to_string(k + 1) + " does not apply: " + r.log);
        st = std::move(*r.state);
        if (!inv(st))
            return Counterexample{k + 1, st};
    }
    return std::nullopt;
}

namespace {

bool is_crowdfunding(const DeployedContract& c)
{
    return c.name.rfind("crowdfunding", 0) == 0;
}

}  // namespace

bool cf_balance_consistent(const ChainState& st)
{
    for (const auto& [_, c] : st.contracts)
        if (is_crowdfunding(c) && !programs::consistent_balance(c.state))
            return false;
    return true;
}

bool cf_backed(const ChainState& st)
{
    for (const auto& [addr, c] : st.contracts)
        if (is_crowdfunding(c) && st.balance(addr) < programs::read_cf_state(c.state).balance)
            return false;
    return true;
}

std::optional<StatePredicate> invariant_by_name(const std::string& name, const ChainState& genesis)
{
    if (name == "cf_balance_consistent")
        return StatePredicate(cf_balance_consistent);
    if (name == "cf_backed")
        return StatePredicate(cf_backed);
    if (name == "money_conserved") {
        Money total = genesis.total_money();
        return StatePredicate([total](const ChainState& st) { return st.total_money() == total; });
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Scenarios

namespace {

Money money_from_json(const Json& j)
{
    if (j.is_string())
        return Money(j.get<std::string>());
    return Money(j.get<long long>());
}

Json money_to_json(const Money& m)
{
    if (m >= std::numeric_limits<long long>::min() && m <= std::numeric_limits<long long>::max())
        return m.convert_to<long long>();
    return m.str();
}

}  // namespace

Scenario scenario_from_json(const Json& j)
{
    try {
        Scenario s;
        s.name = j.value("name", std::string("scenario"));
        for (const auto& a : j.value("actors", Json::array()))
            s.actors.push_back({a.at("address").get<Address>(), money_from_json(a.at("balance"))});
        for (const auto& d : j.value("deployments", Json::array()))
            s.deployments.push_back({d.at("from").get<Address>(), d.at("contract").get<std::string>(),
                                     d.at("setup").get<std::string>(), money_from_json(d.value("amount", Json(0)))});
        for (const auto& b : j.value("blocks", Json::array())) {
            ScriptedBlock blk;
            blk.slot = b.at("slot").get<std::uint64_t>();
            if (b.contains("expect")) {
                auto e = b.at("expect").get<std::string>();
                if (e != "accepted" && e != "rejected")
                    throw SchemaError("expect must be \"accepted\" or \"rejected\"");
                blk.expect_accepted = e == "accepted";
            }
            for (const auto& a : b.value("actions", Json::array())) {
                ScriptedAction act;
                act.kind = a.at("kind").get<std::string>();
                if (act.kind != "transfer" && act.kind != "call")
                    throw SchemaError("unknown action kind " + act.kind);
                act.from = a.at("from").get<Address>();
                act.to = a.at("to").get<Address>();
                if (a.contains("msg"))
                    act.msg = a.at("msg").get<std::string>();
                act.amount = money_from_json(a.value("amount", Json(0)));
                blk.actions.push_back(std::move(act));
            }
            s.blocks.push_back(std::move(blk));
        }
        if (j.contains("seeds")) {
            for (const auto& x : j.at("seeds"))
                s.seeds.push_back(x.get<std::uint64_t>());
        } else if (j.contains("seedRange")) {
            auto lo = j.at("seedRange").at(0).get<std::uint64_t>();
            auto hi = j.at("seedRange").at(1).get<std::uint64_t>();
            for (auto x = lo; x <= hi; ++x)
                s.seeds.push_back(x);
        }
        s.max_blocks = j.value("maxBlocks", std::size_t{20});
        if (j.contains("weights")) {
            const auto& w = j.at("weights");
            s.weights.transfer = w.value("transfer", s.weights.transfer);
            s.weights.donate = w.value("donate", s.weights.donate);
            s.weights.claim = w.value("claim", s.weights.claim);
            s.weights.get_funds = w.value("getFunds", s.weights.get_funds);
            s.weights.counter = w.value("counter", s.weights.counter);
            s.weights.invalid = w.value("invalid", s.weights.invalid);
        }
        for (const auto& x : j.value("invariants", Json::array()))
            s.invariants.push_back(x.get<std::string>());
        return s;
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("scenario: ") + e.what());
    }
}

Json scenario_to_json(const Scenario& s)
{
    Json actors = Json::array();
    for (const auto& a : s.actors)
        actors.push_back({{"address", a.address}, {"balance", money_to_json(a.balance)}});
    Json deps = Json::array();
    for (const auto& d : s.deployments)
        deps.push_back({{"from", d.from}, {"contract", d.contract}, {"setup", d.setup}, {"amount", money_to_json(d.amount)}});
    Json blocks = Json::array();
    for (const auto& b : s.blocks) {
        Json acts = Json::array();
        for (const auto& a : b.actions) {
            Json x{{"kind", a.kind}, {"from", a.from}, {"to", a.to}, {"amount", money_to_json(a.amount)}};
            if (a.msg)
                x["msg"] = *a.msg;
            acts.push_back(std::move(x));
        }
        Json blk{{"slot", b.slot}, {"actions", acts}};
        if (b.expect_accepted)
            blk["expect"] = *b.expect_accepted ? "accepted" : "rejected";
        blocks.push_back(std::move(blk));
    }
    return Json{{"name", s.name},
                {"actors", actors},
                {"deployments", deps},
                {"blocks", blocks},
                {"seeds", s.seeds},
                {"maxBlocks", s.max_blocks},
                {"weights",
                 {{"transfer", s.weights.transfer},
                  {"donate", s.weights.donate},
                  {"claim", s.weights.claim},
                  {"getFunds", s.weights.get_funds},
                  {"counter", s.weights.counter},
                  {"invalid", s.weights.invalid}}},
                {"invariants", s.invariants}};
}

namespace {

Val eval_in(const Module& m, const std::string& src)
{
    auto e = parse_expr(src, m);
    auto r = interp::eval(m.env, 100000, Env{}, e);
    if (!r.ok())
        throw std::runtime_error("cannot evaluate `" + src + "`: " + (r.out_of_fuel() ? "out of fuel" : r.error()));
    return r.value();
}

}  // namespace

ChainState genesis(const Scenario& s, const ChainConfig& cfg)
{
    ChainState st;
    for (const auto& a : s.actors) {
        if (a.address >= kFirstContractAddress)
            throw std::runtime_error("actor address " + std::to_string(a.address) + " is in the contract range");
        st.balances[a.address] = a.balance;
    }
    if (s.deployments.empty())
        return st;
    std::vector<Action> acts;
    for (const auto& d : s.deployments)
        acts.push_back(action::Deploy{d.from, d.contract, eval_in(*contract_module(d.contract), d.setup), d.amount});
    auto r = add_block(st, BlockHeader{1, std::nullopt}, acts, cfg);
    if (!r.state)
        throw std::runtime_error("deployment failed: " + r.log);
    return *r.state;
}

namespace {

Val msg_value(const std::string& ind, const std::string& ctor, std::vector<Val> args = {})
{
    return make_constr(ind, ctor, std::move(args));
}

class TraceGen {
public:
    TraceGen(std::uint64_t seed, const Scenario& s, const ChainConfig& cfg) : rng_(seed), s_(s), cfg_(cfg) {}

    Trace run(std::size_t max_blocks, GenStats& stats)
    {
        Trace tr{genesis(s_, cfg_), {}};
        ChainState st = tr.genesis;
        for (std::size_t b = 0; b < max_blocks; ++b) {
            BlockHeader hd{st.slot + 1 + below(3), std::nullopt};
            std::vector<Action> acts;
            const std::size_t n = 1 + below(3);
            for (std::size_t k = 0; k < n; ++k)
                acts.push_back(random_action(st));

            auto r = add_block(st, hd, acts, cfg_);
            if (!r.state) {
                ++stats.rejected_blocks;
                // Keep what goes through, one action at a time.
                std::vector<Action> kept;
                for (const auto& a : acts) {
                    kept.push_back(a);
                    auto attempt = add_block(st, hd, kept, cfg_);
                    if (!attempt.state) {
                        kept.pop_back();
                        ++stats.dropped_actions;
                    }
                }
                acts = std::move(kept);
                r = add_block(st, hd, acts, cfg_);
            }
            count_outcomes(st, acts, stats);
            st = std::move(*r.state);
            tr.steps.push_back({hd, std::move(acts)});
            ++stats.blocks;
        }
        return tr;
    }

private:
    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    Money amount_up_to(long hi) { return Money(static_cast<long>(below(static_cast<std::size_t>(hi) + 1))); }

    Address random_actor()
    {
        return s_.actors.empty() ? 1 : s_.actors[below(s_.actors.size())].address;
    }

    std::vector<Address> contracts_named(const ChainState& st, const std::string& prefix) const
    {
        std::vector<Address> out;
        for (const auto& [addr, c] : st.contracts)
            if (c.name.rfind(prefix, 0) == 0)
                out.push_back(addr);
        return out;
    }

    Action random_action(const ChainState& st)
    {
        const auto& w = s_.weights;
        const unsigned weights[] = {w.transfer, w.donate, w.claim, w.get_funds, w.counter, w.invalid};
        std::discrete_distribution<unsigned> pick(std::begin(weights), std::end(weights));
        const auto cfs = contracts_named(st, "crowdfunding");
        const auto counters = contracts_named(st, "counter");
        unsigned kind = pick(rng_);
        if (!cfs.empty() && kind >= 1 && kind <= 3) {
            Address cf = cfs[below(cfs.size())];
            const auto state = programs::read_cf_state(st.contracts.at(cf).state);
            // Mostly messages that make sense for the campaign's phase.
            const bool open = st.slot < state.deadline;
            if (below(5) != 0)
                kind = open ? 1 : (kind == 1 ? 2 + below(2) : kind);
            if (kind == 1)
                return action::Call{random_actor(), cf, msg_value("Msg", "Donate"), 1 + amount_up_to(24)};
            if (kind == 2)
                return action::Call{random_actor(), cf, msg_value("Msg", "Claim"), 0};
            Address from = below(4) == 0 ? random_actor() : state.owner.convert_to<Address>();
            return action::Call{from, cf, msg_value("Msg", "GetFunds"), 0};
        }
        switch (kind) {
        case 4:
            if (!counters.empty()) {
                Money n(static_cast<long>(below(21)) - 10);
                return action::Call{random_actor(), counters[below(counters.size())],
                                    msg_value("Msg", below(2) ? "Inc" : "Dec", {programs::int_val(n)}), 0};
            }
            break;
        case 5:
            return invalid_action(st);
        default:
            break;
        }
        Address from = random_actor();
        return action::Transfer{from, random_actor(), amount_up_to(20)};
    }

    // Actions that are bound to fail: overdrafts, calls to accounts and
    // plain payments to contracts that insist on a message.
    Action invalid_action(const ChainState& st)
    {
        Address from = random_actor();
        switch (below(3)) {
        case 0:
            return action::Transfer{from, random_actor(), st.balance(from) + 1 + amount_up_to(10)};
        case 1:
            return action::Call{from, random_actor(), std::nullopt, 0};
        default: {
            auto cfs = contracts_named(st, "crowdfunding");
            if (!cfs.empty())
                return action::Transfer{from, cfs[below(cfs.size())], amount_up_to(5)};
            return action::Transfer{from, random_actor(), st.balance(from) + 1};
        }
        }
    }

    static void count_outcomes(const ChainState&, const std::vector<Action>& acts, GenStats& stats)
    {
        for (const auto& a : acts)
            if (const auto* c = std::get_if<action::Call>(&a); c && c->msg)
                if (const auto* m = c->msg->as<val::Constr>()) {
                    if (m->ctor == "GetFunds")
                        ++stats.funded;
                    else if (m->ctor == "Claim")
                        ++stats.refunded;
                }
    }

    std::mt19937_64 rng_;
    const Scenario& s_;
    const ChainConfig& cfg_;
};

}  // namespace

Trace gen_trace(std::uint64_t seed, std::size_t max_blocks, const Scenario& s, const ChainConfig& cfg,
                GenStats* stats)
{
    GenStats local;
    return TraceGen(seed, s, cfg).run(max_blocks, stats ? *stats : local);
}

ScriptRun run_script(const Scenario& s, const ChainConfig& cfg)
{
    ScriptRun out;
    out.trace.genesis = genesis(s, cfg);
    ChainState st = out.trace.genesis;
    for (std::size_t k = 0; k < s.blocks.size(); ++k) {
        const auto& blk = s.blocks[k];
        std::vector<Action> acts;
        for (const auto& a : blk.actions) {
            std::optional<Val> msg;
            if (a.msg) {
                auto it = st.contracts.find(a.to);
                const Module& scope = it != st.contracts.end() ? *it->second.module : programs::prelude();
                msg = eval_in(scope, *a.msg);
            }
            if (a.kind == "transfer")
                acts.push_back(action::Transfer{a.from, a.to, a.amount});
            else
                acts.push_back(action::Call{a.from, a.to, msg, a.amount});
        }
        BlockHeader hd{blk.slot, std::nullopt};
        auto r = add_block(st, hd, acts, cfg);
        const bool accepted = r.state.has_value();
        if (blk.expect_accepted && *blk.expect_accepted != accepted)
            out.failures.push_back("block " + std::to_string(k + 1) + " at slot " + std::to_string(blk.slot) +
                                   " was " + (accepted ? "accepted" : "rejected: " + r.log));
        if (accepted) {
            st = std::move(*r.state);
            out.trace.steps.push_back({hd, std::move(acts)});
        }
    }
    return out;
}

namespace {

Json state_json(const ChainState& st)
{
    Json balances = Json::object();
    for (const auto& [a, m] : st.balances)
        balances[std::to_string(a)] = money_to_json(m);
    Json contracts = Json::object();
    for (const auto& [a, c] : st.contracts)
        contracts[std::to_string(a)] = {{"contract", c.name}, {"state", print(c.state, &c.module->env)}};
    return Json{{"slot", st.slot}, {"balances", balances}, {"contracts", contracts}};
}

}  // namespace

Json trace_to_json(const Trace& tr, const ChainConfig& cfg)
{
    auto states = reachable_states(tr, cfg);
    Json steps = Json::array();
    for (std::size_t k = 0; k < tr.steps.size(); ++k) {
        Json acts = Json::array();
        for (const auto& a : tr.steps[k].actions)
            acts.push_back(describe(a, &states[k]));
        Json hd{{"slot", tr.steps[k].header.slot}};
        if (tr.steps[k].header.reward_to)
            hd["rewardTo"] = *tr.steps[k].header.reward_to;
        steps.push_back({{"header", hd}, {"actions", acts}, {"result", state_json(states[k + 1])}});
    }
    return Json{{"genesis", state_json(states.front())}, {"steps", steps}};
}

// ---------------------------------------------------------------------------

namespace {

void check_trace(const Trace& tr, const Scenario& s, const ChainConfig& cfg, const std::string& where,
                 ScenarioReport& rep)
{
    auto states = reachable_states(tr, cfg);
    rep.states_checked += states.size();
    for (const auto& name : s.invariants) {
        auto inv = invariant_by_name(name, tr.genesis);
        if (!inv) {
            rep.problems.push_back("unknown invariant " + name);
            continue;
        }
        for (std::size_t k = 0; k < states.size(); ++k)
            if (!(*inv)(states[k])) {
                rep.violations.push_back({name, where, k});
                break;
            }
    }
    if (!(replay(tr, cfg) == states.back()))
        rep.problems.push_back(where + ": replay does not reproduce the final state");
}

}  // namespace

ScenarioReport run_scenario(const Scenario& s, const ChainConfig& cfg)
{
    ScenarioReport rep;
    rep.name = s.name;
    if (!s.blocks.empty()) {
        auto script = run_script(s, cfg);
        for (auto& f : script.failures)
            rep.problems.push_back("script: " + f);
        check_trace(script.trace, s, cfg, "script", rep);
        ++rep.traces;
    }
    for (auto seed : s.seeds) {
        auto tr = gen_trace(seed, s.max_blocks, s, cfg, &rep.stats);
        check_trace(tr, s, cfg, "seed " + std::to_string(seed), rep);
        ++rep.traces;
    }
    return rep;
}

std::string report_text(const ScenarioReport& r)
{
    std::ostringstream out;
    out << "scenario " << r.name << ": " << r.traces << " traces, " << r.states_checked << " states, "
        << r.stats.blocks << " generated blocks (" << r.stats.rejected_blocks << " retried, "
        << r.stats.dropped_actions << " actions dropped), " << r.stats.funded << " funded, " << r.stats.refunded
        << " refunded\n";
    for (const auto& v : r.violations)
        out << "VIOLATION " << v.invariant << " in " << v.where << " after " << v.steps << " blocks\n";
    for (const auto& p : r.problems)
        out << "PROBLEM " << p << "\n";
    out << (r.ok() ? "OK" : "FAILED") << " " << r.name << "\n";
    return out.str();
}

Json report_json(const ScenarioReport& r)
{
    Json violations = Json::array();
    for (const auto& v : r.violations)
        violations.push_back({{"invariant", v.invariant}, {"where", v.where}, {"steps", v.steps}});
    return Json{{"name", r.name},
                {"ok", r.ok()},
                {"traces", r.traces},
                {"statesChecked", r.states_checked},
                {"blocks", r.stats.blocks},
                {"rejectedBlocks", r.stats.rejected_blocks},
                {"droppedActions", r.stats.dropped_actions},
                {"funded", r.stats.funded},
                {"refunded", r.stats.refunded},
                {"violations", violations},
                {"problems", r.problems}};
}

}  // namespace acorn::chain
