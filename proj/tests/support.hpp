#pragma once

// Helpers shared by the test binaries, including the native oracles that the
// deep-embedded programs are compared against.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "acorn/interp.hpp"
#include "acorn/parse.hpp"
#include "acorn/programs.hpp"
#include "acorn/stack.hpp"

namespace acorn::testing {

inline const Module& lib()
{
    return programs::prelude();
}

inline Expr parse(const std::string& src, const Module& m = lib())
{
    return parse_expr(src, m);
}

// Evaluates on a big stack; deep programs recurse on the host stack.
inline EvalResult<Val> run(const Module& m, const Expr& e, std::size_t fuel = 100000)
{
    return with_big_stack([&] { return interp::eval(m.env, fuel, Env{}, e); });
}

inline std::vector<Integer> random_ints(std::mt19937_64& rng, std::size_t max_len, int lo = -50, int hi = 50)
{
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> val(lo, hi);
    std::vector<Integer> out(len(rng));
    for (auto& x : out)
        x = val(rng);
    return out;
}

// ---------------------------------------------------------------------------
// Native oracles

template <class F> Integer native_foldr(F f, Integer acc, const std::vector<Integer>& xs)
{
    for (auto it = xs.rbegin(); it != xs.rend(); ++it)
        acc = f(*it, acc);
    return acc;
}

// Sum over an association list where the first binding of a key wins.
inline Integer native_visible_sum(const std::vector<std::pair<Integer, Integer>>& bindings)
{
    std::map<Integer, Integer> seen;
    for (const auto& [k, v] : bindings)
        seen.emplace(k, v);
    Integer total = 0;
    for (const auto& [k, v] : seen)
        total += v;
    return total;
}

// The crowdfunding contract written directly in C++, used as a reference
// model for the deep-embedded one.
struct NativeCrowdfunding {
    Integer balance = 0;
    std::map<Integer, Integer> donations;
    Integer owner;
    Integer deadline;
    bool done = false;
    Integer goal;

    enum class Msg { Donate, GetFunds, Claim };

    struct Payout {
        Integer amount;
        Integer to;
    };

    // nullopt when the contract rejects the call.
    std::optional<std::vector<Payout>> receive(Integer now, Integer sender, Integer amount, Msg m)
    {
        switch (m) {
        case Msg::Donate:
            if (now > deadline)
                return std::nullopt;
            donations[sender] += amount;
            balance += amount;
            return std::vector<Payout>{};
        case Msg::GetFunds:
            if (owner != sender || !(deadline < now) || !(goal <= balance))
                return std::nullopt;
            {
                std::vector<Payout> out{{balance, sender}};
                balance = 0;
                done = true;
                return out;
            }
        case Msg::Claim: {
            if (!(deadline < now) || !(balance < goal) || done)
                return std::nullopt;
            auto it = donations.find(sender);
            if (it == donations.end())
                return std::nullopt;
            Integer v = it->second;
            it->second = 0;
            balance -= v;
            return std::vector<Payout>{{v, sender}};
        }
        }
        return std::nullopt;
    }
};

}  // namespace acorn::testing
