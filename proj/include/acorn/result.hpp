#pragma once

#include <string>
#include <utility>
#include <variant>

namespace acorn {

struct NotEnoughFuel {
    friend bool operator==(const NotEnoughFuel&, const NotEnoughFuel&) = default;
};

struct EvalError {
    std::string message;
    friend bool operator==(const EvalError&, const EvalError&) = default;
};

// Outcome of a fuel-bounded evaluation: a value, fuel exhaustion, or a stuck
// term with a diagnostic.
template <class T> class EvalResult {
public:
    EvalResult(T value) : state_(std::move(value)) {}
    EvalResult(NotEnoughFuel f) : state_(f) {}
    EvalResult(EvalError e) : state_(std::move(e)) {}

    bool ok() const { return std::holds_alternative<T>(state_); }
    bool out_of_fuel() const { return std::holds_alternative<NotEnoughFuel>(state_); }
    bool stuck() const { return std::holds_alternative<EvalError>(state_); }

    const T& value() const { return std::get<T>(state_); }
    const std::string& error() const { return std::get<EvalError>(state_).message; }

    // Re-wraps a non-Ok outcome for a different payload type.
    template <class U> EvalResult<U> failure() const
    {
        if (out_of_fuel())
            return NotEnoughFuel{};
        return EvalError{error()};
    }

    friend bool operator==(const EvalResult&, const EvalResult&) = default;

private:
    std::variant<T, NotEnoughFuel, EvalError> state_;
};

inline EvalError eval_error(std::string message)
{
    return EvalError{std::move(message)};
}

}  // namespace acorn
