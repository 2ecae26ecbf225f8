#pragma once

#include <pthread.h>

#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <type_traits>
#include <stdexcept>

// Both evaluators recurse on the host stack, and fuel only bounds recursion
// depth loosely. Entry points run their work on a thread with a large stack.

namespace acorn {

inline constexpr std::size_t kBigStack = std::size_t{1} << 30;

template <class F> auto with_big_stack(F&& f, std::size_t bytes = kBigStack) -> decltype(f())
{
    using R = decltype(f());
    struct Job {
        std::function<R()> body;
        std::exception_ptr error;
        std::conditional_t<std::is_void_v<R>, int, std::optional<R>> result;
    } job{std::forward<F>(f), nullptr, {}};

    auto trampoline = [](void* p) -> void* {
        auto* j = static_cast<Job*>(p);
        try {
            if constexpr (std::is_void_v<R>)
                j->body();
            else
                j->result.emplace(j->body());
        } catch (...) {
            j->error = std::current_exception();
        }
        return nullptr;
    };

    pthread_attr_t attr;
    pthread_attr_init(&attr);
    pthread_attr_setstacksize(&attr, bytes);
    pthread_t thread;
    int rc = pthread_create(&thread, &attr, +trampoline, &job);
    pthread_attr_destroy(&attr);
    if (rc != 0)
        throw std::runtime_error("cannot start worker thread");
    pthread_join(thread, nullptr);
    if (job.error)
        std::rethrow_exception(job.error);
    if constexpr (!std::is_void_v<R>)
        return std::move(*job.result);
}

}  // namespace acorn
