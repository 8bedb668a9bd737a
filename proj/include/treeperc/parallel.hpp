#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace treeperc {

/// Runs body(trial, acc) for trial in [0, trials), splitting the index range
/// into contiguous blocks over `workers` threads. Each worker fills its own
/// Acc; blocks are merged in index order with acc.merge(other).
template <class Acc, class Body>
Acc run_trials(std::uint64_t trials, int workers, Body&& body) {
    const std::uint64_t w =
        std::max<std::uint64_t>(1, std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(workers, 1)),
                                                           std::max<std::uint64_t>(trials, 1)));
    std::vector<Acc> partial(w);
    if (w == 1) {
        for (std::uint64_t t = 0; t < trials; ++t) {
            body(t, partial[0]);
        }
        return std::move(partial[0]);
    }
    std::vector<std::exception_ptr> errors(w);
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::uint64_t k = 0; k < w; ++k) {
        const std::uint64_t begin = trials * k / w;
        const std::uint64_t end = trials * (k + 1) / w;
        threads.emplace_back([&, k, begin, end] {
            try {
                for (std::uint64_t t = begin; t < end; ++t) {
                    body(t, partial[k]);
                }
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) {
        th.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    Acc total = std::move(partial[0]);
    for (std::uint64_t k = 1; k < w; ++k) {
        total.merge(partial[k]);
    }
    return total;
}

/// f(i) for i in [0, count) over `workers` threads, results in index order.
template <class F>
auto parallel_map(std::size_t count, int workers, F&& f) {
    using R = decltype(f(std::size_t{0}));
    struct Acc {
        std::vector<R> out;
        void merge(Acc& other) {
            for (auto& r : other.out) {
                out.push_back(std::move(r));
            }
        }
    };
    Acc acc = run_trials<Acc>(count, workers, [&](std::uint64_t i, Acc& a) {
        a.out.push_back(f(static_cast<std::size_t>(i)));
    });
    return std::move(acc.out);
}

}  // namespace treeperc
