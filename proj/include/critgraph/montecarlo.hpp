#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

#include "critgraph/rng.hpp"

namespace critgraph {

inline constexpr std::size_t batch_size = 1024;

/// Runs `trial(stream)` `trials` times. Trials are grouped in fixed batches; batch b draws
/// from base.child("batch", b) and results are concatenated in batch order, so the output
/// depends only on `base` and `trials`, never on `jobs`.
template <class Trial>
auto monte_carlo(const RngStream& base, std::size_t trials, Trial trial, std::size_t jobs = 1)
    -> std::vector<std::invoke_result_t<Trial&, RngStream&>> {
    using Result = std::invoke_result_t<Trial&, RngStream&>;
    const std::size_t batches = (trials + batch_size - 1) / batch_size;
    std::vector<std::vector<Result>> per_batch(batches);
    auto run_batch = [&](std::size_t b, Trial& local) {
        RngStream stream = base.child("batch", b);
        const std::size_t first = b * batch_size;
        const std::size_t count = std::min(batch_size, trials - first);
        auto& out = per_batch[b];
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(local(stream));
        }
    };
    jobs = std::max<std::size_t>(1, std::min(jobs, batches));
    if (jobs == 1) {
        for (std::size_t b = 0; b < batches; ++b) {
            run_batch(b, trial);
        }
    } else {
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(jobs);
        workers.reserve(jobs);
        for (std::size_t j = 0; j < jobs; ++j) {
            workers.emplace_back([&, j] {
                try {
                    Trial local = trial;
                    for (std::size_t b = j; b < batches; b += jobs) {
                        run_batch(b, local);
                    }
                } catch (...) {
                    errors[j] = std::current_exception();
                }
            });
        }
        for (auto& w : workers) {
            w.join();
        }
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    std::vector<Result> all;
    all.reserve(trials);
    for (auto& batch : per_batch) {
        for (auto& r : batch) {
            all.push_back(std::move(r));
        }
    }
    return all;
}

} // namespace critgraph
