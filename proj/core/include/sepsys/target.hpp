#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>

#include "sepsys/errors.hpp"

namespace sepsys {

// A black-box target f: R^n -> R. Copies share one evaluation counter so
// the pipeline can attribute cost to stages.
class Target {
public:
    using Fn = std::function<double(std::span<const double>)>;

    Target(Fn fn, std::size_t n_vars)
        : fn_(std::make_shared<Fn>(std::move(fn)))
        , n_vars_(n_vars)
        , count_(std::make_shared<std::atomic<std::uint64_t>>(0))
    {
    }

    [[nodiscard]] auto n_vars() const noexcept -> std::size_t { return n_vars_; }
    [[nodiscard]] auto evaluations() const noexcept -> std::uint64_t { return count_->load(std::memory_order_relaxed); }

    // Throws TargetEvalError when the target throws or returns a non-finite value.
    auto operator()(std::span<const double> x) const -> double
    {
        count_->fetch_add(1, std::memory_order_relaxed);
        double y = 0;
        try {
            y = (*fn_)(x);
        } catch (Error const& e) {
            throw TargetEvalError(std::string("target evaluation failed: ") + e.what(), { x.begin(), x.end() });
        }
        if (!std::isfinite(y)) {
            throw TargetEvalError("target returned a non-finite value", { x.begin(), x.end() });
        }
        return y;
    }

private:
    std::shared_ptr<Fn> fn_;
    std::size_t n_vars_;
    std::shared_ptr<std::atomic<std::uint64_t>> count_;
};

} // namespace sepsys
