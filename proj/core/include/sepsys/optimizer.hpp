#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace sepsys {

using Objective = std::function<double(std::span<const double>)>;

struct OptConfig {
    double lower { -50.0 };
    double upper { 50.0 };
    std::size_t pop_size { 0 }; // 0: 10 + 10*dim
    std::size_t max_gens { 0 }; // 0: 3 * pop_size
    std::uint64_t seed { 0 };
    double target_obj { -std::numeric_limits<double>::infinity() };
    // Candidates copied into the initial population (clipped to the box).
    std::vector<std::vector<double>> initial;
    // Nelder-Mead budget spent on the best member after the last
    // generation when target_obj was not reached. 0: 200 * dim.
    std::size_t refine_evals { 0 };

    [[nodiscard]] auto resolved_pop(std::size_t dim) const -> std::size_t;
    [[nodiscard]] auto resolved_gens(std::size_t dim) const -> std::size_t;
    [[nodiscard]] auto resolved_refine(std::size_t dim) const -> std::size_t;
    void validate(std::size_t dim) const;
};

struct OptResult {
    std::vector<double> best_params;
    double best_value { std::numeric_limits<double>::infinity() };
    std::size_t evals { 0 };
    std::vector<double> history; // best value after each generation
};

// Differential evolution (rand/1/bin) with one low-dimensional simplex
// step per generation on a random coordinate subset of the best member.
// Non-finite objective values count as +inf.
[[nodiscard]] auto minimize(Objective const& objective, std::size_t dim, OptConfig const& config) -> OptResult;

// Nelder-Mead from x0 inside the same box, restarted around the incumbent
// until a restart stops improving.
[[nodiscard]] auto polish(Objective const& objective, std::vector<double> x0, OptConfig const& config,
    std::size_t max_evals = 4000) -> OptResult;

} // namespace sepsys
