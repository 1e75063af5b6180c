#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sepsys {

// Parametric factor models. U* take one input, B* two. E1/E2 are
// bivariate extensions tried after the B* models (see README).
enum class TemplateId : int { U1, U2, U3, U4, B1, B2, B3, B4, E1, E2 };

struct ModelTemplate {
    TemplateId id;
    std::string_view name;
    std::size_t arity;
    std::size_t n_params;
    std::string_view formula; // documentation only
};

[[nodiscard]] auto template_info(TemplateId id) -> ModelTemplate const&;
[[nodiscard]] auto all_templates() -> std::span<ModelTemplate const>;
[[nodiscard]] auto template_from_name(std::string_view name) -> std::optional<TemplateId>;

// Pure evaluation of a template. Throws DomainError on invalid arguments
// (log of a non-positive number, 0^negative, negative^non-integer,
// division by zero in the ratio models).
[[nodiscard]] auto eval_template(TemplateId id, std::span<const double> params, std::span<const double> inputs) -> double;

struct FittedFactor {
    TemplateId id { TemplateId::U1 };
    std::vector<double> params;
    double scale { 1.0 };
    double offset { 0.0 }; // factor value = scale * template + offset
    std::vector<int> vars; // template input order
    double fit_mse { 0.0 };

    [[nodiscard]] auto value(std::span<const double> x) const -> double;
    void validate() const;
};

// c[0] + sum_i c[i+1] * prod_j blocks[i][j](x)
struct GSModel {
    std::size_t n_vars { 0 };
    std::vector<double> c { 0.0 };
    std::vector<std::vector<FittedFactor>> blocks;

    [[nodiscard]] auto block_value(std::size_t block, std::span<const double> x) const -> double;
    void validate() const;
};

[[nodiscard]] auto eval_model(GSModel const& model, std::span<const double> x) -> double;

// Sign/phase normalisation: non-negative leading frequency for sine models,
// phase in (-pi/2, pi/2], and B3 and the log models absorb the additive offset.
// The factor's value is unchanged.
[[nodiscard]] auto canonicalize(FittedFactor f) -> FittedFactor;

// Orders factors by smallest variable index, then template id.
void sort_factors(std::vector<FittedFactor>& factors);

[[nodiscard]] auto render_factor(FittedFactor const& f, std::span<const std::string> var_names) -> std::string;
[[nodiscard]] auto render_model(GSModel const& model, std::span<const std::string> var_names) -> std::string;

// Shortest decimal form that round-trips, negative values parenthesised.
[[nodiscard]] auto format_number(double v) -> std::string;

} // namespace sepsys
