#pragma once

#include <cstdint>
#include <vector>

#include "sepsys/expr.hpp"
#include "sepsys/optimizer.hpp"
#include "sepsys/sampling.hpp"
#include "sepsys/varset.hpp"

namespace sepsys {

struct FitConfig {
    double eps_target { 1e-6 };
    std::size_t samples_per_var { 200 };
    std::vector<TemplateId> library_order { TemplateId::U1, TemplateId::U2, TemplateId::U3, TemplateId::U4,
        TemplateId::B1, TemplateId::B2, TemplateId::B3, TemplateId::B4, TemplateId::E1, TemplateId::E2 };
    int attempts { 5 }; // per template, counting the first pass

    void validate() const;
};

struct TemplateFit {
    FittedFactor factor; // vars left empty
    double rel_mse { 0.0 };
    std::size_t evals { 0 };
};

// Fits scale * T(params; inputs) + offset by least squares. Parameters
// entering linearly (amplitudes, phases, linear coefficients) are solved
// exactly for every trial of the remaining ones, which are searched with
// `minimize` over the OptConfig box and then polished. `inputs` columns
// follow the template's input order. rel_mse is MSE / var(y).
[[nodiscard]] auto fit_template(TemplateId id, RowMatrix const& inputs, Eigen::VectorXd const& y,
    OptConfig const& opt, int attempt) -> TemplateFit;

// Sequence search over the library: the first template whose relative
// MSE is at most eps_target wins. `inputs` columns follow `vars`.
// Throws NoModelFits with the best relative MSE when nothing qualifies.
[[nodiscard]] auto sequence_fit(RowMatrix const& inputs, Eigen::VectorXd const& y, VarSet const& vars,
    FitConfig const& config, OptConfig const& opt) -> FittedFactor;

} // namespace sepsys
