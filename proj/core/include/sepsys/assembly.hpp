#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sepsys/bict.hpp"
#include "sepsys/expr.hpp"
#include "sepsys/factor_detect.hpp"
#include "sepsys/optimizer.hpp"
#include "sepsys/structure.hpp"
#include "sepsys/template_fit.hpp"

namespace sepsys {

// How a factor's slice isolates it from the rest of the target.
//  Pure: two settings of the block's other non-repeated variables are
//        differenced, leaving a scaled copy of the factor.
//  Ambiguous: the factor is the block's whole non-repeated set and the
//        block has repeated factors; its additive shift cannot be
//        separated from other blocks and is recovered during assembly.
//  Single: the block has exactly one factor; any shift joins c0.
enum class SliceMode { Pure, Ambiguous, Single };

[[nodiscard]] auto slice_mode(GSStructure const& structure, std::size_t block, VarSet const& factor_vars) -> SliceMode;

[[nodiscard]] auto fit_factor(Target const& f, BoxDomain const& domain, GSStructure const& structure,
    std::size_t block, VarSet const& factor_vars, FitConfig const& config, OptConfig const& opt,
    std::uint64_t seed) -> FittedFactor;

struct AssemblyInfo {
    double condition { 0.0 };
    double fit_mse { 0.0 }; // residual on the assembly sample
};

// Solves f ~ c0 + sum c_i * B_i on a fresh LHS sample, then folds factor
// scales into the coefficients and canonicalises every factor.
[[nodiscard]] auto assemble_global(Target const& f, BoxDomain const& domain, GSStructure const& structure,
    std::vector<std::vector<FittedFactor>> factors, FitConfig const& config, std::uint64_t seed,
    AssemblyInfo* info = nullptr) -> GSModel;

[[nodiscard]] auto compute_mse(GSModel const& model, Target const& f, BoxDomain const& domain, std::size_t n_points,
    std::uint64_t seed) -> double;

struct MbbConfig {
    Tolerance tol;
    FitConfig fit;
    OptConfig opt;
    Polarity polarity { Polarity::Dependent };
};

struct MbbMetrics {
    double t1_ms { 0.0 }, t2_ms { 0.0 }, t3_ms { 0.0 };
    std::uint64_t evals_detect { 0 }, evals_fit { 0 }, evals_assembly { 0 };
    double mse { 0.0 };
    double assembly_mse { 0.0 };
    bool success { false };
};

struct MbbResult {
    GSModel model;
    GSStructure structure;
    MbbMetrics metrics;
};

// Detection, factor fitting, assembly and validation. Failures are
// rethrown as StageError tagged "detection", "fitting" or "assembly".
[[nodiscard]] auto run_mbb(Target const& f, BoxDomain const& domain, MbbConfig const& config, std::uint64_t seed)
    -> MbbResult;

} // namespace sepsys
