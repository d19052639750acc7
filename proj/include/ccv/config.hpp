#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ccv/encoding.hpp"
#include "ccv/qaoa.hpp"

namespace ccv {

/// Parsed and resolved experiment description. `resolved` is the canonical
/// JSON form (defaults filled in) used for hashing and round-trip checks.
struct ExperimentConfig {
    nlohmann::json resolved;
    std::string problem_kind;
    EncodedProblem encoded;
    std::optional<ComplexQuadraticProblem> quadratic;  // kept for compare/size sweeps
    QaoaConfig qaoa;
    std::string output_dir = ".";
    std::vector<std::uint64_t> seeds;
    bool wigner_enabled = false;
    std::vector<int> wigner_modes;
};

namespace config {

/// Parses a config JSON; unknown keys are rejected. Throws ConfigError.
ExperimentConfig parse(const nlohmann::json& j);
ExperimentConfig load(const std::string& path);

/// FNV-1a 64 over the canonical resolved dump.
std::string hash(const nlohmann::json& resolved);

/// Built-in problems: quadratic-n1..quadratic-n4, constrained-quadratic,
/// styblinski-tang-2d, quartic-complex.
nlohmann::json preset(const std::string& name);

/// Quadratic family used by the size sweep: A = I_n, c = -(4+4i) 1_n.
ComplexQuadraticProblem quadratic_family(int n);

QuadraturePolynomial polynomial_from_json(const nlohmann::json& j);
nlohmann::json polynomial_to_json(const QuadraturePolynomial& poly);

}  // namespace config
}  // namespace ccv
