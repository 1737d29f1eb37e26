#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cmw/cm_instance.hpp"
#include "cmw/robust.hpp"

namespace cmw {

/** Named instance families. Each params struct carries the family's knobs;
 *  defaults reproduce the documented reference configurations. */
struct Example32Params {
  double eps = 0.5;
  int n = 4;  ///< W grid {0, 1/n, ..., 1}
};
struct Example32ModParams {
  double eps = 4.0;
  int n = 4;  ///< W grid extended past 1 up to 1 + sqrt(eps)
};
struct Lemma31Params {
  int J = 4;        ///< equiprobable normal-quantile v points
  double R = 10.0;  ///< W grid [0, R]
  int n_w = 21;
};
struct Lemma34Params {
  std::vector<double> v_points{0.25, 1.0};
  std::vector<double> g_values{-2.0, -1.0};
  double rho = 1.0;
};
struct Example35Params {
  int n = 16;  ///< v grid {1/n, ..., 1}, g = -1/sqrt(v)
  double rho = 1.0;
};
struct FatCantorParams {
  int depth = 3;  ///< middle-interval removal steps
  int n = 64;     ///< midpoint v grid on [0,1]
  double rho = 1.0;
};
struct Example33Params {
  double R = 10.0;
  int n = 200;  ///< symmetric W grid on [-R, R]
};
struct CustomCmParams {
  CmInstance inst;
};
struct CustomPwParams {
  UncertainProgram prog;
};

using InstanceKind =
    std::variant<Example32Params, Example32ModParams, Lemma31Params,
                 Lemma34Params, Example35Params, FatCantorParams,
                 Example33Params, CustomCmParams, CustomPwParams>;

struct InstanceSpec {
  InstanceKind kind;
  std::uint64_t seed = 0;  ///< echoed into reports; the families are exact
};

using GeneratedInstance = std::variant<CmInstance, UncertainProgram>;

/// Family tag used in files, CLI arguments, and reports (e.g. "example32").
std::string kind_name(const InstanceSpec& spec);

/// Materializes the instance; throws std::invalid_argument on bad params.
GeneratedInstance generate(const InstanceSpec& spec);
/// generate() restricted to transport instances; throws on a CustomPw kind.
CmInstance generate_cm(const InstanceSpec& spec);

/** Instance files: JSON with {"version": 1, "seed": ..., "kind": ...,
 *  "params" | "payload": ...}; +inf cost entries are spelled "inf".
 *  Round-trips are bit-exact for every numeric field. */
std::string spec_to_json(const InstanceSpec& spec);
InstanceSpec spec_from_json(const std::string& text);
void save_spec(const InstanceSpec& spec, const std::string& path);
InstanceSpec load_spec(const std::string& path);

/// FNV-1a hash (hex) of the canonical JSON text, the provenance id of a run.
std::string spec_hash(const InstanceSpec& spec);

/** Middle-interval removal scaffolding: step k removes, from each remaining
 *  closed interval, the centered open interval of length 4^-k. The remaining
 *  set keeps positive measure (a fat Cantor set). */
struct FatCantorSets {
  std::vector<std::pair<double, double>> removed;    ///< open intervals
  std::vector<std::pair<double, double>> remaining;  ///< closed intervals
};
FatCantorSets fat_cantor_sets(int depth);
/// Distance from v to the remaining closed set.
double fat_cantor_dist(double v, const FatCantorSets& sets);

/** Randomized transport instance for property suites: 1-3 v-hat groups with
 *  up to two atoms each, a 4-6 point W grid, partially excluded costs, and
 *  (h, rho) calibrated from a hidden feasible plan so the primal is solvable
 *  with strict budget room. Identical seed, identical instance. */
CmInstance random_cm_instance(std::uint64_t seed);

/** Randomized uncertain program: 1-3 x dims, 1-2 z dims, 2-4 vertices,
 *  1-2 uncertain constraints plus box rows encoded as plain constraints,
 *  a strict Slater point at the origin, and optionally a strictly convex
 *  diagonal-quadratic objective. */
UncertainProgram random_uncertain_program(std::uint64_t seed,
                                          bool quadratic_objective);

/// Random boxed LP with a guaranteed interior feasible point, n <= max_n
/// variables; the soundness suite compares it against vertex enumeration.
LpProblem random_feasible_lp(std::uint64_t seed, std::size_t max_n);

}  // namespace cmw
