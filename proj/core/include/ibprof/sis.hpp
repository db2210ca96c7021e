#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibprof/assort.hpp"
#include "ibprof/collapse.hpp"
#include "ibprof/graph.hpp"
#include "ibprof/spectral.hpp"
#include "ibprof/stratify.hpp"

namespace ibprof {

// Arcs run transmitter -> receiver: node i is infected through the arcs
// whose head is i.
struct SISParams {
  double beta = 1.0;   // infection rate
  double delta = 1.0;  // recovery rate

  void validate() const;
};

/// dx_i/dt = -delta x_i + (1 - x_i) beta sum_j A_ji x_j.
std::vector<double> sis_rhs(std::span<const double> x, const SISParams& params, const Graph& g);

// 0.01 / (delta + beta * max in-strength).
double default_dt(const Graph& g, const SISParams& params);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::size_t steps = 0;
};

inline constexpr double kInvarianceSlack = 1e-9;

struct IntegrateOptions {
  double horizon = 10.0;
  double dt = 0.0;              // 0 selects default_dt
  std::size_t sample_every = 0; // 0 keeps only the endpoints
};

/// Classical RK4. Every step is checked against [-1e-9, 1 + 1e-9]^n;
/// leaving it raises InvarianceViolation rather than clamping.
Trajectory integrate(std::span<const double> x0, const SISParams& params, const Graph& g,
                     const IntegrateOptions& options);

enum class FixedPointStart { Half, Subsolution, Ones };
enum class EquilibriumMethod { FixedPoint, OdeLimit };

std::string_view to_string(EquilibriumMethod m) noexcept;

struct EquilibriumOptions {
  double tol = 1e-12;
  std::size_t max_iterations = 1000000;
  FixedPointStart start = FixedPointStart::Half;
  bool record_iterates = false;
};

struct EquilibriumResult {
  std::vector<double> x_star;
  double residual = 0.0;      // || F(x*) - x* ||_inf for the fixed-point map F
  double rhs_residual = 0.0;  // || -delta x* + (1 - x*) beta A^T x* ||_inf
  std::size_t iterations = 0;
  double threshold_margin = 0.0;  // beta rho(A) / delta - 1
  double spectral_radius = 0.0;
  EquilibriumMethod method = EquilibriumMethod::FixedPoint;
  bool monotone = true;        // iterates moved in one direction entrywise
  bool nondecreasing = true;   // every iterate >= its predecessor entrywise
  double final_damping = 1.0;
  std::vector<std::vector<double>> iterates;  // when record_iterates
};

/// Damped iteration of x_i <- 1 - delta / (delta + beta s_i), s = A^T x.
/// Returns the zero vector when beta rho(A) / delta <= 1.
EquilibriumResult endemic_equilibrium(const Graph& g, const SISParams& params, const EquilibriumOptions& options = {});

struct OdeEquilibriumOptions {
  double tol = 1e-11;       // stop once || dx/dt ||_inf <= tol
  double max_time = 1e4;
  double dt = 0.0;
};

/// Integrates from x0 until the derivative vanishes.
EquilibriumResult ode_equilibrium(const Graph& g, const SISParams& params, std::span<const double> x0,
                                  const OdeEquilibriumOptions& options = {});

enum class DominanceSkip { None, EmptyInterior, EmptyBoundary };

std::string_view to_string(DominanceSkip s) noexcept;

struct GroupDominance {
  BlockId block = 0;
  DominanceSkip skipped = DominanceSkip::None;
  std::optional<double> mean_boundary;
  std::optional<double> mean_interior;
  std::optional<double> gap;  // mean_boundary - mean_interior
  bool dominant = false;
};

std::vector<GroupDominance> boundary_dominance(const Graph& g, const Partition& p, const NodeRoles& roles,
                                               std::span<const double> x_star);

enum class ChainVerdict { DiseaseFree, NoBtoIArcs, NoDominance, ConditionsFail, NegativePredicted };

std::string_view to_string(ChainVerdict v) noexcept;

struct ChainOptions {
  std::optional<WalkSpec> walk;        // default WalkSpec::automatic
  std::optional<double> phi_threshold; // optional cap on Phi_max for the premises
  EquilibriumOptions equilibrium;
};

struct ChainReport {
  WalkSpec walk;
  std::vector<BlockConductance> phi_per_block;
  std::optional<double> phi_max;
  EquilibriumResult equilibrium;
  std::vector<GroupDominance> dominance;
  bool dominance_all = false;  // at least one group assessed, every assessed group dominant
  std::optional<double> min_gap;
  AssortProfile profile;
  std::optional<SignConditionsReport> sign_report;
  Coefficient r_bi;
  bool premises_hold = false;
  bool prediction = false;        // sign conditions hold with strictness
  bool conclusion_holds = false;  // observed r_BI < 0
  ChainVerdict verdict = ChainVerdict::DiseaseFree;
  std::vector<std::string> notes;
};

/// Conductance diagnostics, endemic equilibrium, boundary dominance, the
/// profile of x* and the sign conditions, in that order. Undirected inputs are
/// treated as symmetric digraphs.
ChainReport implication_chain(const Graph& g, const Partition& p, const SISParams& params,
                              const ChainOptions& options = {});

}  // namespace ibprof
