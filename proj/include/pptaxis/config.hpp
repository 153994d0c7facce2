#pragma once

// Line-oriented run configuration:
//
//   # comment
//   model.d1 = 1.0
//   domain.cells_x = 128
//
// Keys are dotted, unknown keys are rejected, and every missing required key
// is reported at once. config_reference() lists every key with its default.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pptaxis/analysis.hpp"
#include "pptaxis/model_constants.hpp"
#include "pptaxis/state.hpp"

namespace pptaxis {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0, std::string key = {})
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  /// 1-based line of a syntax error; 0 for validation errors.
  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

enum class InitProfile { constant, cosine_bump, equilibrium, file };

std::string_view to_string(InitProfile p);
std::string_view to_string(SolverChoice s);

struct DomainSpec {
  int dim = 1;
  double length_x = 1.0;
  double length_y = 1.0;
  std::size_t cells_x = 0;
  std::optional<std::size_t> cells_y;  // defaults to cells_x
  bool operator==(const DomainSpec&) const = default;
};

struct InitSpec {
  InitProfile profile = InitProfile::constant;
  double u0 = 1.0;
  double v0 = 1.0;
  double amplitude_u = 0.0;
  double amplitude_v = 0.0;
  int mode = 1;
  std::string file;
  bool operator==(const InitSpec&) const = default;
};

struct NormsSpec {
  double alpha = 0.5;
  std::optional<double> u0_c2alpha;
  std::optional<double> v0_c2alpha;
  std::optional<double> schauder_p;
  bool operator==(const NormsSpec&) const = default;
};

struct SolverSpec {
  SolverChoice kind = SolverChoice::imex;
  double dt = 0.0;
  double max_time = 0.0;
  double cfl_safety = 0.9;
  std::optional<double> blowup_threshold;
  double cg_tol = 1e-10;
  std::size_t cg_max_iter = 0;
  std::size_t slab_steps = 1;
  double fp_tol = 1e-10;
  std::size_t fp_max_iter = 50;
  bool operator==(const SolverSpec&) const = default;
};

struct ObserveSpec {
  std::size_t stride = 1;
  bool bounds = true;
  double slack = 0.05;
  std::optional<double> c2_horizon;
  bool operator==(const ObserveSpec&) const = default;
};

struct OutputSpec {
  std::string dir;
  std::vector<double> snapshot_times;
  bool operator==(const OutputSpec&) const = default;
};

struct RunSpec {
  ModelParams model;
  DomainSpec domain;
  InitSpec init;
  NormsSpec norms;
  SolverSpec solver;
  ObserveSpec observe;
  OutputSpec output;
  bool operator==(const RunSpec&) const = default;
};

RunSpec parse_config(std::string_view text);
RunSpec load_config(const std::string& path);

/// Every key, one per line, in a fixed order; parse_config(serialize_config(s)) == s.
std::string serialize_config(const RunSpec& spec);

/// (key, value) pairs as written by serialize_config, optional keys omitted when unset.
std::vector<std::pair<std::string, std::string>> config_entries(const RunSpec& spec);

/// Human-readable key reference with defaults (used by --help).
std::string config_reference();

/// Throws ConfigError naming the offending key.
void validate(const RunSpec& spec);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

// Resolution helpers shared by the runners.

Grid make_grid(const DomainSpec& d);
State build_initial_state(const RunSpec& spec);
InitialDataNorms resolve_norms(const RunSpec& spec, const State& initial);
PicardControl make_control(const RunSpec& spec, const DerivedConstants& dc);

}  // namespace pptaxis
