#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "opid/matfun.hpp"
#include "opid/discretization.hpp"

namespace opid {

/// Every default threshold used by the verification commands.
struct Tolerances {
  double order_threshold = 1.5;
  double exact_residual = 1e-11;
  double positivity_slack = 1e-8;
  double reconstruction = 1e-9;
  double nesting_ratio_min = 1.5;
  double nesting_ratio_max = 3.0;
  double nesting_exact = 1e-12;
  double crosscheck_bound = 0.05;
  double crosscheck_exact = 1e-10;
  double kernel_quadrature = 1e-12;
  double min_eig_tolerance = 2e-3;
};

enum class OutputFormat { csv, json };

struct RunConfig {
  MatrixFunctionSpec function;
  double l = 1.0;
  Variant variant = Variant::selfadjoint;
  std::vector<int> N_list{32, 64, 128};
  int radii = 8;
  std::vector<double> epsilons{0.25, 0.5, 0.75};
  double l_hat = 0.5;
  /// Spacing for the nesting test; h and h/2 are compared.
  double h = 1.0 / 64;
  /// Optional spectral oracle for the positivity command.
  std::optional<double> expected_min_eig;
  Tolerances tolerances;
  std::optional<std::string> output_path;
  OutputFormat format = OutputFormat::json;
};

/// Parse and validate; unknown keys and bad values throw InvalidSpec.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
MatrixFunctionSpec parse_function(const nlohmann::json& doc, double default_length);

struct CheckRecord {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  // e.g. ">=", "<=", "in"
  bool pass = false;
  std::string note;
};

enum class VerdictStatus { pass, fail, skip };

struct SuiteVerdict {
  std::string command;
  std::vector<CheckRecord> checks;
  VerdictStatus status = VerdictStatus::pass;
  std::string reason;  // why skipped / why an error aborted the suite

  bool overall() const;
  /// Set status from the checks unless already skipped or failed.
  void finalize();
  int exit_code() const { return status == VerdictStatus::fail ? 1 : 0; }
};

std::string_view to_string(VerdictStatus s);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 CSV with a header row and CRLF line breaks.
void write_csv(std::ostream& os, const Table& table);
std::string csv_field(const std::string& value);

struct CommandResult {
  SuiteVerdict verdict;
  Table table;
};

CommandResult cmd_verify_identity(const RunConfig& cfg);
CommandResult cmd_components(const RunConfig& cfg);
CommandResult cmd_positivity(const RunConfig& cfg);
CommandResult cmd_factorize(const RunConfig& cfg);
CommandResult cmd_crosscheck(const RunConfig& cfg);
CommandResult cmd_converge(const RunConfig& cfg);

const std::vector<std::string>& command_names();
/// Dispatch by CLI name; InvalidSpec for an unknown name.
CommandResult run_command(const std::string& name, const RunConfig& cfg);

/// Verdict plus table; `timestamp` is the only non-deterministic field.
nlohmann::json to_json(const CommandResult& result, const std::string& timestamp);

std::string format_double(double v);

}  // namespace opid
