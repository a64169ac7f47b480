#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qes::cli {

enum class Status { kPass, kFail, kBorderline, kInfo };

const char* to_string(Status s);

/// One line of a report. Quantitative checks pass iff |measured - expected| <= tolerance.
struct ReportRecord {
  std::string check;
  Status status = Status::kInfo;
  std::optional<double> measured;
  std::optional<double> expected;
  std::optional<double> tolerance;
  std::string note;
};

struct Report {
  std::vector<ReportRecord> records;

  /// Adds a record whose status follows from |measured - expected| <= tol.
  void compare(std::string check, double measured, double expected, double tol, std::string note = {});
  /// measured <= bound.
  void bound(std::string check, double measured, double bound, std::string note = {});
  void flag(std::string check, bool ok, std::string note = {});
  void info(std::string check, std::optional<double> value, std::string note = {});
  void fail(std::string check, std::string note);

  bool all_pass() const;
  std::string text() const;
  std::string jsonl() const;
};

struct GridSettings {
  std::optional<double> x_min, x_max;
  std::size_t n_coarse = 2000;
  std::size_t n_fine = 4000;
};

struct RunConfig {
  std::string command;
  std::string model;
  std::map<std::string, double> params;  // model parameters, validated per model
  std::vector<double> w_plus;             // polynomial model coefficients, ascending
  GridSettings grid;
  double tol = 1e-6;
  std::string out_dir = "qes_out";
  std::size_t k = 6;
  unsigned nmax = 2;
  std::optional<double> profile_step;
};

/// Reads a JSON config; any unknown key raises UsageError naming it.
void apply_config_file(RunConfig& cfg, const std::string& path);

/// Fills defaults for the selected model and rejects unknown parameters.
void resolve_model_params(RunConfig& cfg);

Report cmd_verify(const RunConfig& cfg);
Report cmd_spectrum(const RunConfig& cfg, std::string& csv);
Report cmd_decompose(const RunConfig& cfg);
Report cmd_scalarfield(const RunConfig& cfg, std::string& csv);

/// Full front end: parse, run, write files. Returns the process exit code
/// (0 all pass, 1 a check failed, 2 usage or config error).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Shortest decimal form that round-trips (17 significant digits).
std::string format_real(double v);

}  // namespace qes::cli
