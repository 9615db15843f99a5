#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "faic/optimizer.hpp"

namespace faic {

enum class Method { FiniteOpt, GaussianOpt, LowSnr, HighSnr, IaLoss, Identity };

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct UserSection {
  std::optional<std::string> modulation;
  std::optional<double> weight;
};

/// Parsed experiment configuration. See README for the file grammar.
struct ExperimentConfig {
  std::string fixture = "paper-2user-2x2";
  std::string channel_file;  // overrides `fixture` when set
  std::string modulation = "bpsk";
  std::map<int, UserSection> users;  // 1-based
  std::vector<double> snr_db;
  std::vector<Method> methods{Method::FiniteOpt};
  McConfig mc;
  OptimizerOptions optimizer;
  std::string output = "-";
  std::string trace_output;
  bool timing = false;

  // optimize
  std::string reference_precoders;
  // gradcheck
  std::string objective = "finite";
  double tolerance = 0.0;  // 0 selects 1e-3 (finite) or 1e-6 (gaussian)
  double fd_step = 1e-4;
  int random_users = 0;  // > 0 replaces the channel with a seeded random one
  int random_antennas = 2;
  std::uint64_t channel_seed = 7;
  // detect-demo
  int symbols = 200;
  std::size_t detect_user = 1;
};

/// Throws Error("<source>:<line>: ...") on malformed input or unknown keys.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Channel, symbol tables and weights resolved from a configuration.
struct Problem {
  ChannelSet channel;
  std::vector<SymbolTable> tables;
  Weights weights;
};

Problem resolve_problem(const ExperimentConfig& cfg);

struct SweepRow {
  double snr_db = 0.0;
  std::string user;  // 1-based index or "sum"
  Method method = Method::Identity;
  double rate_bits = 0.0;
  double std_error = 0.0;
  double wall_ms = 0.0;
};

inline constexpr const char* kSweepHeader = "snr_db,user,method,rate_bits,stderr,wall_ms";

/// Rows sorted by (snr, method, user) with the sum row last per group.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Writes the precoder report to `report` and the per-sweep WSR trace CSV to
/// `trace`. Returns the final WSR.
double run_optimize(const ExperimentConfig& cfg, std::ostream& report, std::ostream& trace);

/// Returns true when every user's relative error is within tolerance.
bool run_gradcheck(const ExperimentConfig& cfg, std::ostream& report);

void run_design_low(const ExperimentConfig& cfg, std::ostream& report);
void run_design_high(const ExperimentConfig& cfg, std::ostream& report);
/// CSV of the finite-n IA accounting followed by the limit.
void run_ia_loss(const ExperimentConfig& cfg, std::ostream& csv);

struct DetectSummary {
  std::size_t bits = 0;
  std::size_t map_errors = 0;
  std::size_t whitened_errors = 0;
};

/// CSV of MAP and whitened-baseline LLRs for random transmissions at the
/// first SNR point, using the precoders of the first configured method.
DetectSummary run_detect_demo(const ExperimentConfig& cfg, std::ostream& csv);

/// Fixed-point text with `decimals` places; negative zero prints as zero.
std::string format_fixed(double v, int decimals);

}  // namespace faic
