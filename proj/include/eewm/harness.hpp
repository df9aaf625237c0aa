#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "eewm/core.hpp"

namespace eewm {

// --- host models ----------------------------------------------------------

struct Ar1Host {
  double variance = 1.0;
  double rho = 0.0;
};

/// Envelope of a modulated host: linear ramp between two gains, or an
/// explicit per-sample list (its length must equal N).
struct RampEnvelope {
  double first = 1.0;
  double last = 1.0;
};
using EnvelopeSpec = std::variant<RampEnvelope, std::vector<double>>;

struct ModulatedAr1Host {
  double variance = 1.0;
  double rho = 0.0;
  EnvelopeSpec envelope = RampEnvelope{};
};

struct FileHost {
  std::filesystem::path path;
};

using HostModel = std::variant<Ar1Host, ModulatedAr1Host, FileHost>;

std::vector<double> envelope_values(const EnvelopeSpec& spec, int n);
CovarianceMatrix build_host_covariance(const HostModel& host, int n);

// --- watermark strategies -------------------------------------------------

struct WhiteStrategy {};
struct MatchedStrategy {};
struct MismatchedAr1Strategy {
  double rho = 0.0;
};
using Strategy = std::variant<WhiteStrategy, MatchedStrategy, MismatchedAr1Strategy>;

std::string strategy_label(const Strategy& s);
Strategy parse_strategy(const std::string& text);

/// White -> p_w I, matched -> (p_w / P_x) C_x, mismatched AR(1) -> Toeplitz
/// AR(1) with the given rho. Always rescaled to trace N * p_w.
CovarianceMatrix build_strategy_covariance(const Strategy& strategy, const CovarianceMatrix& host,
                                           double p_w);

// --- experiments ----------------------------------------------------------

/// A correlation target: either a fixed r_0 or the Wiener removal point
/// (gamma = 1), which depends on the watermark covariance of the row.
struct RemovalTarget {};
using CorrelationTarget = std::variant<double, RemovalTarget>;

struct ExperimentConfig {
  HostModel host = Ar1Host{};
  int n = 0;  // 0 only allowed for file hosts, where N comes from the file
  double p_w = 0.0;
  std::vector<Strategy> strategies;
  std::vector<CorrelationTarget> r_targets;
  int monte_carlo_m = 0;
  std::uint64_t seed = 0;
};

/// Throws ConfigError when the invariants do not hold.
void validate(const ExperimentConfig& config);

/// Key-value text format, one `key = value` per line, `#` starts a comment.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct MonteCarloColumns {
  double e_mc = 0.0;
  double d_mc = 0.0;
  double r_mc = 0.0;
  double se_e = 0.0;
  double se_d = 0.0;
  double se_r = 0.0;
};

struct ExperimentRow {
  std::string strategy;
  double r0 = 0.0;
  double gamma = 0.0;
  double residual_energy = 0.0;  // E_gamma; the Wiener-removal E when gamma = 1
  double distortion = 0.0;
  double correlation = 0.0;      // analytic r, equal to r0
  std::optional<MonteCarloColumns> mc;
};

/// Rows ordered by (strategy order, r_target order) from the config.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

inline constexpr const char* kResultsHeader = "strategy,r0,gamma,E,D,E_mc,D_mc,r_mc,se_E,se_D,se_r";

/// Header plus one line per row. Throws InvalidParam on an empty row list.
void emit_csv(const std::vector<ExperimentRow>& rows, std::ostream& out);
/// Writes nothing (and creates no file) when `rows` is empty.
void emit_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path);

/// Reads back what emit_csv() writes. The analytic correlation column is not
/// persisted and is filled from r0.
std::vector<ExperimentRow> parse_results_csv(std::istream& in);

}  // namespace eewm
