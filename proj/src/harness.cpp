#include "eewm/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "eewm/attack.hpp"
#include "eewm/design.hpp"
#include "eewm/matrix_io.hpp"

namespace eewm {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& key,
                    ErrorKind kind = ErrorKind::ConfigError) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(kind, "'" + key + "': cannot parse number '" + text + "'");
  }
}

long long parse_integer(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, "key '" + key + "': cannot parse integer '" + text + "'");
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CovarianceMatrix rescale_to_power(const Matrix& c, double p_w) {
  const double tr = c.trace();
  if (!(tr > 0.0)) throw Error(ErrorKind::InvalidParam, "strategy covariance has zero trace");
  return make_covariance(c * (p_w * static_cast<double>(c.rows()) / tr));
}

}  // namespace

// --- hosts -------------------------------------------------------------------

std::vector<double> envelope_values(const EnvelopeSpec& spec, int n) {
  if (const auto* ramp = std::get_if<RampEnvelope>(&spec)) {
    std::vector<double> e(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
      e[static_cast<std::size_t>(i)] = ramp->first + (ramp->last - ramp->first) * t;
    }
    return e;
  }
  const auto& list = std::get<std::vector<double>>(spec);
  if (static_cast<int>(list.size()) != n) {
    throw Error(ErrorKind::ConfigError, "envelope list has " + std::to_string(list.size()) +
                                            " entries, expected " + std::to_string(n));
  }
  return list;
}

CovarianceMatrix build_host_covariance(const HostModel& host, int n) {
  if (const auto* ar = std::get_if<Ar1Host>(&host)) {
    return toeplitz_from_autocorr(ar1_autocorr(ar->variance, ar->rho, n));
  }
  if (const auto* mod = std::get_if<ModulatedAr1Host>(&host)) {
    const auto base = toeplitz_from_autocorr(ar1_autocorr(mod->variance, mod->rho, n));
    return modulate(base, envelope_values(mod->envelope, n));
  }
  const auto& file = std::get<FileHost>(host);
  CovarianceMatrix c = [&] {
    try {
      return load_covariance_csv(file.path);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::IoError) throw;
      throw Error(ErrorKind::ConfigError, std::string("host file: ") + e.what());
    }
  }();
  if (n != 0 && c.dim() != n) {
    throw Error(ErrorKind::ConfigError, "host file has dimension " + std::to_string(c.dim()) +
                                            ", config says " + std::to_string(n));
  }
  return c;
}

// --- strategies --------------------------------------------------------------

std::string strategy_label(const Strategy& s) {
  if (std::holds_alternative<WhiteStrategy>(s)) return "white";
  if (std::holds_alternative<MatchedStrategy>(s)) return "matched";
  char buf[64];
  std::snprintf(buf, sizeof buf, "mismatched_ar1(%g)", std::get<MismatchedAr1Strategy>(s).rho);
  return buf;
}

Strategy parse_strategy(const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "white") return WhiteStrategy{};
  if (text == "matched") return MatchedStrategy{};
  const std::string prefix = "mismatched_ar1";
  if (text.rfind(prefix, 0) == 0) {
    std::string arg = text.substr(prefix.size());
    if (arg.size() >= 2 && arg.front() == '(' && arg.back() == ')') {
      arg = arg.substr(1, arg.size() - 2);
    } else if (!arg.empty() && arg.front() == ':') {
      arg = arg.substr(1);
    } else {
      throw Error(ErrorKind::ConfigError, "mismatched_ar1 needs a rho, e.g. mismatched_ar1(0.5)");
    }
    const double rho = parse_double(trim(arg), "strategies");
    if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::ConfigError, "mismatched_ar1 needs |rho| < 1");
    return MismatchedAr1Strategy{rho};
  }
  throw Error(ErrorKind::ConfigError, "unknown strategy '" + text + "'");
}

CovarianceMatrix build_strategy_covariance(const Strategy& strategy, const CovarianceMatrix& host,
                                           double p_w) {
  if (!(p_w > 0.0) || !std::isfinite(p_w)) {
    throw Error(ErrorKind::InvalidParam, "watermark power must be positive");
  }
  const auto n = host.dim();
  if (std::holds_alternative<WhiteStrategy>(strategy)) {
    return rescale_to_power(Matrix::Identity(n, n), p_w);
  }
  if (std::holds_alternative<MatchedStrategy>(strategy)) {
    return rescale_to_power(host.matrix(), p_w);
  }
  const double rho = std::get<MismatchedAr1Strategy>(strategy).rho;
  return rescale_to_power(toeplitz_from_autocorr(ar1_autocorr(1.0, rho, n)).matrix(), p_w);
}

// --- config ------------------------------------------------------------------

void validate(const ExperimentConfig& config) {
  const bool from_file = std::holds_alternative<FileHost>(config.host);
  if (config.n < 0 || (config.n == 0 && !from_file)) {
    throw Error(ErrorKind::ConfigError, "N must be at least 1");
  }
  if (!(config.p_w > 0.0)) throw Error(ErrorKind::ConfigError, "pw must be positive");
  if (config.strategies.empty()) throw Error(ErrorKind::ConfigError, "at least one strategy required");
  if (config.r_targets.empty()) throw Error(ErrorKind::ConfigError, "at least one r_target required");
  if (config.monte_carlo_m < 0 || config.monte_carlo_m == 1) {
    throw Error(ErrorKind::ConfigError, "monte_carlo_m must be 0 or at least 2");
  }
  if (const auto* mod = std::get_if<ModulatedAr1Host>(&config.host)) {
    if (const auto* list = std::get_if<std::vector<double>>(&mod->envelope)) {
      for (double v : *list) {
        if (!(v > 0.0)) throw Error(ErrorKind::ConfigError, "envelope entries must be positive");
      }
    } else {
      const auto& ramp = std::get<RampEnvelope>(mod->envelope);
      if (!(ramp.first > 0.0) || !(ramp.last > 0.0)) {
        throw Error(ErrorKind::ConfigError, "envelope entries must be positive");
      }
    }
  }
}

ExperimentConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second) {
      throw Error(ErrorKind::ConfigError, "duplicate key '" + key + "'");
    }
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto need = [&](const std::string& key) {
    auto v = take(key);
    if (!v) throw Error(ErrorKind::ConfigError, "missing key '" + key + "'");
    return *v;
  };

  ExperimentConfig cfg;
  const std::string host = take("host").value_or("ar1");
  if (host == "ar1") {
    cfg.host = Ar1Host{parse_double(need("sigma2"), "sigma2"), parse_double(need("rho"), "rho")};
  } else if (host == "ar1_modulated") {
    ModulatedAr1Host mod{parse_double(need("sigma2"), "sigma2"), parse_double(need("rho"), "rho"),
                         RampEnvelope{}};
    const std::string env = need("envelope");
    const auto colon = env.find(':');
    const std::string kind = trim(env.substr(0, colon));
    const auto args = colon == std::string::npos ? std::vector<std::string>{}
                                                 : split(env.substr(colon + 1), ',');
    std::vector<double> values;
    for (const auto& a : args) values.push_back(parse_double(a, "envelope"));
    if (kind == "ramp" && values.size() == 2) {
      mod.envelope = RampEnvelope{values[0], values[1]};
    } else if (kind == "list" && !values.empty()) {
      mod.envelope = values;
    } else {
      throw Error(ErrorKind::ConfigError, "envelope must be 'ramp:a,b' or 'list:v1,...'");
    }
    cfg.host = mod;
  } else if (host == "file") {
    cfg.host = FileHost{need("host_file")};
  } else {
    throw Error(ErrorKind::ConfigError, "unknown host model '" + host + "'");
  }

  if (auto n = take("N")) cfg.n = static_cast<int>(parse_integer(*n, "N"));
  cfg.p_w = parse_double(need("pw"), "pw");
  for (const auto& s : split(need("strategies"), ',')) cfg.strategies.push_back(parse_strategy(s));
  for (const auto& r : split(take("r_targets").value_or("removal"), ',')) {
    if (r == "removal") {
      cfg.r_targets.emplace_back(RemovalTarget{});
    } else {
      cfg.r_targets.emplace_back(parse_double(r, "r_targets"));
    }
  }
  if (auto m = take("monte_carlo_m")) cfg.monte_carlo_m = static_cast<int>(parse_integer(*m, "monte_carlo_m"));
  if (auto seed = take("seed")) {
    const long long s = parse_integer(*seed, "seed");
    if (s < 0) throw Error(ErrorKind::ConfigError, "seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (!kv.empty()) throw Error(ErrorKind::ConfigError, "unknown key '" + kv.begin()->first + "'");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + path.string());
  return parse_config(in);
}

// --- running -----------------------------------------------------------------

namespace {

struct Moments {
  double mean = 0.0;
  double stderr_ = 0.0;
};

Moments moments(const Vector& v) {
  const double m = v.mean();
  const double var = (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  validate(config);
  const CovarianceMatrix host = build_host_covariance(config.host, config.n);
  const int n = host.dim();
  const int m = config.monte_carlo_m;

  Matrix x_samples;
  if (m > 0) x_samples = sample_ensemble(host, m, substream_seed(config.seed, 0)).data;

  std::vector<ExperimentRow> rows;
  for (std::size_t si = 0; si < config.strategies.size(); ++si) {
    const auto& strategy = config.strategies[si];
    const CovarianceMatrix watermark = build_strategy_covariance(strategy, host, config.p_w);
    const FilterMatrix h = watermark_wiener(host, watermark);
    const double leverage = h.matrix().cwiseProduct(watermark.matrix().transpose()).sum();

    Matrix w_samples;
    Matrix y_samples;
    if (m > 0) {
      w_samples = sample_ensemble(watermark, m, substream_seed(config.seed, 1 + si)).data;
      y_samples = x_samples + w_samples;
    }

    for (const auto& target : config.r_targets) {
      const bool removal = std::holds_alternative<RemovalTarget>(target);
      const double r0 = removal ? (watermark.trace() - leverage) / n : std::get<double>(target);
      const AttackSolution sol = solve_attack(host, watermark, r0);

      ExperimentRow row;
      row.strategy = strategy_label(strategy);
      row.r0 = r0;
      row.gamma = sol.gamma;
      row.residual_energy =
          removal ? residual_energy(host, watermark) : residual_energy_gamma(host, watermark, sol.gamma);
      row.distortion = sol.distortion;
      row.correlation = sol.correlation_achieved;

      if (m > 0) {
        const Matrix attacked = y_samples * sol.g.matrix().transpose();
        const Matrix residual = w_samples - sol.gamma * (y_samples * h.matrix().transpose());
        const Vector e = residual.rowwise().squaredNorm() / n;
        const Vector d = (attacked - x_samples).rowwise().squaredNorm() / n;
        const Vector r = attacked.cwiseProduct(w_samples).rowwise().sum() / n;
        const auto me = moments(e), md = moments(d), mr = moments(r);
        row.mc = MonteCarloColumns{me.mean, md.mean, mr.mean, me.stderr_, md.stderr_, mr.stderr_};
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// --- CSV ---------------------------------------------------------------------

void emit_csv(const std::vector<ExperimentRow>& rows, std::ostream& out) {
  if (rows.empty()) throw Error(ErrorKind::InvalidParam, "no rows to emit");
  out << kResultsHeader << '\n';
  for (const auto& row : rows) {
    out << row.strategy << ',' << format_number(row.r0) << ',' << format_number(row.gamma) << ','
        << format_number(row.residual_energy) << ',' << format_number(row.distortion);
    if (row.mc) {
      const auto& mc = *row.mc;
      for (double v : {mc.e_mc, mc.d_mc, mc.r_mc, mc.se_e, mc.se_d, mc.se_r}) out << ',' << format_number(v);
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  }
}

void emit_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw Error(ErrorKind::InvalidParam, "no rows to emit");
  std::ostringstream buffer;
  emit_csv(rows, buffer);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << buffer.str();
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::vector<ExperimentRow> parse_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kResultsHeader) {
    throw Error(ErrorKind::IoError, "missing results header");
  }
  std::vector<ExperimentRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) throw Error(ErrorKind::IoError, "expected 11 fields: " + line);
    auto num = [](const std::string& s) { return parse_double(s, "results", ErrorKind::IoError); };
    ExperimentRow row;
    row.strategy = f[0];
    row.r0 = num(f[1]);
    row.gamma = num(f[2]);
    row.residual_energy = num(f[3]);
    row.distortion = num(f[4]);
    row.correlation = row.r0;
    if (!f[5].empty()) {
      row.mc = MonteCarloColumns{num(f[5]), num(f[6]), num(f[7]), num(f[8]), num(f[9]), num(f[10])};
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace eewm
