#include "telesim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

namespace telesim::cli {

namespace {

struct HelpShown : std::exception {
  const char* what() const noexcept override { return "help"; }
};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class CsvBuilder {
 public:
  void column(const std::string& name, const std::string& value) {
    header_.push_back(name);
    row_.push_back(value);
  }
  void column(const std::string& name, double value) {
    column(name, fmt_double(value));
  }
  void column(const std::string& name, std::uint64_t value) {
    column(name, fmt_u64(value));
  }
  void end_row() {
    rows_.push_back(row_);
    if (!first_header_.empty() && first_header_ != header_)
      throw std::logic_error("csv: inconsistent columns");
    first_header_ = header_;
    header_.clear();
    row_.clear();
  }
  std::string render() const {
    std::string out = join(first_header_);
    for (const auto& r : rows_) out += join(r);
    return out;
  }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += csv_quote(cells[i]);
    }
    line += '\n';
    return line;
  }
  std::vector<std::string> header_, row_, first_header_;
  std::vector<std::vector<std::string>> rows_;
};

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size() || !std::isfinite(v)) throw std::exception();
    return v;
  } catch (...) {
    throw ConfigError("value for '" + key + "' is not a number: " + value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::exception();
    return v;
  } catch (...) {
    throw ConfigError("value for '" + key + "' is not an integer: " + value);
  }
}

std::vector<double> parse_list(const std::string& key,
                               const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("empty list for '" + key + "'");
  return out;
}

std::complex<double> parse_complex(const std::string& key,
                                   const std::string& value) {
  const auto comma = value.find(',');
  if (comma == std::string::npos) return {parse_double(key, value), 0.0};
  return {parse_double(key, value.substr(0, comma)),
          parse_double(key, value.substr(comma + 1))};
}

EngineKind parse_engine(const std::string& value) {
  if (value == "qm") return EngineKind::StandardQM;
  if (value == "es") return EngineKind::ElementaryState;
  throw ConfigError("engine must be 'qm' or 'es', got '" + value + "'");
}

std::string engine_name(EngineKind k) {
  return k == EngineKind::StandardQM ? "qm" : "es";
}

using detection::DetectorId;

const std::map<std::string, DetectorId>& delay_keys() {
  static const std::map<std::string, DetectorId> keys = {
      {"delay_d0", DetectorId::D0},       {"delay_d1", DetectorId::D1},
      {"delay_d2", DetectorId::D2},       {"delay_dp0", DetectorId::DPlus0},
      {"delay_dm0", DetectorId::DMinus0}, {"delay_dp3", DetectorId::DPlus3},
      {"delay_dm3", DetectorId::DMinus3}};
  return keys;
}

void apply_file_entry(RunConfig& cfg, const std::string& key,
                      const std::string& value) {
  if (key == "engine") cfg.engine = parse_engine(value);
  else if (key == "seed") { cfg.seed = parse_u64(key, value); cfg.seed_explicit = true; }
  else if (key == "n") cfg.n = parse_u64(key, value);
  else if (key == "workers") cfg.workers = int(parse_u64(key, value));
  else if (key == "p_pair") cfg.physics.p_pair = parse_double(key, value);
  else if (key == "jitter") cfg.physics.jitter = parse_double(key, value);
  else if (key == "coherence_time") cfg.physics.coherence_time = parse_double(key, value);
  else if (key == "epsilon") cfg.physics.epsilon = parse_double(key, value);
  else if (key == "efficiency") cfg.physics.efficiency = parse_double(key, value);
  else if (key == "dark_rate") cfg.physics.dark_rate = parse_double(key, value);
  else if (key == "window") cfg.physics.window = parse_double(key, value);
  else if (key == "coder_angle") cfg.coder_angle = parse_double(key, value);
  else if (key == "mirror_delay") cfg.mirror_delay = parse_double(key, value);
  else if (key == "delays") cfg.delays_scan = parse_list(key, value);
  else if (key == "angles") cfg.angles = parse_list(key, value);
  else if (key == "theta0") cfg.theta0 = parse_double(key, value);
  else if (key == "theta3") cfg.theta3 = parse_double(key, value);
  else if (key == "alpha") cfg.alpha = parse_complex(key, value);
  else if (key == "beta") cfg.beta = parse_complex(key, value);
  else if (key == "out") cfg.out_path = value;
  else if (auto it = delay_keys().find(key); it != delay_keys().end())
    cfg.physics.delays[it->second] = parse_double(key, value);
  else
    throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key=value");
    apply_file_entry(cfg, strip(line.substr(0, eq)),
                     strip(line.substr(eq + 1)));
  }
}

void check_probability(const char* name, double v) {
  if (v < 0.0 || v > 1.0)
    throw ConfigError(std::string(name) + " must lie in [0, 1], got " +
                      fmt_double(v));
}

void validate(RunConfig& cfg) {
  check_probability("p_pair", cfg.physics.p_pair);
  check_probability("epsilon", cfg.physics.epsilon);
  check_probability("efficiency", cfg.physics.efficiency);
  if (cfg.physics.dark_rate < 0.0) throw ConfigError("dark_rate must be >= 0");
  if (cfg.physics.jitter < 0.0) throw ConfigError("jitter must be >= 0");
  if (cfg.physics.coherence_time < 0.0)
    throw ConfigError("coherence_time must be >= 0");
  if (cfg.physics.window <= 0.0) throw ConfigError("window must be > 0");
  if (cfg.n < 1) throw ConfigError("n must be >= 1");
  if (cfg.workers < 0) throw ConfigError("workers must be >= 0");
  for (double a : {cfg.coder_angle, cfg.mirror_delay, cfg.theta0, cfg.theta3})
    if (!std::isfinite(a)) throw ConfigError("angles and delays must be finite");

  if (cfg.experiment == "teleport") {
    const double norm = std::norm(cfg.alpha) + std::norm(cfg.beta);
    if (std::abs(norm - 1.0) > 1e-9)
      throw ConfigError("teleport input must satisfy |alpha|^2 + |beta|^2 = 1");
    if (cfg.engine == EngineKind::ElementaryState &&
        std::abs(std::imag(std::conj(cfg.alpha) * cfg.beta)) > 1e-9)
      throw ConfigError(
          "the es engine supports linear-polarization inputs only "
          "(relative phase 0 or 180 degrees)");
  }
  if (cfg.experiment == "dip" && cfg.delays_scan.empty()) {
    // default 11-point scan across the dip
    const double span = 5.0 * cfg.physics.coherence_time;
    for (int i = 0; i <= 10; ++i)
      cfg.delays_scan.push_back(-span + i * span / 5.0);
  }
  if (cfg.experiment == "rotation-scan" && cfg.angles.empty())
    cfg.angles = {0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0};
}

void echo_config(CsvBuilder& csv, const RunConfig& cfg) {
  // worker count deliberately not echoed: output is identical for any
  csv.column("engine", engine_name(cfg.engine));
  csv.column("seed", cfg.seed);
  csv.column("n", cfg.n);
  csv.column("p_pair", cfg.physics.p_pair);
  csv.column("jitter", cfg.physics.jitter);
  csv.column("coherence_time", cfg.physics.coherence_time);
  csv.column("epsilon", cfg.physics.epsilon);
  csv.column("efficiency", cfg.physics.efficiency);
  csv.column("dark_rate", cfg.physics.dark_rate);
  csv.column("window", cfg.physics.window);
  std::string delays;
  for (const auto& [id, d] : cfg.physics.delays) {
    if (!delays.empty()) delays += ';';
    delays += std::string(detection::detector_name(id)) + ":" + fmt_double(d);
  }
  csv.column("circuit_delays", delays);
}

double binomial_se(std::uint64_t count, std::uint64_t total) {
  if (total == 0) return 0.0;
  const double p = double(count) / double(total);
  return std::sqrt(p * (1.0 - p) / double(total));
}

void fig3_columns(CsvBuilder& csv, const experiments::Fig3Stats& s,
                  const RunConfig& cfg, const char* experiment) {
  csv.column("experiment", std::string(experiment));
  csv.column("coder_angle", s.coder_angle);
  csv.column("mirror_delay", s.mirror_delay);
  csv.column("n_pulses", s.n_pulses);
  csv.column("n_candidate", s.n_candidate);
  csv.column("n_triples", s.n_triples);
  csv.column("n_minus", s.n_minus);
  csv.column("n_plus", s.n_plus);
  const double gates = double(s.n_triples);
  csv.column("rate_minus", gates > 0 ? double(s.n_minus) / gates : 0.0);
  csv.column("rate_plus", gates > 0 ? double(s.n_plus) / gates : 0.0);
  csv.column("se_rate_minus", binomial_se(s.n_minus, s.n_triples));
  csv.column("se_rate_plus", binomial_se(s.n_plus, s.n_triples));
  echo_config(csv, cfg);
  csv.end_row();
}

void swap_columns(CsvBuilder& csv, const experiments::SwapStats& s,
                  const RunConfig& cfg, const char* experiment,
                  double scan_angle, bool with_scan_angle) {
  csv.column("experiment", std::string(experiment));
  if (with_scan_angle) csv.column("common_angle", scan_angle);
  csv.column("theta0", s.theta0);
  csv.column("theta3", s.theta3);
  csv.column("n_pulses", s.n_pulses);
  csv.column("n_candidate", s.n_candidate);
  csv.column("n_gated", s.n_gated);
  const char* names[2][2] = {{"pp", "pm"}, {"mp", "mm"}};
  const double total = double(s.cell_total());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      csv.column(std::string("count_") + names[i][j], s.cells[i][j]);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      csv.column(std::string("rate_") + names[i][j],
                 total > 0 ? double(s.cells[i][j]) / total : 0.0);
  if (with_scan_angle) {
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double r = total > 0 ? double(s.cells[i][j]) / total : 0.0;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    if (total == 0) lo = 0.0;
    csv.column("min_cell_rate", lo);
    csv.column("max_cell_rate", hi);
    csv.column("contrast", hi - lo);
  }
  echo_config(csv, cfg);
  csv.end_row();
}

}  // namespace

RunConfig parse_config(int argc, const char* const* argv) {
  CLI::App app{"linear-optics teleportation and entanglement-swapping "
               "simulator with interchangeable physics engines"};
  app.require_subcommand(1);

  struct Flags {
    std::string config, engine, out, alpha, beta, delays, angles;
    std::uint64_t seed = 0, n = 0;
    int workers = 1;
    double p_pair = 0, jitter = 0, coherence_time = 0, epsilon = 0,
           efficiency = 0, dark_rate = 0, window = 0, coder_angle = 0,
           mirror_delay = 0, theta0 = 0, theta3 = 0;
  } f;

  const std::vector<std::string> experiments_list = {
      "teleport", "fig3", "dip", "rho", "swap", "rotation-scan"};
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : experiments_list) {
    CLI::App* sub = app.add_subcommand(name, name + " experiment");
    sub->add_option("--config", f.config, "key=value config file");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--n", f.n, "trial / pulse count");
    sub->add_option("--engine", f.engine, "qm | es");
    sub->add_option("--epsilon", f.epsilon, "P(S^2 = 0) for unprearranged pairs");
    sub->add_option("--out", f.out, "output path (default stdout)");
    sub->add_option("--workers", f.workers, "worker threads (0 = serial reference)");
    sub->add_option("--p-pair", f.p_pair, "pair emission probability");
    sub->add_option("--jitter", f.jitter, "emission time spread");
    sub->add_option("--coherence-time", f.coherence_time, "overlap scale");
    sub->add_option("--efficiency", f.efficiency, "detector efficiency");
    sub->add_option("--dark-rate", f.dark_rate, "dark counts per slot");
    sub->add_option("--window", f.window, "coincidence window");
    if (name == "fig3" || name == "dip" || name == "rho") {
      sub->add_option("--coder-angle", f.coder_angle, "coder setting, degrees");
      sub->add_option("--mirror-delay", f.mirror_delay, "scan offset");
    }
    if (name == "dip") sub->add_option("--delays", f.delays, "comma list of scan offsets");
    if (name == "rotation-scan") sub->add_option("--angles", f.angles, "comma list of common angles");
    if (name == "swap") {
      sub->add_option("--theta0", f.theta0, "analyzer 0 angle");
      sub->add_option("--theta3", f.theta3, "analyzer 3 angle");
    }
    if (name == "teleport") {
      sub->add_option("--alpha", f.alpha, "input amplitude of |+>, re[,im]");
      sub->add_option("--beta", f.beta, "input amplitude of |->, re[,im]");
    }
    subs[name] = sub;
  }

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    throw HelpShown{};
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e);
    throw HelpShown{};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  RunConfig cfg;
  CLI::App* chosen = nullptr;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) {
      cfg.experiment = name;
      chosen = sub;
    }
  if (!chosen) throw ConfigError("no experiment selected");

  if (chosen->count("--config")) apply_config_file(cfg, f.config);

  auto given = [&](const char* flag) { return chosen->count(flag) > 0; };
  if (given("--seed")) { cfg.seed = f.seed; cfg.seed_explicit = true; }
  if (given("--n")) cfg.n = f.n;
  if (given("--engine")) cfg.engine = parse_engine(f.engine);
  if (given("--epsilon")) cfg.physics.epsilon = f.epsilon;
  if (given("--out")) cfg.out_path = f.out;
  if (given("--workers")) cfg.workers = f.workers;
  if (given("--p-pair")) cfg.physics.p_pair = f.p_pair;
  if (given("--jitter")) cfg.physics.jitter = f.jitter;
  if (given("--coherence-time")) cfg.physics.coherence_time = f.coherence_time;
  if (given("--efficiency")) cfg.physics.efficiency = f.efficiency;
  if (given("--dark-rate")) cfg.physics.dark_rate = f.dark_rate;
  if (given("--window")) cfg.physics.window = f.window;
  if (cfg.experiment == "fig3" || cfg.experiment == "dip" ||
      cfg.experiment == "rho") {
    if (given("--coder-angle")) cfg.coder_angle = f.coder_angle;
    if (given("--mirror-delay")) cfg.mirror_delay = f.mirror_delay;
  }
  if (cfg.experiment == "dip" && given("--delays"))
    cfg.delays_scan = parse_list("--delays", f.delays);
  if (cfg.experiment == "rotation-scan" && given("--angles"))
    cfg.angles = parse_list("--angles", f.angles);
  if (cfg.experiment == "swap") {
    if (given("--theta0")) cfg.theta0 = f.theta0;
    if (given("--theta3")) cfg.theta3 = f.theta3;
  }
  if (cfg.experiment == "teleport") {
    if (given("--alpha")) cfg.alpha = parse_complex("--alpha", f.alpha);
    if (given("--beta")) cfg.beta = parse_complex("--beta", f.beta);
  }

  validate(cfg);
  return cfg;
}

std::string run(const RunConfig& cfg) {
  CsvBuilder csv;
  if (cfg.experiment == "teleport") {
    const auto stats = experiments::run_teleport_ideal(
        cfg.alpha, cfg.beta, cfg.n, cfg.engine, cfg.seed, cfg.workers);
    csv.column("experiment", std::string("teleport"));
    csv.column("alpha_re", cfg.alpha.real());
    csv.column("alpha_im", cfg.alpha.imag());
    csv.column("beta_re", cfg.beta.real());
    csv.column("beta_im", cfg.beta.imag());
    csv.column("n_trials", stats.n_trials);
    csv.column("fidelity_mean", stats.post_correction_fidelity());
    csv.column("fidelity_min", stats.fidelity_min);
    const char* names[4] = {"psi_minus", "psi_plus", "phi_minus", "phi_plus"};
    for (int k = 0; k < 4; ++k)
      csv.column(std::string("count_") + names[k], stats.branch_counts[k]);
    for (int k = 0; k < 4; ++k)
      csv.column(std::string("frac_") + names[k],
                 stats.n_trials
                     ? double(stats.branch_counts[k]) / double(stats.n_trials)
                     : 0.0);
    echo_config(csv, cfg);
    csv.end_row();
  } else if (cfg.experiment == "fig3") {
    const auto stats =
        experiments::run_fig3(cfg.coder_angle, cfg.mirror_delay, cfg.engine,
                              cfg.physics, cfg.n, cfg.seed, cfg.workers);
    fig3_columns(csv, stats, cfg, "fig3");
  } else if (cfg.experiment == "dip") {
    const auto points =
        experiments::scan_dip(cfg.coder_angle, cfg.delays_scan, cfg.engine,
                              cfg.physics, cfg.n, cfg.seed, cfg.workers);
    for (const auto& p : points) fig3_columns(csv, p.stats, cfg, "dip");
  } else if (cfg.experiment == "rho") {
    const auto s45 =
        experiments::run_fig3(45.0, cfg.mirror_delay, cfg.engine, cfg.physics,
                              cfg.n, mix_seed(cfg.seed, 45), cfg.workers);
    const auto s90 =
        experiments::run_fig3(90.0, cfg.mirror_delay, cfg.engine, cfg.physics,
                              cfg.n, mix_seed(cfg.seed, 90), cfg.workers);
    const auto rho = experiments::compute_rho(s45, s90);
    csv.column("experiment", std::string("rho"));
    csv.column("rho", rho.rho);
    csv.column("rho_std_error", rho.std_error);
    csv.column("rho_undefined", std::string(rho.undefined ? "1" : "0"));
    csv.column("mirror_delay", cfg.mirror_delay);
    csv.column("n45_minus", s45.n_minus);
    csv.column("n45_plus", s45.n_plus);
    csv.column("n45_triples", s45.n_triples);
    csv.column("n90_minus", s90.n_minus);
    csv.column("n90_plus", s90.n_plus);
    csv.column("n90_triples", s90.n_triples);
    echo_config(csv, cfg);
    csv.end_row();
  } else if (cfg.experiment == "swap") {
    const auto stats =
        experiments::run_swap(cfg.theta0, cfg.theta3, cfg.engine, cfg.physics,
                              cfg.n, cfg.seed, cfg.workers);
    swap_columns(csv, stats, cfg, "swap", 0.0, false);
  } else if (cfg.experiment == "rotation-scan") {
    const auto points =
        experiments::rotation_scan(cfg.angles, cfg.engine, cfg.physics, cfg.n,
                                   cfg.seed, cfg.workers);
    for (const auto& p : points)
      swap_columns(csv, p.stats, cfg, "rotation-scan", p.angle, true);
  } else {
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  }
  return csv.render();
}

int main_entry(int argc, const char* const* argv) {
  RunConfig cfg;
  try {
    cfg = parse_config(argc, argv);
  } catch (const HelpShown&) {
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  if (!cfg.seed_explicit)
    std::fprintf(stderr,
                 "warning: using default seed 0; pass --seed for "
                 "reproducible scripted runs\n");
  try {
    const std::string csv = run(cfg);
    if (cfg.out_path.empty()) {
      std::fwrite(csv.data(), 1, csv.size(), stdout);
    } else {
      std::ofstream out(cfg.out_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open " + cfg.out_path);
      out.write(csv.data(), std::streamsize(csv.size()));
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}

}  // namespace telesim::cli
