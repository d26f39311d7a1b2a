#include "slitsim/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace slitsim {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

struct KeyInfo {
  const char* name;
  const char* help;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

const std::vector<KeyInfo>& keys() {
  static const std::vector<KeyInfo> table = {
      {"charge_product", "q*sigma, product of particle charge and screen charge density",
       [](ExperimentConfig& c, const std::string& v) {
         c.field.charge_product = parse_double("charge_product", v);
       }},
      {"slit_half_height", "R, half-height of the slit (field and geometry)",
       [](ExperimentConfig& c, const std::string& v) {
         c.field.slit_half_height = c.geometry.slit_half_height = parse_double("slit_half_height", v);
       }},
      {"emitter_distance", "D, emitter sits at x = -D",
       [](ExperimentConfig& c, const std::string& v) {
         c.geometry.emitter_distance = parse_double("emitter_distance", v);
       }},
      {"screen_gap", "d, detector plane sits at x = +d",
       [](ExperimentConfig& c, const std::string& v) {
         c.geometry.screen_gap = parse_double("screen_gap", v);
       }},
      {"particle_radius", "r, the slit passes |y| < R - r",
       [](ExperimentConfig& c, const std::string& v) {
         c.geometry.particle_radius = parse_double("particle_radius", v);
       }},
      {"y_bound", "trajectories with |y| beyond this escape",
       [](ExperimentConfig& c, const std::string& v) {
         c.geometry.y_bound = parse_double("y_bound", v);
       }},
      {"max_steps", "step budget per trajectory",
       [](ExperimentConfig& c, const std::string& v) {
         c.geometry.max_steps = parse_u64("max_steps", v);
       }},
      {"tau", "time-discreteness parameter",
       [](ExperimentConfig& c, const std::string& v) { c.step.tau = parse_double("tau", v); }},
      {"mass", "particle mass",
       [](ExperimentConfig& c, const std::string& v) { c.step.mass = parse_double("mass", v); }},
      {"v0", "launch speed",
       [](ExperimentConfig& c, const std::string& v) { c.emission.v0 = parse_double("v0", v); }},
      {"alpha_min_deg", "lower launch angle, degrees",
       [](ExperimentConfig& c, const std::string& v) {
         c.emission.alpha_min = parse_double("alpha_min_deg", v) * kDegree;
       }},
      {"alpha_max_deg", "upper launch angle, degrees",
       [](ExperimentConfig& c, const std::string& v) {
         c.emission.alpha_max = parse_double("alpha_max_deg", v) * kDegree;
       }},
      {"emission", "random (uniform angles) or sweep (evenly spaced, ends included)",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "random") {
           c.emission.mode = EmissionSpec::Mode::Random;
         } else if (v == "sweep") {
           c.emission.mode = EmissionSpec::Mode::Sweep;
         } else {
           throw ConfigError("emission: expected random or sweep, got '" + v + "'");
         }
       }},
      {"n", "number of trajectories",
       [](ExperimentConfig& c, const std::string& v) { c.emission.n = parse_u64("n", v); }},
      {"seed", "64-bit seed for random emission",
       [](ExperimentConfig& c, const std::string& v) { c.emission.seed = parse_u64("seed", v); }},
      {"bin_width", "detector cell size (default 2 * particle_radius)",
       [](ExperimentConfig& c, const std::string& v) {
         c.histogram.bin_width = parse_double("bin_width", v);
       }},
      {"y_min", "lower edge of the binned detector range",
       [](ExperimentConfig& c, const std::string& v) { c.histogram.y_min = parse_double("y_min", v); }},
      {"y_max", "upper edge of the binned detector range",
       [](ExperimentConfig& c, const std::string& v) { c.histogram.y_max = parse_double("y_max", v); }},
      {"tau_list", "comma-separated, non-increasing tau values for sweep-tau",
       [](ExperimentConfig& c, const std::string& v) { c.tau_list = parse_list("tau_list", v); }},
      {"output_dir", "directory receiving output files",
       [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; }},
      {"workers", "worker threads for ensembles",
       [](ExperimentConfig& c, const std::string& v) {
         c.workers = static_cast<unsigned>(parse_u64("workers", v));
       }},
      {"window", "smoothing window (odd) for extrema and oscillation index",
       [](ExperimentConfig& c, const std::string& v) {
         c.window = static_cast<int>(parse_u64("window", v));
       }},
      {"k_sigma", "extrema must clear k_sigma Poisson standard deviations",
       [](ExperimentConfig& c, const std::string& v) { c.k_sigma = parse_double("k_sigma", v); }},
  };
  return table;
}

std::string distribution_csv(const Histogram& h) {
  std::string out = "bin_center,count,frequency\n";
  const double n = static_cast<double>(h.n_detected);
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const double freq = h.n_detected > 0 ? static_cast<double>(h.counts[k]) / n : 0.0;
    out += format_number(h.spec.center(k)) + "," + std::to_string(h.counts[k]) + "," +
           format_number(freq) + "\n";
  }
  return out;
}

std::string tallies(const Histogram& h, const std::string& prefix = "") {
  std::ostringstream os;
  os << prefix << "n_emitted = " << h.n_emitted << "\n"
     << prefix << "n_detected = " << h.n_detected << "\n"
     << prefix << "n_blocked = " << h.n_blocked << "\n"
     << prefix << "n_escaped = " << h.n_escaped << "\n"
     << prefix << "n_steplimit = " << h.n_steplimit << "\n"
     << prefix << "n_underflow = " << h.n_underflow << "\n"
     << prefix << "n_overflow = " << h.n_overflow << "\n";
  return os.str();
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ExperimentConfig::validate() const {
  field.validate();
  geometry.validate();
  check_consistent(geometry, field);
  step.validate();
  emission.validate();
  histogram.validate();
  if (tau_list.empty()) throw ConfigError("tau_list must not be empty");
  for (std::size_t i = 0; i < tau_list.size(); ++i) {
    if (!(tau_list[i] > 0)) throw ConfigError("tau_list entries must be positive");
    if (i > 0 && tau_list[i] > tau_list[i - 1]) throw ConfigError("tau_list must be non-increasing");
  }
  if (workers == 0) throw ConfigError("workers must be at least 1");
  if (window < 1 || window % 2 == 0) throw ConfigError("window must be odd and >= 1");
  if (!(k_sigma > 0)) throw ConfigError("k_sigma must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg = default_config();
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const KeyInfo& k) { return key == k.name; });
    if (it == table.end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'");
    it->set(cfg, value);
  }
  if (!seen.count("bin_width")) cfg.histogram.bin_width = 2 * cfg.geometry.particle_radius;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse_config(in);
}

std::string config_keys_help() {
  std::string out = "Config file keys (key = value, '#' comments):\n";
  for (const auto& k : keys()) out += "  " + std::string(k.name) + ": " + k.help + "\n";
  return out;
}

std::string describe(const ExperimentConfig& c) {
  std::ostringstream os;
  auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << "\n"; };
  kv("charge_product", format_number(c.field.charge_product));
  kv("slit_half_height", format_number(c.field.slit_half_height));
  kv("emitter_distance", format_number(c.geometry.emitter_distance));
  kv("screen_gap", format_number(c.geometry.screen_gap));
  kv("particle_radius", format_number(c.geometry.particle_radius));
  kv("y_bound", format_number(c.geometry.y_bound));
  kv("max_steps", std::to_string(c.geometry.max_steps));
  kv("tau", format_number(c.step.tau));
  kv("mass", format_number(c.step.mass));
  kv("v0", format_number(c.emission.v0));
  kv("alpha_min_deg", format_number(c.emission.alpha_min / kDegree));
  kv("alpha_max_deg", format_number(c.emission.alpha_max / kDegree));
  kv("emission", c.emission.mode == EmissionSpec::Mode::Random ? "random" : "sweep");
  kv("n", std::to_string(c.emission.n));
  kv("seed", std::to_string(c.emission.seed));
  kv("bin_width", format_number(c.histogram.bin_width));
  kv("y_min", format_number(c.histogram.y_min));
  kv("y_max", format_number(c.histogram.y_max));
  std::string taus;
  for (std::size_t i = 0; i < c.tau_list.size(); ++i) {
    taus += (i ? "," : "") + format_number(c.tau_list[i]);
  }
  kv("tau_list", taus);
  kv("output_dir", c.output_dir.string());
  kv("workers", std::to_string(c.workers));
  kv("window", std::to_string(c.window));
  kv("k_sigma", format_number(c.k_sigma));
  return os.str();
}

SimulateResult cmd_simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_dir(cfg.output_dir);
  const auto start = std::chrono::steady_clock::now();
  SimulateResult res;
  res.histogram =
      run_ensemble(cfg.emission, cfg.geometry, cfg.field, cfg.step, cfg.histogram, cfg.workers);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_file(cfg.output_dir / "distribution.csv", distribution_csv(res.histogram));
  std::ostringstream report;
  report << "# slitsim simulate\n"
         << "wall_seconds = " << res.wall_seconds << "\n"
         << tallies(res.histogram) << "# parameters\n"
         << describe(cfg);
  write_file(cfg.output_dir / "report.txt", report.str());
  return res;
}

SweepResult cmd_sweep_tau(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_dir(cfg.output_dir);
  const auto start = std::chrono::steady_clock::now();
  SweepResult res;
  std::vector<std::vector<double>> freqs;
  std::ostringstream report;
  report << "# slitsim sweep-tau\n";
  for (std::size_t i = 0; i < cfg.tau_list.size(); ++i) {
    ExperimentConfig run = cfg;
    run.step.tau = cfg.tau_list[i];
    SweepRow row;
    row.tau = run.step.tau;
    row.histogram =
        run_ensemble(run.emission, run.geometry, run.field, run.step, run.histogram, run.workers);
    if (row.histogram.n_detected > 0) {
      freqs.push_back(normalize(row.histogram));
      row.n_maxima = find_extrema(freqs.back(), run.histogram, row.histogram.n_detected,
                                  cfg.window, cfg.k_sigma)
                         .maxima.size();
      row.oscillation_index = oscillation_index(freqs.back(), cfg.window);
    } else {
      freqs.emplace_back();
      row.oscillation_index = std::nan("");
    }
    write_file(cfg.output_dir / ("distribution_" + std::to_string(i) + "_tau_" +
                                 short_number(row.tau) + ".csv"),
               distribution_csv(row.histogram));
    report << "[tau = " << format_number(row.tau) << "]\n" << tallies(row.histogram);
    res.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    for (std::size_t j = i + 1; j < res.rows.size(); ++j) {
      const bool both = !freqs[i].empty() && !freqs[j].empty();
      res.pairs.push_back({res.rows[i].tau, res.rows[j].tau,
                           both ? total_variation(freqs[i], freqs[j]) : std::nan("")});
    }
  }

  std::string table = "tau,n_maxima,oscillation_index\n";
  for (const auto& r : res.rows) {
    table += format_number(r.tau) + "," + std::to_string(r.n_maxima) + "," +
             format_number(r.oscillation_index) + "\n";
  }
  write_file(cfg.output_dir / "sweep_report.csv", table);
  std::string pairs = "tau_a,tau_b,total_variation\n";
  for (const auto& p : res.pairs) {
    pairs += format_number(p.tau_a) + "," + format_number(p.tau_b) + "," +
             format_number(p.total_variation) + "\n";
  }
  write_file(cfg.output_dir / "sweep_pairs.csv", pairs);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report << "wall_seconds = " << wall << "\n# parameters\n" << describe(cfg);
  write_file(cfg.output_dir / "report.txt", report.str());
  return res;
}

TraceResult cmd_trace(const ExperimentConfig& cfg, std::size_t n_trajectories, bool record) {
  if (!record) throw ConfigError("trace requires recording");
  if (n_trajectories == 0) throw ConfigError("trace needs at least one trajectory");
  cfg.validate();
  ensure_dir(cfg.output_dir);
  EmissionSpec sweep = cfg.emission;
  sweep.mode = EmissionSpec::Mode::Sweep;
  sweep.n = n_trajectories;

  TraceResult res;
  std::string csv = "traj_id,t,x,y\n";
  for (std::size_t i = 0; i < n_trajectories; ++i) {
    const double alpha = sweep.alpha(i);
    res.alphas.push_back(alpha);
    res.trajectories.push_back(
        run_discrete_trajectory(alpha, sweep.v0, cfg.geometry, cfg.field, cfg.step, true));
    if (is_detected(res.trajectories.back().outcome)) ++res.n_detected;
    for (const auto& s : *res.trajectories.back().path) {
      csv += std::to_string(i) + "," + format_number(s.t) + "," + format_number(s.pos.x()) + "," +
             format_number(s.pos.y()) + "\n";
    }
  }
  write_file(cfg.output_dir / "trajectories.csv", csv);
  write_file(cfg.output_dir / "trajectories.svg", render_svg(cfg, res));
  return res;
}

std::string render_svg(const ExperimentConfig& cfg, const TraceResult& trace) {
  const Geometry& g = cfg.geometry;
  const double x0 = g.escape_x() - 1;
  const double x1 = g.screen_gap + 1;
  const double y_half = std::max(std::abs(cfg.histogram.y_min), std::abs(cfg.histogram.y_max));
  const double px_per_unit = 20;
  constexpr std::size_t kMaxPoints = 400;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << short_number((x1 - x0) * px_per_unit)
     << "\" height=\"" << short_number(2 * y_half * px_per_unit) << "\" viewBox=\""
     << short_number(x0) << " " << short_number(-y_half) << " " << short_number(x1 - x0) << " "
     << short_number(2 * y_half) << "\">\n"
     << "<desc>x range [" << short_number(x0) << ", " << short_number(x1) << "], y range ["
     << short_number(-y_half) << ", " << short_number(y_half)
     << "] in model units, y up. tau = " << short_number(cfg.step.tau)
     << ", trajectories = " << trace.trajectories.size() << ", detected = " << trace.n_detected
     << "</desc>\n"
     << "<style>polyline{fill:none;stroke-width:0.05;stroke-opacity:0.7}"
        ".detected{stroke:#1f77b4}.blocked{stroke:#d62728}.escaped{stroke:#7f7f7f}"
        ".steplimit{stroke:#9467bd}.screen{stroke:#000;stroke-width:0.3}</style>\n"
     << "<rect x=\"" << short_number(x0) << "\" y=\"" << short_number(-y_half) << "\" width=\""
     << short_number(x1 - x0) << "\" height=\"" << short_number(2 * y_half)
     << "\" fill=\"#fff\"/>\n"
     << "<g transform=\"scale(1,-1)\">\n";
  const double r = g.slit_half_height;
  os << "<line class=\"screen\" x1=\"0\" y1=\"" << short_number(r) << "\" x2=\"0\" y2=\""
     << short_number(y_half) << "\"/>\n"
     << "<line class=\"screen\" x1=\"0\" y1=\"" << short_number(-r) << "\" x2=\"0\" y2=\""
     << short_number(-y_half) << "\"/>\n"
     << "<line class=\"screen\" x1=\"" << short_number(g.screen_gap) << "\" y1=\""
     << short_number(-y_half) << "\" x2=\"" << short_number(g.screen_gap) << "\" y2=\""
     << short_number(y_half) << "\"/>\n"
     << "<circle cx=\"" << short_number(-g.emitter_distance) << "\" cy=\"0\" r=\"0.3\"/>\n";
  for (const auto& rec : trace.trajectories) {
    if (!rec.path || rec.path->empty()) continue;
    const auto& path = *rec.path;
    const std::size_t stride = (path.size() + kMaxPoints - 1) / kMaxPoints;
    os << "<polyline class=\"" << outcome_name(rec.outcome) << "\" points=\"";
    for (std::size_t i = 0; i < path.size(); i += stride) {
      os << short_number(path[i].pos.x()) << "," << short_number(path[i].pos.y()) << " ";
    }
    os << short_number(path.back().pos.x()) << "," << short_number(path.back().pos.y())
       << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

LoadedDistribution read_distribution(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot read " + csv.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "bin_center,count,frequency") {
    throw ConfigError(csv.string() + ": missing header bin_center,count,frequency");
  }
  std::vector<double> centers;
  LoadedDistribution d;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    if (fields.size() != 3) {
      throw ConfigError(csv.string() + ":" + std::to_string(lineno) + ": expected 3 fields");
    }
    centers.push_back(parse_double("bin_center", fields[0]));
    d.counts.push_back(parse_u64("count", fields[1]));
    d.frequencies.push_back(parse_double("frequency", fields[2]));
  }
  if (centers.size() < 2) throw ConfigError(csv.string() + ": need at least two bins");
  const double width = (centers.back() - centers.front()) / static_cast<double>(centers.size() - 1);
  for (std::size_t k = 1; k < centers.size(); ++k) {
    if (!(std::abs(centers[k] - centers[k - 1] - width) <= 1e-9 * std::max(1.0, std::abs(width)))) {
      throw ConfigError(csv.string() + ": bin centers are not evenly spaced");
    }
  }
  d.spec.bin_width = width;
  d.spec.y_min = centers.front() - width / 2;
  d.spec.y_max = centers.back() + width / 2;
  for (std::size_t k = 0; k < d.counts.size(); ++k) {
    if (d.counts[k] == 0) continue;
    if (!(d.frequencies[k] > 0)) throw ConfigError(csv.string() + ": count without frequency");
    d.n_detected = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(d.counts[k]) / d.frequencies[k]));
    break;
  }
  if (d.n_detected == 0) throw ConfigError(csv.string() + ": distribution has no counts");
  return d;
}

ExtremaReport cmd_analyze(const fs::path& csv, int window, double k_sigma,
                          const fs::path& out_dir, std::ostream& out) {
  const LoadedDistribution d = read_distribution(csv);
  const ExtremaReport rep = find_extrema(d.frequencies, d.spec, d.n_detected, window, k_sigma);

  std::vector<std::pair<const char*, const Extremum*>> rows;
  for (const auto& e : rep.maxima) rows.emplace_back("max", &e);
  for (const auto& e : rep.minima) rows.emplace_back("min", &e);
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.second->index < b.second->index; });

  out << "n_detected " << d.n_detected << ", window " << window << ", k_sigma "
      << short_number(k_sigma) << ": " << rep.maxima.size() << " maxima, " << rep.minima.size()
      << " minima\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-5s %12s %14s %14s\n", "kind", "bin_center", "height",
                "prominence");
  out << buf;
  std::string file = "kind,bin_center,height,prominence\n";
  for (const auto& [kind, e] : rows) {
    std::snprintf(buf, sizeof buf, "%-5s %12.4f %14.6e %14.6e\n", kind, e->bin_center, e->height,
                  e->prominence);
    out << buf;
    file += std::string(kind) + "," + format_number(e->bin_center) + "," +
            format_number(e->height) + "," + format_number(e->prominence) + "\n";
  }
  ensure_dir(out_dir);
  write_file(out_dir / "extrema.csv", file);
  return rep;
}

}  // namespace slitsim
