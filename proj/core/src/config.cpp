#include "carma/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "carma/errors.hpp"

namespace carma {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

struct Section {
  std::map<std::string, std::string> entries;
  std::set<std::string> consumed;
};

using Sections = std::map<std::string, Section>;

Sections tokenize(const std::string& text) {
  Sections sections;
  std::istringstream in(text);
  std::string line, current;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty())
        throw ConfigError("config line " + std::to_string(line_no) + ": empty section name");
      sections[current]; // create
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    if (current.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    auto [it, inserted] = sections[current].entries.emplace(key, value);
    if (!inserted)
      throw ConfigError("config: duplicate key '" + current + "." + key + "'");
  }
  return sections;
}

class Reader {
 public:
  Reader(Sections& sections, std::string name)
      : section_(sections.count(name) ? &sections[name] : nullptr), name_(std::move(name)) {}

  bool present() const { return section_ != nullptr; }
  bool has(const std::string& key) const { return section_ && section_->entries.count(key); }

  std::string raw(const std::string& key) {
    if (!has(key)) throw ConfigError("config: missing required key '" + name_ + "." + key + "'");
    section_->consumed.insert(key);
    return section_->entries.at(key);
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    return has(key) ? raw(key) : fallback;
  }

  double get_double(const std::string& key) { return parse_double(key, raw(key)); }
  double get_double(const std::string& key, double fallback) {
    return has(key) ? get_double(key) : fallback;
  }

  long get_long(const std::string& key) {
    const std::string v = raw(key);
    try {
      std::size_t pos = 0;
      const long out = std::stol(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw ConfigError("config: key '" + name_ + "." + key + "' is not an integer: " + v);
    }
  }
  long get_long(const std::string& key, long fallback) {
    return has(key) ? get_long(key) : fallback;
  }

  std::vector<double> get_doubles(const std::string& key) {
    std::istringstream ss(raw(key));
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) out.push_back(parse_double(key, tok));
    if (out.empty()) throw ConfigError("config: key '" + name_ + "." + key + "' is empty");
    return out;
  }

  /// n reals, or one real broadcast to n.
  Vector get_vector(const std::string& key, int n) {
    std::vector<double> vals = get_doubles(key);
    if (static_cast<int>(vals.size()) == 1) return Vector::Constant(n, vals[0]);
    if (static_cast<int>(vals.size()) != n)
      throw ConfigError("config: key '" + name_ + "." + key + "' needs 1 or " +
                        std::to_string(n) + " values");
    return Eigen::Map<Vector>(vals.data(), n);
  }

  Matrix get_matrix(const std::string& key, int n) {
    std::vector<double> vals = get_doubles(key);
    if (static_cast<int>(vals.size()) != n * n)
      throw ConfigError("config: key '" + name_ + "." + key + "' needs " +
                        std::to_string(n * n) + " values (row-major " + std::to_string(n) +
                        "x" + std::to_string(n) + ")");
    Matrix m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = vals[static_cast<std::size_t>(r * n + c)];
    return m;
  }

  void reject_unknown() const {
    if (!section_) return;
    for (const auto& [key, value] : section_->entries)
      if (!section_->consumed.count(key))
        throw ConfigError("config: unknown key '" + name_ + "." + key + "'");
  }

 private:
  double parse_double(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double out = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw ConfigError("config: key '" + name_ + "." + key + "' is not a number: " + v);
    }
  }

  Section* section_;
  std::string name_;
};

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
  Sections sections = tokenize(text);
  for (const auto& [name, s] : sections)
    if (name != "model" && name != "driver" && name != "grid" && name != "task")
      throw ConfigError("config: unknown section '[" + name + "]'");

  RunConfig cfg;

  Reader model(sections, "model");
  if (!model.present()) throw ConfigError("config: missing [model] section");
  cfg.n = static_cast<int>(model.get_long("n"));
  cfg.p = static_cast<int>(model.get_long("p"));
  cfg.q = static_cast<int>(model.get_long("q"));
  if (cfg.n < 1) throw ConfigError("config: model.n must be >= 1");
  if (cfg.p < 1) throw ConfigError("config: model.p must be >= 1");
  if (cfg.q < 0 || cfg.q >= cfg.p) throw ConfigError("config: model requires 0 <= q < p");
  for (int i = 1; i <= cfg.p; ++i)
    cfg.a_coeffs.push_back(model.get_matrix("A" + std::to_string(i), cfg.n));
  for (int j = 0; j < cfg.q; ++j)
    cfg.b_coeffs.push_back(model.get_matrix("B" + std::to_string(j), cfg.n));
  model.reject_unknown();

  Reader driver(sections, "driver");
  if (driver.present()) {
    cfg.has_driver = true;
    cfg.driver.n = cfg.n;
    cfg.driver_kind = driver.raw("kind");
    if (cfg.driver_kind == "brownian") {
      BrownianSpec b;
      b.drift = driver.has("mu") ? driver.get_vector("mu", cfg.n) : Vector(Vector::Zero(cfg.n));
      b.volatility = driver.get_vector("sigma", cfg.n);
      if (driver.has("corr")) b.correlation = driver.get_matrix("corr", cfg.n);
      cfg.driver.law = std::move(b);
    } else if (cfg.driver_kind == "compound_poisson") {
      CompoundPoissonSpec cp;
      cp.rate = driver.get_vector("rate", cfg.n);
      cp.jump_mean = driver.get_vector("jump_mean", cfg.n);
      cp.jump_sd = driver.get_vector("jump_sd", cfg.n);
      cfg.driver.law = std::move(cp);
    } else if (cfg.driver_kind == "gamma_difference") {
      GammaDifferenceSpec g;
      g.shape = driver.get_vector("shape", cfg.n);
      g.scale = driver.get_vector("scale", cfg.n);
      cfg.driver.law = std::move(g);
    } else if (cfg.driver_kind == "fractional") {
      FractionalSpec f;
      f.base.drift = Vector::Zero(cfg.n);
      f.base.volatility = driver.get_vector("sigma", cfg.n);
      if (driver.has("corr")) f.base.correlation = driver.get_matrix("corr", cfg.n);
      f.beta = driver.get_vector("beta", cfg.n);
      cfg.driver.law = std::move(f);
    } else {
      throw ConfigError("config: driver.kind must be one of brownian, compound_poisson, "
                        "gamma_difference, fractional (got '" + cfg.driver_kind + "')");
    }
    try {
      cfg.driver.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: [driver] invalid: ") + e.what());
    }
    driver.reject_unknown();
  }

  Reader grid(sections, "grid");
  if (grid.present()) {
    cfg.t0 = grid.get_double("t0", 0.0);
    cfg.dt = grid.get_double("dt", cfg.dt);
    cfg.steps = static_cast<int>(grid.get_long("steps", 0));
    cfg.burn_in = grid.get_double("burn_in", 0.0);
    if (cfg.dt <= 0.0) throw ConfigError("config: grid.dt must be positive");
    if (cfg.steps < 0) throw ConfigError("config: grid.steps must be >= 0");
    if (cfg.burn_in < 0.0) throw ConfigError("config: grid.burn_in must be >= 0");
    grid.reject_unknown();
  }

  Reader task(sections, "task");
  if (task.present()) {
    const long seed = task.get_long("seed", 42);
    if (seed < 0) throw ConfigError("config: task.seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.output = task.get_string("output", cfg.output);
    cfg.history = task.get_string("history", "");
    cfg.method = task.get_string("method", cfg.method);
    if (cfg.method != "ma" && cfg.method != "statespace")
      throw ConfigError("config: task.method must be 'ma' or 'statespace'");
    cfg.horizon = task.get_double("horizon", cfg.horizon);
    cfg.truncation_tol = task.get_double("truncation_tol", cfg.truncation_tol);
    cfg.fft_dt = task.get_double("fft_dt", cfg.fft_dt);
    cfg.fft_size = static_cast<int>(task.get_long("fft_n", cfg.fft_size));
    cfg.scan_points = static_cast<int>(task.get_long("scan_points", cfg.scan_points));
    if (cfg.horizon <= 0.0) throw ConfigError("config: task.horizon must be positive");
    if (cfg.truncation_tol <= 0.0) throw ConfigError("config: task.truncation_tol must be positive");
    if (cfg.fft_dt <= 0.0) throw ConfigError("config: task.fft_dt must be positive");
    if (cfg.fft_size < 8 || (cfg.fft_size & (cfg.fft_size - 1)) != 0)
      throw ConfigError("config: task.fft_n must be a power of two >= 8");
    if (cfg.scan_points < 2) throw ConfigError("config: task.scan_points must be >= 2");
    task.reject_unknown();
  }

  return cfg;
}

RunConfig parse_config_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file: " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<std::string> RunConfig::resolved() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& k, const std::string& v) { out.push_back(k + " = " + v); };
  auto add_matrix = [&](const std::string& k, const Matrix& m) {
    std::string v;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        v += (v.empty() ? "" : " ") + fmt_num(m(r, c));
    add(k, v);
  };
  add("model.n", std::to_string(n));
  add("model.p", std::to_string(p));
  add("model.q", std::to_string(q));
  for (std::size_t i = 0; i < a_coeffs.size(); ++i)
    add_matrix("model.A" + std::to_string(i + 1), a_coeffs[i]);
  for (std::size_t j = 0; j < b_coeffs.size(); ++j)
    add_matrix("model.B" + std::to_string(j), b_coeffs[j]);
  if (has_driver) {
    add("driver.kind", driver_kind);
    if (const auto* b = std::get_if<BrownianSpec>(&driver.law)) {
      add_matrix("driver.mu", b->drift.transpose());
      add_matrix("driver.sigma", b->volatility.transpose());
      if (b->correlation.size() != 0) add_matrix("driver.corr", b->correlation);
    } else if (const auto* cp = std::get_if<CompoundPoissonSpec>(&driver.law)) {
      add_matrix("driver.rate", cp->rate.transpose());
      add_matrix("driver.jump_mean", cp->jump_mean.transpose());
      add_matrix("driver.jump_sd", cp->jump_sd.transpose());
    } else if (const auto* g = std::get_if<GammaDifferenceSpec>(&driver.law)) {
      add_matrix("driver.shape", g->shape.transpose());
      add_matrix("driver.scale", g->scale.transpose());
    } else if (const auto* f = std::get_if<FractionalSpec>(&driver.law)) {
      add_matrix("driver.sigma", f->base.volatility.transpose());
      if (f->base.correlation.size() != 0) add_matrix("driver.corr", f->base.correlation);
      add_matrix("driver.beta", f->beta.transpose());
    }
  }
  add("grid.t0", fmt_num(t0));
  add("grid.dt", fmt_num(dt));
  add("grid.steps", std::to_string(steps));
  add("grid.burn_in", fmt_num(burn_in));
  add("task.seed", std::to_string(seed));
  add("task.output", output);
  if (!history.empty()) add("task.history", history);
  add("task.method", method);
  add("task.horizon", fmt_num(horizon));
  add("task.truncation_tol", fmt_num(truncation_tol));
  add("task.fft_dt", fmt_num(fft_dt));
  add("task.fft_n", std::to_string(fft_size));
  add("task.scan_points", std::to_string(scan_points));
  return out;
}

} // namespace carma
