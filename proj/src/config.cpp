#include "flowrec/config.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "flowrec/io.hpp"

namespace flowrec {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

double to_double(const KvPair& kv) {
  try {
    size_t used = 0;
    double v = std::stod(kv.value, &used);
    if (used != kv.value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    fail(kv.line, "expected a number for '" + kv.key + "', got '" + kv.value +
                      "'");
  }
}

int to_int(const KvPair& kv) {
  try {
    size_t used = 0;
    long long v = std::stoll(kv.value, &used);
    if (used != kv.value.size()) throw std::invalid_argument("trailing text");
    if (v < -2147483648LL || v > 2147483647LL)
      throw std::out_of_range("int range");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    fail(kv.line, "expected an integer for '" + kv.key + "', got '" +
                      kv.value + "'");
  }
}

std::uint64_t to_u64(const KvPair& kv) {
  try {
    size_t used = 0;
    unsigned long long v = std::stoull(kv.value, &used);
    if (used != kv.value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    fail(kv.line, "expected a nonnegative integer for '" + kv.key +
                      "', got '" + kv.value + "'");
  }
}

std::string to_choice(const KvPair& kv,
                      std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (kv.value == a) return kv.value;
  std::string msg = "invalid value '" + kv.value + "' for '" + kv.key +
                    "'; expected one of:";
  for (const char* a : allowed) msg += std::string(" ") + a;
  fail(kv.line, msg);
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<KvPair> parse_kv_text(const std::string& text) {
  std::vector<KvPair> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      fail(line, "expected 'key = value', got '" + s + "'");
    KvPair kv;
    kv.line = line;
    kv.key = trim(s.substr(0, eq));
    kv.value = trim(s.substr(eq + 1));
    if (kv.key.empty()) fail(line, "missing key before '='");
    if (kv.value.empty()) fail(line, "missing value for '" + kv.key + "'");
    out.push_back(std::move(kv));
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  using Handler = std::function<void(const KvPair&)>;
  std::map<std::string, Handler> h;
  h["name"] = [&](const KvPair& kv) { c.name = kv.value; };
  h["seed"] = [&](const KvPair& kv) { c.seed = to_u64(kv); };
  h["grid.nx"] = [&](const KvPair& kv) { c.grid.nx = to_int(kv); };
  h["grid.ny"] = [&](const KvPair& kv) { c.grid.ny = to_int(kv); };
  h["grid.x0"] = [&](const KvPair& kv) { c.grid.x0 = to_double(kv); };
  h["grid.x1"] = [&](const KvPair& kv) { c.grid.x1 = to_double(kv); };
  h["grid.y0"] = [&](const KvPair& kv) { c.grid.y0 = to_double(kv); };
  h["grid.y1"] = [&](const KvPair& kv) { c.grid.y1 = to_double(kv); };
  h["time.gates"] = [&](const KvPair& kv) { c.time.gates = to_int(kv); };
  h["time.steps_per_gate"] = [&](const KvPair& kv) {
    c.time.steps_per_gate = to_int(kv);
  };
  h["phantom.kind"] = [&](const KvPair& kv) {
    c.phantom.kind = to_choice(kv, {"stars", "heart"});
  };
  h["phantom.seed"] = [&](const KvPair& kv) { c.phantom.seed = to_u64(kv); };
  h["phantom.rotation_deg"] = [&](const KvPair& kv) {
    c.phantom.rotation_deg = to_double(kv);
  };
  h["phantom.translate_x"] = [&](const KvPair& kv) {
    c.phantom.translate_x = to_double(kv);
  };
  h["phantom.translate_y"] = [&](const KvPair& kv) {
    c.phantom.translate_y = to_double(kv);
  };
  h["phantom.scale"] = [&](const KvPair& kv) {
    c.phantom.scale = to_double(kv);
  };
  h["geometry.views_per_gate"] = [&](const KvPair& kv) {
    c.geometry.views_per_gate = to_int(kv);
  };
  h["geometry.num_bins"] = [&](const KvPair& kv) {
    c.geometry.num_bins = to_int(kv);
  };
  h["geometry.det_lo"] = [&](const KvPair& kv) {
    c.geometry.det_lo = to_double(kv);
  };
  h["geometry.det_hi"] = [&](const KvPair& kv) {
    c.geometry.det_hi = to_double(kv);
  };
  h["geometry.offset_step_deg"] = [&](const KvPair& kv) {
    c.geometry.offset_step_deg = to_double(kv);
  };
  h["noise.snr_db"] = [&](const KvPair& kv) { c.noise.snr_db = to_double(kv); };
  h["model.forward"] = [&](const KvPair& kv) {
    c.model.forward = to_choice(kv, {"radon", "identity"});
  };
  h["model.kernel"] = [&](const KvPair& kv) {
    c.model.kernel = to_choice(kv, {"gaussian", "identity"});
  };
  h["model.sigma"] = [&](const KvPair& kv) { c.model.sigma = to_double(kv); };
  h["model.mu1"] = [&](const KvPair& kv) { c.model.mu1 = to_double(kv); };
  h["model.mu2"] = [&](const KvPair& kv) { c.model.mu2 = to_double(kv); };
  h["model.tv_eps"] = [&](const KvPair& kv) {
    c.model.tv_eps = to_double(kv);
  };
  h["solver.alpha"] = [&](const KvPair& kv) { c.solver.alpha = to_double(kv); };
  h["solver.beta"] = [&](const KvPair& kv) { c.solver.beta = to_double(kv); };
  h["solver.max_outer"] = [&](const KvPair& kv) {
    c.solver.max_outer = to_int(kv);
  };
  h["solver.inner_template"] = [&](const KvPair& kv) {
    c.solver.inner_template = to_int(kv);
  };
  h["solver.inner_velocity"] = [&](const KvPair& kv) {
    c.solver.inner_velocity = to_int(kv);
  };
  h["solver.tol_template"] = [&](const KvPair& kv) {
    c.solver.tol_template = to_double(kv);
  };
  h["solver.tol_velocity"] = [&](const KvPair& kv) {
    c.solver.tol_velocity = to_double(kv);
  };
  h["solver.order"] = [&](const KvPair& kv) {
    c.solver.order = to_choice(kv, {"template_first", "velocity_first"});
  };
  h["warmstart.kind"] = [&](const KvPair& kv) {
    c.warmstart.kind = to_choice(kv, {"none", "static_tv", "first_gate"});
  };
  h["warmstart.template_iters"] = [&](const KvPair& kv) {
    c.warmstart.template_iters = to_int(kv);
  };
  h["warmstart.velocity_iters"] = [&](const KvPair& kv) {
    c.warmstart.velocity_iters = to_int(kv);
  };
  h["baseline.mu1"] = [&](const KvPair& kv) {
    c.baseline.mu1 = to_double(kv);
  };
  h["baseline.alpha"] = [&](const KvPair& kv) {
    c.baseline.alpha = to_double(kv);
  };
  h["baseline.iters"] = [&](const KvPair& kv) {
    c.baseline.iters = to_int(kv);
  };
  h["baseline.tv_eps"] = [&](const KvPair& kv) {
    c.baseline.tv_eps = to_double(kv);
  };
  h["paths.dataset"] = [&](const KvPair& kv) { c.paths.dataset = kv.value; };
  h["paths.run"] = [&](const KvPair& kv) { c.paths.run = kv.value; };

  for (const KvPair& kv : parse_kv_text(text)) {
    auto it = h.find(kv.key);
    if (it == h.end()) fail(kv.line, "unknown key '" + kv.key + "'");
    it->second(kv);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_text_file(path));
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "name = " << c.name << "\n";
  o << "seed = " << c.seed << "\n";
  o << "grid.nx = " << c.grid.nx << "\n";
  o << "grid.ny = " << c.grid.ny << "\n";
  o << "grid.x0 = " << fmt_double(c.grid.x0) << "\n";
  o << "grid.x1 = " << fmt_double(c.grid.x1) << "\n";
  o << "grid.y0 = " << fmt_double(c.grid.y0) << "\n";
  o << "grid.y1 = " << fmt_double(c.grid.y1) << "\n";
  o << "time.gates = " << c.time.gates << "\n";
  o << "time.steps_per_gate = " << c.time.steps_per_gate << "\n";
  o << "phantom.kind = " << c.phantom.kind << "\n";
  o << "phantom.seed = " << c.phantom.seed << "\n";
  o << "phantom.rotation_deg = " << fmt_double(c.phantom.rotation_deg) << "\n";
  o << "phantom.translate_x = " << fmt_double(c.phantom.translate_x) << "\n";
  o << "phantom.translate_y = " << fmt_double(c.phantom.translate_y) << "\n";
  o << "phantom.scale = " << fmt_double(c.phantom.scale) << "\n";
  o << "geometry.views_per_gate = " << c.geometry.views_per_gate << "\n";
  o << "geometry.num_bins = " << c.geometry.num_bins << "\n";
  o << "geometry.det_lo = " << fmt_double(c.geometry.det_lo) << "\n";
  o << "geometry.det_hi = " << fmt_double(c.geometry.det_hi) << "\n";
  o << "geometry.offset_step_deg = " << fmt_double(c.geometry.offset_step_deg)
    << "\n";
  o << "noise.snr_db = " << fmt_double(c.noise.snr_db) << "\n";
  o << "model.forward = " << c.model.forward << "\n";
  o << "model.kernel = " << c.model.kernel << "\n";
  o << "model.sigma = " << fmt_double(c.model.sigma) << "\n";
  o << "model.mu1 = " << fmt_double(c.model.mu1) << "\n";
  o << "model.mu2 = " << fmt_double(c.model.mu2) << "\n";
  o << "model.tv_eps = " << fmt_double(c.model.tv_eps) << "\n";
  o << "solver.alpha = " << fmt_double(c.solver.alpha) << "\n";
  o << "solver.beta = " << fmt_double(c.solver.beta) << "\n";
  o << "solver.max_outer = " << c.solver.max_outer << "\n";
  o << "solver.inner_template = " << c.solver.inner_template << "\n";
  o << "solver.inner_velocity = " << c.solver.inner_velocity << "\n";
  o << "solver.tol_template = " << fmt_double(c.solver.tol_template) << "\n";
  o << "solver.tol_velocity = " << fmt_double(c.solver.tol_velocity) << "\n";
  o << "solver.order = " << c.solver.order << "\n";
  o << "warmstart.kind = " << c.warmstart.kind << "\n";
  o << "warmstart.template_iters = " << c.warmstart.template_iters << "\n";
  o << "warmstart.velocity_iters = " << c.warmstart.velocity_iters << "\n";
  o << "baseline.mu1 = " << fmt_double(c.baseline.mu1) << "\n";
  o << "baseline.alpha = " << fmt_double(c.baseline.alpha) << "\n";
  o << "baseline.iters = " << c.baseline.iters << "\n";
  o << "baseline.tv_eps = " << fmt_double(c.baseline.tv_eps) << "\n";
  o << "paths.dataset = " << c.paths.dataset << "\n";
  o << "paths.run = " << c.paths.run << "\n";
  return o.str();
}

}  // namespace flowrec
