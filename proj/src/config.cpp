#include "hlflock/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "hlflock/error.hpp"

namespace hlflock {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigError, where + ": " + what);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(where, "unknown key '" + key + "'");
    }
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number(obj.at(key), where + "." + key);
}

std::vector<double> vector_of(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<std::vector<double>> matrix_of(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(vector_of(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<std::vector<std::vector<double>>> tensor_of(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a nested array");
  std::vector<std::vector<std::vector<double>>> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(matrix_of(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<std::vector<double>> zeros(int n, int d) {
  return std::vector<std::vector<double>>(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(d)));
}

json normalize_graph(const json& g) {
  if (g.is_null()) fail("graph", "section is required");
  check_keys(g, "graph", {"n_agents", "leaders", "chain"});
  json out;
  if (g.contains("chain")) {
    if (g.contains("leaders")) fail("graph", "give either 'chain' or 'leaders'");
    const double n = number(g.at("chain"), "graph.chain");
    if (n < 1 || n != std::floor(n)) fail("graph.chain", "expected a positive integer");
    out["n_agents"] = static_cast<int>(n);
    out["leaders"] = json::array();
    for (int i = 2; i <= static_cast<int>(n); ++i) out["leaders"].push_back({{"agent", i}, {"leaders", {i - 1}}});
    if (g.contains("n_agents") && number(g.at("n_agents"), "graph.n_agents") != n) {
      fail("graph", "n_agents disagrees with chain length");
    }
    return out;
  }
  if (!g.contains("n_agents")) fail("graph", "n_agents is required");
  const double n = number(g.at("n_agents"), "graph.n_agents");
  if (n < 1 || n != std::floor(n)) fail("graph.n_agents", "expected a positive integer");
  out["n_agents"] = static_cast<int>(n);
  out["leaders"] = json::array();
  std::set<int> listed;
  std::vector<json> entries;
  if (g.contains("leaders")) {
    const json& ls = g.at("leaders");
    if (!ls.is_array()) fail("graph.leaders", "expected an array of {agent, leaders[, weights]}");
    for (std::size_t k = 0; k < ls.size(); ++k) {
      const std::string where = "graph.leaders[" + std::to_string(k) + "]";
      check_keys(ls[k], where, {"agent", "leaders", "weights"});
      if (!ls[k].contains("agent") || !ls[k].contains("leaders")) fail(where, "needs 'agent' and 'leaders'");
      const double a = number(ls[k].at("agent"), where + ".agent");
      if (a != std::floor(a)) fail(where + ".agent", "expected an integer");
      const int agent = static_cast<int>(a);
      if (agent < 1 || agent > static_cast<int>(n)) fail(where + ".agent", "out of range");
      if (!listed.insert(agent).second) fail(where, "agent " + std::to_string(agent) + " listed twice");
      json entry{{"agent", agent}, {"leaders", json::array()}};
      for (double l : vector_of(ls[k].at("leaders"), where + ".leaders")) {
        if (l != std::floor(l)) fail(where + ".leaders", "expected integers");
        entry["leaders"].push_back(static_cast<int>(l));
      }
      if (ls[k].contains("weights")) {
        auto w = vector_of(ls[k].at("weights"), where + ".weights");
        if (w.size() != entry["leaders"].size()) fail(where + ".weights", "must parallel leaders");
        entry["weights"] = w;
      }
      entries.push_back(std::move(entry));
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const json& a, const json& b) { return a["agent"].get<int>() < b["agent"].get<int>(); });
  for (auto& e : entries) out["leaders"].push_back(std::move(e));
  return out;
}

json normalize_kernel(const json& k) {
  if (k.is_null()) return {{"form", "cucker-smale"}, {"H", 1.0}, {"sigma", 1.0}, {"beta", 0.25}};
  const std::string form = k.value("form", std::string("cucker-smale"));
  if (form == "cucker-smale") {
    check_keys(k, "kernel", {"form", "H", "sigma", "beta"});
    return {{"form", form},
            {"H", number_or(k, "H", 1.0, "kernel")},
            {"sigma", number_or(k, "sigma", 1.0, "kernel")},
            {"beta", number_or(k, "beta", 0.25, "kernel")}};
  }
  if (form == "tabulated") {
    check_keys(k, "kernel", {"form", "knots", "values"});
    if (!k.contains("knots") || !k.contains("values")) fail("kernel", "tabulated form needs knots and values");
    return {{"form", form},
            {"knots", vector_of(k.at("knots"), "kernel.knots")},
            {"values", vector_of(k.at("values"), "kernel.values")}};
  }
  fail("kernel.form", "unknown form '" + form + "'");
}

json normalize_forcing(const json& f) {
  if (f.is_null()) return {{"form", "zero"}};
  const std::string form = f.value("form", std::string("zero"));
  if (form == "zero") {
    check_keys(f, "forcing", {"form"});
    return {{"form", form}};
  }
  if (form == "power-decay") {
    check_keys(f, "forcing", {"form", "amplitude", "mu", "direction"});
    json out{{"form", form},
             {"amplitude", number_or(f, "amplitude", 1.0, "forcing")},
             {"mu", number_or(f, "mu", 2.0, "forcing")}};
    if (f.contains("direction")) out["direction"] = vector_of(f.at("direction"), "forcing.direction");
    return out;
  }
  if (form == "user-tabulated") {
    check_keys(f, "forcing", {"form", "times", "samples"});
    if (!f.contains("times") || !f.contains("samples")) fail("forcing", "user-tabulated form needs times and samples");
    return {{"form", form},
            {"times", vector_of(f.at("times"), "forcing.times")},
            {"samples", matrix_of(f.at("samples"), "forcing.samples")}};
  }
  fail("forcing.form", "unknown form '" + form + "'");
}

json normalize_initial(const json& in, int n, int d) {
  if (in.is_null()) fail("initial", "section is required");
  const std::string form = in.value("form", std::string("constant"));
  if (form == "constant") {
    check_keys(in, "initial", {"form", "x", "v"});
    if (!in.contains("x") || !in.contains("v")) fail("initial", "constant form needs x and v");
    return {{"form", form}, {"x", matrix_of(in.at("x"), "initial.x")}, {"v", matrix_of(in.at("v"), "initial.v")}};
  }
  if (form == "linear") {
    check_keys(in, "initial", {"form", "x0", "x_slope", "v0", "v_slope"});
    if (!in.contains("x0") || !in.contains("v0")) fail("initial", "linear form needs x0 and v0");
    json out{{"form", form},
             {"x0", matrix_of(in.at("x0"), "initial.x0")},
             {"v0", matrix_of(in.at("v0"), "initial.v0")}};
    out["x_slope"] = in.contains("x_slope") ? json(matrix_of(in.at("x_slope"), "initial.x_slope")) : json(zeros(n, d));
    out["v_slope"] = in.contains("v_slope") ? json(matrix_of(in.at("v_slope"), "initial.v_slope")) : json(zeros(n, d));
    return out;
  }
  if (form == "sampled") {
    check_keys(in, "initial", {"form", "times", "x", "v"});
    if (!in.contains("times") || !in.contains("x") || !in.contains("v")) {
      fail("initial", "sampled form needs times, x and v");
    }
    return {{"form", form},
            {"times", vector_of(in.at("times"), "initial.times")},
            {"x", tensor_of(in.at("x"), "initial.x")},
            {"v", tensor_of(in.at("v"), "initial.v")}};
  }
  if (form == "random") {
    check_keys(in, "initial", {"form", "x_spread", "v_spread", "slope_spread"});
    return {{"form", form},
            {"x_spread", number_or(in, "x_spread", 1.0, "initial")},
            {"v_spread", number_or(in, "v_spread", 1.0, "initial")},
            {"slope_spread", number_or(in, "slope_spread", 0.0, "initial")}};
  }
  fail("initial.form", "unknown form '" + form + "'");
}

json normalize_stepper(const json& s) {
  json in = s.is_null() ? json::object() : s;
  check_keys(in, "stepper", {"h", "scheme", "t_end"});
  const std::string scheme = in.value("scheme", std::string("rk4"));
  if (scheme != "rk4" && scheme != "explicit-euler") fail("stepper.scheme", "expected 'rk4' or 'explicit-euler'");
  return {{"h", number_or(in, "h", 0.01, "stepper")},
          {"scheme", scheme},
          {"t_end", number_or(in, "t_end", 10.0, "stepper")}};
}

json normalize_output(const json& o) {
  json in = o.is_null() ? json::object() : o;
  check_keys(in, "output", {"dir", "stem", "every"});
  const double every = number_or(in, "every", 1.0, "output");
  if (every < 1 || every != std::floor(every)) fail("output.every", "expected a positive integer");
  json out{{"dir", in.value("dir", std::string("out"))},
           {"stem", in.value("stem", std::string("run"))},
           {"every", static_cast<int>(every)}};
  if (out["stem"].get<std::string>().empty()) fail("output.stem", "must not be empty");
  return out;
}

json normalize_diagnostics(const json& d, int n) {
  json in = d.is_null() ? json::object() : d;
  check_keys(in, "diagnostics", {"cross", "leader_deviation", "lyapunov", "quadrature_tolerance"});
  json out{{"cross", in.value("cross", true)},
           {"leader_deviation", in.value("leader_deviation", true)},
           {"quadrature_tolerance", number_or(in, "quadrature_tolerance", 1e-13, "diagnostics")},
           {"lyapunov", json::array()}};
  if (in.contains("lyapunov")) {
    const json& ls = in.at("lyapunov");
    if (!ls.is_array()) fail("diagnostics.lyapunov", "expected an array");
    for (std::size_t k = 0; k < ls.size(); ++k) {
      const std::string where = "diagnostics.lyapunov[" + std::to_string(k) + "]";
      check_keys(ls[k], where, {"pair", "level", "bound"});
      if (ls[k].contains("pair")) {
        auto p = vector_of(ls[k].at("pair"), where + ".pair");
        if (p.size() != 2 || p[0] < 1 || p[1] < 1 || p[0] > n || p[1] > n || p[0] == p[1]) {
          fail(where + ".pair", "expected two distinct agents");
        }
        out["lyapunov"].push_back({{"pair", {static_cast<int>(p[0]), static_cast<int>(p[1])}}});
      } else if (ls[k].contains("level")) {
        const double l = number(ls[k].at("level"), where + ".level");
        if (l < 2 || l > n || l != std::floor(l)) fail(where + ".level", "expected an agent index >= 2");
        json e{{"level", static_cast<int>(l)}};
        if (ls[k].contains("bound")) e["bound"] = number(ls[k].at("bound"), where + ".bound");
        out["lyapunov"].push_back(e);
      } else {
        fail(where, "needs 'pair' or 'level'");
      }
    }
  }
  return out;
}

json normalize_verdict(const json& v) {
  json in = v.is_null() ? json::object() : v;
  check_keys(in, "verdict", {"v_ratio", "x_growth", "fit_fraction", "resolution"});
  VerdictThresholds def;
  return {{"v_ratio", number_or(in, "v_ratio", def.v_ratio, "verdict")},
          {"x_growth", number_or(in, "x_growth", def.x_growth, "verdict")},
          {"fit_fraction", number_or(in, "fit_fraction", def.fit_fraction, "verdict")},
          {"resolution", number_or(in, "resolution", def.resolution, "verdict")}};
}

json normalize_sweep(const json& s) {
  json in = s.is_null() ? json::object() : s;
  check_keys(in, "sweep", {"axes", "workers"});
  const double workers = number_or(in, "workers", 1.0, "sweep");
  if (workers < 1 || workers != std::floor(workers)) fail("sweep.workers", "expected a positive integer");
  json out{{"axes", json::array()}, {"workers", static_cast<int>(workers)}};
  if (in.contains("axes")) {
    const json& axes = in.at("axes");
    if (!axes.is_array()) fail("sweep.axes", "expected an array");
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const std::string where = "sweep.axes[" + std::to_string(k) + "]";
      check_keys(axes[k], where, {"param", "values"});
      if (!axes[k].contains("param") || !axes[k].at("param").is_string()) fail(where, "needs a string 'param'");
      auto values = axes[k].contains("values") ? vector_of(axes[k].at("values"), where + ".values") : std::vector<double>{};
      if (values.empty()) fail(where + ".values", "must not be empty");
      out["axes"].push_back({{"param", axes[k].at("param")}, {"values", values}});
    }
  }
  return out;
}

const json* find_path(const json& doc, const std::string& path) {
  const json* node = &doc;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &node->at(key);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return node;
}

json normalize(const json& raw) {
  if (!raw.is_object()) fail("config", "top level must be an object");
  check_keys(raw, "config",
             {"dim", "tau", "graph", "kernel", "forcing", "initial", "stepper", "output", "diagnostics", "verdict",
              "sweep", "seed"});
  json doc;
  const double dim = number_or(raw, "dim", 1.0, "config");
  if (dim < 1 || dim != std::floor(dim)) fail("dim", "expected a positive integer");
  doc["dim"] = static_cast<int>(dim);
  doc["tau"] = number_or(raw, "tau", 0.0, "config");
  doc["graph"] = normalize_graph(raw.value("graph", json()));
  const int n = doc["graph"]["n_agents"].get<int>();
  doc["kernel"] = normalize_kernel(raw.value("kernel", json()));
  doc["forcing"] = normalize_forcing(raw.value("forcing", json()));
  doc["initial"] = normalize_initial(raw.value("initial", json()), n, static_cast<int>(dim));
  doc["stepper"] = normalize_stepper(raw.value("stepper", json()));
  doc["output"] = normalize_output(raw.value("output", json()));
  doc["diagnostics"] = normalize_diagnostics(raw.value("diagnostics", json()), n);
  doc["verdict"] = normalize_verdict(raw.value("verdict", json()));
  doc["sweep"] = normalize_sweep(raw.value("sweep", json()));
  if (raw.contains("seed")) {
    const json& s = raw.at("seed");
    if (!s.is_number_integer() && !(s.is_number() && s.get<double>() == std::floor(s.get<double>()))) {
      fail("seed", "expected a nonnegative integer");
    }
    if (s.is_number_unsigned()) {
      doc["seed"] = s.get<std::uint64_t>();
    } else {
      const double v = s.get<double>();
      if (v < 0) fail("seed", "expected a nonnegative integer");
      doc["seed"] = static_cast<std::uint64_t>(v);
    }
  } else {
    doc["seed"] = std::uint64_t{0};
  }
  for (const auto& axis : doc["sweep"]["axes"]) {
    const auto param = axis["param"].get<std::string>();
    const json* leaf = find_path(doc, param);
    if (leaf == nullptr || !leaf->is_number()) fail("sweep", "axis '" + param + "' does not name a numeric parameter");
  }
  return doc;
}

}  // namespace

std::string format_short(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

RunConfig RunConfig::from_document(json doc) {
  RunConfig cfg(normalize(doc));
  // Materialize once so invalid graphs, shapes and misaligned delays are
  // reported before any integration starts.
  (void)cfg.sim_spec();
  return cfg;
}

RunConfig RunConfig::parse(std::string_view text) {
  json raw;
  try {
    raw = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("parse error: ") + e.what());
  }
  return from_document(std::move(raw));
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  os << "// hlflock run configuration\n"
     << "// units: tau, stepper.h, stepper.t_end and all sample times in model time units;\n"
     << "//        positions in length units, velocities in length/time;\n"
     << "//        kernel H in 1/time, forcing amplitude in length/time^2.\n"
     << "// agents are numbered from 1; agent 1 is the ultimate leader.\n"
     << doc_.dump(2) << "\n";
  return os.str();
}

SimSpec RunConfig::sim_spec() const {
  SimSpec spec;
  const json& g = doc_["graph"];
  const int n = g["n_agents"].get<int>();
  std::vector<std::vector<int>> leaders(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> weights;
  bool any_weights = false;
  for (const auto& e : g["leaders"]) any_weights = any_weights || e.contains("weights");
  if (any_weights) weights.resize(static_cast<std::size_t>(n));
  for (const auto& e : g["leaders"]) {
    const auto i = static_cast<std::size_t>(e["agent"].get<int>() - 1);
    leaders[i] = e["leaders"].get<std::vector<int>>();
    if (e.contains("weights")) weights[i] = e["weights"].get<std::vector<double>>();
  }
  spec.graph = HLGraph(n, std::move(leaders), std::move(weights));
  spec.dim = doc_["dim"].get<int>();
  spec.tau = doc_["tau"].get<double>();

  const json& k = doc_["kernel"];
  if (k["form"] == "cucker-smale") {
    spec.kernel = Kernel(CuckerSmaleKernel{k["H"].get<double>(), k["sigma"].get<double>(), k["beta"].get<double>()});
  } else {
    spec.kernel = Kernel(TabulatedKernel{k["knots"].get<std::vector<double>>(), k["values"].get<std::vector<double>>()});
  }

  const json& f = doc_["forcing"];
  if (f["form"] == "power-decay") {
    PowerDecayForcing pd{f["amplitude"].get<double>(), f["mu"].get<double>(), {}};
    if (f.contains("direction")) pd.direction = f["direction"].get<std::vector<double>>();
    spec.forcing = ForcingSpec(pd);
  } else if (f["form"] == "user-tabulated") {
    spec.forcing = ForcingSpec(TabulatedForcing{f["times"].get<std::vector<double>>(),
                                                f["samples"].get<std::vector<std::vector<double>>>()});
  }

  const json& in = doc_["initial"];
  using Matrix = std::vector<std::vector<double>>;
  using Tensor = std::vector<Matrix>;
  if (in["form"] == "constant") {
    spec.initial = InitialData(ConstantInitial{in["x"].get<Matrix>(), in["v"].get<Matrix>()});
  } else if (in["form"] == "linear") {
    spec.initial = InitialData(LinearInitial{in["x0"].get<Matrix>(), in["x_slope"].get<Matrix>(),
                                             in["v0"].get<Matrix>(), in["v_slope"].get<Matrix>()});
  } else if (in["form"] == "sampled") {
    spec.initial =
        InitialData(SampledInitial{in["times"].get<std::vector<double>>(), in["x"].get<Tensor>(), in["v"].get<Tensor>()});
  } else {
    spec.initial = random_initial(n, spec.dim, seed(), in["x_spread"].get<double>(), in["v_spread"].get<double>(),
                                  in["slope_spread"].get<double>());
  }

  const json& s = doc_["stepper"];
  spec.stepper.h = s["h"].get<double>();
  spec.stepper.t_end = s["t_end"].get<double>();
  spec.stepper.scheme = s["scheme"] == "rk4" ? Scheme::Rk4 : Scheme::ExplicitEuler;

  check_spec(spec);
  return spec;
}

OutputConfig RunConfig::output() const {
  const json& o = doc_["output"];
  return {o["dir"].get<std::string>(), o["stem"].get<std::string>(), o["every"].get<std::size_t>()};
}

DiagnosticsOptions RunConfig::diagnostics() const {
  const json& d = doc_["diagnostics"];
  DiagnosticsOptions opts;
  opts.stride = output().every;
  opts.cross = d["cross"].get<bool>();
  opts.leader_deviation = d["leader_deviation"].get<bool>();
  opts.primitive.tolerance = d["quadrature_tolerance"].get<double>();
  for (const auto& e : d["lyapunov"]) {
    LyapunovConfig lc;
    if (e.contains("pair")) {
      lc.kind = LyapunovConfig::Kind::Pair;
      lc.leader = e["pair"][0].get<int>();
      lc.follower = e["pair"][1].get<int>();
    } else {
      lc.kind = LyapunovConfig::Kind::Level;
      lc.follower = e["level"].get<int>();
      if (e.contains("bound")) lc.level_bound = e["bound"].get<double>();
    }
    opts.lyapunov.push_back(lc);
  }
  return opts;
}

VerdictThresholds RunConfig::thresholds() const {
  const json& v = doc_["verdict"];
  return {v["v_ratio"].get<double>(), v["x_growth"].get<double>(), v["fit_fraction"].get<double>(),
          v["resolution"].get<double>()};
}

std::vector<SweepAxis> RunConfig::sweep_axes() const {
  std::vector<SweepAxis> axes;
  for (const auto& a : doc_["sweep"]["axes"]) {
    axes.push_back({a["param"].get<std::string>(), a["values"].get<std::vector<double>>()});
  }
  return axes;
}

unsigned RunConfig::workers() const { return doc_["sweep"]["workers"].get<unsigned>(); }

std::uint64_t RunConfig::seed() const { return doc_["seed"].get<std::uint64_t>(); }

void RunConfig::set_seed(std::uint64_t seed) { doc_["seed"] = seed; }

void RunConfig::set_output_dir(const std::string& dir) { doc_["output"]["dir"] = dir; }

void RunConfig::set_workers(unsigned workers) {
  if (workers == 0) throw Error(ErrorCode::ConfigError, "workers must be >= 1");
  doc_["sweep"]["workers"] = workers;
}

RunConfig RunConfig::with_parameter(const std::string& path, double value) const {
  json doc = doc_;
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) fail("sweep", "unknown parameter '" + path + "'");
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (!node->is_number()) fail("sweep", "parameter '" + path + "' is not numeric");
  if (node->is_number_integer() || node->is_number_unsigned()) {
    if (value != std::floor(value)) fail("sweep", "parameter '" + path + "' takes integer values");
    if (path == "seed") {
      *node = static_cast<std::uint64_t>(value);
    } else {
      *node = static_cast<long long>(value);
    }
  } else {
    *node = value;
  }
  // A derived config does not sweep again.
  doc["sweep"]["axes"] = json::array();
  return from_document(std::move(doc));
}

std::vector<SweepPoint> RunConfig::expand_sweep() const {
  const auto axes = sweep_axes();
  std::vector<SweepPoint> points{SweepPoint{}};
  for (const auto& axis : axes) {
    std::vector<SweepPoint> next;
    for (const auto& p : points) {
      for (double v : axis.values) {
        SweepPoint q = p;
        q.params.emplace_back(axis.param, v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  for (auto& p : points) {
    for (const auto& [name, v] : p.params) {
      if (!p.name.empty()) p.name += "__";
      p.name += name + "=" + format_short(v);
    }
    if (p.name.empty()) p.name = "base";
  }
  return points;
}

}  // namespace hlflock
