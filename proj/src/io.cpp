#include "bdbc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace bdbc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::runtime_error("config field '" + field + "': " + what);
}

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

double get_positive(const json& j, const std::string& field) {
  const double v = get_number(j, field);
  if (!(v > 0.0) || !std::isfinite(v)) fail(field, "must be a positive finite number");
  return v;
}

CMatrix parse_complex_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.empty()) fail(field, "rows must be non-empty arrays");
    if (r == 0)
      cols = row.size();
    else if (row.size() != cols)
      fail(field, "rows have inconsistent lengths");
  }
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const json& e = j[r][c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        fail(field, "entries must be [re, im] pairs");
      const double re = e[0].get<double>();
      const double im = e[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im)) fail(field, "entries must be finite");
      m(Eigen::Index(r), Eigen::Index(c)) = Complex(re, im);
    }
  }
  return m;
}

json complex_matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

SolverConfig parse_solver(const json& j) {
  SolverConfig s;
  if (j.contains("max_iters")) {
    if (!j["max_iters"].is_number_integer() || j["max_iters"].get<long>() < 1)
      fail("solver.max_iters", "must be a positive integer");
    s.max_iters = j["max_iters"].get<int>();
  }
  if (j.contains("grad_tol")) s.grad_tol = get_positive(j["grad_tol"], "solver.grad_tol");
  if (j.contains("step_init")) s.step_init = get_positive(j["step_init"], "solver.step_init");
  if (j.contains("backtrack_ratio")) {
    s.backtrack_ratio = get_positive(j["backtrack_ratio"], "solver.backtrack_ratio");
    if (s.backtrack_ratio >= 1.0) fail("solver.backtrack_ratio", "must be < 1");
  }
  if (j.contains("armijo_c")) s.armijo_c = get_positive(j["armijo_c"], "solver.armijo_c");
  return s;
}

SimScenario parse_sim(const json& j, double power) {
  SimScenario sc;
  if (j.contains("block_lengths")) {
    if (!j["block_lengths"].is_array() || j["block_lengths"].empty())
      fail("sim.block_lengths", "expected a non-empty array of integers");
    sc.block_lengths.clear();
    for (const json& e : j["block_lengths"]) {
      if (!e.is_number_integer() || e.get<long>() < 1)
        fail("sim.block_lengths", "entries must be positive integers");
      sc.block_lengths.push_back(e.get<int>());
    }
  }
  if (j.contains("rate_fraction")) {
    sc.rate_fraction = get_positive(j["rate_fraction"], "sim.rate_fraction");
  }
  if (j.contains("trials")) {
    if (!j["trials"].is_number_integer() || j["trials"].get<long>() < 1)
      fail("sim.trials", "must be a positive integer");
    sc.trials = j["trials"].get<long>();
  }
  if (j.contains("epsilon_p")) {
    sc.epsilon_p = get_positive(j["epsilon_p"], "sim.epsilon_p");
    if (sc.epsilon_p > power) fail("sim.epsilon_p", "must not exceed the power budget");
  } else {
    sc.epsilon_p = 0.05 * power;
  }
  if (j.contains("delta")) sc.delta = get_positive(j["delta"], "sim.delta");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      fail("sim.seed", "must be an unsigned integer");
    sc.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("fresh_codebook")) {
    if (!j["fresh_codebook"].is_boolean()) fail("sim.fresh_codebook", "must be a boolean");
    sc.fresh_codebook = j["fresh_codebook"].get<bool>();
  }
  return sc;
}

}  // namespace

BidirectionalChannel ScenarioConfig::channel() const {
  return BidirectionalChannel(h1, h2, noise_variance, power);
}

bool ScenarioConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config parse failure: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config parse failure: expected an object");
  if (!j.contains("channel") || !j["channel"].is_object())
    fail("channel", "missing or not an object");

  ScenarioConfig cfg;
  const json& ch = j["channel"];
  if (!ch.contains("h1")) fail("channel.h1", "missing");
  if (!ch.contains("h2")) fail("channel.h2", "missing");
  cfg.h1 = parse_complex_matrix(ch["h1"], "channel.h1");
  cfg.h2 = parse_complex_matrix(ch["h2"], "channel.h2");
  if (cfg.h1.cols() != cfg.h2.cols())
    fail("channel.h2", "column count differs from channel.h1 (relay antennas)");
  if (!ch.contains("noise_variance")) fail("channel.noise_variance", "missing");
  cfg.noise_variance = get_positive(ch["noise_variance"], "channel.noise_variance");
  if (!ch.contains("power")) fail("channel.power", "missing");
  cfg.power = get_positive(ch["power"], "channel.power");

  if (j.contains("sweep_points")) {
    if (!j["sweep_points"].is_number_integer() || j["sweep_points"].get<long>() < 2)
      fail("sweep_points", "must be an integer >= 2");
    cfg.sweep_points = j["sweep_points"].get<int>();
  }
  if (j.contains("solver")) {
    if (!j["solver"].is_object()) fail("solver", "must be an object");
    cfg.solver = parse_solver(j["solver"]);
  }
  if (j.contains("sim")) {
    if (!j["sim"].is_object()) fail("sim", "must be an object");
    cfg.sim = parse_sim(j["sim"], cfg.power);
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string() || j["output_dir"].get<std::string>().empty())
      fail("output_dir", "must be a non-empty string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("formats")) {
    if (!j["formats"].is_array() || j["formats"].empty())
      fail("formats", "must be a non-empty array");
    cfg.formats.clear();
    for (const json& e : j["formats"]) {
      if (!e.is_string()) fail("formats", "entries must be strings");
      const std::string f = e.get<std::string>();
      if (f != "csv" && f != "json" && f != "svg")
        fail("formats", "'" + f + "' is not one of csv, json, svg");
      cfg.formats.push_back(f);
    }
  }
  if (j.contains("description")) {
    if (!j["description"].is_string()) fail("description", "must be a string");
    cfg.description = j["description"].get<std::string>();
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
  json j;
  j["channel"]["h1"] = complex_matrix_to_json(cfg.h1);
  j["channel"]["h2"] = complex_matrix_to_json(cfg.h2);
  j["channel"]["noise_variance"] = cfg.noise_variance;
  j["channel"]["power"] = cfg.power;
  j["sweep_points"] = cfg.sweep_points;
  j["solver"] = {{"max_iters", cfg.solver.max_iters},
                 {"grad_tol", cfg.solver.grad_tol},
                 {"step_init", cfg.solver.step_init},
                 {"backtrack_ratio", cfg.solver.backtrack_ratio},
                 {"armijo_c", cfg.solver.armijo_c}};
  if (cfg.sim) {
    j["sim"] = {{"block_lengths", cfg.sim->block_lengths},
                {"rate_fraction", cfg.sim->rate_fraction},
                {"trials", cfg.sim->trials},
                {"epsilon_p", cfg.sim->epsilon_p},
                {"delta", cfg.sim->delta},
                {"seed", cfg.sim->seed},
                {"fresh_codebook", cfg.sim->fresh_codebook}};
  }
  j["output_dir"] = cfg.output_dir;
  j["formats"] = cfg.formats;
  if (!cfg.description.empty()) j["description"] = cfg.description;
  return j.dump(2) + "\n";
}

std::vector<SimRow> simulate_block_lengths(const BidirectionalChannel& ch,
                                           const CovarianceMatrix& q,
                                           double target_r1_bits, double target_r2_bits,
                                           const SimScenario& sc) {
  std::vector<SimRow> rows;
  rows.reserve(sc.block_lengths.size());
  for (const int n : sc.block_lengths) {
    CodeConfig cc;
    cc.block_length = n;
    cc.epsilon_p = sc.epsilon_p > 0.0 ? sc.epsilon_p : 0.05 * ch.power;
    cc.delta = sc.delta;
    cc.fresh_codebook = sc.fresh_codebook;
    cc.seed = mix_seed(sc.seed, std::uint64_t(n));

    SimRow row;
    row.block_length = n;
    row.target_rate_bits = std::max(target_r1_bits, target_r2_bits);
    row.code_rate1_bits = code_rate(cc, target_r1_bits);
    row.code_rate2_bits = code_rate(cc, target_r2_bits);
    const long e2 = std::lround(double(n) * row.code_rate1_bits);  // |W2| exponent
    const long e1 = std::lround(double(n) * row.code_rate2_bits);  // |W1| exponent
    cc.m2 = std::size_t(1) << std::min<long>(e2, kMaxCandidateExponent);
    cc.m1 = std::size_t(1) << std::min<long>(e1, kMaxCandidateExponent);
    cc.rate1_bits = row.code_rate1_bits;
    cc.rate2_bits = row.code_rate2_bits;
    row.m1 = cc.m1;
    row.m2 = cc.m2;
    row.stats = run_trials(ch, q, cc, sc.trials);
    rows.push_back(row);
  }
  return rows;
}

std::string boundary_csv(const CapacityBoundary& boundary) {
  std::string out = "q1,q2,r1_bits,r2_bits,trace_q,kkt_residual\n";
  for (const BoundaryPoint& pt : boundary.points) {
    out += fmt12(pt.weight.w1()) + ',' + fmt12(pt.weight.w2()) + ',' +
           fmt12(pt.rates.r1) + ',' + fmt12(pt.rates.r2) + ',' +
           fmt12(pt.q_opt.trace()) + ',' + fmt12(pt.certificate.max_residual()) + '\n';
  }
  return out;
}

std::string sim_csv(const std::vector<SimRow>& rows) {
  std::string out =
      "n,target_rate_bits,code_rate1_bits,code_rate2_bits,m1,m2,trials,"
      "errors_node1,errors_node2,erasures_node1,erasures_node2,power_violations,"
      "error_rate_node1,error_rate_node2\n";
  for (const SimRow& r : rows) {
    const double t = double(r.stats.trials);
    out += std::to_string(r.block_length) + ',' + fmt12(r.target_rate_bits) + ',' +
           fmt12(r.code_rate1_bits) + ',' + fmt12(r.code_rate2_bits) + ',' +
           std::to_string(r.m1) + ',' + std::to_string(r.m2) + ',' +
           std::to_string(r.stats.trials) + ',' + std::to_string(r.stats.errors_node1) +
           ',' + std::to_string(r.stats.errors_node2) + ',' +
           std::to_string(r.stats.erasures_node1) + ',' +
           std::to_string(r.stats.erasures_node2) + ',' +
           std::to_string(r.stats.power_violations) + ',' +
           fmt12(double(r.stats.errors_node1) / t) + ',' +
           fmt12(double(r.stats.errors_node2) / t) + '\n';
  }
  return out;
}

namespace {

json certificate_json(const KktCertificate& cert) {
  return {{"mu", cert.mu},
          {"stationarity_residual", cert.stationarity_residual},
          {"comp_slack_trace", cert.comp_slack_trace},
          {"comp_slack_cone", cert.comp_slack_cone}};
}

json point_json(const BoundaryPoint& pt) {
  return {{"w1", pt.weight.w1()},
          {"w2", pt.weight.w2()},
          {"r1_bits", pt.rates.r1},
          {"r2_bits", pt.rates.r2},
          {"trace_q", pt.q_opt.trace()},
          {"certified", pt.certified},
          {"kkt", certificate_json(pt.certificate)}};
}

}  // namespace

std::string summary_json(const CapacityBoundary& boundary, const ScenarioConfig& cfg) {
  json j;
  j["sweep_points"] = int(boundary.points.size());
  j["endpoint_a"] = point_json(boundary.endpoint_a);
  j["endpoint_b"] = point_json(boundary.endpoint_b);
  j["maxmin_point"] = {{"r1_bits", boundary.maxmin_point.r1},
                       {"r2_bits", boundary.maxmin_point.r2},
                       {"converged", boundary.maxmin_converged}};
  const double xr = std::min(boundary.maxmin_point.r1, boundary.maxmin_point.r2);
  j["xor_point"] = {{"r1_bits", xr}, {"r2_bits", xr}};
  j["partial"] = boundary.partial;
  j["failed_weights"] = boundary.failed_weights;
  j["noise_variance"] = cfg.noise_variance;
  j["power"] = cfg.power;
  if (!cfg.description.empty()) j["description"] = cfg.description;
  return j.dump(2) + "\n";
}

namespace {

struct PlotFrame {
  double xmax, ymax;
  static constexpr double kW = 640, kH = 480;
  static constexpr double kLeft = 72, kRight = 24, kTop = 24, kBottom = 60;
  double px(double r1) const { return kLeft + (kW - kLeft - kRight) * (r1 / xmax); }
  double py(double r2) const { return kH - kBottom - (kH - kTop - kBottom) * (r2 / ymax); }
};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string plot_svg(const CapacityBoundary& boundary) {
  PlotFrame f;
  double max_r1 = 0.0, max_r2 = 0.0;
  for (const BoundaryPoint& pt : boundary.points) {
    max_r1 = std::max(max_r1, pt.rates.r1);
    max_r2 = std::max(max_r2, pt.rates.r2);
  }
  f.xmax = (max_r1 > 1e-9 ? max_r1 : 1.0) * 1.12;
  f.ymax = (max_r2 > 1e-9 ? max_r2 : 1.0) * 1.12;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
       "viewBox=\"0 0 640 480\">\n";
  s << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";

  // shaded downward hull: origin, up the R2 axis, along the boundary, back
  // to the R1 axis
  s << "<polygon fill=\"#cfe3f7\" stroke=\"none\" points=\"";
  s << fmt2(f.px(0)) << ',' << fmt2(f.py(0)) << ' ';
  s << fmt2(f.px(0)) << ',' << fmt2(f.py(boundary.endpoint_b.rates.r2)) << ' ';
  for (const BoundaryPoint& pt : boundary.points)
    s << fmt2(f.px(pt.rates.r1)) << ',' << fmt2(f.py(pt.rates.r2)) << ' ';
  s << fmt2(f.px(boundary.endpoint_a.rates.r1)) << ',' << fmt2(f.py(0));
  s << "\"/>\n";

  s << "<polyline fill=\"none\" stroke=\"#1f62a8\" stroke-width=\"2\" points=\"";
  for (const BoundaryPoint& pt : boundary.points)
    s << fmt2(f.px(pt.rates.r1)) << ',' << fmt2(f.py(pt.rates.r2)) << ' ';
  s << "\"/>\n";

  // axes with ticks
  s << "<line x1=\"" << fmt2(f.px(0)) << "\" y1=\"" << fmt2(f.py(0)) << "\" x2=\""
    << fmt2(f.px(f.xmax)) << "\" y2=\"" << fmt2(f.py(0))
    << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  s << "<line x1=\"" << fmt2(f.px(0)) << "\" y1=\"" << fmt2(f.py(0)) << "\" x2=\""
    << fmt2(f.px(0)) << "\" y2=\"" << fmt2(f.py(f.ymax))
    << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = f.xmax * t / 4.0, yv = f.ymax * t / 4.0;
    s << "<line x1=\"" << fmt2(f.px(xv)) << "\" y1=\"" << fmt2(f.py(0)) << "\" x2=\""
      << fmt2(f.px(xv)) << "\" y2=\"" << fmt2(f.py(0) + 5) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << fmt2(f.px(xv)) << "\" y=\"" << fmt2(f.py(0) + 20)
      << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt2(xv) << "</text>\n";
    s << "<line x1=\"" << fmt2(f.px(0)) << "\" y1=\"" << fmt2(f.py(yv)) << "\" x2=\""
      << fmt2(f.px(0) - 5) << "\" y2=\"" << fmt2(f.py(yv)) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << fmt2(f.px(0) - 8) << "\" y=\"" << fmt2(f.py(yv) + 4)
      << "\" font-size=\"12\" text-anchor=\"end\">" << fmt2(yv) << "</text>\n";
  }
  s << "<text x=\"" << fmt2((f.px(0) + f.px(f.xmax)) / 2) << "\" y=\"472\" "
       "font-size=\"14\" text-anchor=\"middle\">R1 (bits per channel use)</text>\n";
  s << "<text x=\"16\" y=\"" << fmt2((f.py(0) + f.py(f.ymax)) / 2)
    << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << fmt2((f.py(0) + f.py(f.ymax)) / 2) << ")\">R2 (bits per channel use)</text>\n";

  const auto marker = [&](const RatePair& r, const char* name, double dx, double dy) {
    s << "<circle cx=\"" << fmt2(f.px(r.r1)) << "\" cy=\"" << fmt2(f.py(r.r2))
      << "\" r=\"4\" fill=\"#b02318\"/>\n";
    s << "<text x=\"" << fmt2(f.px(r.r1) + dx) << "\" y=\"" << fmt2(f.py(r.r2) + dy)
      << "\" font-size=\"14\" font-weight=\"bold\">" << name << "</text>\n";
  };
  marker(boundary.endpoint_a.rates, "A", 8, 4);
  marker(boundary.endpoint_b.rates, "B", 8, -6);
  marker(boundary.maxmin_point, "C", 8, -6);

  s << "</svg>\n";
  return s.str();
}

void emit_plot(const CapacityBoundary& boundary, const std::string& path) {
  write_text_file(path, plot_svg(boundary));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

int run_scenario(const ScenarioConfig& cfg) {
  const BidirectionalChannel ch = cfg.channel();
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);

  const CapacityBoundary boundary = sweep_boundary(ch, cfg.sweep_points, cfg.solver);
  if (cfg.wants("csv")) write_text_file((dir / "boundary.csv").string(), boundary_csv(boundary));
  if (cfg.wants("json")) write_text_file((dir / "summary.json").string(), summary_json(boundary, cfg));
  if (cfg.wants("svg")) emit_plot(boundary, (dir / "region.svg").string());

  if (cfg.sim) {
    const MaxminResult mm = maxmin_rate(ch, cfg.solver);
    const double base = std::min(mm.rates.r1, mm.rates.r2);
    const double target = cfg.sim->rate_fraction * base;
    const std::vector<SimRow> rows = simulate_block_lengths(ch, mm.q, target, target, *cfg.sim);
    if (cfg.wants("csv")) write_text_file((dir / "sim.csv").string(), sim_csv(rows));
  }
  return (boundary.partial || !boundary.maxmin_converged) ? 2 : 0;
}

}  // namespace bdbc
