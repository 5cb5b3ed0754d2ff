#pragma once

#include <atomic>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fluxband/analysis.hpp"
#include "fluxband/dynamics.hpp"
#include "fluxband/io.hpp"
#include "fluxband/svg.hpp"

namespace fluxband {

constexpr int kConfigSchemaVersion = 1;

/// One sweep axis: a parameter name and an inclusive linear range.
struct SweepAxis {
  std::string param;  // gamma | v | J | r | phi
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;
};

/// Everything one invocation needs, with every value resolved to a number
/// (symbolic angles and "fb" are expanded at parse time).  Serialized to
/// config.json on every run; re-running that file reproduces the run.
struct RunConfig {
  std::string command;

  // lattice
  double gamma = 0.0;
  double v = 1.0;
  double j = 0.0;
  double r = 1.0;
  double phi = 0.0;
  int n_cells = 10;
  std::string boundary = "periodic";

  // shared numerics/output
  int n_k = 501;
  std::string out_dir = "out";
  std::vector<std::string> formats = {"csv", "json", "svg"};

  // phase
  int grid_nu = 100;
  int grid_nv = 100;
  double u_max = 3.0;
  double v_max = 3.0;

  // eps
  bool diabolic = false;

  // spectrum
  std::string dump_matrix;  // "", "csv", "binary", "both"

  // cls / evolve initial state
  std::string state_kind = "edge-two-cell";
  std::string side = "left";
  int center = 2;

  // evolve
  double t_final = 20.0;
  double dt = 0.01;
  int stride = 10;

  // sweep
  std::vector<SweepAxis> axes;
  int workers = 0;  // 0: auto (hardware), overridden by FLUXBAND_WORKERS
};

inline LatticeParams lattice_from(const RunConfig& cfg) {
  Boundary b;
  if (cfg.boundary == "periodic")
    b = Boundary::Periodic;
  else if (cfg.boundary == "open")
    b = Boundary::Open;
  else
    throw std::invalid_argument("boundary must be 'periodic' or 'open'");
  return make_lattice_params(cfg.gamma, cfg.v, cfg.j, cfg.r, cfg.phi, cfg.n_cells, b);
}

// ---------------------------------------------------------------------------
// config (de)serialization

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["command"] = c.command;
  j["lattice"] = {{"gamma", c.gamma}, {"v", c.v},     {"J", c.j},
                  {"r", c.r},         {"phi", c.phi}, {"cells", c.n_cells},
                  {"boundary", c.boundary}};
  j["grid"] = {{"n_k", c.n_k}};
  j["output"] = {{"dir", c.out_dir}, {"formats", c.formats}};
  j["phase"] = {{"grid_nu", c.grid_nu},
                {"grid_nv", c.grid_nv},
                {"u_max", c.u_max},
                {"v_max", c.v_max}};
  j["eps"] = {{"diabolic", c.diabolic}};
  j["spectrum"] = {{"dump_matrix", c.dump_matrix}};
  j["state"] = {{"kind", c.state_kind}, {"side", c.side}, {"center", c.center}};
  j["evolve"] = {{"t_final", c.t_final}, {"dt", c.dt}, {"stride", c.stride}};
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : c.axes)
    axes.push_back({{"param", a.param}, {"lo", a.lo}, {"hi", a.hi}, {"steps", a.steps}});
  j["sweep"] = {{"axes", axes}, {"workers", c.workers}};
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != kConfigSchemaVersion)
    throw std::invalid_argument("unsupported config schema version");
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  const auto& lat = j.at("lattice");
  c.gamma = lat.at("gamma").get<double>();
  c.v = lat.at("v").get<double>();
  c.j = lat.at("J").get<double>();
  c.r = lat.at("r").get<double>();
  c.phi = lat.at("phi").get<double>();
  c.n_cells = lat.at("cells").get<int>();
  c.boundary = lat.at("boundary").get<std::string>();
  c.n_k = j.at("grid").at("n_k").get<int>();
  c.out_dir = j.at("output").at("dir").get<std::string>();
  c.formats = j.at("output").at("formats").get<std::vector<std::string>>();
  const auto& ph = j.at("phase");
  c.grid_nu = ph.at("grid_nu").get<int>();
  c.grid_nv = ph.at("grid_nv").get<int>();
  c.u_max = ph.at("u_max").get<double>();
  c.v_max = ph.at("v_max").get<double>();
  c.diabolic = j.at("eps").at("diabolic").get<bool>();
  c.dump_matrix = j.at("spectrum").at("dump_matrix").get<std::string>();
  const auto& st = j.at("state");
  c.state_kind = st.at("kind").get<std::string>();
  c.side = st.at("side").get<std::string>();
  c.center = st.at("center").get<int>();
  const auto& ev = j.at("evolve");
  c.t_final = ev.at("t_final").get<double>();
  c.dt = ev.at("dt").get<double>();
  c.stride = ev.at("stride").get<int>();
  const auto& sw = j.at("sweep");
  for (const auto& a : sw.at("axes")) {
    SweepAxis ax;
    ax.param = a.at("param").get<std::string>();
    ax.lo = a.at("lo").get<double>();
    ax.hi = a.at("hi").get<double>();
    ax.steps = a.at("steps").get<int>();
    c.axes.push_back(ax);
  }
  c.workers = sw.at("workers").get<int>();
  return c;
}

// ---------------------------------------------------------------------------
// small parsers

/// Angles accept plain decimals and pi fractions: "pi", "-pi/2", "2pi/3",
/// "0.5pi", "3pi/4", "1.2".
inline double parse_angle(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw std::invalid_argument("empty angle");
  double sign = 1.0;
  std::size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    sign = (s[0] == '-') ? -1.0 : 1.0;
    pos = 1;
  }
  const auto to_number = [](const std::string& t) {
    std::size_t used = 0;
    double val = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("bad number in angle: " + t);
    return val;
  };
  const std::size_t pi_at = s.find("pi", pos);
  if (pi_at == std::string::npos) return sign * to_number(s.substr(pos));
  const std::string pre = s.substr(pos, pi_at - pos);
  const std::string post = s.substr(pi_at + 2);
  double value = pre.empty() ? 1.0 : to_number(pre);
  if (!post.empty()) {
    if (post[0] != '/') throw std::invalid_argument("expected '/denominator' after pi");
    const double den = to_number(post.substr(1));
    if (den == 0.0) throw std::invalid_argument("zero denominator in angle");
    value /= den;
  }
  return sign * value * M_PI;
}

/// "fb" resolves to the flat-band value J*sin(phi); anything else must be a
/// plain number.
inline double parse_gamma(const std::string& text, double j, double phi) {
  if (text == "fb") {
    const FlatBand fb = flat_band_condition(j, phi);
    if (fb.needs_negative_gamma)
      throw std::invalid_argument(
          "flat-band gamma is negative for this flux; gamma must be >= 0");
    return fb.gamma;
  }
  std::size_t used = 0;
  const double val = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad gamma: " + text);
  return val;
}

inline SweepAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("expected PARAM=lo:hi:steps, got " + text);
  SweepAxis ax;
  ax.param = text.substr(0, eq);
  static const std::set<std::string> names = {"gamma", "v", "J", "r", "phi"};
  if (!names.count(ax.param))
    throw std::invalid_argument("unknown sweep parameter: " + ax.param);
  const std::string rest = text.substr(eq + 1);
  std::istringstream is(rest);
  std::string lo, hi, steps;
  if (!std::getline(is, lo, ':') || !std::getline(is, hi, ':') || !std::getline(is, steps))
    throw std::invalid_argument("expected PARAM=lo:hi:steps, got " + text);
  ax.lo = (ax.param == "phi") ? parse_angle(lo) : std::stod(lo);
  ax.hi = (ax.param == "phi") ? parse_angle(hi) : std::stod(hi);
  ax.steps = std::stoi(steps);
  if (ax.steps < 1) throw std::invalid_argument("sweep needs at least 1 step");
  return ax;
}

inline int effective_workers(int requested) {
  if (const char* env = std::getenv("FLUXBAND_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  if (requested >= 1) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// ---------------------------------------------------------------------------
// command implementations

namespace detail {

inline bool wants(const RunConfig& cfg, const char* fmt) {
  for (const auto& f : cfg.formats)
    if (f == fmt) return true;
  return false;
}

inline std::ofstream open_out(const RunConfig& cfg, const std::string& name,
                              bool binary = false) {
  const std::filesystem::path path = std::filesystem::path(cfg.out_dir) / name;
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::invalid_argument("cannot write " + path.string());
  return os;
}

inline void write_config(const RunConfig& cfg) {
  auto os = open_out(cfg, "config.json");
  os << to_json(cfg).dump(2) << '\n';
}

inline void run_bands(const RunConfig& cfg) {
  const LatticeParams par = lattice_from(cfg);
  const BandStructure bs = band_structure(par, cfg.n_k);
  if (wants(cfg, "csv")) {
    auto os = open_out(cfg, "bands.csv");
    write_bands_csv(os, bs);
  }
  if (wants(cfg, "svg")) {
    const std::vector<std::string> colors = {"#1f6fb2", "#b23a1f", "#3a9e4f"};
    svg::Panel re, im;
    re.title = "band energies";
    re.x_label = "k";
    re.y_label = "Re E";
    im.x_label = "k";
    im.y_label = "Im E";
    for (int b = 0; b < 3; ++b) {
      svg::Series sr, si;
      sr.color = si.color = colors[b];
      sr.x = si.x = bs.k_grid;
      for (const Complex& e : bs.bands[b]) {
        sr.y.push_back(e.real());
        si.y.push_back(e.imag());
      }
      re.series.push_back(std::move(sr));
      im.series.push_back(std::move(si));
    }
    auto os = open_out(cfg, "bands.svg");
    os << svg::render_panels({re, im});
  }
}

inline void run_phase(const RunConfig& cfg) {
  if (cfg.grid_nu < 1 || cfg.grid_nv < 1 || cfg.u_max <= 0.0 || cfg.v_max <= 0.0)
    throw std::invalid_argument("phase grid must be positive");
  nlohmann::json ep_counts = nlohmann::json::array();
  nlohmann::json locations = nlohmann::json::array();
  nlohmann::json boundary = nlohmann::json::array();
  for (int iv = 0; iv < cfg.grid_nv; ++iv) {
    const double vv = (iv + 0.5) * cfg.v_max / cfg.grid_nv;
    nlohmann::json row_c = nlohmann::json::array();
    nlohmann::json row_l = nlohmann::json::array();
    nlohmann::json row_b = nlohmann::json::array();
    for (int iu = 0; iu < cfg.grid_nu; ++iu) {
      const double uu = (iu + 0.5) * cfg.u_max / cfg.grid_nu;
      // realize u = J*|cos(phi)| with J = u at zero flux; r sets the unit
      const PhaseClassification pc = classify_phase(uu, vv, 1.0, 0.0);
      row_c.push_back(pc.ep_count);
      row_l.push_back(static_cast<int>(pc.location));
      row_b.push_back(pc.boundary_case);
    }
    ep_counts.push_back(std::move(row_c));
    locations.push_back(std::move(row_l));
    boundary.push_back(std::move(row_b));
  }
  nlohmann::json out;
  out["schema_version"] = kConfigSchemaVersion;
  out["grid"] = {{"u_over_r", {{"n", cfg.grid_nu}, {"max", cfg.u_max}}},
                 {"v_over_r", {{"n", cfg.grid_nv}, {"max", cfg.v_max}}},
                 {"sampling", "cell-center"}};
  out["location_legend"] = {{"0", "inside_gap"}, {"1", "intersecting"}, {"2", "outside_bands"}};
  out["ep_counts"] = std::move(ep_counts);
  out["locations"] = std::move(locations);
  out["boundary_case"] = std::move(boundary);
  auto os = open_out(cfg, "phase_map.json");
  os << out.dump() << '\n';
}

inline const char* order_label(DegeneracyOrder o) {
  switch (o) {
    case DegeneracyOrder::EP2: return "EP2";
    case DegeneracyOrder::EP3: return "EP3";
    default: return "DP";
  }
}

inline void run_eps(const RunConfig& cfg) {
  const LatticeParams par = lattice_from(cfg);
  auto os = open_out(cfg, "eps.csv");
  os << "k,order,re,im,merged\n";
  if (cfg.diabolic) {
    if (par.j_coupling != 0.0 || par.gamma != 0.0)
      throw std::invalid_argument("--diabolic applies to the J = 0, gamma = 0 lattice");
    for (double k : diabolic_points(par.v, par.r))
      os << format_g15(k) << ",DP,0,0," << (std::abs(k) == M_PI ? 1 : 0) << '\n';
    return;
  }
  for (const DegeneracyPoint& pt : find_exceptional_points(par))
    os << format_g15(pt.k) << ',' << order_label(pt.order) << ','
       << format_g15(pt.energy.real()) << ',' << format_g15(pt.energy.imag()) << ','
       << (pt.merged ? 1 : 0) << '\n';
}

inline void run_spectrum(const RunConfig& cfg) {
  const LatticeParams par = lattice_from(cfg);
  const RealSpaceHamiltonian h = real_space_hamiltonian(par);
  const EigenDecomposition dec = eigendecompose(h.matrix);
  if (wants(cfg, "csv")) {
    auto os = open_out(cfg, "spectrum.csv");
    write_spectrum_csv(os, dec);
  }
  if (cfg.dump_matrix == "csv" || cfg.dump_matrix == "both") {
    auto os = open_out(cfg, "hamiltonian.csv");
    write_matrix_csv(os, h.matrix);
  }
  if (cfg.dump_matrix == "binary" || cfg.dump_matrix == "both") {
    auto os = open_out(cfg, "hamiltonian.bin", true);
    write_matrix_binary(os, h.matrix);
  } else if (!cfg.dump_matrix.empty() && cfg.dump_matrix != "csv" &&
             cfg.dump_matrix != "both") {
    throw std::invalid_argument("--dump-matrix takes csv, binary or both");
  }
}

/// Initial state plus the cells it lives on.
inline std::pair<StateVector, std::set<int>> build_state(const RunConfig& cfg,
                                                         const LatticeParams& par) {
  const int n = par.n_cells;
  if (cfg.state_kind == "edge-two-cell" || cfg.state_kind == "edge-three-cell") {
    const EdgeModeVariant variant = (cfg.state_kind == "edge-two-cell")
                                        ? EdgeModeVariant::TwoCell
                                        : EdgeModeVariant::ThreeCell;
    Side side;
    if (cfg.side == "left")
      side = Side::Left;
    else if (cfg.side == "right")
      side = Side::Right;
    else
      throw std::invalid_argument("side must be 'left' or 'right'");
    const int width = (variant == EdgeModeVariant::TwoCell) ? 2 : 3;
    std::set<int> support;
    for (int i = 0; i < width; ++i)
      support.insert(side == Side::Left ? 1 + i : n - i);
    return {edge_mode(par, variant, side), support};
  }
  if (cfg.state_kind == "inner") {
    std::set<int> support = {cfg.center};
    if (is_chiral_point(par)) {
      support.insert((cfg.center - 2 + n) % n + 1);
      support.insert(cfg.center % n + 1);
    }
    return {inner_cls(par, cfg.center), support};
  }
  if (cfg.state_kind == "cell") {
    std::vector<Complex> zeta(n, Complex(0.0));
    if (cfg.center < 1 || cfg.center > n)
      throw std::invalid_argument("center cell outside 1..N");
    zeta[cfg.center - 1] = Complex(1.0);
    return {flat_band_superposition(par, zeta), {cfg.center}};
  }
  if (cfg.state_kind == "uniform") {
    std::vector<Complex> zeta(n, Complex(1.0));
    std::set<int> support;
    for (int j = 1; j <= n; ++j) support.insert(j);
    return {flat_band_superposition(par, zeta), support};
  }
  throw std::invalid_argument("unknown state kind: " + cfg.state_kind);
}

inline void run_cls(const RunConfig& cfg) {
  const LatticeParams par = lattice_from(cfg);
  const auto [psi, support] = build_state(cfg, par);
  if (wants(cfg, "csv")) {
    auto os = open_out(cfg, "state.csv");
    write_state_csv(os, psi);
  }
  if (wants(cfg, "json")) {
    const RealSpaceHamiltonian h = real_space_hamiltonian(par);
    const Complex e(cls_energy(par), 0.0);
    nlohmann::json out;
    out["schema_version"] = kConfigSchemaVersion;
    out["energy"] = {{"re", e.real()}, {"im", e.imag()}};
    out["residual"] = eigenstate_residual(h, psi, e);
    out["support_cells"] = std::vector<int>(support.begin(), support.end());
    auto os = open_out(cfg, "verify.json");
    os << out.dump(2) << '\n';
  }
}

inline void run_evolve(const RunConfig& cfg) {
  const LatticeParams par = lattice_from(cfg);
  const auto [psi0, support] = build_state(cfg, par);
  const RealSpaceHamiltonian h = real_space_hamiltonian(par);
  const Trajectory tr = evolve(h, psi0, cfg.t_final, cfg.dt, cfg.stride);

  if (wants(cfg, "csv")) {
    auto os = open_out(cfg, "trajectory.csv");
    write_trajectory_csv(os, tr, par.n_cells);
  }
  if (wants(cfg, "svg")) {
    const std::size_t max_cols = 360;
    const std::size_t hop = std::max<std::size_t>(1, tr.times.size() / max_cols);
    std::vector<std::vector<double>> cols;
    for (std::size_t i = 0; i < tr.times.size(); i += hop) {
      const auto& inten = tr.intensities[i];
      cols.emplace_back(inten.data(), inten.data() + inten.size());
    }
    auto os = open_out(cfg, "trajectory.svg");
    os << svg::render_heatmap(cols, "time", "site (A1,B1,C1,...)", "site intensities");
  }
  if (wants(cfg, "json")) {
    const double n0 = std::sqrt(tr.intensities.front().sum());
    double drift = 0.0;
    for (const auto& inten : tr.intensities)
      drift = std::max(drift, std::abs(std::sqrt(inten.sum()) / n0 - 1.0));
    nlohmann::json out;
    out["schema_version"] = kConfigSchemaVersion;
    out["overflow_truncated"] = tr.overflow_truncated;
    out["samples"] = tr.times.size();
    out["final_time"] = tr.times.back();
    out["support_cells"] = std::vector<int>(support.begin(), support.end());
    out["max_intensity_outside_support"] =
        intensity_outside_support(tr, support, par.n_cells);
    out["max_norm_drift"] = drift;
    auto os = open_out(cfg, "summary.json");
    os << out.dump(2) << '\n';
  }
  if (tr.overflow_truncated)
    throw NumericalError("time evolution overflowed and was truncated (see outputs)");
}

struct SweepPoint {
  std::vector<double> values;  // one per axis
  std::string row;             // CSV payload
};

inline void run_sweep(const RunConfig& cfg) {
  if (cfg.axes.empty() || cfg.axes.size() > 2)
    throw std::invalid_argument("sweep needs one or two --vary axes");
  long total = 1;
  for (const auto& ax : cfg.axes) total *= ax.steps;
  if (total < 1 || total > 1000000)
    throw std::invalid_argument("sweep grid must have between 1 and 1e6 points");

  const auto axis_value = [](const SweepAxis& ax, int i) {
    if (ax.steps == 1) return ax.lo;
    return ax.lo + (ax.hi - ax.lo) * i / (ax.steps - 1);
  };

  const int n_axes = static_cast<int>(cfg.axes.size());
  std::vector<std::optional<std::string>> rows(total);
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::string> errors;
  std::mutex error_mutex;

  const auto work = [&]() {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= total || failed.load()) break;
      try {
        RunConfig point = cfg;
        const int i0 = (n_axes == 2) ? static_cast<int>(i / cfg.axes[1].steps)
                                     : static_cast<int>(i);
        const int i1 = (n_axes == 2) ? static_cast<int>(i % cfg.axes[1].steps) : 0;
        std::vector<double> vals;
        for (int a = 0; a < n_axes; ++a) {
          const double val = axis_value(cfg.axes[a], a == 0 ? i0 : i1);
          vals.push_back(val);
          if (cfg.axes[a].param == "gamma") point.gamma = val;
          else if (cfg.axes[a].param == "v") point.v = val;
          else if (cfg.axes[a].param == "J") point.j = val;
          else if (cfg.axes[a].param == "r") point.r = val;
          else point.phi = val;
        }
        const LatticeParams par = lattice_from(point);
        const BandStructure bs = band_structure(par, cfg.n_k);
        const FlatBand fb = flat_band_condition(par.j_coupling, par.phi);
        double max_im = 0.0;
        for (const auto& band : bs.bands)
          for (const Complex& e : band) max_im = std::max(max_im, std::abs(e.imag()));
        const double flat_dev = flatness_deviation(bs, Complex(fb.energy, 0.0));
        const double fb_res = std::abs(par.gamma - fb.gamma);
        const PhaseClassification pc =
            classify_phase(par.j_coupling, par.v, par.r, par.phi);
        std::ostringstream row;
        row << i;
        for (double vv : vals) row << ',' << format_g15(vv);
        row << ',' << format_g15(max_im) << ',' << format_g15(flat_dev) << ','
            << format_g15(fb_res) << ',' << pc.ep_count << ','
            << (is_spectrum_real(bs, 1e-9) ? 1 : 0);
        rows[i] = row.str();
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(error_mutex);
        errors.push_back(ex.what());
        failed.store(true);
      }
    }
  };

  const int n_workers = std::min<long>(effective_workers(cfg.workers), total);
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  auto os = open_out(cfg, "sweep.csv");
  os << "index";
  for (const auto& ax : cfg.axes) os << ',' << ax.param;
  os << ",max_im,flat_deviation,fb_residual,ep_count,spectrum_real\n";
  for (long i = 0; i < total; ++i)
    if (rows[i]) os << *rows[i] << '\n';

  if (failed.load())
    throw NumericalError("sweep worker failed: " + errors.front() +
                         " (partial results written)");
}

}  // namespace detail

/// Execute one resolved configuration: create the output directory, write
/// config.json, then the command's data files.  Throws std::invalid_argument
/// for configuration problems and NumericalError for numerical failures.
inline void run(const RunConfig& cfg) {
  static const std::set<std::string> known_formats = {"csv", "json", "svg"};
  if (cfg.formats.empty()) throw std::invalid_argument("--formats must not be empty");
  for (const auto& f : cfg.formats)
    if (!known_formats.count(f)) throw std::invalid_argument("unknown format: " + f);
  if (cfg.n_k < 2) throw std::invalid_argument("--nk must be >= 2");

  std::filesystem::create_directories(cfg.out_dir);
  detail::write_config(cfg);

  if (cfg.command == "bands") detail::run_bands(cfg);
  else if (cfg.command == "phase") detail::run_phase(cfg);
  else if (cfg.command == "eps") detail::run_eps(cfg);
  else if (cfg.command == "spectrum") detail::run_spectrum(cfg);
  else if (cfg.command == "cls") detail::run_cls(cfg);
  else if (cfg.command == "evolve") detail::run_evolve(cfg);
  else if (cfg.command == "sweep") detail::run_sweep(cfg);
  else throw std::invalid_argument("unknown command: " + cfg.command);
}

namespace detail {

/// Canned demonstration setups for `evolve`: the 10-cell half-quantum-flux
/// chain with a confined excitation.  Explicit flags still win over the
/// preset's values.
inline RunConfig evolve_preset(const std::string& name) {
  RunConfig cfg;
  cfg.command = "evolve";
  cfg.gamma = 0.5;
  cfg.v = 1.5;
  cfg.j = 1.0;
  cfg.r = 1.0;
  cfg.phi = 0.5 * M_PI;
  cfg.n_cells = 10;
  cfg.boundary = "open";
  cfg.t_final = 20.0;
  cfg.dt = 0.01;
  cfg.stride = 10;
  if (name == "edge-confinement") {
    cfg.state_kind = "edge-two-cell";
    cfg.side = "left";
  } else if (name == "inner-confinement") {
    cfg.state_kind = "inner";
    cfg.center = 5;
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return cfg;
}

}  // namespace detail

/// Parse a full command line (without argv[0]) and execute it.  Returns the
/// process exit code: 0 on success, 2 for invalid arguments or configuration,
/// 3 for numerical failures.
inline int run_cli(const std::vector<std::string>& args) {
  RunConfig cfg;
  std::string config_path, gamma_text = "0", phi_text = "0", formats_text, preset;

  CLI::App app{"band engine for the flux-tuned gain/loss cross-stitch lattice"};
  app.require_subcommand(0, 1);
  app.add_option("--config", config_path,
                 "re-run a resolved config.json (ignores other options except --out)");
  std::string out_override;
  auto* out_opt = app.add_option("--out", out_override, "output directory override");

  struct CommonOpts {
    CLI::Option* gamma = nullptr;
    CLI::Option* v = nullptr;
    CLI::Option* j = nullptr;
    CLI::Option* r = nullptr;
    CLI::Option* phi = nullptr;
    CLI::Option* cells = nullptr;
    CLI::Option* boundary = nullptr;
  };
  std::map<std::string, CommonOpts> common;

  const auto add_common = [&](CLI::App* sub) {
    CommonOpts o;
    o.gamma = sub->add_option("--gamma", gamma_text,
                              "gain/loss rate, a number or 'fb' for J*sin(phi)");
    o.v = sub->add_option("--v", cfg.v, "intracell coupling v");
    o.j = sub->add_option("--J", cfg.j, "A-C coupling J");
    o.r = sub->add_option("--r", cfg.r, "intercell coupling r");
    o.phi = sub->add_option("--phi", phi_text, "flux, e.g. 1.2, pi/3, -pi/2, 2pi/3");
    o.cells = sub->add_option("--cells", cfg.n_cells, "number of unit cells");
    o.boundary = sub->add_option("--boundary", cfg.boundary, "periodic | open");
    sub->add_option("--nk", cfg.n_k, "momentum grid points");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--formats", formats_text, "comma list from csv,json,svg");
    common[sub->get_name()] = o;
    return sub;
  };

  auto* bands = add_common(app.add_subcommand("bands", "band structure over the zone"));
  auto* phase = add_common(
      app.add_subcommand("phase", "classify the flat-band phase over a (u, v) grid"));
  std::string grid_text;
  phase->add_option("--grid", grid_text, "both grid sizes at once, e.g. 100x100");
  phase->add_option("--grid-u", cfg.grid_nu, "grid points along J|cos phi|/r");
  phase->add_option("--grid-v", cfg.grid_nv, "grid points along v/r");
  phase->add_option("--u-max", cfg.u_max, "range of J|cos phi|/r");
  phase->add_option("--v-max", cfg.v_max, "range of v/r");
  auto* eps = add_common(
      app.add_subcommand("eps", "degeneracy points on the flat-band manifold"));
  eps->add_flag("--diabolic", cfg.diabolic,
                "list the Hermitian (J=0, gamma=0) band touchings instead");
  auto* spectrum = add_common(
      app.add_subcommand("spectrum", "real-space eigenvalues of the finite chain"));
  spectrum->add_option("--dump-matrix", cfg.dump_matrix,
                       "also write the Hamiltonian: csv, binary or both");
  auto* cls_cmd = add_common(
      app.add_subcommand("cls", "construct a compact localized or edge state"));
  auto* evolve_cmd =
      add_common(app.add_subcommand("evolve", "integrate an excitation in time"));
  for (CLI::App* sub : {cls_cmd, evolve_cmd}) {
    sub->add_option("--state", cfg.state_kind,
                    "edge-two-cell | edge-three-cell | inner | cell | uniform");
    sub->add_option("--side", cfg.side, "left | right (edge states)");
    sub->add_option("--center", cfg.center, "center cell for inner/cell states");
  }
  auto* tfin_opt = evolve_cmd->add_option("--t-final", cfg.t_final, "integration time");
  auto* dt_opt = evolve_cmd->add_option("--dt", cfg.dt, "step size cap");
  auto* stride_opt = evolve_cmd->add_option("--stride", cfg.stride, "record every n-th step");
  evolve_cmd->add_option("--preset", preset, "edge-confinement | inner-confinement");
  auto* sweep = add_common(
      app.add_subcommand("sweep", "scan 1 or 2 parameters over a linear grid"));
  std::vector<std::string> vary_text;
  sweep->add_option("--vary", vary_text, "axis spec PARAM=lo:hi:steps (once or twice)");
  sweep->add_option("--workers", cfg.workers,
                    "worker threads (FLUXBAND_WORKERS overrides, 0 = hardware)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    if (!config_path.empty()) {
      if (app.get_subcommands().size() > 0)
        throw std::invalid_argument("--config replaces the subcommand; drop one of them");
      std::ifstream is(config_path);
      if (!is) throw std::invalid_argument("cannot read config: " + config_path);
      nlohmann::json j;
      is >> j;
      RunConfig loaded = config_from_json(j);
      if (out_opt->count() > 0) loaded.out_dir = out_override;
      run(loaded);
      return 0;
    }

    if (app.get_subcommands().empty())
      throw CLI::CallForHelp();

    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();

    // An evolve preset provides defaults; explicitly given flags override it.
    if (cfg.command == "evolve" && !preset.empty()) {
      const RunConfig pre = detail::evolve_preset(preset);
      const CommonOpts& o = common[cfg.command];
      if (o.gamma->count() == 0) gamma_text = format_g15(pre.gamma);
      if (o.v->count() == 0) cfg.v = pre.v;
      if (o.j->count() == 0) cfg.j = pre.j;
      if (o.r->count() == 0) cfg.r = pre.r;
      if (o.phi->count() == 0) phi_text = format_g15(pre.phi);
      if (o.cells->count() == 0) cfg.n_cells = pre.n_cells;
      if (o.boundary->count() == 0) cfg.boundary = pre.boundary;
      if (sub->get_option("--state")->count() == 0) cfg.state_kind = pre.state_kind;
      if (sub->get_option("--side")->count() == 0) cfg.side = pre.side;
      if (sub->get_option("--center")->count() == 0) cfg.center = pre.center;
      if (tfin_opt->count() == 0) cfg.t_final = pre.t_final;
      if (dt_opt->count() == 0) cfg.dt = pre.dt;
      if (stride_opt->count() == 0) cfg.stride = pre.stride;
    }

    if (!grid_text.empty()) {
      const auto x = grid_text.find('x');
      if (x == std::string::npos)
        throw std::invalid_argument("--grid expects WIDTHxHEIGHT, e.g. 100x100");
      cfg.grid_nu = std::stoi(grid_text.substr(0, x));
      cfg.grid_nv = std::stoi(grid_text.substr(x + 1));
    }
    cfg.phi = normalize_flux(parse_angle(phi_text));
    cfg.gamma = parse_gamma(gamma_text, cfg.j, cfg.phi);
    if (!formats_text.empty()) {
      cfg.formats.clear();
      std::istringstream is(formats_text);
      std::string f;
      while (std::getline(is, f, ',')) cfg.formats.push_back(f);
    }
    for (const auto& text : vary_text) cfg.axes.push_back(parse_axis(text));

    (void)bands;
    run(cfg);
    return 0;
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help() << std::endl;
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 3;
  }
}

}  // namespace fluxband
