// s2lab: batch front-end for the S^2-valued anisotropic energy.
//
//   s2lab solve2d   | radial | sweep | constants | verify   [flags]
//
// Every run writes its artifacts plus manifest.json into --out.  Exit codes:
// 0 success, 2 invalid configuration, 3 solver non-convergence.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "flat_toml.hpp"
#include "json.hpp"
#include "s2lab/constants.hpp"
#include "s2lab/field_io.hpp"
#include "s2lab/minimize.hpp"
#include "s2lab/radial.hpp"
#include "s2lab/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace s2lab;

namespace {

constexpr const char* version = "0.1.0";

struct RunConfig {
  std::string command;
  std::string shape = "disk";
  double radius = 1.0;
  double lx = 1.0, ly = 1.0;
  std::size_t nr = 48, ntheta = 96, nx = 48, ny = 48;
  int dimension = 2;
  std::optional<double> kappa, kappa2;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  std::size_t seeds = 3;
  std::size_t max_iterations = 20000;
  double rtol = 1e-8, atol = 1e-10;
  std::string init = "random-uniform";
  std::string init_file;
  double dr = 1e-3;
  std::size_t jobs = 1;
  std::string mode = "radial";
  std::vector<double> kappas{0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> gammas{0.0, 0.1, 0.3, 0.5, 1.0, 2.0};
  std::string out = "out";
  std::string format = "csv";
};

// Flag values; unset flags leave the config-file value alone.
struct Flags {
  std::optional<std::string> config, out, format, shape, init, init_file, mode;
  std::optional<double> disk, kappa, kappa2, gamma, rtol, atol, dr, radius;
  std::vector<double> rect, kappas, gammas;
  std::optional<std::size_t> nr, ntheta, nx, ny, seeds, max_iterations, jobs;
  std::optional<int> dimension;
  std::optional<std::uint64_t> seed;
};

template <class T>
void take(std::optional<T> v, T& dst)
{
  if (v) dst = *v;
}

template <class T>
void take_count(std::optional<double> v, T& dst)
{
  if (v) {
    if (!(*v >= 0.0) || *v != std::floor(*v)) throw ValidationError("expected a nonnegative integer");
    dst = static_cast<T>(*v);
  }
}

void apply_file(const toml::Table& t, RunConfig& c)
{
  take(t.string("domain.shape"), c.shape);
  take(t.number("domain.R"), c.radius);
  take(t.number("domain.lx"), c.lx);
  take(t.number("domain.ly"), c.ly);
  take_count<std::size_t>(t.number("domain.nr"), c.nr);
  take_count<std::size_t>(t.number("domain.ntheta"), c.ntheta);
  take_count<std::size_t>(t.number("domain.nx"), c.nx);
  take_count<std::size_t>(t.number("domain.ny"), c.ny);
  take_count<int>(t.number("domain.N"), c.dimension);
  if (auto v = t.number("params.kappa")) c.kappa = v;
  if (auto v = t.number("params.kappa2")) c.kappa2 = v;
  take(t.number("params.gamma"), c.gamma);
  take_count<std::uint64_t>(t.number("solve.seed"), c.seed);
  take_count<std::size_t>(t.number("solve.seeds"), c.seeds);
  take_count<std::size_t>(t.number("solve.max_iterations"), c.max_iterations);
  take(t.number("solve.rtol"), c.rtol);
  take(t.number("solve.atol"), c.atol);
  take(t.string("solve.init"), c.init);
  take(t.string("solve.init_file"), c.init_file);
  take(t.number("solve.dr"), c.dr);
  take_count<std::size_t>(t.number("solve.jobs"), c.jobs);
  take(t.string("sweep.mode"), c.mode);
  take(t.numbers("sweep.kappas"), c.kappas);
  take(t.numbers("sweep.gammas"), c.gammas);
  take(t.string("output.dir"), c.out);
  take(t.string("output.format"), c.format);
}

void apply_flags(const Flags& f, RunConfig& c)
{
  take(f.out, c.out);
  take(f.format, c.format);
  take(f.shape, c.shape);
  if (f.disk) {
    c.shape = "disk";
    c.radius = *f.disk;
  }
  take(f.radius, c.radius);
  if (!f.rect.empty()) {
    if (f.rect.size() != 2) throw ValidationError("--rect expects LX,LY");
    c.shape = "rectangle";
    c.lx = f.rect[0];
    c.ly = f.rect[1];
  }
  take(f.nr, c.nr);
  take(f.ntheta, c.ntheta);
  take(f.nx, c.nx);
  take(f.ny, c.ny);
  take(f.dimension, c.dimension);
  if (f.kappa) c.kappa = f.kappa;
  if (f.kappa2) c.kappa2 = f.kappa2;
  take(f.gamma, c.gamma);
  take(f.seed, c.seed);
  take(f.seeds, c.seeds);
  take(f.max_iterations, c.max_iterations);
  take(f.rtol, c.rtol);
  take(f.atol, c.atol);
  take(f.init, c.init);
  take(f.init_file, c.init_file);
  take(f.dr, c.dr);
  take(f.jobs, c.jobs);
  take(f.mode, c.mode);
  if (!f.kappas.empty()) c.kappas = f.kappas;
  if (!f.gammas.empty()) c.gammas = f.gammas;
}

double resolve_kappa(const RunConfig& c)
{
  if (c.kappa2) {
    if (c.kappa) std::cerr << "warning: both kappa and kappa2 given; using kappa2\n";
    if (!(*c.kappa2 >= 0.0)) throw ValidationError("kappa2 must be >= 0");
    return std::sqrt(*c.kappa2);
  }
  return c.kappa.value_or(0.0);
}

Params make_params(const RunConfig& c)
{
  Params p{resolve_kappa(c), c.gamma, c.dimension};
  p.validate();
  return p;
}

Mesh make_mesh(const RunConfig& c)
{
  if (c.shape == "disk") return build_disk_mesh(c.nr, c.ntheta, c.radius);
  if (c.shape == "rectangle") return build_rectangle_mesh(c.nx, c.ny, c.lx, c.ly);
  throw ValidationError("unknown domain shape '" + c.shape + "'");
}

SolveOptions make_solve_options(const RunConfig& c)
{
  SolveOptions o;
  o.max_iterations = c.max_iterations;
  o.relative_tolerance = c.rtol;
  o.absolute_tolerance = c.atol;
  o.rng_seed = c.seed;
  o.init = parse_init_kind(c.init);
  o.init_file = c.init_file;
  o.validate();
  return o;
}

std::string hex64(std::uint64_t v)
{
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::uint64_t fnv1a(const std::string& path)
{
  std::ifstream is(path, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[4096];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

// Collects written files for the manifest.
class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir))
  {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ValidationError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  template <class Fn>
  void write(const std::string& name, Fn&& fn)
  {
    const fs::path p = dir_ / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ValidationError("cannot write " + p.string());
    fn(os);
    os.close();
    if (!os) throw ValidationError("failed writing " + p.string());
    files_.push_back(name);
  }

  void write_json(const std::string& name, const json& j)
  {
    write(name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }

  void manifest(const RunConfig& c, double seconds)
  {
    json m;
    m["tool"] = "s2lab";
    m["version"] = version;
    m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    m["compiler"] = __VERSION__;
    m["subcommand"] = c.command;
    m["seed"] = c.seed;
    m["wall_time_s"] = seconds;
    m["config"] = echo(c);
    json arts = json::array();
    for (const auto& f : files_) {
      const fs::path p = dir_ / f;
      arts.push_back({{"file", f}, {"bytes", fs::file_size(p)}, {"fnv1a64", hex64(fnv1a(p.string()))}});
    }
    m["artifacts"] = arts;
    std::ofstream os(dir_ / "manifest.json");
    os << m.dump(2) << '\n';
    if (!os) throw ValidationError("cannot write manifest");
  }

  static json echo(const RunConfig& c)
  {
    json j;
    j["domain"] = {{"shape", c.shape}, {"R", c.radius}, {"lx", c.lx},           {"ly", c.ly}, {"nr", c.nr},
                   {"ntheta", c.ntheta}, {"nx", c.nx},   {"ny", c.ny}, {"N", c.dimension}};
    j["params"] = {{"kappa", c.kappa ? json(*c.kappa) : json()},
                   {"kappa2", c.kappa2 ? json(*c.kappa2) : json()},
                   {"gamma", c.gamma}};
    j["solve"] = {{"seed", c.seed},   {"seeds", c.seeds},          {"max_iterations", c.max_iterations},
                  {"rtol", c.rtol},   {"atol", c.atol},            {"init", c.init},
                  {"dr", c.dr},       {"jobs", c.jobs}};
    j["sweep"] = {{"mode", c.mode}, {"kappas", c.kappas}, {"gammas", c.gammas}};
    j["output"] = {{"dir", c.out}, {"format", c.format}};
    return j;
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

json to_json(const EnergyBreakdown& e)
{
  return {{"dirichlet", e.dirichlet}, {"anisotropy", e.anisotropy}, {"boundary", e.boundary}, {"total", e.total}};
}

json to_json(const Params& p)
{
  return {{"kappa", p.kappa}, {"kappa2", p.kappa2()}, {"gamma", p.gamma}, {"N", p.dimension}};
}

json to_json(const SolveReport& r)
{
  return {{"iterations", r.iterations},
          {"converged", r.converged},
          {"classification", to_string(r.classification)},
          {"energy", to_json(r.energy)},
          {"gradient_norm", r.gradient_norm},
          {"initial_gradient_norm", r.initial_gradient_norm},
          {"residual", {{"interior", r.residual.interior}, {"boundary", r.residual.boundary}}}};
}

json to_json(const ThresholdReport& t)
{
  return {{"mesh", t.mesh},
          {"kappa", t.kappa},
          {"gamma", t.gamma},
          {"c_Omega", t.c_omega},
          {"delta_gamma", t.delta_gamma},
          {"kappa_gamma", t.kappa_gamma},
          {"c_trace", t.c_trace},
          {"gamma_kappa", t.gamma_kappa ? json(*t.gamma_kappa) : json()}};
}

json field_json(const Mesh& mesh, const SphereField& m)
{
  json arr = json::array();
  const auto p = mesh.nodes();
  for (std::size_t i = 0; i < m.size(); ++i)
    arr.push_back({{"x", p[i].x}, {"y", p[i].y}, {"m1", m[i][0]}, {"m2", m[i][1]}, {"m3", m[i][2]}});
  return arr;
}

void check_format(const RunConfig& c)
{
  if (c.format != "csv" && c.format != "json") throw ValidationError("--format must be csv or json");
  if (c.jobs == 0) throw ValidationError("--jobs must be >= 1");
}

int run_solve2d(const RunConfig& c)
{
  const Params params = make_params(c);
  const Mesh mesh = make_mesh(c);
  const SolveOptions opts = make_solve_options(c);
  Output out(c.out);
  const auto t0 = std::chrono::steady_clock::now();

  const auto res = minimize_sphere_field(mesh, params, opts);
  if (c.format == "csv")
    out.write("field.csv", [&](std::ostream& os) { write_field_csv(os, mesh, res.field); });
  else
    out.write_json("field.json", field_json(mesh, res.field));
  out.write("field.bin", [&](std::ostream& os) { write_field_binary(os, res.field); });
  out.write("trace.csv", [&](std::ostream& os) {
    os << "iteration,energy\n";
    for (std::size_t k = 0; k < res.report.energy_trace.size(); ++k)
      os << k << ',' << format_double(res.report.energy_trace[k]) << '\n';
  });
  const auto cs = constant_state_energies(mesh, params);
  json rep;
  rep["params"] = to_json(params);
  rep["mesh"] = describe(mesh);
  rep["report"] = to_json(res.report);
  rep["constant_states"] = {{"e3", cs.e3_energy}, {"inplane", cs.inplane_energy ? json(*cs.inplane_energy) : json()}};
  out.write_json("report.json", rep);
  out.manifest(c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  std::cout << "classification " << to_string(res.report.classification) << ", energy "
            << format_double(res.report.energy.total) << ", iterations " << res.report.iterations << '\n';
  if (!res.report.converged) {
    std::cerr << "error: no convergence within " << opts.max_iterations << " iterations\n";
    return 3;
  }
  return 0;
}

int run_radial(const RunConfig& c)
{
  const Params params = make_params(c);
  RadialOptions ro;
  ro.dr = c.dr;
  ro.validate();
  if (!(c.radius > 0.0)) throw ValidationError("R must be > 0");
  if (c.dr > c.radius / 100.0) throw ValidationError("--dr must be <= R/100");
  Output out(c.out);
  const auto t0 = std::chrono::steady_clock::now();

  const RadialSolution s = solve_radial_bvp(params, c.radius, c.dimension, ro);
  if (c.format == "csv") {
    out.write("profile.csv", [&](std::ostream& os) { write_profile_csv(os, s.profile); });
  } else {
    json j = json::array();
    for (std::size_t k = 0; k < s.profile.u.size(); ++k) {
      const double phi = 0.5 * s.profile.u[k];
      j.push_back({{"r", s.profile.r[k]},
                   {"u", s.profile.u[k]},
                   {"u_prime", s.profile.du[k]},
                   {"phi", phi},
                   {"m1", std::sin(phi)},
                   {"m3", std::cos(phi)}});
    }
    out.write_json("profile.json", j);
  }
  out.write("roots.csv", [&](std::ostream& os) {
    os << "u0,closure,energy\n";
    for (const auto& r : s.roots)
      os << format_double(r.u0) << ',' << format_double(r.closure) << ',' << format_double(r.energy) << '\n';
  });
  const auto mono = check_monotone(s.profile);
  json rep;
  rep["params"] = to_json(params);
  rep["R"] = c.radius;
  rep["dr"] = s.profile.dr;
  rep["u0"] = s.profile.u0;
  rep["u_R"] = s.profile.u.back();
  rep["classification"] = to_string(s.classification);
  rep["energy"] = to_json(radial_energy(s.profile));
  rep["closure_residual"] = closure_residual(s.profile);
  rep["monotone"] = {{"is_monotone", mono.monotone}, {"max_violation", mono.max_violation}};
  rep["roots_found"] = s.roots.size();
  out.write_json("report.json", rep);
  out.manifest(c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  std::cout << "classification " << to_string(s.classification) << ", u0 " << format_double(s.profile.u0)
            << ", energy " << format_double(radial_energy(s.profile).total) << '\n';
  return 0;
}

int run_sweep(const RunConfig& c)
{
  if (c.kappas.empty() || c.gammas.empty()) throw ValidationError("sweep grids must be nonempty");
  for (double k : c.kappas) Params{k, 1.0}.validate();
  for (double g : c.gammas) Params{0.0, g}.validate();
  SweepOptions so;
  so.seeds = c.seeds;
  so.base_seed = c.seed;
  so.solve = make_solve_options(c);
  so.radial.dr = c.dr;
  so.radial.validate();
  so.jobs = c.jobs;

  PhaseDiagram d;
  std::optional<Mesh> mesh;
  if (c.mode == "2d") {
    mesh = make_mesh(c);
  } else if (c.mode != "radial") {
    throw ValidationError("sweep mode must be radial or 2d");
  }
  Output out(c.out);
  const auto t0 = std::chrono::steady_clock::now();
  d = mesh ? phase_diagram_sweep(*mesh, c.kappas, c.gammas, so)
           : phase_diagram_sweep(c.radius, c.dimension, c.kappas, c.gammas, so);

  if (c.format == "csv") {
    out.write("phase_diagram.csv", [&](std::ostream& os) { write_phase_diagram_csv(os, d); });
  } else {
    json j = json::array();
    for (const auto& cell : d.cells)
      j.push_back({{"kappa", cell.kappa},
                   {"gamma", cell.gamma},
                   {"class", to_string(cell.classification)},
                   {"E_min", cell.e_min},
                   {"E_e3", cell.e_e3},
                   {"E_inplane", std::isfinite(cell.e_inplane) ? json(cell.e_inplane) : json()},
                   {"kappa_gamma", cell.kappa_gamma},
                   {"gamma_kappa", cell.gamma_kappa ? json(*cell.gamma_kappa) : json()}});
    out.write_json("phase_diagram.json", j);
  }
  json rep;
  rep["mode"] = c.mode;
  rep["soundness_violations"] = d.soundness_violations;
  json failures = json::array();
  for (const auto& cell : d.cells)
    if (!cell.error.empty()) failures.push_back({{"kappa", cell.kappa}, {"gamma", cell.gamma}, {"error", cell.error}});
  rep["failures"] = failures;
  out.write_json("report.json", rep);
  out.manifest(c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  std::cout << d.cells.size() << " cells, " << d.soundness_violations.size() << " soundness violations, "
            << failures.size() << " failed cells\n";
  return 0;
}

int run_constants(const RunConfig& c)
{
  const Params params = make_params(c);
  const Mesh mesh = make_mesh(c);
  Output out(c.out);
  const auto t0 = std::chrono::steady_clock::now();
  const ThresholdReport t = threshold_report(mesh, params);
  out.write_json("constants.json", to_json(t));
  out.manifest(c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  std::cout << std::left << std::setw(14) << "mesh" << t.mesh << '\n'
            << std::setw(14) << "c_Omega" << format_double(t.c_omega) << '\n'
            << std::setw(14) << "delta_gamma" << format_double(t.delta_gamma) << '\n'
            << std::setw(14) << "kappa_gamma" << format_double(t.kappa_gamma) << '\n'
            << std::setw(14) << "c_trace" << format_double(t.c_trace) << '\n'
            << std::setw(14) << "gamma_kappa" << (t.gamma_kappa ? format_double(*t.gamma_kappa) : "undefined")
            << '\n';
  return 0;
}

int run_verify(const RunConfig& c)
{
  const Params params = make_params(c);
  const Mesh mesh = make_mesh(c);
  SolveOptions opts = make_solve_options(c);
  if (c.seeds == 0) throw ValidationError("--seeds must be >= 1");
  Output out(c.out);
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<SphereField> fields;
  json runs = json::array();
  bool all_converged = true;
  for (std::size_t s = 0; s < c.seeds; ++s) {
    opts.rng_seed = c.seed + s;
    auto r = minimize_sphere_field(mesh, params, opts);
    all_converged = all_converged && r.report.converged;
    const SphereField canon = canonicalize(mesh, r.field).field;
    const PhaseField phi = lift_phase(canon);
    const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
    json run;
    run["seed"] = opts.rng_seed;
    run["report"] = to_json(r.report);
    run["meridian_deviation"] = meridian_deviation(mesh, r.field);
    for (auto [name, axis] : {std::pair{"e1", Axis::e1}, {"e2", Axis::e2}, {"e3", Axis::e3}}) {
      const auto sc = sign_consistency(mesh, canon, axis);
      run["sign_" + std::string(name)] = {
          {"constant_sign", sc.constant_sign}, {"vanishes", sc.vanishes}, {"min_abs", sc.min_abs}};
    }
    run["phase_range"] = {*lo, *hi};
    if (mesh.kind() == MeshKind::disk) {
      run["radial_deviation"] = radial_deviation(mesh, phi);
      const RadialSolution rs = solve_radial_bvp(params, mesh.disk().radius, 2);
      run["radial_mismatch"] = radial_mismatch(mesh, phi, rs.profile);
    }
    runs.push_back(run);
    fields.push_back(std::move(r.field));
  }
  json rep;
  rep["params"] = to_json(params);
  rep["mesh"] = describe(mesh);
  rep["runs"] = runs;
  if (fields.size() >= 2) rep["uniqueness_distance"] = uniqueness_check(mesh, fields);
  out.write_json("verify.json", rep);
  out.manifest(c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  std::cout << fields.size() << " solves";
  if (fields.size() >= 2) std::cout << ", uniqueness distance " << format_double(rep["uniqueness_distance"]);
  std::cout << '\n';
  return all_converged ? 0 : 3;
}

void add_common(CLI::App& app, Flags& f)
{
  app.add_option("--config", f.config, "flat TOML config file");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--format", f.format, "csv or json");
  app.add_option("--seed", f.seed, "base RNG seed");
  app.add_option("--seeds", f.seeds, "number of random starts");
  app.add_option("--jobs", f.jobs, "parallel sweep cells");
  app.add_option("--disk", f.disk, "disk of radius R");
  app.add_option("--rect", f.rect, "rectangle LX,LY")->delimiter(',')->expected(2);
  app.add_option("--R", f.radius, "ball radius (radial)");
  app.add_option("--N", f.dimension, "dimension (radial)");
  app.add_option("--nr", f.nr);
  app.add_option("--ntheta", f.ntheta);
  app.add_option("--nx", f.nx);
  app.add_option("--ny", f.ny);
  app.add_option("--kappa", f.kappa);
  app.add_option("--kappa2", f.kappa2, "kappa^2; wins over --kappa");
  app.add_option("--gamma", f.gamma);
  app.add_option("--max-iter", f.max_iterations);
  app.add_option("--rtol", f.rtol);
  app.add_option("--atol", f.atol);
  app.add_option("--init", f.init, "constant-e3 | constant-inplane | random-uniform | radial-seed | file");
  app.add_option("--init-file", f.init_file, "binary field for --init file");
  app.add_option("--dr", f.dr, "radial step");
  app.add_option("--mode", f.mode, "sweep mode: radial or 2d");
  app.add_option("--kappas", f.kappas, "sweep kappa grid")->delimiter(',');
  app.add_option("--gammas", f.gammas, "sweep gamma grid")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"s2lab: minimizers of an anisotropic S^2-valued energy with boundary penalization"};
  app.require_subcommand(1);
  Flags flags;
  for (const char* name : {"solve2d", "radial", "sweep", "constants", "verify"}) add_common(*app.add_subcommand(name), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    if (flags.config) apply_file(toml::parse_file(*flags.config), cfg);
    apply_flags(flags, cfg);
    check_format(cfg);
    if (cfg.command == "solve2d") return run_solve2d(cfg);
    if (cfg.command == "radial") return run_radial(cfg);
    if (cfg.command == "sweep") return run_sweep(cfg);
    if (cfg.command == "constants") return run_constants(cfg);
    return run_verify(cfg);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
