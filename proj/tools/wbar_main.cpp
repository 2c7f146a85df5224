// wbar: dataset generation, barycenter solver runs, theorem-driven planning,
// head-to-head comparisons and evaluation on a shared 1-D grid.
//
// Exit codes: 0 ok, 2 bad arguments, 3 solver failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wbar/geometry.hpp"
#include "wbar/io.hpp"
#include "wbar/measures.hpp"
#include "wbar/planner.hpp"
#include "wbar/sa.hpp"
#include "wbar/saa.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wbar;

namespace {

struct GridOpt {
  double lo = -5.0, hi = 5.0;
  std::size_t n = 100;
};

GridOpt parse_grid(const std::string& text) {
  GridOpt g;
  const auto a = text.find(':');
  const auto b = text.rfind(':');
  if (a == std::string::npos || b == a)
    throw CLI::ValidationError("--grid expects lo:hi:n");
  g.lo = std::stod(text.substr(0, a));
  g.hi = std::stod(text.substr(a + 1, b - a - 1));
  g.n = std::stoul(text.substr(b + 1));
  return g;
}

void parse_range(const std::string& text, double& lo, double& hi) {
  const auto c = text.find(':');
  if (c == std::string::npos)
    throw CLI::ValidationError("range expects lo:hi");
  lo = std::stod(text.substr(0, c));
  hi = std::stod(text.substr(c + 1));
}

struct Dataset {
  measures::GridSpec grid;
  double rho = 0.0;
  std::vector<Histogram> measures_list;
  std::vector<double> means, stds;
  measures::GaussianFamily family;
};

json grid_json(const measures::GridSpec& g) {
  return json{{"lo", g.lo}, {"hi", g.hi}, {"n", g.n}};
}

json family_json(const measures::GaussianFamily& f) {
  return json{{"mean_lo", f.mean_lo}, {"mean_hi", f.mean_hi},
              {"std_lo", f.std_lo},   {"std_hi", f.std_hi},
              {"count", f.count},     {"seed", f.seed}};
}

Dataset generate_dataset(const GridOpt& gopt,
                         const measures::GaussianFamily& fam, double rho) {
  Dataset d;
  d.grid = measures::GridSpec{gopt.lo, gopt.hi, gopt.n};
  d.grid.validate();
  d.rho = rho > 0.0 ? rho : measures::default_rho(d.grid.n);
  d.family = fam;
  auto sampled = measures::sample_truncated_gaussians(fam, d.grid, d.rho);
  d.measures_list = std::move(sampled.histograms);
  d.means = std::move(sampled.means);
  d.stds = std::move(sampled.stds);
  return d;
}

void write_dataset(const Dataset& d, const fs::path& dir) {
  fs::create_directories(dir);
  io::write_file((dir / "measures.csv").string(),
                 io::measures_to_csv(d.measures_list));
  json meta;
  meta["grid"] = grid_json(d.grid);
  meta["family"] = family_json(d.family);
  meta["rho"] = d.rho;
  meta["means"] = d.means;
  meta["stds"] = d.stds;
  meta["created_by"] = "wbar gen";
  io::write_file((dir / "meta.json").string(), meta.dump(2) + "\n");
}

Dataset load_dataset(const fs::path& dir) {
  Dataset d;
  const json meta = json::parse(io::read_file((dir / "meta.json").string()));
  d.grid.lo = meta.at("grid").at("lo").get<double>();
  d.grid.hi = meta.at("grid").at("hi").get<double>();
  d.grid.n = meta.at("grid").at("n").get<std::size_t>();
  d.rho = meta.at("rho").get<double>();
  d.means = meta.at("means").get<std::vector<double>>();
  d.stds = meta.at("stds").get<std::vector<double>>();
  const auto& f = meta.at("family");
  d.family.mean_lo = f.at("mean_lo").get<double>();
  d.family.mean_hi = f.at("mean_hi").get<double>();
  d.family.std_lo = f.at("std_lo").get<double>();
  d.family.std_hi = f.at("std_hi").get<double>();
  d.family.count = f.at("count").get<std::size_t>();
  d.family.seed = f.at("seed").get<std::uint64_t>();
  d.measures_list =
      io::measures_from_csv(io::read_file((dir / "measures.csv").string()));
  return d;
}

Histogram dataset_truth(const Dataset& d) {
  return measures::true_gaussian_barycenter(d.means, d.stds, d.grid, d.rho);
}

/// Cost in normalized units (max entry 1); the scale goes into metadata.
std::pair<CostMatrix, double> normalized_cost(const measures::GridSpec& grid) {
  auto raw = measures::squared_distance_cost(grid);
  const double scale = raw.max_entry();
  std::vector<double> e = raw.entries();
  for (double& x : e) x /= scale;
  return {CostMatrix(grid.n, std::move(e)), scale};
}

struct RunParams {
  std::string solver = "psgd";
  double eps = 0.1;
  double alpha = 0.05;
  double gamma = 0.0;   // 0 = solver default
  double lambda = 0.0;  // 0 = planner default (penalized-mp)
  double sinkhorn_tol = 1e-4;
  double eps_prime = 0.0;  // 0 = planner default
  std::size_t record_every = 0;
  std::size_t max_outer = 300;
  std::uint64_t seed = 0;
};

json planner_echo(const planner::PlannerOutput& out) {
  json j;
  j["gamma"] = out.gamma;
  j["iterations"] = out.iterations;
  j["sample_size"] = out.sample_size;
  j["eps_prime"] = out.eps_prime;
  j["lambda"] = out.lambda;
  j["delta"] = out.delta;
  j["conf_radius_l2"] = out.conf_radius_l2;
  j["r2"] = out.r2;
  j["convention"] = out.convention;
  return j;
}

struct RunOutput {
  json result;
  std::vector<sa::RunRecord> trace;
};

RunOutput execute_solver(const Dataset& data, const RunParams& rp) {
  const auto [C, cost_scale] = normalized_cost(data.grid);
  const Histogram truth = dataset_truth(data);
  const std::size_t m = data.measures_list.size();
  const std::size_t n = data.grid.n;

  sa::EvalHooks hooks;
  hooks.truth = &truth;
  hooks.grid = &data.grid;

  planner::PlannerInput pin;
  pin.n = n;
  pin.eps = rp.eps;
  pin.alpha = rp.alpha;
  pin.c_inf = 1.0;  // normalized cost units

  RunOutput out;
  json& res = out.result;
  res["solver"] = rp.solver;
  res["n"] = n;
  res["m"] = m;
  res["seed"] = rp.seed;
  res["grid"] = grid_json(data.grid);
  res["family"] = family_json(data.family);
  json params;
  params["eps"] = rp.eps;
  params["alpha"] = rp.alpha;
  params["cost_scale"] = cost_scale;
  params["rho"] = data.rho;

  const auto t0 = std::chrono::steady_clock::now();

  if (rp.solver == "psgd" || rp.solver == "smd") {
    sa::SaConfig cfg;
    cfg.iterations = m;
    cfg.seed = rp.seed;
    cfg.record_every =
        rp.record_every ? rp.record_every : std::max<std::size_t>(1, m / 100);
    sa::FixedStream stream(data.measures_list);
    sa::RunResult rr;
    if (rp.solver == "psgd") {
      cfg.gamma = rp.gamma > 0.0 ? rp.gamma : 0.05;
      cfg.sinkhorn_tol = rp.sinkhorn_tol;
      params["gamma"] = cfg.gamma;
      params["sinkhorn_tol"] = cfg.sinkhorn_tol;
      res["planner"] = planner_echo(planner::plan_sa_entropic(pin, cfg.gamma));
      rr = sa::run_psgd_wb(stream, C, cfg, hooks);
      params["delta_estimate"] = rr.delta_estimate;
      res["oracle_retries"] = rr.oracle_retries;
    } else {
      cfg.step_rule = sa::StepRule::md_fixed_eta;
      const auto plan = planner::plan_sa_unregularized(pin);
      res["planner"] = planner_echo(plan.sgd);
      res["planner"]["md_iterations"] = plan.md_iterations;
      res["planner"]["md_eta"] = plan.md_eta;
      rr = sa::run_smd_wb(stream, C, cfg, hooks);
      params["eta"] = rr.eta_used;
    }
    res["budget"] = {{"measures_processed", m}};
    res["final"] = rr.output.weights();
    res["final_w2_to_truth"] =
        measures::w2_distance_1d(rr.output, truth, data.grid);
    out.trace = std::move(rr.trace);
  } else if (rp.solver == "ibp") {
    const double gamma = rp.gamma > 0.0 ? rp.gamma : 0.01;
    const double eps_prime =
        rp.eps_prime > 0.0 ? rp.eps_prime
                           : planner::plan_saa_entropic(pin, gamma).eps_prime;
    saa::SaaConfig scfg{m, gamma, 0.0, eps_prime, rp.max_outer, rp.seed};
    scfg.validate();
    params["gamma"] = gamma;
    params["eps_prime"] = eps_prime;
    res["planner"] = planner_echo(planner::plan_saa_entropic(pin, gamma));
    saa::IbpOptions opts;
    opts.max_outer = rp.max_outer;
    opts.strict = false;  // budget exit with residual reporting
    opts.record_every = rp.record_every ? rp.record_every : 5;
    opts.truth = &truth;
    opts.grid = &data.grid;
    const auto ir =
        saa::run_ibp_barycenter(data.measures_list, C, gamma, eps_prime, opts);
    res["budget"] = {{"outer_iterations", ir.iterations},
                     {"measures_processed", m}};
    res["residual"] = ir.residual;
    res["value"] = ir.value;
    res["final"] = ir.barycenter.weights();
    res["final_w2_to_truth"] =
        measures::w2_distance_1d(ir.barycenter, truth, data.grid);
    out.trace = ir.trace;
  } else if (rp.solver == "penalized-mp") {
    const auto plan = planner::plan_saa_penalized(pin);
    const double lambda = rp.lambda > 0.0 ? rp.lambda : plan.lambda;
    const double eps_prime = rp.eps_prime > 0.0 ? rp.eps_prime : plan.eps_prime;
    saa::SaaConfig scfg{m, 0.0, lambda, eps_prime, rp.max_outer, rp.seed};
    scfg.validate();
    params["lambda"] = lambda;
    params["eps_prime"] = eps_prime;
    res["planner"] = planner_echo(plan);
    geometry::BregmanPenalty pen(Histogram::uniform(n));
    saa::MirrorProxOptions opts;
    opts.max_iter = rp.max_outer * 10;
    opts.strict = false;
    const auto mr = saa::run_mirror_prox(data.measures_list, C, pen, lambda,
                                         eps_prime, opts.max_iter, opts);
    res["budget"] = {{"iterations", mr.iterations},
                     {"measures_processed", m}};
    res["gap"] = mr.gap;
    res["final"] = mr.barycenter.weights();
    res["final_w2_to_truth"] =
        measures::w2_distance_1d(mr.barycenter, truth, data.grid);
    sa::RunRecord last;
    last.k = mr.iterations;
    last.iterate_avg = mr.barycenter;
    last.obj_estimate = std::numeric_limits<double>::quiet_NaN();
    last.regret_partial = std::numeric_limits<double>::quiet_NaN();
    last.dist_to_truth_w2 = res["final_w2_to_truth"].get<double>();
    last.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    out.trace.push_back(std::move(last));
  } else {
    throw std::invalid_argument("unknown solver: " + rp.solver);
  }

  res["params"] = params;
  res["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return out;
}

Dataset dataset_from_flags(const std::string& data_dir, const GridOpt& gopt,
                           measures::GaussianFamily fam, double rho,
                           std::size_t m, std::uint64_t seed) {
  if (!data_dir.empty()) return load_dataset(data_dir);
  fam.count = m;
  fam.seed = seed;
  return generate_dataset(gopt, fam, rho);
}

unsigned max_jobs() {
  if (const char* env = std::getenv("WBARYC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

int fail_with(const fs::path& out_dir, const std::exception& e) {
  json err;
  err["error"] = typeid(e).name();
  err["message"] = e.what();
  std::cerr << err.dump() << "\n";
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!ec)
      io::write_file((out_dir / "error.json").string(), err.dump(2) + "\n");
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein barycenter solvers and experiment harness"};
  app.require_subcommand(1);

  std::string grid_text = "-5:5:100";
  std::string mean_range = "-1.5:1.5";
  std::string std_range = "0.8:1.2";
  std::string out_dir;
  std::string data_dir;
  double rho = 0.0;
  std::uint64_t seed = 0;
  std::size_t m = 100;
  std::size_t n = 100;

  RunParams rp;

  auto* gen = app.add_subcommand("gen", "sample truncated Gaussian measures");
  gen->add_option("--m", m, "number of measures");
  gen->add_option("--grid", grid_text, "grid as lo:hi:n");
  gen->add_option("--mean-range", mean_range, "mean interval lo:hi");
  gen->add_option("--std-range", std_range, "stddev interval lo:hi");
  gen->add_option("--rho", rho, "simplex floor (default 1e-6/n)");
  gen->add_option("--seed", seed, "rng seed");
  gen->add_option("--out", out_dir, "output directory")->required();

  std::string pipeline = "all";
  double plan_gamma = 0.1, c_inf = 1.0;
  std::string lipschitz = "euclidean";
  std::string plan_out;
  auto* plan = app.add_subcommand("plan", "theorem-driven budget planning");
  plan->add_option("--pipeline", pipeline,
                   "sa-entropic|sa-unreg|saa-entropic|saa-penalized|all");
  plan->add_option("--n", n, "dimension");
  plan->add_option("--eps", rp.eps, "target accuracy");
  plan->add_option("--alpha", rp.alpha, "confidence level in (0,1)");
  plan->add_option("--gamma", plan_gamma, "entropic regularization");
  plan->add_option("--cinf", c_inf, "cost norm ||C||_inf");
  plan->add_option("--lipschitz", lipschitz, "euclidean|linf");
  plan->add_option("--out", plan_out, "write JSON here as well");

  auto* run = app.add_subcommand("run", "execute one solver");
  run->add_option("--solver", rp.solver, "psgd|smd|ibp|penalized-mp")
      ->required();
  run->add_option("--data", data_dir, "dataset directory from gen");
  run->add_option("--m", m, "measures when generating on the fly");
  run->add_option("--n", n, "grid points (overrides the :n of --grid)");
  run->add_option("--grid", grid_text, "grid as lo:hi:n");
  run->add_option("--mean-range", mean_range, "mean interval lo:hi");
  run->add_option("--std-range", std_range, "stddev interval lo:hi");
  run->add_option("--rho", rho, "simplex floor");
  run->add_option("--eps", rp.eps, "target accuracy (planner input)");
  run->add_option("--alpha", rp.alpha, "confidence level");
  run->add_option("--gamma", rp.gamma, "entropic regularization (normalized)");
  run->add_option("--lambda", rp.lambda, "penalty weight (penalized-mp)");
  run->add_option("--eps-prime", rp.eps_prime, "inner tolerance");
  run->add_option("--sinkhorn-tol", rp.sinkhorn_tol, "marginal tolerance");
  run->add_option("--record-every", rp.record_every, "trace cadence");
  run->add_option("--max-outer", rp.max_outer, "outer-iteration budget");
  run->add_option("--seed", seed, "rng seed");
  run->add_option("--out", out_dir, "output directory")->required();

  std::vector<std::string> solvers;
  bool log_y = true;
  auto* compare = app.add_subcommand("compare", "run several solvers");
  compare->add_option("--solver", solvers, "solver (repeatable)")
      ->required()
      ->expected(-1);
  compare->add_option("--data", data_dir, "dataset directory from gen");
  compare->add_option("--m", m, "measures when generating on the fly");
  compare->add_option("--n", n, "grid points (overrides the :n of --grid)");
  compare->add_option("--grid", grid_text, "grid as lo:hi:n");
  compare->add_option("--mean-range", mean_range, "mean interval lo:hi");
  compare->add_option("--std-range", std_range, "stddev interval lo:hi");
  compare->add_option("--rho", rho, "simplex floor");
  compare->add_option("--eps", rp.eps, "target accuracy");
  compare->add_option("--alpha", rp.alpha, "confidence level");
  compare->add_option("--gamma", rp.gamma, "entropic regularization");
  compare->add_option("--lambda", rp.lambda, "penalty weight");
  compare->add_option("--sinkhorn-tol", rp.sinkhorn_tol, "marginal tolerance");
  compare->add_option("--record-every", rp.record_every, "trace cadence");
  compare->add_option("--max-outer", rp.max_outer, "outer budget");
  compare->add_option("--seed", seed, "rng seed");
  compare->add_flag("--log-y,!--no-log-y", log_y, "log-scale chart y axis");
  compare->add_option("--out", out_dir, "output directory")->required();

  std::string hist_file;
  double eval_gamma = 0.0;
  std::string eval_out;
  auto* eval =
      app.add_subcommand("eval", "evaluate a histogram against a dataset");
  eval->add_option("--histogram", hist_file, "csv with one histogram row")
      ->required();
  eval->add_option("--data", data_dir, "dataset directory")->required();
  eval->add_option("--gamma", eval_gamma,
                   "also report the entropic objective at this gamma");
  eval->add_option("--out", eval_out, "write JSON here as well");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      const GridOpt g = parse_grid(grid_text);
      measures::GaussianFamily fam;
      parse_range(mean_range, fam.mean_lo, fam.mean_hi);
      parse_range(std_range, fam.std_lo, fam.std_hi);
      fam.count = m;
      fam.seed = seed;
      write_dataset(generate_dataset(g, fam, rho), out_dir);
      std::cout << "wrote " << (fs::path(out_dir) / "measures.csv").string()
                << "\n";
      return 0;
    }

    if (plan->parsed()) {
      planner::PlannerInput pin;
      pin.n = n;
      pin.eps = rp.eps;
      pin.alpha = rp.alpha;
      pin.c_inf = c_inf;
      pin.lipschitz_mode = lipschitz == "linf"
                               ? planner::LipschitzMode::linf
                               : planner::LipschitzMode::euclidean;
      json out;
      if (pipeline == "sa-entropic" || pipeline == "all")
        out["sa_entropic"] =
            planner_echo(planner::plan_sa_entropic(pin, plan_gamma));
      if (pipeline == "sa-unreg" || pipeline == "all") {
        const auto p = planner::plan_sa_unregularized(pin);
        out["sa_unregularized"] = planner_echo(p.sgd);
        out["sa_unregularized"]["md_iterations"] = p.md_iterations;
        out["sa_unregularized"]["md_eta"] = p.md_eta;
      }
      if (pipeline == "saa-entropic" || pipeline == "all")
        out["saa_entropic"] =
            planner_echo(planner::plan_saa_entropic(pin, plan_gamma));
      if (pipeline == "saa-penalized" || pipeline == "all")
        out["saa_penalized"] = planner_echo(planner::plan_saa_penalized(pin));
      out["complexity"] = planner::complexity_report(pin, plan_gamma);
      const std::string text = out.dump(2) + "\n";
      std::cout << text;
      if (!plan_out.empty()) io::write_file(plan_out, text);
      return 0;
    }

    if (run->parsed()) {
      GridOpt g = parse_grid(grid_text);
      if (run->count("--n")) g.n = n;
      measures::GaussianFamily fam;
      parse_range(mean_range, fam.mean_lo, fam.mean_hi);
      parse_range(std_range, fam.std_lo, fam.std_hi);
      rp.seed = seed;
      const Dataset data = dataset_from_flags(data_dir, g, fam, rho, m, seed);
      auto out = execute_solver(data, rp);
      fs::create_directories(out_dir);
      io::write_file((fs::path(out_dir) / "trace.csv").string(),
                     io::trace_to_csv(out.trace));
      io::write_file((fs::path(out_dir) / "result.json").string(),
                     out.result.dump(2) + "\n");
      io::write_file(
          (fs::path(out_dir) / "final.csv").string(),
          io::measures_to_csv({Histogram(
              out.result["final"].get<std::vector<double>>())}));
      std::cout << "final_w2_to_truth="
                << out.result["final_w2_to_truth"].get<double>() << "\n";
      return 0;
    }

    if (compare->parsed()) {
      GridOpt g = parse_grid(grid_text);
      if (compare->count("--n")) g.n = n;
      measures::GaussianFamily fam;
      parse_range(mean_range, fam.mean_lo, fam.mean_hi);
      parse_range(std_range, fam.std_lo, fam.std_hi);
      rp.seed = seed;
      const Dataset data = dataset_from_flags(data_dir, g, fam, rho, m, seed);
      fs::create_directories(out_dir);

      const unsigned cap = std::max(1u, max_jobs());
      std::vector<RunOutput> outs(solvers.size());
      std::size_t next = 0;
      while (next < solvers.size()) {
        const std::size_t batch =
            std::min<std::size_t>(cap, solvers.size() - next);
        std::vector<std::future<RunOutput>> futs;
        for (std::size_t j = 0; j < batch; ++j) {
          RunParams job = rp;
          job.solver = solvers[next + j];
          futs.push_back(std::async(std::launch::async, [&data, job] {
            return execute_solver(data, job);
          }));
        }
        for (std::size_t j = 0; j < batch; ++j) outs[next + j] = futs[j].get();
        next += batch;
      }

      std::vector<io::ReportRow> rows;
      json summary;
      for (std::size_t i = 0; i < solvers.size(); ++i) {
        const fs::path sub = fs::path(out_dir) / solvers[i];
        fs::create_directories(sub);
        io::write_file((sub / "trace.csv").string(),
                       io::trace_to_csv(outs[i].trace));
        io::write_file((sub / "result.json").string(),
                       outs[i].result.dump(2) + "\n");
        io::write_file(
            (sub / "final.csv").string(),
            io::measures_to_csv({Histogram(
                outs[i].result["final"].get<std::vector<double>>())}));
        for (const auto& rec : outs[i].trace) {
          if (!rec.dist_to_truth_w2) continue;
          rows.push_back({solvers[i], static_cast<double>(rec.k),
                          *rec.dist_to_truth_w2, rec.wall_ms});
        }
        summary[solvers[i]] = {
            {"final_w2_to_truth",
             outs[i].result["final_w2_to_truth"].get<double>()},
            {"budget", outs[i].result["budget"]},
            {"wall_ms", outs[i].result["wall_ms"]}};
      }
      const std::string report = io::report_to_csv(rows);
      io::write_file((fs::path(out_dir) / "report.csv").string(), report);
      io::write_file((fs::path(out_dir) / "chart.svg").string(),
                     io::chart_from_report_csv(report, log_y));
      io::write_file((fs::path(out_dir) / "summary.json").string(),
                     summary.dump(2) + "\n");
      std::cout << summary.dump(2) << "\n";
      return 0;
    }

    if (eval->parsed()) {
      const Dataset data = load_dataset(data_dir);
      const auto hs = io::measures_from_csv(io::read_file(hist_file));
      if (hs.empty()) throw std::invalid_argument("histogram file is empty");
      const Histogram& h = hs.front();
      const Histogram truth = dataset_truth(data);
      const auto [C, cost_scale] = normalized_cost(data.grid);

      json out;
      out["w2_to_truth"] = measures::w2_distance_1d(h, truth, data.grid);
      double acc = 0.0;
      for (const auto& q : data.measures_list)
        acc += ot::ot_exact(h, q, C).value;
      out["empirical_ot_objective"] =
          acc / static_cast<double>(data.measures_list.size());
      out["cost_scale"] = cost_scale;
      if (eval_gamma > 0.0)
        out["empirical_entropic_objective"] =
            saa::empirical_entropic_objective(h.floored(data.rho),
                                              data.measures_list, C,
                                              eval_gamma, 1e-8);
      const std::string text = out.dump(2) + "\n";
      std::cout << text;
      if (!eval_out.empty()) io::write_file(eval_out, text);
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bad arguments: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    return fail_with(out_dir, e);
  }
  return 0;
}
