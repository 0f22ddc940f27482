#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "augip/ipm.hpp"
#include "augip/mps.hpp"

using nlohmann::json;

namespace {

const char* status_name(augip::SolveStatus s) {
  switch (s) {
    case augip::SolveStatus::Optimal:
      return "optimal";
    case augip::SolveStatus::MaxIters:
      return "max-iters";
    case augip::SolveStatus::NumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse LP solver: inexact interior point on the augmented KKT "
               "system with SQMR and a multilevel indefinite LDL' preconditioner"};

  std::string mps_path;
  std::string stats_json;
  std::string dump_mm;
  bool verbose = false;
  augip::IpmParams params;
  double tol = 1e-8;

  app.add_option("mps-file", mps_path, "LP instance in MPS format")->required();
  app.add_option("--tol", tol, "convergence tolerance (primal, dual, gap)");
  app.add_option("--sigma", params.sigma, "centering factor in (0,1)");
  app.add_option("--eta-max", params.eta_max, "largest SQMR relative residual");
  app.add_option("--eta-min", params.eta_min, "smallest scheduled SQMR relative residual");
  app.add_option("--kappa", params.factor_params.kappa,
                 "bound on the inverse-factor norm estimate (> 1)");
  app.add_option("--droptol-l", params.factor_params.tau_L, "drop tolerance for L");
  app.add_option("--droptol-s", params.factor_params.tau_S,
                 "drop tolerance for Schur complements");
  app.add_option("--max-levels", params.factor_params.max_levels,
                 "maximum factorization levels");
  app.add_option("--dense-threshold", params.factor_params.final_dense_threshold,
                 "order at or below which the remainder is factored densely");
  app.add_option("--max-iters", params.max_iters, "IPM iteration limit");
  app.add_option("--delta-p", params.delta_p, "regularization of the (1,1) block");
  app.add_option("--delta-d", params.delta_d, "regularization added to X^{-1}Z");
  app.add_option("--stats-json", stats_json, "write a JSON run report here");
  app.add_option("--dump-mm", dump_mm,
                 "dump first-step factorization levels as Matrix Market files");
  app.add_flag("--verbose", verbose, "per-iteration output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (params.factor_params.kappa <= 1.0) {
    std::cerr << "error: --kappa must exceed 1\n";
    return 1;
  }
  if (params.sigma <= 0.0 || params.sigma >= 1.0) {
    std::cerr << "error: --sigma must lie in (0,1)\n";
    return 1;
  }
  params.tol_p = params.tol_d = params.tol_gap = tol;
  params.factor_params.debug_dump_dir = dump_mm;

  std::ifstream in(mps_path);
  if (!in) {
    std::cerr << "error: cannot open '" << mps_path << "'\n";
    return 1;
  }

  augip::LpModel model;
  augip::StandardFormLP lp;
  augip::VarMap varmap;
  try {
    model = augip::parse_mps(in);
    std::tie(lp, varmap) = augip::to_standard_form(model);
  } catch (const std::exception& e) {
    std::cerr << "error: " << mps_path << ": " << e.what() << "\n";
    return 1;
  }
  for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";

  std::string instance = model.name.empty()
                             ? std::filesystem::path(mps_path).stem().string()
                             : model.name;

  auto t0 = std::chrono::steady_clock::now();
  augip::Solution sol = augip::ipm_solve(lp, params);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();

  double objective = sol.objective + varmap.objective_constant;
  long long total_sqmr = 0;
  double fill_sum = 0.0;
  for (const auto& l : sol.logs) {
    total_sqmr += l.sqmr_iters;
    fill_sum += l.fill_ratio;
  }
  double fill_avg = sol.logs.empty() ? 0.0 : fill_sum / sol.logs.size();

  if (verbose) {
    std::printf("%4s %12s %12s %12s %12s %9s %6s %4s %8s\n", "it", "mu", "rp",
                "rd", "gap", "eta", "sqmr", "rslv", "fill");
    for (const auto& l : sol.logs)
      std::printf("%4d %12.4e %12.4e %12.4e %12.4e %9.2e %6d %4d %8.2f\n", l.k,
                  l.mu, l.rp, l.rd, l.gap, l.eta, l.sqmr_iters, l.resolves,
                  l.fill_ratio);
  }
  std::printf("instance    : %s\n", instance.c_str());
  std::printf("size        : %d rows, %d cols, %d nonzeros\n", lp.A.nrows,
              lp.A.ncols, lp.A.nnz());
  std::printf("status      : %s\n", status_name(sol.status));
  std::printf("objective   : %.10g\n", objective);
  std::printf("iterations  : %zu\n", sol.logs.size());
  std::printf("sqmr total  : %lld\n", total_sqmr);
  std::printf("fill (avg)  : %.3f\n", fill_avg);
  std::printf("wall time   : %.3fs\n", wall);

  if (!stats_json.empty()) {
    json report;
    report["instance"] = instance;
    report["rows"] = lp.A.nrows;
    report["cols"] = lp.A.ncols;
    report["nnz_a"] = lp.A.nnz();
    report["status"] = status_name(sol.status);
    report["objective"] = objective;
    report["wall_seconds"] = wall;
    report["iterations"] = json::array();
    for (const auto& l : sol.logs) {
      report["iterations"].push_back({{"k", l.k},
                                      {"mu", l.mu},
                                      {"rp", l.rp},
                                      {"rd", l.rd},
                                      {"gap", l.gap},
                                      {"eta", l.eta},
                                      {"sqmr_iters", l.sqmr_iters},
                                      {"resolves", l.resolves},
                                      {"fill_ratio", l.fill_ratio},
                                      {"t_factor", l.t_factor},
                                      {"t_solve", l.t_solve}});
    }
    report["totals"] = {{"sqmr_iters", total_sqmr}, {"fill_ratio_avg", fill_avg}};
    std::ofstream os(stats_json);
    if (!os) {
      std::cerr << "error: cannot write '" << stats_json << "'\n";
      return 1;
    }
    os << report.dump(2) << "\n";
  }

  switch (sol.status) {
    case augip::SolveStatus::Optimal:
      return 0;
    case augip::SolveStatus::MaxIters:
      return 2;
    case augip::SolveStatus::NumericalFailure:
      return 3;
  }
  return 3;
}
