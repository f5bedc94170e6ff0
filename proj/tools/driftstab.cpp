#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "driftstab/analysis.hpp"
#include "driftstab/config.hpp"
#include "driftstab/csv.hpp"
#include "driftstab/drift_lab.hpp"
#include "driftstab/errors.hpp"

namespace {

using namespace driftstab;

constexpr int kExitOk = 0;
constexpr int kExitFailedCheck = 1;
constexpr int kExitInputError = 2;

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) {
    throw InputError("cannot open output file: " + path);
  }
  return os;
}

void print_condition_report(const ConditionReport& rep, std::ostream& os) {
  auto row = [&](const char* name, double value, const char* rel, bool ok) {
    os << "  " << name << " = " << csv::f17(value) << "  (" << rel << ")  "
       << (ok ? "ok" : "FAIL") << "\n";
  };
  os << "conditions (K=" << rep.K << ", m=" << rep.m
     << (rep.lattice_given ? ", lattice values" : ", best-case over lattices")
     << "):\n";
  row("capacity margin log2(K)p - log2|a|", rep.capacity_margin, "> 0",
      rep.capacity_ok);
  row("rbdd2 margin alpha - |a|2^-R'", rep.rbdd2_margin, "> 0", rep.rbdd2_ok);
  row("rbdd3 value alpha(|a|+delta)^(1/p-1)", rep.rbdd3_value, "< 1",
      rep.rbdd3_ok);
  row("moment value |a|^m(1-p+p/(2^R-1)^m)", rep.moment_value, "< 1",
      rep.moment_ok);
  row("minero value |a|^m(1-p+p/2^mR)", rep.minero_value, "< 1",
      rep.minero_ok);
}

void write_condition_csv(const ConditionReport& rep, std::ostream& os,
                         const std::string& hash) {
  os << "# config_hash=" << hash << "\n";
  os << "name,value,ok\n";
  os << "capacity_margin," << csv::f17(rep.capacity_margin) << ','
     << rep.capacity_ok << "\n";
  os << "rbdd2_margin," << csv::f17(rep.rbdd2_margin) << ',' << rep.rbdd2_ok
     << "\n";
  os << "rbdd3_value," << csv::f17(rep.rbdd3_value) << ',' << rep.rbdd3_ok
     << "\n";
  os << "moment_value," << csv::f17(rep.moment_value) << ',' << rep.moment_ok
     << "\n";
  os << "minero_value," << csv::f17(rep.minero_value) << ',' << rep.minero_ok
     << "\n";
}

int default_jobs() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driftstab: erasure-channel stabilization experiments and "
               "finite-chain drift verification"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string chain_path, spec_path;
  bool strict = false;
  int jobs = default_jobs();
  int m_override = -1;
  long long samples = 100000;
  int k_max_override = -1;
  long long delta0_override = std::numeric_limits<long long>::min();
  long long T_override = -1;
  std::string grid_str = "8,12,15,18,21";
  double b0 = 0.1;
  double fprime = 32.0;
  double diag_tol = 0.05;
  int horizon = 6;
  double synth_a = 2.5, synth_p = 0.9;
  int synth_K = 0, synth_B = 2, synth_m = 2;

  auto* c_check = app.add_subcommand("check", "evaluate stability conditions");
  c_check->add_option("--config", config_path, "experiment config file")
      ->required();
  c_check->add_option("--out", out_path, "CSV output path");
  c_check->add_option("-m", m_override, "moment order (default run.m)");
  c_check->add_flag("--strict", strict, "exit 1 when a condition fails");

  auto* c_synth =
      app.add_subcommand("synth", "synthesize on-lattice zoom gains");
  c_synth->add_option("--a", synth_a, "open-loop gain")->required();
  c_synth->add_option("--p", synth_p, "channel success probability")
      ->required();
  c_synth->add_option("--K", synth_K,
                      "granular bin count (default: from the m-th moment "
                      "feasibility bound)");
  c_synth->add_option("--B", synth_B, "zoom-out lattice steps");
  c_synth->add_option("-m", synth_m, "moment order for the default K");
  c_synth->add_option("--out", out_path, "write a [quantizer] section here");

  auto* c_sim = app.add_subcommand("simulate", "run one trajectory, emit CSV");
  c_sim->add_option("--config", config_path)->required();
  c_sim->add_option("--out", out_path, "CSV path (default: stdout)");
  c_sim->add_option("--T", T_override, "steps (default run.T)");

  auto* c_stop = app.add_subcommand(
      "stoptimes", "inter-stop interval tail versus the analytic sandwich");
  c_stop->add_option("--config", config_path)->required();
  c_stop->add_option("--out", out_path, "CSV output path");
  c_stop->add_option("--samples", samples, "number of sampled intervals");
  c_stop->add_option("--kmax", k_max_override, "largest k (default run.k_max)");
  c_stop->add_option("--delta0-idx", delta0_override,
                     "lattice index of Delta_0 (default run.delta0_idx)");
  c_stop->add_option("--jobs", jobs, "worker threads");
  c_stop->add_flag("--strict", strict, "exit 1 when the sandwich fails");

  auto* c_mom = app.add_subcommand(
      "moments", "running time-averages of |x|^m across trajectories");
  c_mom->add_option("--config", config_path)->required();
  c_mom->add_option("--out", out_path, "CSV output path");
  c_mom->add_option("--diag-tol", diag_tol, "half-sample diagnostic bound");
  c_mom->add_option("--jobs", jobs, "worker threads");
  c_mom->add_flag("--strict", strict,
                  "exit 1 when any trajectory fails the diagnostic");

  auto* c_drift = app.add_subcommand(
      "drift", "Monte-Carlo V0 drift at stopping times over a Delta_0 grid");
  c_drift->add_option("--config", config_path)->required();
  c_drift->add_option("--out", out_path, "CSV output path");
  c_drift->add_option("--grid", grid_str, "comma-separated lattice indices");
  c_drift->add_option("--samples", samples, "samples per grid point");
  c_drift->add_option("--b0", b0, "required drift bound above the threshold");
  c_drift->add_option("--fprime", fprime, "small-set threshold F'");
  c_drift->add_option("--jobs", jobs, "worker threads");
  c_drift->add_flag("--strict", strict,
                    "exit 1 when drift > -b0 above the threshold");

  auto* c_lab = app.add_subcommand(
      "driftlab", "exact drift verification on a finite chain");
  c_lab->add_option("--chain", chain_path, "row-stochastic matrix file")
      ->required();
  c_lab->add_option("--spec", spec_path, "drift spec file")->required();
  c_lab->add_option("--out", out_path, "CSV output path");
  c_lab->add_option("--horizon", horizon, "supermartingale enumeration depth");
  c_lab->add_flag("--strict", strict, "exit 1 when a check fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (c_check->parsed()) {
      const auto cfg = parse_experiment_config_file(config_path);
      const int m = m_override > 0 ? m_override : cfg.run.m;
      ConditionReport rep;
      std::string hash = "unresolved";
      try {
        const auto res = resolve(cfg);
        rep = check_conditions(res.sim.plant.a, res.sim.plant.b,
                               res.sim.chan.p, res.sim.quant, m);
        hash = res.hash;
      } catch (const SynthesisError& e) {
        std::cout << "lattice synthesis failed: " << e.what() << "\n";
        rep = check_conditions_rate_only(cfg.plant.a, cfg.plant.b,
                                         cfg.channel_p, cfg.K, m);
      }
      print_condition_report(rep, std::cout);
      if (!out_path.empty()) {
        auto os = open_out(out_path);
        write_condition_csv(rep, os, hash);
      }
      return (strict && !rep.all_ok()) ? kExitFailedCheck : kExitOk;
    }

    if (c_synth->parsed()) {
      int K = synth_K;
      if (K == 0) {
        const int bins = min_bins_for_second_moment(synth_a, synth_p);
        K = bins - 1;
        if (K % 2 != 0) ++K;  // quantizer needs an even granular count
        std::cout << "minimal bin count K+1 = " << bins << " -> K = " << K
                  << "\n";
      }
      const QuantizerConfig q = snap_gains_to_lattice(synth_a, synth_p, K, synth_B);
      std::cout << "synthesized lattice: s=" << csv::f17(q.s)
                << " A_exp=" << q.A_exp << " B_exp=" << q.B_exp
                << " L_idx=" << q.L_idx << "\n"
                << "  alpha = " << csv::f17(q.alpha()) << "\n"
                << "  |a|+delta = " << csv::f17(q.zoom_out_gain())
                << "  (delta = "
                << csv::f17(q.zoom_out_gain() - std::fabs(synth_a)) << ")\n"
                << "  rbdd3 value = "
                << csv::f17(q.alpha() *
                            std::pow(q.zoom_out_gain(), 1.0 / synth_p - 1.0))
                << "\n";
      if (!out_path.empty()) {
        auto os = open_out(out_path);
        os << "[quantizer]\n"
           << "K = " << q.K << "\n"
           << "s = " << csv::f17(q.s) << "\n"
           << "A_exp = " << q.A_exp << "\n"
           << "B_exp = " << q.B_exp << "\n"
           << "L_idx = " << q.L_idx << "\n";
      }
      return kExitOk;
    }

    if (c_sim->parsed()) {
      const auto res = resolve(parse_experiment_config_file(config_path));
      const long long T = T_override > 0 ? T_override : res.run.T;
      const Trajectory traj =
          simulate(res.sim, T, RandomStream{res.run.seed, 0},
                   res.run.delta0_idx);
      const std::string comment = "config_hash=" + res.hash;
      if (out_path.empty()) {
        write_trajectory_csv(std::cout, traj, comment);
      } else {
        auto os = open_out(out_path);
        write_trajectory_csv(os, traj, comment);
        std::cout << "wrote " << traj.records.size() << " steps, "
                  << traj.stop_times.size() << " stopping times -> "
                  << out_path << "\n";
      }
      return kExitOk;
    }

    if (c_stop->parsed()) {
      const auto res = resolve(parse_experiment_config_file(config_path));
      const int k_max =
          k_max_override > 0 ? k_max_override : res.run.k_max;
      const long long d0 =
          delta0_override != std::numeric_limits<long long>::min()
              ? delta0_override
              : res.run.delta0_idx;
      const TailEstimate est = estimate_stopping_tail(
          res.sim, d0, samples, k_max, res.run.seed, jobs);
      std::cout << "inter-stop tail at Delta_0 = " << csv::f17(est.delta0)
                << " (idx " << est.delta0_idx << "), " << est.n_samples
                << " samples\n";
      std::cout << "  k       lower   empirical       ci_lo       ci_hi     "
                   "  upper\n";
      for (const TailRow& r : est.rows) {
        std::printf("%3d %11.4e %11.4e %11.4e %11.4e %11.4e %s\n", r.k,
                    r.lower, r.empirical, r.ci_lo, r.ci_hi, r.upper,
                    (r.lower_ok && r.upper_ok) ? "ok" : "FAIL");
      }
      std::cout << (est.sandwich_ok ? "sandwich holds" : "sandwich FAILS")
                << "\n";
      if (!out_path.empty()) {
        auto os = open_out(out_path);
        os << "# config_hash=" << res.hash << "\n";
        os << "k,lower,empirical,ci_lo,ci_hi,upper\n";
        for (const TailRow& r : est.rows) {
          os << r.k << ',' << csv::f17(r.lower) << ',' << csv::f17(r.empirical)
             << ',' << csv::f17(r.ci_lo) << ',' << csv::f17(r.ci_hi) << ','
             << csv::f17(r.upper) << "\n";
        }
      }
      return (strict && !est.sandwich_ok) ? kExitFailedCheck : kExitOk;
    }

    if (c_mom->parsed()) {
      const auto res = resolve(parse_experiment_config_file(config_path));
      const MomentEstimate est = estimate_moment(
          res.sim, res.run.m, res.run.T, res.run.n_traj, res.run.seed,
          res.run.delta0_idx, diag_tol, jobs);
      std::cout << "time-averages of |x|^" << est.m << " over " << est.T
                << " steps, " << est.per_traj.size() << " trajectories\n";
      bool all_ok = true;
      for (std::size_t j = 0; j < est.per_traj.size(); ++j) {
        const MomentTrajectory& tr = est.per_traj[j];
        if (tr.escaped) {
          std::printf("  traj %2zu: NUMERIC ESCAPE at step %lld\n", j,
                      tr.escape_step);
          all_ok = false;
          continue;
        }
        std::printf("  traj %2zu: half=%.6g full=%.6g diag=%.3f%% %s\n", j,
                    tr.avg_half, tr.avg_full, 100.0 * tr.diagnostic,
                    tr.converged ? "ok" : "FAIL");
        all_ok = all_ok && tr.converged;
      }
      std::cout << "aggregate = " << csv::f17(est.aggregate) << "\n";
      if (!out_path.empty()) {
        auto os = open_out(out_path);
        os << "# config_hash=" << res.hash
           << " aggregate=" << csv::f17(est.aggregate) << "\n";
        os << "traj,avg_half,avg_full,diagnostic,converged,escaped\n";
        for (std::size_t j = 0; j < est.per_traj.size(); ++j) {
          const MomentTrajectory& tr = est.per_traj[j];
          os << j << ',' << csv::f17(tr.avg_half) << ','
             << csv::f17(tr.avg_full) << ',' << csv::f17(tr.diagnostic) << ','
             << tr.converged << ',' << tr.escaped << "\n";
        }
      }
      return (strict && !all_ok) ? kExitFailedCheck : kExitOk;
    }

    if (c_drift->parsed()) {
      const auto res = resolve(parse_experiment_config_file(config_path));
      std::vector<long long> grid;
      std::stringstream gs(grid_str);
      std::string tok;
      while (std::getline(gs, tok, ',')) {
        if (!tok.empty()) grid.push_back(std::stoll(tok));
      }
      if (grid.empty()) {
        throw InputError("drift: empty Delta_0 grid");
      }
      const DriftEstimate est =
          estimate_drift_at_stops(res.sim, samples, grid, res.run.seed, jobs);
      std::cout << "V0 = log(Delta^2) drift at stops; analytic large-Delta_0 "
                   "limit = "
                << csv::f17(est.analytic_limit) << "\n";
      bool all_ok = true;
      for (const DriftRow& r : est.rows) {
        const bool above = r.delta0 > fprime;
        const bool ok = !above || r.drift <= -b0;
        all_ok = all_ok && ok;
        std::printf(
            "  idx=%4lld Delta0=%12.5g drift=%+.5f ci=[%+.5f,%+.5f] E[T]=%.4f"
            " %s\n",
            r.delta0_idx, r.delta0, r.drift, r.ci_lo, r.ci_hi,
            r.mean_interval,
            above ? (ok ? "ok" : "FAIL") : "(below F', reported only)");
      }
      if (!out_path.empty()) {
        auto os = open_out(out_path);
        os << "# config_hash=" << res.hash
           << " analytic_limit=" << csv::f17(est.analytic_limit) << "\n";
        os << "delta0_idx,delta0,n,drift,ci_lo,ci_hi,mean_interval\n";
        for (const DriftRow& r : est.rows) {
          os << r.delta0_idx << ',' << csv::f17(r.delta0) << ',' << r.n << ','
             << csv::f17(r.drift) << ',' << csv::f17(r.ci_lo) << ','
             << csv::f17(r.ci_hi) << ',' << csv::f17(r.mean_interval) << "\n";
        }
      }
      return (strict && !all_ok) ? kExitFailedCheck : kExitOk;
    }

    if (c_lab->parsed()) {
      using namespace driftstab::driftlab;
      const FiniteChain chain = load_chain_file(chain_path);
      const DriftSpec spec = load_drift_spec_file(spec_path, chain.n());
      const DriftReport rep = verify_random_time_drift(chain, spec);
      const SupermartingaleReport sm =
          supermartingale_check(chain, spec, horizon);
      const PiFBoundReport pf = verify_pi_f_bound(chain, spec);

      std::cout << "random-time drift verification over " << chain.n()
                << " states\n";
      for (const DriftStateRow& r : rep.rows) {
        std::printf(
            "  state %2d%s V=%.4g E[V_next]=%.4g E[block f]=%.4g E[T]=%.4g "
            "ineq1 %s (%+.4g) ineq2 %s (%+.4g)\n",
            r.state, r.in_C ? " [C]" : "    ", r.V, r.EV_next, r.Ef_block,
            r.ET_block, r.ineq1_ok ? "ok" : "FAIL", r.ineq1_margin,
            r.ineq2_ok ? "ok" : "FAIL", r.ineq2_margin);
      }
      std::cout << "  minimal b on C: " << csv::f17(rep.min_b)
                << "; sup E[block length]: " << csv::f17(rep.max_ET) << "\n";
      std::cout << "supermartingale check (" << sm.prefixes_checked
                << " prefixes): f-sequence "
                << (sm.ok_f ? "ok" : "VIOLATED") << ", delta-sequence "
                << (sm.ok_delta ? "ok" : "VIOLATED") << "\n";
      for (const auto& v : sm.violations) {
        std::printf("    violation(%c) start=%d state=%d t=%lld z=%d "
                    "drift=%+.4g\n",
                    v.flavor, v.start, v.state, v.t, v.z, v.drift);
      }
      std::cout << "pi(f) = " << csv::f17(pf.pi_f) << " <= b_f = "
                << csv::f17(pf.b_f) << " : " << (pf.ok ? "ok" : "FAIL")
                << " (pi(C) = " << csv::f17(pf.pi_C) << ")\n";

      if (!out_path.empty()) {
        auto os = open_out(out_path);
        os << "# min_b=" << csv::f17(rep.min_b)
           << " pi_f=" << csv::f17(pf.pi_f) << " b_f=" << csv::f17(pf.b_f)
           << "\n";
        os << "state,in_C,V,delta,EV_next,Ef_block,ET_block,ineq1_margin,"
              "ineq1_ok,ineq2_margin,ineq2_ok\n";
        for (const DriftStateRow& r : rep.rows) {
          os << r.state << ',' << r.in_C << ',' << csv::f17(r.V) << ','
             << csv::f17(r.delta) << ',' << csv::f17(r.EV_next) << ','
             << csv::f17(r.Ef_block) << ',' << csv::f17(r.ET_block) << ','
             << csv::f17(r.ineq1_margin) << ',' << r.ineq1_ok << ','
             << csv::f17(r.ineq2_margin) << ',' << r.ineq2_ok << "\n";
        }
      }
      const bool all_ok =
          rep.ineq1_ok_all && rep.ineq2_ok_all && sm.ok_f && sm.ok_delta &&
          pf.ok;
      return (strict && !all_ok) ? kExitFailedCheck : kExitOk;
    }
  } catch (const SynthesisError& e) {
    std::cerr << e.what() << "\n";
    return kExitFailedCheck;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
